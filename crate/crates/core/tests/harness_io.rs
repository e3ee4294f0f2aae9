use std::fs;

use hopcap::capacity::capacity_per_timeslot;
use hopcap::harness::{read_rows, run_sweep, write_rows, ExperimentSpec};
use hopcap::schedule::Mode;
use hopcap::Error;

const HEADER: &str =
    "streams,mode,hops,z,forward_bottleneck_bps,reverse_bottleneck_bps,capacity_bps,\
optimum_flag,sim_delivery_rate,sim_latency_fwd,sim_latency_rev";

fn sweep_csv(spec: &ExperimentSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&run_sweep(spec).unwrap(), &mut buf).unwrap();
    buf
}

#[test]
fn csv_round_trip_is_exact() {
    let rows = run_sweep(&ExperimentSpec::default()).unwrap();
    let mut buf = Vec::new();
    write_rows(&rows, &mut buf).unwrap();
    let back = read_rows(buf.as_slice()).unwrap();
    assert_eq!(rows, back);
    assert_eq!(String::from_utf8(buf).unwrap().lines().next(), Some(HEADER));
}

#[test]
fn identical_specs_give_identical_bytes() {
    let spec = ExperimentSpec::default();
    assert_eq!(sweep_csv(&spec), sweep_csv(&spec));
}

#[test]
fn rows_follow_spec_order_and_formula() {
    let spec = ExperimentSpec::default();
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 64);
    let mut i = 0;
    for &streams in &spec.streams {
        for &mode in &spec.modes {
            for &hops in &spec.hop_counts {
                let group = &rows[i..i + spec.z_values.len()];
                assert_eq!(group.iter().filter(|r| r.optimum_flag).count(), 1);
                let best = group.iter().map(|r| r.capacity_bps).fold(0.0, f64::max);
                for (r, &z) in group.iter().zip(&spec.z_values) {
                    assert_eq!((r.streams, r.mode, r.hops, r.z), (streams, mode, hops, z));
                    let expected = capacity_per_timeslot(
                        mode,
                        z,
                        r.forward_bottleneck_bps,
                        r.reverse_bottleneck_bps,
                    );
                    assert!(((r.capacity_bps - expected) / expected).abs() <= 1e-9);
                    let factor = match mode {
                        Mode::Traditional => 1.0,
                        Mode::NetworkCoded => 2.0,
                    } / z as f64;
                    assert_eq!(r.sim_delivery_rate, factor);
                    assert_eq!(r.optimum_flag, r.capacity_bps == best);
                }
                i += spec.z_values.len();
            }
        }
    }
}

#[test]
fn config_file_drives_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.cfg");
    fs::write(
        &path,
        "# narrow sweep\nmodes = NC\nstreams = 2\nhop_counts = 3, 4\nz_values = 3,4\nrow_separation_m = 500\n",
    )
    .unwrap();
    let spec = ExperimentSpec::load(&path).unwrap();
    assert_eq!(spec.layout.row_separation_m, 500.0);
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.mode == Mode::NetworkCoded && r.streams == 2));

    let reparsed = ExperimentSpec::parse(&spec.to_config_string()).unwrap();
    assert_eq!(reparsed, spec);
}

#[test]
fn config_errors_carry_line_numbers() {
    match ExperimentSpec::parse("modes = TR\nz_values = 2, x\n") {
        Err(Error::Config { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(ExperimentSpec::parse("streams = 3\n")
        .and_then(|s| s.validate())
        .is_err());
    assert!(ExperimentSpec::parse("hop_counts = 6\n")
        .and_then(|s| s.validate())
        .is_err());
}
