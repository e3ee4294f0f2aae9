use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentSpec;
use crate::capacity::{optimum_z, Scenario};
use crate::error::{Error, Result};
use crate::packetsim::{
    expected_delivery_rate, measured_delivery_rate, measured_latency, recommended_periods, run_sim,
};
use crate::schedule::{Flow, Mode};

/// One sweep cell. Rates are for stream 1; with two streams the second row
/// acts as the interferer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub streams: usize,
    pub mode: Mode,
    pub hops: usize,
    pub z: usize,
    pub forward_bottleneck_bps: f64,
    pub reverse_bottleneck_bps: f64,
    pub capacity_bps: f64,
    pub optimum_flag: bool,
    pub sim_delivery_rate: f64,
    pub sim_latency_fwd: u64,
    pub sim_latency_rev: u64,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    streams: usize,
    mode: Mode,
    hops: usize,
    z: usize,
}

impl Cell {
    fn describe(&self) -> String {
        format!(
            "streams={} mode={} hops={} z={}",
            self.streams, self.mode, self.hops, self.z
        )
    }
}

fn run_cell(spec: &ExperimentSpec, cell: Cell) -> Result<ResultRow> {
    let scenario = Scenario {
        layout: spec.layout_for(cell.streams),
        radio: spec.radio,
        mode: cell.mode,
        z: cell.z,
        hops: cell.hops,
        phase: spec.phase,
    };
    let report = scenario.analyze()?;
    let stream = &report.streams[0];

    let n_o = cell.hops + 1;
    let trace = run_sim(cell.mode, n_o, cell.z, recommended_periods(n_o))?;
    let rate = measured_delivery_rate(&trace)?;
    let latency_fwd = measured_latency(&trace, Flow::Forward)?;
    let latency_rev = measured_latency(&trace, Flow::Reverse)?;

    let expected = expected_delivery_rate(cell.mode, cell.z);
    if rate != expected {
        return Err(Error::Consistency(format!(
            "packet simulation delivers {rate} packets/slot, expected {expected}"
        )));
    }
    let rate_f = *rate.numer() as f64 / *rate.denom() as f64;
    let factor = stream.capacity_per_timeslot_bps
        / (stream.forward_bottleneck_bps + stream.reverse_bottleneck_bps);
    if ((factor - rate_f / 2.0) / factor).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "capacity factor {factor} disagrees with half the delivery rate {rate_f}"
        )));
    }

    Ok(ResultRow {
        streams: cell.streams,
        mode: cell.mode,
        hops: cell.hops,
        z: cell.z,
        forward_bottleneck_bps: stream.forward_bottleneck_bps,
        reverse_bottleneck_bps: stream.reverse_bottleneck_bps,
        capacity_bps: stream.capacity_per_timeslot_bps,
        optimum_flag: false,
        sim_delivery_rate: rate_f,
        sim_latency_fwd: latency_fwd,
        sim_latency_rev: latency_rev,
    })
}

/// Evaluates every (streams, mode, hops, z) combination in spec order and
/// marks the best period of each (streams, mode, hops) group.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &streams in &spec.streams {
        for &mode in &spec.modes {
            for &hops in &spec.hop_counts {
                for &z in &spec.z_values {
                    cells.push(Cell {
                        streams,
                        mode,
                        hops,
                        z,
                    });
                }
            }
        }
    }

    let mut rows: Vec<ResultRow> = cells
        .par_iter()
        .map(|cell| {
            run_cell(spec, *cell).map_err(|e| match e {
                Error::Consistency(m) => Error::Consistency(format!("{}: {m}", cell.describe())),
                other => Error::Experiment(format!("{}: {other}", cell.describe())),
            })
        })
        .collect::<Result<_>>()?;

    let mut groups: BTreeMap<(usize, Mode, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups
            .entry((r.streams, r.mode, r.hops))
            .or_default()
            .push(i);
    }
    for idx in groups.values() {
        let (best_z, _) = optimum_z(idx.iter().map(|&i| rows[i].z), |z| {
            Ok(idx
                .iter()
                .map(|&i| &rows[i])
                .find(|r| r.z == z)
                .map(|r| r.capacity_bps)
                .unwrap_or(f64::NEG_INFINITY))
        })?;
        for &i in idx {
            rows[i].optimum_flag = rows[i].z == best_z;
        }
    }
    Ok(rows)
}

pub fn write_rows<W: io::Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: io::Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Capacity (Mbps) against scheduling period, one line per
/// (streams, mode, hops): the data behind a grouped bar chart.
pub fn write_plot_csv<W: io::Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut zs: Vec<usize> = rows.iter().map(|r| r.z).collect();
    zs.sort_unstable();
    zs.dedup();
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["streams".to_string(), "mode".into(), "hops".into()];
    header.extend(zs.iter().map(|z| format!("z{z}_mbps")));
    w.write_record(&header)?;

    let mut groups: BTreeMap<(usize, Mode, usize), BTreeMap<usize, f64>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.streams, r.mode, r.hops))
            .or_default()
            .insert(r.z, r.capacity_bps / 1e6);
    }
    for ((streams, mode, hops), caps) in groups {
        let mut rec = vec![streams.to_string(), mode.to_string(), hops.to_string()];
        rec.extend(
            zs.iter()
                .map(|z| caps.get(z).map_or_else(String::new, |c| format!("{c:.6}"))),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            streams: vec![1],
            hop_counts: vec![3],
            z_values: vec![2, 3, 4],
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn tr_three_hops_peaks_at_three() {
        let rows = run_sweep(&small_spec()).unwrap();
        assert_eq!(rows.len(), 6);
        let best: Vec<_> = rows.iter().filter(|r| r.optimum_flag).collect();
        assert_eq!(best.len(), 2);
        let tr = best.iter().find(|r| r.mode == Mode::Traditional).unwrap();
        assert_eq!(tr.z, 3);
        for r in &rows {
            let expected = r.mode.cycle_len(r.z) as f64;
            assert!((r.sim_delivery_rate - 2.0 / expected).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = small_spec();
        spec.z_values = vec![5];
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn plot_csv_shape() {
        let rows = run_sweep(&small_spec()).unwrap();
        let mut buf = Vec::new();
        write_plot_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "streams,mode,hops,z2_mbps,z3_mbps,z4_mbps");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,TR,3,"));
    }
}
