use std::collections::BTreeMap;

use proptest::prelude::*;

use hopcap::packetsim::{recommended_periods, run_sim, SimTrace};
use hopcap::schedule::{build_schedule, Flow, Mode, ScheduleConfig};

fn destination(flow: Flow, n_o: usize) -> usize {
    match flow {
        Flow::Forward => n_o,
        Flow::Reverse => 1,
    }
}

fn check_trace(trace: &SimTrace) {
    let n_o = trace.n_o;
    let schedule = build_schedule(&ScheduleConfig::new(trace.mode, n_o, trace.z)).unwrap();

    let mut injected = BTreeMap::new();
    let mut delivered = BTreeMap::new();
    for rec in &trace.slots {
        let allowed = schedule.at(rec.slot).nodes();
        for t in &rec.transmissions {
            assert!(
                allowed.contains(&t.node),
                "slot {} node {} off schedule",
                rec.slot,
                t.node
            );
        }
        for r in &rec.receptions {
            assert_eq!(
                r.node.abs_diff(r.from),
                1,
                "reception across more than one hop"
            );
            assert!(allowed.contains(&r.from));
            assert!(
                !allowed.contains(&r.node),
                "node {} receives while scheduled to send",
                r.node
            );
        }
        for x in &rec.xors {
            assert_eq!(x.label.len(), 2);
            let flows: Vec<Flow> = x.label.components().map(|p| p.flow).collect();
            assert!(flows.contains(&Flow::Forward) && flows.contains(&Flow::Reverse));
            assert!(x.node > 1 && x.node < n_o);
        }
        for p in &rec.injected {
            assert!(
                injected.insert(*p, rec.slot).is_none(),
                "{p} injected twice"
            );
        }
        for d in &rec.deliveries {
            assert_eq!(d.node, destination(d.packet.flow, n_o));
            assert_eq!(injected.get(&d.packet), Some(&d.injected_slot));
            assert!(d.delivered_slot >= d.injected_slot);
            assert!(
                delivered.insert(d.packet, d.delivered_slot).is_none(),
                "{} delivered twice",
                d.packet
            );
        }
        assert!(rec.in_flight <= 2 * (n_o - 2));
    }

    // in-order delivery per flow
    for flow in [Flow::Forward, Flow::Reverse] {
        let seqs: Vec<(u32, u64)> = delivered
            .iter()
            .filter(|(p, _)| p.flow == flow)
            .map(|(p, s)| (p.seq, *s))
            .collect();
        for w in seqs.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        assert!(!seqs.is_empty());
    }
    assert!(delivered.keys().all(|p| injected.contains_key(p)));
}

#[test]
fn conservation_and_schedule_conformance() {
    for mode in Mode::ALL {
        for n_o in 3..=7 {
            for z in 2..=6 {
                let trace = run_sim(mode, n_o, z, recommended_periods(n_o)).unwrap();
                check_trace(&trace);
            }
        }
    }
}

#[test]
fn traces_are_deterministic() {
    let a = run_sim(Mode::NetworkCoded, 6, 3, 20).unwrap();
    let b = run_sim(Mode::NetworkCoded, 6, 3, 20).unwrap();
    assert_eq!(a, b);
    let mut csv_a = Vec::new();
    let mut csv_b = Vec::new();
    a.write_csv(&mut csv_a).unwrap();
    b.write_csv(&mut csv_b).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn trace_csv_has_one_row_per_event() {
    let trace = run_sim(Mode::NetworkCoded, 5, 4, 3).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slot,event,node,peer,label,latency"));
    let expected: usize = trace
        .slots
        .iter()
        .map(|s| s.transmissions.len() + s.receptions.len() + s.xors.len() + s.deliveries.len())
        .sum();
    assert_eq!(lines.count(), expected);
    assert!(text.contains("10,deliver,1,,R0,10"));
}

#[test]
fn rejects_bad_configurations() {
    assert!(run_sim(Mode::Traditional, 2, 2, 5).is_err());
    assert!(run_sim(Mode::NetworkCoded, 5, 1, 5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn longer_runs_extend_shorter_ones(mode_nc in any::<bool>(), n_o in 3usize..=8, z in 2usize..=7, extra in 1usize..4) {
        let mode = if mode_nc { Mode::NetworkCoded } else { Mode::Traditional };
        let base = recommended_periods(n_o);
        let short = run_sim(mode, n_o, z, base).unwrap();
        let long = run_sim(mode, n_o, z, base + extra).unwrap();
        prop_assert_eq!(&long.slots[..short.len()], &short.slots[..]);
        check_trace(&long);
    }
}
