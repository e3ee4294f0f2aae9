//! Slot-by-slot packet simulation of one route under traditional and
//! network-coded relaying.
//!
//! Packets carry labels only. Sources are saturated: node 1 sends a fresh
//! forward packet and node `n_o` a fresh reverse packet at every transmit
//! opportunity. Each relay holds at most one packet per direction. The
//! simulation never consults the radio model, so its delivery counts and
//! latencies are an independent check on the capacity formulas.

mod label;
mod trace;

use std::collections::{BTreeSet, HashMap};

use num_rational::Ratio;

pub use label::{xor, PacketId, PacketLabel};
pub use trace::{Delivery, Reception, SimTrace, SlotRecord, TraceCsvRow, Transmission, XorOp};

use crate::error::{Error, Result};
use crate::schedule::{build_schedule, Direction, Flow, Mode, Schedule, ScheduleConfig};

/// Packets per timeslot, kept exact.
pub type DeliveryRate = Ratio<u64>;

/// Steady-state measurements need this many deliveries per direction.
pub const MIN_STEADY_DELIVERIES: usize = 3;

/// Schedule cycles discarded before measuring. No packet takes longer than
/// `n_o` cycles end to end, so the pipeline is full by then.
pub fn warmup_periods(n_o: usize) -> usize {
    n_o.max(3)
}

/// Enough cycles to see several steady-state deliveries in each direction.
pub fn recommended_periods(n_o: usize) -> usize {
    2 * warmup_periods(n_o) + 4
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelayState {
    pub stored_forward: Option<PacketLabel>,
    pub stored_reverse: Option<PacketLabel>,
    /// Source packets whose payload this node has.
    pub known: BTreeSet<PacketId>,
}

impl RelayState {
    /// What the node sends when scheduled: both stored packets XOR-ed
    /// together, or whichever one it has.
    pub fn outgoing(&self) -> Option<PacketLabel> {
        match (&self.stored_forward, &self.stored_reverse) {
            (Some(f), Some(r)) => Some(f ^ r),
            (Some(f), None) => Some(f.clone()),
            (None, Some(r)) => Some(r.clone()),
            (None, None) => None,
        }
    }

    fn store(&mut self, flow: Flow, label: PacketLabel) {
        match flow {
            Flow::Forward => self.stored_forward = Some(label),
            Flow::Reverse => self.stored_reverse = Some(label),
        }
    }

    fn take(&mut self, flow: Flow) -> Option<PacketLabel> {
        match flow {
            Flow::Forward => self.stored_forward.take(),
            Flow::Reverse => self.stored_reverse.take(),
        }
    }

    fn stored_count(&self) -> usize {
        self.stored_forward.is_some() as usize + self.stored_reverse.is_some() as usize
    }
}

struct Engine {
    n_o: usize,
    schedule: Schedule,
    // index 0 unused; 1..=n_o are route positions
    nodes: Vec<RelayState>,
    next_seq: [u32; 2],
    injected_at: HashMap<PacketId, u64>,
}

impl Engine {
    fn new(mode: Mode, n_o: usize, z: usize) -> Result<Self> {
        let schedule = build_schedule(&ScheduleConfig::new(mode, n_o, z))?;
        Ok(Engine {
            n_o,
            schedule,
            nodes: vec![RelayState::default(); n_o + 1],
            next_seq: [0, 0],
            injected_at: HashMap::new(),
        })
    }

    fn destination(&self, flow: Flow) -> usize {
        match flow {
            Flow::Forward => self.n_o,
            Flow::Reverse => 1,
        }
    }

    fn source_flow(&self, node: usize) -> Option<Flow> {
        if node == 1 {
            Some(Flow::Forward)
        } else if node == self.n_o {
            Some(Flow::Reverse)
        } else {
            None
        }
    }

    fn inject(
        &mut self,
        node: usize,
        flow: Flow,
        slot: u64,
        record: &mut SlotRecord,
    ) -> PacketLabel {
        let k = flow as usize;
        let id = PacketId::new(node, self.next_seq[k], flow);
        self.next_seq[k] += 1;
        self.injected_at.insert(id, slot);
        self.nodes[node].known.insert(id);
        record.injected.push(id);
        PacketLabel::single(id)
    }

    fn deliver(&mut self, id: PacketId, node: usize, slot: u64, record: &mut SlotRecord) {
        let injected_slot = self
            .injected_at
            .remove(&id)
            .expect("delivered packet was injected");
        record.deliveries.push(Delivery {
            packet: id,
            node,
            injected_slot,
            delivered_slot: slot,
        });
    }

    fn in_flight(&self) -> usize {
        self.nodes.iter().map(RelayState::stored_count).sum()
    }

    fn step_traditional(&mut self, slot: u64) -> SlotRecord {
        let mut record = SlotRecord::new(slot);
        let set = self.schedule.at(slot).clone();

        let mut sent = Vec::new();
        for t in &set.transmitters {
            let flow = match t.direction {
                Direction::Forward => Flow::Forward,
                Direction::Reverse => Flow::Reverse,
                Direction::Broadcast => unreachable!("traditional schedules are unicast"),
            };
            let label = if self.source_flow(t.node) == Some(flow) {
                Some(self.inject(t.node, flow, slot, &mut record))
            } else {
                self.nodes[t.node].take(flow)
            };
            record.transmissions.push(Transmission {
                node: t.node,
                label: label.clone(),
            });
            if let Some(label) = label {
                sent.push((t.node, t.receivers(self.n_o)[0], flow, label));
            }
        }

        for (from, rx, flow, label) in sent {
            let id = label
                .decode(&BTreeSet::new())
                .expect("unicast labels are uncoded");
            record.receptions.push(Reception {
                node: rx,
                from,
                label: label.clone(),
                decoded: Some(id),
            });
            if rx == self.destination(flow) {
                self.deliver(id, rx, slot, &mut record);
            } else {
                self.nodes[rx].store(flow, label);
            }
        }
        record.in_flight = self.in_flight();
        record
    }

    fn step_network_coded(&mut self, slot: u64) -> SlotRecord {
        let mut record = SlotRecord::new(slot);
        let set = self.schedule.at(slot).clone();

        let mut sent = Vec::new();
        for t in &set.transmitters {
            let label = match self.source_flow(t.node) {
                Some(flow) => Some(self.inject(t.node, flow, slot, &mut record)),
                None => {
                    let node = &mut self.nodes[t.node];
                    let out = node.outgoing();
                    node.stored_forward = None;
                    node.stored_reverse = None;
                    out
                }
            };
            record.transmissions.push(Transmission {
                node: t.node,
                label: label.clone(),
            });
            if let Some(label) = label {
                for rx in t.receivers(self.n_o) {
                    sent.push((t.node, rx, label.clone()));
                }
            }
        }

        let mut changed = BTreeSet::new();
        // Receptions at one node can help decode each other, so sweep until
        // nothing new is learned.
        let mut pending: Vec<(usize, usize, PacketLabel)> = sent;
        loop {
            let mut progress = false;
            let mut still = Vec::new();
            for (from, rx, label) in pending {
                match label.decode(&self.nodes[rx].known) {
                    Some(id) => {
                        progress = true;
                        self.accept(from, rx, id, slot, &mut record, &mut changed);
                        record.receptions.push(Reception {
                            node: rx,
                            from,
                            label,
                            decoded: Some(id),
                        });
                    }
                    None => still.push((from, rx, label)),
                }
            }
            pending = still;
            if !progress || pending.is_empty() {
                break;
            }
        }
        for (from, rx, label) in pending {
            record.receptions.push(Reception {
                node: rx,
                from,
                label,
                decoded: None,
            });
        }
        record.receptions.sort_by_key(|r| (r.node, r.from));

        for node in changed {
            let state = &self.nodes[node];
            if let (Some(f), Some(r)) = (&state.stored_forward, &state.stored_reverse) {
                record.xors.push(XorOp { node, label: f ^ r });
            }
        }
        record.in_flight = self.in_flight();
        record
    }

    fn accept(
        &mut self,
        from: usize,
        rx: usize,
        id: PacketId,
        slot: u64,
        record: &mut SlotRecord,
        changed: &mut BTreeSet<usize>,
    ) {
        self.nodes[rx].known.insert(id);
        if rx == self.destination(id.flow) {
            self.deliver(id, rx, slot, record);
            return;
        }
        if self.source_flow(rx).is_some() {
            return;
        }
        // Only keep packets still moving away from the sender.
        let onward = match id.flow {
            Flow::Forward => from + 1 == rx,
            Flow::Reverse => rx + 1 == from,
        };
        if onward {
            self.nodes[rx].store(id.flow, PacketLabel::single(id));
            changed.insert(rx);
        }
    }
}

pub fn run_sim(mode: Mode, n_o: usize, z: usize, num_periods: usize) -> Result<SimTrace> {
    let mut engine = Engine::new(mode, n_o, z)?;
    let total = (num_periods * engine.schedule.period()) as u64;
    let slots = (1..=total)
        .map(|slot| match mode {
            Mode::Traditional => engine.step_traditional(slot),
            Mode::NetworkCoded => engine.step_network_coded(slot),
        })
        .collect();
    Ok(SimTrace::new(mode, n_o, z, slots))
}

pub fn run_tr_sim(n_o: usize, z: usize, num_periods: usize) -> Result<SimTrace> {
    run_sim(Mode::Traditional, n_o, z, num_periods)
}

pub fn run_nc_sim(n_o: usize, z: usize, num_periods: usize) -> Result<SimTrace> {
    run_sim(Mode::NetworkCoded, n_o, z, num_periods)
}

/// End-to-end latency in timeslots, counting both the injection and the
/// delivery slot, of packets injected after warmup.
pub fn measured_latency(trace: &SimTrace, flow: Flow) -> Result<u64> {
    let warmup = trace.warmup_slots();
    let mut latencies = trace
        .deliveries()
        .filter(|d| d.packet.flow == flow && d.injected_slot > warmup)
        .map(Delivery::latency);
    let first = latencies.next();
    let mut count = first.is_some() as usize;
    for other in latencies {
        count += 1;
        if Some(other) != first {
            return Err(Error::UnstableLatency {
                first: first.unwrap_or_default(),
                other,
            });
        }
    }
    match first {
        Some(l) if count >= MIN_STEADY_DELIVERIES => Ok(l),
        _ => Err(Error::InsufficientDeliveries {
            needed: MIN_STEADY_DELIVERIES,
            found: count,
        }),
    }
}

/// Deliveries per timeslot in both directions over the post-warmup slots.
pub fn measured_delivery_rate(trace: &SimTrace) -> Result<DeliveryRate> {
    let warmup = trace.warmup_slots();
    let end = trace.len() as u64;
    if end <= warmup {
        return Err(Error::InsufficientDeliveries {
            needed: MIN_STEADY_DELIVERIES,
            found: 0,
        });
    }
    let delivered = trace
        .deliveries()
        .filter(|d| d.delivered_slot > warmup)
        .count() as u64;
    Ok(Ratio::new(delivered, end - warmup))
}

/// Closed-form latency: `n_o - 1 + Z floor((n_o - 2) / Z)` for traditional
/// transmission, `n_o - 1` forward and `(n_o - 2)(Z - 1) + 1` reverse for
/// network coding.
pub fn expected_latency(mode: Mode, flow: Flow, n_o: usize, z: usize) -> u64 {
    let (n, z) = (n_o as u64, z as u64);
    match (mode, flow) {
        (Mode::Traditional, _) => n - 1 + z * ((n - 2) / z),
        (Mode::NetworkCoded, Flow::Forward) => n - 1,
        (Mode::NetworkCoded, Flow::Reverse) => (n - 2) * (z - 1) + 1,
    }
}

/// Steady-state packets per timeslot: `1/Z` traditional, `2/Z` coded.
pub fn expected_delivery_rate(mode: Mode, z: usize) -> DeliveryRate {
    Ratio::new(2, mode.cycle_len(z) as u64)
}
