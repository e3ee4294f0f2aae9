//! SINR evaluation of every reception in a schedule cycle and reduction to
//! per-stream capacity per timeslot.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::{aligned_routes, build_layout, LayoutConfig, NodeGeometry, NodeId, Route};
use crate::radio::{sinr, RadioConfig};
use crate::schedule::{build_schedule, Flow, Mode, Schedule, ScheduleConfig};

/// Relative slot phase of the second stream. Only affects traditional
/// transmission, where `Opposite` runs stream 2's reverse half-cycle while
/// stream 1 runs its forward half-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotPhase {
    #[default]
    Aligned,
    Opposite,
}

impl FromStr for SlotPhase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aligned" | "same" => Ok(SlotPhase::Aligned),
            "opposite" => Ok(SlotPhase::Opposite),
            other => Err(format!(
                "unknown slot phase '{other}' (expected aligned or opposite)"
            )),
        }
    }
}

impl fmt::Display for SlotPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotPhase::Aligned => "aligned",
            SlotPhase::Opposite => "opposite",
        })
    }
}

fn slot_offset(schedule: &Schedule, stream_idx: usize, phase: SlotPhase) -> u64 {
    match (schedule.mode(), phase) {
        (Mode::Traditional, SlotPhase::Opposite) if stream_idx % 2 == 1 => {
            schedule.config().period_z as u64
        }
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceptionEvent {
    /// 1-based slot within the schedule cycle.
    pub slot: usize,
    pub receiver: NodeId,
    pub wanted_tx: NodeId,
    /// Every other node transmitting in the slot, across all streams.
    pub interferers: Vec<NodeId>,
    pub flow: Flow,
}

/// Enumerates every intended reception over one schedule cycle. The same
/// schedule drives each route, slot-synchronised according to `phase`.
pub fn reception_events(
    schedule: &Schedule,
    geometry: &NodeGeometry,
    routes: &[Route],
    phase: SlotPhase,
) -> Result<Vec<ReceptionEvent>> {
    let n_o = schedule.config().nodes_per_stream;
    for route in routes {
        if route.len() != n_o {
            return Err(Error::ScheduleMismatch(format!(
                "schedule covers {n_o} nodes but the stream {} route has {}",
                route.stream() + 1,
                route.len()
            )));
        }
        if let Some(bad) = route.nodes().iter().find(|n| !geometry.contains(**n)) {
            return Err(Error::ScheduleMismatch(format!(
                "route node {bad} is not in the layout"
            )));
        }
    }

    let mut events = Vec::new();
    for slot in 1..=schedule.period() {
        // (route index, transmitter) for everything on air in this slot
        let on_air: Vec<(usize, NodeId, Vec<NodeId>)> = routes
            .iter()
            .enumerate()
            .flat_map(|(r, route)| {
                let set = schedule.at(slot as u64 + slot_offset(schedule, r, phase));
                set.transmitters.iter().map(move |t| {
                    let tx = route.at(t.node).expect("route length checked above");
                    let rx = t
                        .receivers(n_o)
                        .into_iter()
                        .map(|p| route.at(p).expect("receiver inside route"))
                        .collect();
                    (r, tx, rx)
                })
            })
            .collect();

        for (r, tx, receivers) in &on_air {
            let tx_pos = routes[*r].position_of(*tx).expect("transmitter on route");
            for rx in receivers {
                let rx_pos = routes[*r].position_of(*rx).expect("receiver on route");
                let interferers = on_air
                    .iter()
                    .map(|(_, other, _)| *other)
                    .filter(|other| other != tx)
                    .collect();
                events.push(ReceptionEvent {
                    slot,
                    receiver: *rx,
                    wanted_tx: *tx,
                    interferers,
                    flow: if rx_pos > tx_pos {
                        Flow::Forward
                    } else {
                        Flow::Reverse
                    },
                });
            }
        }
    }
    Ok(events)
}

/// Sum of the interfering powers at the event's receiver, in watts.
pub fn event_interference(
    event: &ReceptionEvent,
    geometry: &NodeGeometry,
    radio: &RadioConfig,
) -> Result<f64> {
    event
        .interferers
        .iter()
        .map(|i| radio.received_power(geometry.distance(*i, event.receiver)))
        .sum()
}

pub fn event_sinr(
    event: &ReceptionEvent,
    geometry: &NodeGeometry,
    radio: &RadioConfig,
) -> Result<f64> {
    let wanted = radio.received_power(geometry.distance(event.wanted_tx, event.receiver))?;
    let interference = event_interference(event, geometry, radio)?;
    Ok(sinr(wanted, interference, radio.noise_power()))
}

/// Capacity per timeslot from the two directional bottleneck rates: the sum
/// is divided by `2Z` for traditional and by `Z` for network-coded
/// transmission.
pub fn capacity_per_timeslot(mode: Mode, z: usize, forward_bps: f64, reverse_bps: f64) -> f64 {
    (forward_bps + reverse_bps) / mode.cycle_len(z) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRate {
    pub event: ReceptionEvent,
    pub sinr: f64,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamCapacityReport {
    pub stream: usize,
    pub mode: Mode,
    pub z: usize,
    pub events: Vec<EventRate>,
    pub forward_bottleneck_bps: f64,
    pub reverse_bottleneck_bps: f64,
    pub capacity_per_timeslot_bps: f64,
}

impl StreamCapacityReport {
    pub fn bottleneck(&self, flow: Flow) -> f64 {
        match flow {
            Flow::Forward => self.forward_bottleneck_bps,
            Flow::Reverse => self.reverse_bottleneck_bps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCapacity {
    pub streams: Vec<StreamCapacityReport>,
    pub total_bps: f64,
}

pub fn stream_capacity(
    schedule: &Schedule,
    geometry: &NodeGeometry,
    routes: &[Route],
    radio: &RadioConfig,
    phase: SlotPhase,
) -> Result<NetworkCapacity> {
    radio.validate()?;
    let mode = schedule.mode();
    let z = schedule.config().period_z;
    let events = reception_events(schedule, geometry, routes, phase)?;

    let mut streams = Vec::with_capacity(routes.len());
    for route in routes {
        let mut rated = Vec::new();
        let mut fwd = f64::INFINITY;
        let mut rev = f64::INFINITY;
        for event in events
            .iter()
            .filter(|e| e.receiver.stream == route.stream())
        {
            let s = event_sinr(event, geometry, radio)?;
            let rate = radio.shannon_rate(s);
            match event.flow {
                Flow::Forward => fwd = fwd.min(rate),
                Flow::Reverse => rev = rev.min(rate),
            }
            rated.push(EventRate {
                event: event.clone(),
                sinr: s,
                rate_bps: rate,
            });
        }
        if !fwd.is_finite() || !rev.is_finite() {
            return Err(Error::ScheduleMismatch(format!(
                "stream {} has no reception in one direction",
                route.stream() + 1
            )));
        }
        streams.push(StreamCapacityReport {
            stream: route.stream(),
            mode,
            z,
            events: rated,
            forward_bottleneck_bps: fwd,
            reverse_bottleneck_bps: rev,
            capacity_per_timeslot_bps: capacity_per_timeslot(mode, z, fwd, rev),
        });
    }
    let total_bps = streams.iter().map(|s| s.capacity_per_timeslot_bps).sum();
    Ok(NetworkCapacity { streams, total_bps })
}

/// One capacity evaluation: `hops`-hop routes starting at node 1 of every
/// row of `layout`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub layout: LayoutConfig,
    pub radio: RadioConfig,
    pub mode: Mode,
    pub z: usize,
    pub hops: usize,
    pub phase: SlotPhase,
}

impl Scenario {
    pub fn analyze(&self) -> Result<NetworkCapacity> {
        let geometry = build_layout(self.layout)?;
        let routes = aligned_routes(&geometry, self.hops)?;
        let schedule = build_schedule(&ScheduleConfig::new(self.mode, self.hops + 1, self.z))?;
        stream_capacity(&schedule, &geometry, &routes, &self.radio, self.phase)
    }

    pub fn with_z(&self, z: usize) -> Scenario {
        Scenario { z, ..*self }
    }
}

/// Scheduling period with the highest capacity. Ties go to the smaller
/// period.
pub fn optimum_z<I, F>(z_values: I, mut capacity: F) -> Result<(usize, f64)>
where
    I: IntoIterator<Item = usize>,
    F: FnMut(usize) -> Result<f64>,
{
    let mut zs: Vec<usize> = z_values.into_iter().collect();
    zs.sort_unstable();
    zs.dedup();
    let mut best: Option<(usize, f64)> = None;
    for z in zs {
        let c = capacity(z)?;
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((z, c));
        }
    }
    best.ok_or(Error::EmptyRange)
}
