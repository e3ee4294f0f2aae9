//! Periodic sequential TDMA schedules.
//!
//! Positions are 1-based route positions: node 1 is the forward source and
//! node `n_o` the reverse source. Traditional transmission alternates a
//! forward half-cycle and a reverse half-cycle (period `2Z`); network-coded
//! transmission runs the forward sequential schedule over every node with
//! each transmission broadcast to both neighbours (period `Z`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "TR")]
    Traditional,
    #[serde(rename = "NC")]
    NetworkCoded,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Traditional, Mode::NetworkCoded];

    pub fn label(self) -> &'static str {
        match self {
            Mode::Traditional => "TR",
            Mode::NetworkCoded => "NC",
        }
    }

    /// Schedule length in timeslots for period `z`.
    pub fn cycle_len(self, z: usize) -> usize {
        match self {
            Mode::Traditional => 2 * z,
            Mode::NetworkCoded => z,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tr" | "traditional" => Ok(Mode::Traditional),
            "nc" | "network-coded" | "networkcoded" => Ok(Mode::NetworkCoded),
            other => Err(format!(
                "unknown transmission mode '{other}' (expected tr or nc)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Unicast to the next node (`i -> i + 1`).
    Forward,
    /// Unicast to the previous node (`i -> i - 1`).
    Reverse,
    /// Reaches both neighbours.
    Broadcast,
}

/// Direction a packet travels along a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flow {
    /// From node 1 toward node `n_o`.
    Forward,
    /// From node `n_o` toward node 1.
    Reverse,
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flow::Forward => "forward",
            Flow::Reverse => "reverse",
        })
    }
}

impl FromStr for Flow {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forward" | "fwd" => Ok(Flow::Forward),
            "reverse" | "rev" => Ok(Flow::Reverse),
            other => Err(format!(
                "unknown direction '{other}' (expected forward or reverse)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleConfig {
    pub period_z: usize,
    pub nodes_per_stream: usize,
    pub mode: Mode,
}

impl ScheduleConfig {
    pub fn new(mode: Mode, nodes_per_stream: usize, period_z: usize) -> Self {
        ScheduleConfig {
            period_z,
            nodes_per_stream,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.period_z < 2 {
            return Err(Error::Period(self.period_z));
        }
        if self.nodes_per_stream < 3 {
            return Err(Error::TooFewNodes(self.nodes_per_stream));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transmitter {
    pub node: usize,
    pub direction: Direction,
}

impl Transmitter {
    /// Intended receivers on a route of `n_o` nodes.
    pub fn receivers(&self, n_o: usize) -> Vec<usize> {
        let left = (self.node > 1).then(|| self.node - 1);
        let right = (self.node < n_o).then(|| self.node + 1);
        match self.direction {
            Direction::Forward => right.into_iter().collect(),
            Direction::Reverse => left.into_iter().collect(),
            Direction::Broadcast => left.into_iter().chain(right).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmitSet {
    /// 1-based slot within the schedule cycle.
    pub slot: usize,
    pub transmitters: Vec<Transmitter>,
}

impl TransmitSet {
    pub fn nodes(&self) -> BTreeSet<usize> {
        self.transmitters.iter().map(|t| t.node).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    config: ScheduleConfig,
    slots: Vec<TransmitSet>,
}

impl Schedule {
    pub fn config(&self) -> &ScheduleConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn period(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[TransmitSet] {
        &self.slots
    }

    /// Transmit set for a 1-based global timeslot; the schedule repeats.
    pub fn at(&self, slot: u64) -> &TransmitSet {
        let idx = ((slot - 1) % self.slots.len() as u64) as usize;
        &self.slots[idx]
    }

    /// Checks that no node is both a transmitter and an intended receiver in
    /// the same slot, and that end nodes only send inward.
    pub fn check_half_duplex(&self) -> Result<()> {
        let n_o = self.config.nodes_per_stream;
        for set in &self.slots {
            let tx = set.nodes();
            for t in &set.transmitters {
                if (t.direction == Direction::Forward && t.node == n_o)
                    || (t.direction == Direction::Reverse && t.node == 1)
                {
                    return Err(Error::ScheduleMismatch(format!(
                        "slot {}: node {} cannot send {:?}",
                        set.slot, t.node, t.direction
                    )));
                }
                if let Some(rx) = t.receivers(n_o).into_iter().find(|r| tx.contains(r)) {
                    return Err(Error::ScheduleMismatch(format!(
                        "slot {}: node {rx} transmits while receiving from node {}",
                        set.slot, t.node
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Number of `n` terms shared by the forward and reverse sets.
fn term_count(n_o: usize, z: usize, slot_i: usize) -> usize {
    let top = n_o as i64 - 1 - slot_i as i64;
    if top < 0 {
        0
    } else {
        (top / z as i64) as usize + 1
    }
}

/// Nodes `i + nZ` that send forward in slot `i` of the forward half-cycle;
/// never includes the last node.
pub fn forward_set(n_o: usize, z: usize, slot_i: usize) -> BTreeSet<usize> {
    assert!(
        z >= 1 && (1..=z).contains(&slot_i),
        "slot {slot_i} outside 1..={z}"
    );
    (0..term_count(n_o, z, slot_i))
        .map(|n| slot_i + n * z)
        .collect()
}

/// Nodes `n_o + 1 - i - nZ` that send toward node 1 in slot `i` of the
/// reverse half-cycle; never includes node 1.
pub fn reverse_set(n_o: usize, z: usize, slot_i: usize) -> BTreeSet<usize> {
    assert!(
        z >= 1 && (1..=z).contains(&slot_i),
        "slot {slot_i} outside 1..={z}"
    );
    (0..term_count(n_o, z, slot_i))
        .map(|n| n_o + 1 - slot_i - n * z)
        .collect()
}

pub fn tr_schedule(config: &ScheduleConfig) -> Result<Schedule> {
    config.validate()?;
    let (n_o, z) = (config.nodes_per_stream, config.period_z);
    let forward = (1..=z).map(|i| TransmitSet {
        slot: i,
        transmitters: forward_set(n_o, z, i)
            .into_iter()
            .map(|node| Transmitter {
                node,
                direction: Direction::Forward,
            })
            .collect(),
    });
    let reverse = (1..=z).map(|i| TransmitSet {
        slot: z + i,
        transmitters: reverse_set(n_o, z, i)
            .into_iter()
            .map(|node| Transmitter {
                node,
                direction: Direction::Reverse,
            })
            .collect(),
    });
    let schedule = Schedule {
        config: ScheduleConfig {
            mode: Mode::Traditional,
            ..*config
        },
        slots: forward.chain(reverse).collect(),
    };
    schedule.check_half_duplex()?;
    Ok(schedule)
}

/// Slot in which the last node injects reverse traffic under network coding:
/// the one right after node `n_o - 1` transmits, so that every reverse packet
/// waits `Z - 1` slots at each relay.
pub fn nc_last_node_slot(n_o: usize, z: usize) -> usize {
    (n_o - 1) % z + 1
}

pub fn nc_schedule(config: &ScheduleConfig) -> Result<Schedule> {
    config.validate()?;
    let (n_o, z) = (config.nodes_per_stream, config.period_z);
    let last_slot = nc_last_node_slot(n_o, z);
    let slots = (1..=z)
        .map(|i| {
            let mut nodes = forward_set(n_o, z, i);
            if i == last_slot {
                nodes.insert(n_o);
            }
            TransmitSet {
                slot: i,
                transmitters: nodes
                    .into_iter()
                    .map(|node| Transmitter {
                        node,
                        direction: Direction::Broadcast,
                    })
                    .collect(),
            }
        })
        .collect();
    let schedule = Schedule {
        config: ScheduleConfig {
            mode: Mode::NetworkCoded,
            ..*config
        },
        slots,
    };
    schedule.check_half_duplex()?;
    Ok(schedule)
}

pub fn build_schedule(config: &ScheduleConfig) -> Result<Schedule> {
    match config.mode {
        Mode::Traditional => tr_schedule(config),
        Mode::NetworkCoded => nc_schedule(config),
    }
}
