use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use super::label::{PacketId, PacketLabel};
use super::warmup_periods;
use crate::schedule::Mode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub node: usize,
    /// `None` when the node is scheduled but has nothing to send yet.
    pub label: Option<PacketLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reception {
    pub node: usize,
    pub from: usize,
    pub label: PacketLabel,
    /// The source packet recovered from `label`, if it was new to the node.
    pub decoded: Option<PacketId>,
}

/// A relay combining its stored forward and reverse packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorOp {
    pub node: usize,
    pub label: PacketLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub packet: PacketId,
    pub node: usize,
    pub injected_slot: u64,
    pub delivered_slot: u64,
}

impl Delivery {
    /// Timeslots spanned from the start of the injection slot to the end of
    /// the delivery slot.
    pub fn latency(&self) -> u64 {
        self.delivered_slot - self.injected_slot + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: u64,
    pub injected: Vec<PacketId>,
    pub transmissions: Vec<Transmission>,
    pub receptions: Vec<Reception>,
    pub xors: Vec<XorOp>,
    pub deliveries: Vec<Delivery>,
    /// Packets held in relay buffers at the end of the slot.
    pub in_flight: usize,
}

impl SlotRecord {
    pub(super) fn new(slot: u64) -> Self {
        SlotRecord {
            slot,
            injected: Vec::new(),
            transmissions: Vec::new(),
            receptions: Vec::new(),
            xors: Vec::new(),
            deliveries: Vec::new(),
            in_flight: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub mode: Mode,
    pub n_o: usize,
    pub z: usize,
    pub slots: Vec<SlotRecord>,
}

/// One line of the CSV trace export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCsvRow {
    pub slot: u64,
    pub event: String,
    pub node: usize,
    pub peer: Option<usize>,
    pub label: String,
    pub latency: Option<u64>,
}

impl SimTrace {
    pub(super) fn new(mode: Mode, n_o: usize, z: usize, slots: Vec<SlotRecord>) -> Self {
        SimTrace {
            mode,
            n_o,
            z,
            slots,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn cycle_len(&self) -> usize {
        self.mode.cycle_len(self.z)
    }

    pub fn warmup_slots(&self) -> u64 {
        (warmup_periods(self.n_o) * self.cycle_len()) as u64
    }

    /// Record for a 1-based slot.
    pub fn slot(&self, slot: u64) -> Option<&SlotRecord> {
        slot.checked_sub(1).and_then(|i| self.slots.get(i as usize))
    }

    pub fn deliveries(&self) -> impl Iterator<Item = &Delivery> {
        self.slots.iter().flat_map(|s| s.deliveries.iter())
    }

    /// Slot-by-slot table for reading a trace by eye: who sends what,
    /// which relays combine packets, what each receiver recovers and which
    /// packets arrive (with their latency in parentheses).
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} n_o={} Z={} ({} slots)",
            self.mode,
            self.n_o,
            self.z,
            self.len()
        );
        let _ = writeln!(
            out,
            "{:>4} | {:<24} | {:<16} | {:<24} | delivered",
            "slot", "transmit", "xor", "decoded"
        );
        for rec in &self.slots {
            let tx = join(rec.transmissions.iter().map(|t| match &t.label {
                Some(l) => format!("{}:{}", t.node, l),
                None => format!("{}:-", t.node),
            }));
            let xors = join(rec.xors.iter().map(|x| format!("{}:{}", x.node, x.label)));
            let decoded = join(
                rec.receptions
                    .iter()
                    .filter_map(|r| r.decoded.map(|id| format!("{}<{}", r.node, id))),
            );
            let delivered = join(
                rec.deliveries
                    .iter()
                    .map(|d| format!("{}:{}({})", d.node, d.packet, d.latency())),
            );
            let _ = writeln!(
                out,
                "{:>4} | {:<24} | {:<16} | {:<24} | {}",
                rec.slot, tx, xors, decoded, delivered
            );
        }
        out
    }

    pub fn csv_rows(&self) -> Vec<TraceCsvRow> {
        let mut rows = Vec::new();
        for rec in &self.slots {
            let slot = rec.slot;
            for t in &rec.transmissions {
                rows.push(TraceCsvRow {
                    slot,
                    event: "tx".into(),
                    node: t.node,
                    peer: None,
                    label: t
                        .label
                        .as_ref()
                        .map_or_else(|| "-".into(), ToString::to_string),
                    latency: None,
                });
            }
            for r in &rec.receptions {
                rows.push(TraceCsvRow {
                    slot,
                    event: if r.decoded.is_some() {
                        "rx"
                    } else {
                        "rx_discard"
                    }
                    .into(),
                    node: r.node,
                    peer: Some(r.from),
                    label: r.label.to_string(),
                    latency: None,
                });
            }
            for x in &rec.xors {
                rows.push(TraceCsvRow {
                    slot,
                    event: "xor".into(),
                    node: x.node,
                    peer: None,
                    label: x.label.to_string(),
                    latency: None,
                });
            }
            for d in &rec.deliveries {
                rows.push(TraceCsvRow {
                    slot,
                    event: "deliver".into(),
                    node: d.node,
                    peer: None,
                    label: d.packet.to_string(),
                    latency: Some(d.latency()),
                });
            }
        }
        rows
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in self.csv_rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn join<I: Iterator<Item = String>>(items: I) -> String {
    let v: Vec<String> = items.collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}
