//! XOR packet labels. A coded packet is identified by the set of source
//! packets folded into it, so XOR is symmetric difference on those sets.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::BitXor;

use crate::schedule::Flow;

/// A source packet: its origin (1-based route position), the origin's
/// sequence number and its direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketId {
    pub flow: Flow,
    pub seq: u32,
    pub origin: usize,
}

impl PacketId {
    pub fn new(origin: usize, seq: u32, flow: Flow) -> Self {
        PacketId { flow, seq, origin }
    }
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flow {
            Flow::Forward => write!(f, "F{}", self.seq),
            Flow::Reverse => write!(f, "R{}", self.seq),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PacketLabel {
    components: BTreeSet<PacketId>,
}

impl PacketLabel {
    /// The all-zero packet.
    pub fn zero() -> Self {
        PacketLabel::default()
    }

    pub fn single(id: PacketId) -> Self {
        PacketLabel {
            components: BTreeSet::from([id]),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, id: &PacketId) -> bool {
        self.components.contains(id)
    }

    pub fn components(&self) -> impl Iterator<Item = &PacketId> {
        self.components.iter()
    }

    pub fn xor(&self, other: &PacketLabel) -> PacketLabel {
        PacketLabel {
            components: self
                .components
                .symmetric_difference(&other.components)
                .copied()
                .collect(),
        }
    }

    /// What is left after XOR-ing out every component the holder of `known`
    /// already has.
    pub fn residual(&self, known: &BTreeSet<PacketId>) -> PacketLabel {
        PacketLabel {
            components: self.components.difference(known).copied().collect(),
        }
    }

    /// The single unknown source packet, if the label is decodable with
    /// `known`.
    pub fn decode(&self, known: &BTreeSet<PacketId>) -> Option<PacketId> {
        let mut rest = self.components.difference(known);
        match (rest.next(), rest.next()) {
            (Some(id), None) => Some(*id),
            _ => None,
        }
    }
}

pub fn xor(a: &PacketLabel, b: &PacketLabel) -> PacketLabel {
    a.xor(b)
}

impl BitXor for &PacketLabel {
    type Output = PacketLabel;

    fn bitxor(self, rhs: &PacketLabel) -> PacketLabel {
        self.xor(rhs)
    }
}

impl FromIterator<PacketId> for PacketLabel {
    /// Folds the ids with XOR, so repeated ids cancel.
    fn from_iter<T: IntoIterator<Item = PacketId>>(iter: T) -> Self {
        iter.into_iter().fold(PacketLabel::zero(), |acc, id| {
            acc.xor(&PacketLabel::single(id))
        })
    }
}

impl fmt::Display for PacketLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, id) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("^")?;
            }
            write!(f, "{id}")?;
        }
        Ok(())
    }
}
