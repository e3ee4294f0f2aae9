//! Capacity analysis and packet-level simulation of multi-hop wireless line
//! networks under periodic TDMA schedules, comparing store-and-forward
//! relaying with XOR network coding.

pub mod capacity;
pub mod error;
pub mod harness;
pub mod layout;
pub mod packetsim;
pub mod radio;
pub mod schedule;

pub use error::{Error, Result};
