//! Side-by-side comparison of a sweep against the published TR/NC capacity
//! table (optimum periods and data rates for one and two streams, 2 to 5
//! hops).

use std::fmt::Write as _;

use super::sweep::ResultRow;
use crate::error::{Error, Result};
use crate::schedule::Mode;

/// Published reference values for one (hops, mode) row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    pub hops: usize,
    pub mode: Mode,
    pub one_stream_z: usize,
    pub two_stream_z: usize,
    pub one_stream_mbps: f64,
    pub two_stream_mbps: f64,
}

const fn row(hops: usize, mode: Mode, oz: usize, tz: usize, om: f64, tm: f64) -> PublishedRow {
    PublishedRow {
        hops,
        mode,
        one_stream_z: oz,
        two_stream_z: tz,
        one_stream_mbps: om,
        two_stream_mbps: tm,
    }
}

pub const PUBLISHED: [PublishedRow; 8] = [
    row(2, Mode::Traditional, 3, 3, 2.064, 1.749),
    row(2, Mode::NetworkCoded, 4, 3, 3.095, 3.234),
    row(3, Mode::Traditional, 3, 3, 2.064, 1.742),
    row(3, Mode::NetworkCoded, 4, 3, 3.095, 2.654),
    row(4, Mode::Traditional, 4, 3, 1.547, 1.390),
    row(4, Mode::NetworkCoded, 4, 3, 2.645, 2.608),
    row(5, Mode::Traditional, 4, 3, 1.322, 1.390),
    row(5, Mode::NetworkCoded, 4, 3, 2.645, 2.598),
];

/// Published NC-over-TR improvement in percent, `(hops, one stream, two streams)`.
pub const PUBLISHED_IMPROVEMENT_PCT: [(usize, f64, f64); 4] = [
    (2, 50.0, 85.0),
    (3, 50.0, 52.0),
    (4, 71.0, 88.0),
    (5, 100.0, 87.0),
];

/// Published change from one to two streams in percent,
/// `(hops, TR, NC)`; the values are `(C_two - C_one) / C_one`.
pub const PUBLISHED_STREAM_CHANGE_PCT: [(usize, f64, f64); 4] = [
    (2, -15.0, 4.0),
    (3, -15.0, -14.0),
    (4, -10.0, -2.0),
    (5, 5.0, -2.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CellComparison {
    pub streams: usize,
    pub mode: Mode,
    pub hops: usize,
    pub published_z: usize,
    pub computed_z: usize,
    pub published_mbps: f64,
    pub computed_mbps: f64,
    /// `(computed - published) / published`.
    pub rel_delta: f64,
    /// False for the cell whose published optimum is contradicted by the
    /// accompanying discussion (two streams, TR, 2 hops).
    pub verifiable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercentComparison {
    pub hops: usize,
    /// Streams for improvement rows, 0 otherwise.
    pub streams: usize,
    /// Mode for stream-change rows.
    pub mode: Option<Mode>,
    pub published_pct: f64,
    pub computed_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table4Report {
    pub cells: Vec<CellComparison>,
    /// `(C_NC - C_TR) / C_TR` at each mode's optimum period.
    pub improvements: Vec<PercentComparison>,
    /// `(C_two - C_one) / C_one` at each optimum period.
    pub stream_changes: Vec<PercentComparison>,
}

fn pct(new: f64, base: f64) -> f64 {
    (new - base) / base * 100.0
}

fn optimum(rows: &[ResultRow], streams: usize, mode: Mode, hops: usize) -> Result<&ResultRow> {
    rows.iter()
        .find(|r| r.streams == streams && r.mode == mode && r.hops == hops && r.optimum_flag)
        .ok_or_else(|| {
            Error::Experiment(format!(
                "sweep has no optimum for streams={streams} mode={mode} hops={hops}"
            ))
        })
}

pub fn compare_table4(rows: &[ResultRow]) -> Result<Table4Report> {
    let mut cells = Vec::new();
    for p in &PUBLISHED {
        for (streams, published_z, published_mbps) in [
            (1, p.one_stream_z, p.one_stream_mbps),
            (2, p.two_stream_z, p.two_stream_mbps),
        ] {
            let best = optimum(rows, streams, p.mode, p.hops)?;
            let computed_mbps = best.capacity_bps / 1e6;
            cells.push(CellComparison {
                streams,
                mode: p.mode,
                hops: p.hops,
                published_z,
                computed_z: best.z,
                published_mbps,
                computed_mbps,
                rel_delta: (computed_mbps - published_mbps) / published_mbps,
                verifiable: !(streams == 2 && p.mode == Mode::Traditional && p.hops == 2),
            });
        }
    }

    let cap = |streams, mode, hops| -> Result<f64> {
        Ok(optimum(rows, streams, mode, hops)?.capacity_bps)
    };
    let mut improvements = Vec::new();
    for &(hops, one, two) in &PUBLISHED_IMPROVEMENT_PCT {
        for (streams, published_pct) in [(1, one), (2, two)] {
            let tr = cap(streams, Mode::Traditional, hops)?;
            let nc = cap(streams, Mode::NetworkCoded, hops)?;
            improvements.push(PercentComparison {
                hops,
                streams,
                mode: None,
                published_pct,
                computed_pct: pct(nc, tr),
            });
        }
    }
    let mut stream_changes = Vec::new();
    for &(hops, tr_pct, nc_pct) in &PUBLISHED_STREAM_CHANGE_PCT {
        for (mode, published_pct) in [(Mode::Traditional, tr_pct), (Mode::NetworkCoded, nc_pct)] {
            stream_changes.push(PercentComparison {
                hops,
                streams: 0,
                mode: Some(mode),
                published_pct,
                computed_pct: pct(cap(2, mode, hops)?, cap(1, mode, hops)?),
            });
        }
    }
    Ok(Table4Report {
        cells,
        improvements,
        stream_changes,
    })
}

impl Table4Report {
    pub fn cell(&self, streams: usize, mode: Mode, hops: usize) -> Option<&CellComparison> {
        self.cells
            .iter()
            .find(|c| c.streams == streams && c.mode == mode && c.hops == hops)
    }

    /// Number of (mode, hops) groups whose computed optimum period matches
    /// the published one for both stream counts.
    pub fn matching_z_groups(&self) -> usize {
        PUBLISHED
            .iter()
            .filter(|p| {
                [1, 2].iter().all(|&s| {
                    self.cell(s, p.mode, p.hops)
                        .is_some_and(|c| c.computed_z == c.published_z)
                })
            })
            .count()
    }

    pub fn max_abs_rel_delta(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.rel_delta.abs())
            .fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>7} {:>4} | {:>7} {:>7} | {:>9} {:>9} {:>8}",
            "hops", "streams", "mode", "pub Z", "ours Z", "published", "ours", "delta"
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:>4} {:>7} {:>4} | {:>7} {:>7} | {:>9.3} {:>9.3} {:>+7.1}%{}",
                c.hops,
                c.streams,
                c.mode,
                c.published_z,
                c.computed_z,
                c.published_mbps,
                c.computed_mbps,
                c.rel_delta * 100.0,
                if c.verifiable { "" } else { "  (unverifiable)" }
            );
        }
        let _ = writeln!(out, "\nNC over TR at each optimum");
        for p in &self.improvements {
            let _ = writeln!(
                out,
                "{:>4} hops {} stream(s): published {:>+6.1}%  ours {:>+6.1}%",
                p.hops, p.streams, p.published_pct, p.computed_pct
            );
        }
        let _ = writeln!(out, "\nTwo streams relative to one");
        for p in &self.stream_changes {
            let _ = writeln!(
                out,
                "{:>4} hops {}: published {:>+6.1}%  ours {:>+6.1}%",
                p.hops,
                p.mode.map_or("", Mode::label),
                p.published_pct,
                p.computed_pct
            );
        }
        let _ = writeln!(
            out,
            "\noptimum Z matches in {}/8 groups, largest rate delta {:.1}%",
            self.matching_z_groups(),
            self.max_abs_rel_delta() * 100.0
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_percentages_follow_from_published_rates() {
        let get = |hops, mode| {
            PUBLISHED
                .iter()
                .find(|p| p.hops == hops && p.mode == mode)
                .unwrap()
        };
        for &(hops, one, two) in &PUBLISHED_IMPROVEMENT_PCT {
            let tr = get(hops, Mode::Traditional);
            let nc = get(hops, Mode::NetworkCoded);
            assert!((pct(nc.one_stream_mbps, tr.one_stream_mbps) - one).abs() < 1.0);
            assert!((pct(nc.two_stream_mbps, tr.two_stream_mbps) - two).abs() < 1.0);
        }
        for &(hops, tr_pct, nc_pct) in &PUBLISHED_STREAM_CHANGE_PCT {
            let tr = get(hops, Mode::Traditional);
            let nc = get(hops, Mode::NetworkCoded);
            assert!((pct(tr.two_stream_mbps, tr.one_stream_mbps) - tr_pct).abs() < 1.0);
            assert!((pct(nc.two_stream_mbps, nc.one_stream_mbps) - nc_pct).abs() < 1.0);
        }
    }

    #[test]
    fn missing_cells_are_reported() {
        assert!(matches!(compare_table4(&[]), Err(Error::Experiment(_))));
    }
}
