//! Two-row line geometry.
//!
//! Stream `s` (0-based) lies on the line `y = s * row_separation_m`, and node
//! `i` (1-based, numbered left to right) of every stream sits at
//! `x = (i - 1) * hop_length_m`. Node `i` of stream 0 is directly opposite
//! node `i` of stream 1.

use std::fmt;

use crate::error::{Error, Result};

/// Largest per-stream node count for which the original experiments were run
/// (one stream: N < 7, two streams: N < 14 in total).
pub const VALIDATED_MAX_NODES_PER_STREAM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutConfig {
    pub nodes_per_stream: usize,
    pub num_streams: usize,
    pub hop_length_m: f64,
    /// Distance between the two rows. Ignored for a single stream.
    pub row_separation_m: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            nodes_per_stream: 6,
            num_streams: 2,
            hop_length_m: 100.0,
            row_separation_m: 300.0,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_stream < 3 {
            return Err(Error::TooFewNodes(self.nodes_per_stream));
        }
        if !(1..=2).contains(&self.num_streams) {
            return Err(Error::StreamCount(self.num_streams));
        }
        positive("hop_length_m", self.hop_length_m)?;
        if self.num_streams == 2 {
            positive("row_separation_m", self.row_separation_m)?;
        }
        Ok(())
    }

    pub fn total_nodes(&self) -> usize {
        self.nodes_per_stream * self.num_streams
    }

    /// False when the node count exceeds the range covered by the reference
    /// experiments. Larger layouts are still simulated.
    pub fn within_validated_range(&self) -> bool {
        self.nodes_per_stream <= VALIDATED_MAX_NODES_PER_STREAM
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// A node in the layout: `stream` is 0-based, `node` is the 1-based position
/// within the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub stream: usize,
    pub node: usize,
}

impl NodeId {
    pub fn new(stream: usize, node: usize) -> Self {
        NodeId { stream, node }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}n{}", self.stream + 1, self.node)
    }
}

#[derive(Debug, Clone)]
pub struct NodeGeometry {
    config: LayoutConfig,
    positions: Vec<(f64, f64)>,
    distances: Vec<f64>,
}

pub fn build_layout(config: LayoutConfig) -> Result<NodeGeometry> {
    config.validate()?;
    let per_stream = config.nodes_per_stream;
    let positions: Vec<(f64, f64)> = (0..config.num_streams)
        .flat_map(|stream| {
            (0..per_stream).map(move |i| {
                (
                    i as f64 * config.hop_length_m,
                    stream as f64 * config.row_separation_m,
                )
            })
        })
        .collect();

    let n = positions.len();
    let mut distances = vec![0.0; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let (xa, ya) = positions[a];
            let (xb, yb) = positions[b];
            let d = (xa - xb).hypot(ya - yb);
            distances[a * n + b] = d;
            distances[b * n + a] = d;
        }
    }

    Ok(NodeGeometry {
        config,
        positions,
        distances,
    })
}

impl NodeGeometry {
    pub fn config(&self) -> &LayoutConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.stream < self.config.num_streams && (1..=self.config.nodes_per_stream).contains(&id.node)
    }

    fn flat_index(&self, id: NodeId) -> usize {
        assert!(self.contains(id), "node {id} is not part of the layout");
        id.stream * self.config.nodes_per_stream + (id.node - 1)
    }

    pub fn position(&self, id: NodeId) -> (f64, f64) {
        self.positions[self.flat_index(id)]
    }

    /// Euclidean distance in meters. Panics if either node is outside the
    /// layout.
    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        let n = self.len();
        self.distances[self.flat_index(a) * n + self.flat_index(b)]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.config.num_streams).flat_map(move |stream| {
            (1..=self.config.nodes_per_stream).map(move |node| NodeId { stream, node })
        })
    }
}

/// An ordered run of consecutive nodes in one row, from source to destination.
/// Its length is the effective node count used by scheduling and capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    stream: usize,
    nodes: Vec<NodeId>,
}

impl Route {
    pub fn stream(&self) -> usize {
        self.stream
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }

    /// Node at 1-based route position `pos`.
    pub fn at(&self, pos: usize) -> Option<NodeId> {
        pos.checked_sub(1).and_then(|i| self.nodes.get(i).copied())
    }

    /// 1-based route position of `id`.
    pub fn position_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| *n == id).map(|i| i + 1)
    }
}

pub fn stream_route(
    geometry: &NodeGeometry,
    stream: usize,
    source: usize,
    destination: usize,
) -> Result<Route> {
    let cfg = geometry.config();
    if stream >= cfg.num_streams {
        return Err(Error::Route(format!(
            "stream {} does not exist in a {}-stream layout",
            stream + 1,
            cfg.num_streams
        )));
    }
    for node in [source, destination] {
        if !(1..=cfg.nodes_per_stream).contains(&node) {
            return Err(Error::Route(format!(
                "node {node} is outside the row (1..={})",
                cfg.nodes_per_stream
            )));
        }
    }
    if source == destination {
        return Err(Error::Route(format!(
            "source and destination are both node {source}"
        )));
    }
    let nodes: Vec<NodeId> = if source < destination {
        (source..=destination)
            .map(|n| NodeId::new(stream, n))
            .collect()
    } else {
        (destination..=source)
            .rev()
            .map(|n| NodeId::new(stream, n))
            .collect()
    };
    if nodes.len() < 3 {
        return Err(Error::Route(format!(
            "route {source}->{destination} has {} nodes, at least 3 are needed",
            nodes.len()
        )));
    }
    Ok(Route { stream, nodes })
}

/// The left-aligned route with `hops` hops in every stream of the layout.
pub fn aligned_routes(geometry: &NodeGeometry, hops: usize) -> Result<Vec<Route>> {
    (0..geometry.config().num_streams)
        .map(|s| stream_route(geometry, s, 1, hops + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, streams: usize) -> LayoutConfig {
        LayoutConfig {
            nodes_per_stream: n,
            num_streams: streams,
            hop_length_m: 100.0,
            row_separation_m: 300.0,
        }
    }

    #[test]
    fn rejects_small_rows_and_bad_stream_counts() {
        assert!(matches!(
            build_layout(cfg(2, 1)),
            Err(Error::TooFewNodes(2))
        ));
        assert!(matches!(
            build_layout(cfg(5, 3)),
            Err(Error::StreamCount(3))
        ));
        assert!(matches!(
            build_layout(cfg(5, 0)),
            Err(Error::StreamCount(0))
        ));
        let mut bad = cfg(5, 2);
        bad.row_separation_m = 0.0;
        assert!(build_layout(bad).is_err());
        bad.num_streams = 1;
        assert!(build_layout(bad).is_ok());
    }

    #[test]
    fn single_row_endpoints() {
        let g = build_layout(cfg(5, 1)).unwrap();
        assert_eq!(g.position(NodeId::new(0, 1)), (0.0, 0.0));
        assert_eq!(g.position(NodeId::new(0, 5)), (400.0, 0.0));
        assert_eq!(g.distance(NodeId::new(0, 1), NodeId::new(0, 5)), 400.0);
    }

    #[test]
    fn cross_row_distance() {
        let g = build_layout(cfg(6, 2)).unwrap();
        let d = g.distance(NodeId::new(0, 1), NodeId::new(1, 3));
        // sqrt(200^2 + 300^2)
        assert!((d - 360.555_127_546_398_9).abs() < 1e-9);
        assert_eq!(g.distance(NodeId::new(0, 4), NodeId::new(1, 4)), 300.0);
        assert_eq!(g.len(), 12);
    }

    #[test]
    fn routes() {
        let g = build_layout(cfg(6, 1)).unwrap();
        let r = stream_route(&g, 0, 1, 4).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r.hops(), 3);
        assert_eq!(
            r.nodes().iter().map(|n| n.node).collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        assert_eq!(stream_route(&g, 0, 1, 6).unwrap().hops(), 5);
        assert!(stream_route(&g, 0, 3, 3).is_err());
        assert!(stream_route(&g, 0, 3, 4).is_err());
        assert!(stream_route(&g, 0, 1, 7).is_err());
        assert!(stream_route(&g, 1, 1, 4).is_err());

        let back = stream_route(&g, 0, 5, 2).unwrap();
        assert_eq!(back.source(), NodeId::new(0, 5));
        assert_eq!(back.destination(), NodeId::new(0, 2));
        assert_eq!(back.position_of(NodeId::new(0, 4)), Some(2));
        assert_eq!(back.at(4), Some(NodeId::new(0, 2)));
        assert_eq!(back.at(0), None);
    }

    #[test]
    fn validated_range_flag() {
        assert!(cfg(6, 2).within_validated_range());
        assert!(!cfg(7, 1).within_validated_range());
    }
}
