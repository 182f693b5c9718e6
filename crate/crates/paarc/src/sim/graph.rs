//! Weighted stop graph and travel-time queries.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("stop `{0}` is not in the graph")]
    UnknownStop(String),
    #[error("duplicate stop id `{0}`")]
    DuplicateStop(String),
    #[error("edge travel time must be at least 1 second")]
    ZeroTravelTime,
    #[error("no path from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },
}

/// A stop with planar coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopPos {
    pub x: i64,
    pub y: i64,
}

/// Directed graph of stops with integer travel seconds on edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouteGraph {
    stops: BTreeMap<String, StopPos>,
    // Adjacency sorted by destination id for deterministic iteration.
    edges: BTreeMap<String, BTreeMap<String, u32>>,
}

impl RouteGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_stop(&mut self, id: &str, pos: StopPos) -> Result<(), GraphError> {
        if self.stops.contains_key(id) {
            return Err(GraphError::DuplicateStop(id.to_string()));
        }
        self.stops.insert(id.to_string(), pos);
        Ok(())
    }

    pub fn add_edge(&mut self, from: &str, to: &str, travel_seconds: u32) -> Result<(), GraphError> {
        if travel_seconds < 1 {
            return Err(GraphError::ZeroTravelTime);
        }
        for stop in [from, to] {
            if !self.stops.contains_key(stop) {
                return Err(GraphError::UnknownStop(stop.to_string()));
            }
        }
        self.edges.entry(from.to_string()).or_default().insert(to.to_string(), travel_seconds);
        Ok(())
    }

    pub fn has_stop(&self, id: &str) -> bool {
        self.stops.contains_key(id)
    }

    pub fn stops(&self) -> impl Iterator<Item = (&str, StopPos)> {
        self.stops.iter().map(|(id, pos)| (id.as_str(), *pos))
    }

    pub fn edge_travel(&self, from: &str, to: &str) -> Option<u32> {
        self.edges.get(from).and_then(|m| m.get(to)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.edges.iter().flat_map(|(from, outs)| {
            outs.iter().map(move |(to, s)| (from.as_str(), to.as_str(), *s))
        })
    }

    /// Minimum travel time in seconds between two stops (Dijkstra).
    pub fn compute_eta(&self, from: &str, to: &str) -> Result<u64, GraphError> {
        self.shortest_path(from, to).map(|(cost, _)| cost)
    }

    /// Minimum travel time plus one shortest path realizing it. Ties break
    /// deterministically toward lexicographically smaller predecessor stops.
    pub fn shortest_path(&self, from: &str, to: &str) -> Result<(u64, Vec<String>), GraphError> {
        for stop in [from, to] {
            if !self.stops.contains_key(stop) {
                return Err(GraphError::UnknownStop(stop.to_string()));
            }
        }
        let mut dist: BTreeMap<&str, u64> = BTreeMap::new();
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut heap: BinaryHeap<Reverse<(u64, &str)>> = BinaryHeap::new();
        dist.insert(from, 0);
        heap.push(Reverse((0, from)));

        while let Some(Reverse((cost, stop))) = heap.pop() {
            if dist.get(stop).is_some_and(|&d| cost > d) {
                continue;
            }
            if stop == to {
                break;
            }
            if let Some(outs) = self.edges.get(stop) {
                for (next, travel) in outs {
                    let next_cost = cost + u64::from(*travel);
                    let better = match dist.get(next.as_str()) {
                        None => true,
                        Some(&d) => {
                            next_cost < d
                                || (next_cost == d
                                    && prev.get(next.as_str()).is_some_and(|p| stop < *p))
                        }
                    };
                    if better {
                        dist.insert(next, next_cost);
                        prev.insert(next, stop);
                        heap.push(Reverse((next_cost, next)));
                    }
                }
            }
        }

        let cost = *dist.get(to).ok_or_else(|| GraphError::Unreachable {
            from: from.to_string(),
            to: to.to_string(),
        })?;
        let mut path = vec![to.to_string()];
        let mut cursor = to;
        while cursor != from {
            cursor = prev[cursor];
            path.push(cursor.to_string());
        }
        path.reverse();
        Ok((cost, path))
    }
}
