//! Directed communication graphs and their routing matrices.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use tvprox::linalg::DenseMatrix;

use crate::BenchError;

/// Nodes are numbered `1..=nodes`; edges and flows use those labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    /// `(source, destination)` pairs.
    pub flows: Vec<(usize, usize)>,
}

impl NetworkTopology {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>, flows: Vec<(usize, usize)>) -> Result<Self, BenchError> {
        let t = Self { nodes, edges, flows };
        t.validate()?;
        Ok(t)
    }

    /// Six nodes, eight links, flows `1 → 3` and `4 → 6`. The graph is
    /// strongly connected so every link lies on a cycle.
    pub fn six_node() -> Self {
        Self {
            nodes: 6,
            edges: vec![(1, 2), (2, 3), (3, 4), (4, 2), (2, 5), (5, 3), (5, 6), (6, 1)],
            flows: vec![(1, 3), (4, 6)],
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: String| Err(BenchError::Config(format!("topology: {msg}")));
        if self.nodes == 0 || self.edges.is_empty() || self.flows.is_empty() {
            return bad("need nodes, edges and flows".into());
        }
        let valid = |v: usize| (1..=self.nodes).contains(&v);
        for &(u, v) in &self.edges {
            if !valid(u) || !valid(v) || u == v {
                return bad(format!("invalid edge ({u}, {v})"));
            }
        }
        for &(s, d) in &self.flows {
            if !valid(s) || !valid(d) || s == d {
                return bad(format!("invalid flow ({s}, {d})"));
            }
            if self.shortest_path(s, d).is_none() {
                return bad(format!("no path from {s} to {d}"));
            }
        }
        Ok(())
    }

    pub fn links(&self) -> usize {
        self.edges.len()
    }

    /// Node-by-link incidence: `+1` where the link leaves the node, `−1`
    /// where it enters, so `(T x)_i` is the net outflow at node `i`.
    pub fn routing_matrix(&self) -> DenseMatrix<f64> {
        let mut t = DenseMatrix::zeros(self.nodes, self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            t[(u - 1, e)] = 1.0;
            t[(v - 1, e)] = -1.0;
        }
        t
    }

    /// Link indices of a fewest-hop path (breadth-first, lowest link index first).
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut via: Vec<Option<usize>> = vec![None; self.nodes + 1];
        let mut seen = vec![false; self.nodes + 1];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = Vec::new();
                let mut node = to;
                while node != from {
                    let e = via[node]?;
                    path.push(e);
                    node = self.edges[e].0;
                }
                path.reverse();
                return Some(path);
            }
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                if a == u && !seen[b] {
                    seen[b] = true;
                    via[b] = Some(e);
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// For each link on some cycle, the links of one such cycle.
    pub fn covering_cycles(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(e, &(u, v))| {
                self.shortest_path(v, u).map(|mut back| {
                    back.insert(0, e);
                    back
                })
            })
            .collect()
    }
}
