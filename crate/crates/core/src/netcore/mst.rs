use serde::{Deserialize, Serialize};

use super::layer::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanningTree {
    pub entities: Vec<String>,
    /// Exactly N−1 edges, each with `src < dst`, in the order Kruskal accepted them.
    pub edges: Vec<Edge>,
}

impl SpanningTree {
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Edge set as sorted `(src, dst)` pairs.
    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.edges.iter().map(|e| (e.src, e.dst)).collect();
        v.sort_unstable();
        v
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over the complete graph. Edges are considered in
/// `(weight, min(i,j), max(i,j))` order, which makes the result unique.
pub fn minimum_spanning_tree(d: &DistanceMatrix) -> Result<SpanningTree> {
    spanning_tree_of(d.entities(), d.values())
}

/// Same as [`minimum_spanning_tree`] for an arbitrary symmetric weight
/// matrix; only the upper triangle is read.
pub fn spanning_tree_of(entities: &[String], weights: &[Vec<f64>]) -> Result<SpanningTree> {
    let n = weights.len();
    if entities.len() != n || weights.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("weight matrix is not N×N".into()));
    }
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: n });
    }
    let mut candidates = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = weights[i][j];
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "distance ({i},{j}) is not finite"
                )));
            }
            candidates.push(Edge {
                src: i,
                dst: j,
                weight: w,
            });
        }
    }
    candidates.sort_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(a.src.cmp(&b.src))
            .then(a.dst.cmp(&b.dst))
    });
    let mut sets = DisjointSet::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    for e in candidates {
        if sets.union(e.src, e.dst) {
            edges.push(e);
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(SpanningTree {
        entities: entities.to_vec(),
        edges,
    })
}
