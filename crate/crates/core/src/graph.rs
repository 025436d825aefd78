//! Finite undirected multigraphs used by the samplers and the chain complexes.

use crate::groups::CayleyBall;
use crate::{Error, Result};

/// Undirected multigraph without loops.
///
/// `boundary` marks vertices whose neighborhoods are truncated (the outer
/// sphere of a ball); statements about vertex sets are only exact away from
/// them. `base` is the distinguished vertex `o` where degrees are sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    boundary: Vec<bool>,
    base: usize,
}

impl FiniteGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::OutOfRange(u.max(v)));
            }
            if u == v {
                return Err(Error::Precondition(format!("loop at vertex {u}")));
            }
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
        Ok(FiniteGraph {
            n,
            edges,
            adjacency,
            boundary: vec![false; n],
            base: 0,
        })
    }

    /// The induced graph of a ball, outer sphere marked as boundary, base at
    /// the identity. Edge indices agree with the ball's.
    pub fn from_ball(ball: &CayleyBall) -> Self {
        let edges = ball.edges().iter().map(|e| (e.u, e.v)).collect();
        let mut g = FiniteGraph::new(ball.len(), edges).expect("ball edges are valid");
        g.boundary = (0..ball.len()).map(|v| !ball.is_interior(v)).collect();
        g
    }

    pub fn with_boundary(mut self, boundary: Vec<bool>) -> Result<Self> {
        if boundary.len() != self.n {
            return Err(Error::Precondition("boundary mask length mismatch".into()));
        }
        self.boundary = boundary;
        Ok(self)
    }

    pub fn with_base(mut self, base: usize) -> Result<Self> {
        if base >= self.n {
            return Err(Error::OutOfRange(base));
        }
        self.base = base;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge index)` pairs at `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Number of edges with exactly one endpoint in `members`.
    pub fn edge_boundary(&self, members: &[usize]) -> usize {
        let mut inside = vec![false; self.n];
        for &v in members {
            inside[v] = true;
        }
        self.edges
            .iter()
            .filter(|&&(u, v)| inside[u] != inside[v])
            .count()
    }
}
