//! Uniform spanning trees and forests via Wilson's algorithm, with free and
//! wired boundary conditions on Cayley balls, and the degree-based estimators
//! `cost = E[deg] / 2` and `β₁ = E[deg] / 2 - 1`.

use rand::Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use crate::graph::FiniteGraph;
use crate::groups::{cayley_ball_with_cap, CayleyBall, GeneratingSet, GroupSpec};
use crate::rng::replica_rng;
use crate::{Error, Result};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMode {
    /// Uniform spanning tree of the induced ball.
    Free,
    /// Outer sphere contracted to one vertex, whose edges are then dropped.
    Wired,
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(BoundaryMode::Free),
            "wired" => Ok(BoundaryMode::Wired),
            other => Err(Error::Precondition(format!(
                "unknown mode '{other}', expected free or wired"
            ))),
        }
    }
}

impl std::fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryMode::Free => "free",
            BoundaryMode::Wired => "wired",
        })
    }
}

/// One sampled forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestSample {
    /// Sorted edge indices into the underlying graph or ball.
    pub edges: Vec<usize>,
    pub degree: Vec<u32>,
    pub seed: u64,
    pub replica: u64,
}

impl ForestSample {
    fn from_edges(n: usize, mut edges: Vec<usize>, endpoints: impl Fn(usize) -> (usize, usize), seed: u64, replica: u64) -> Self {
        edges.sort_unstable();
        let mut degree = vec![0u32; n];
        for &e in &edges {
            let (u, v) = endpoints(e);
            degree[u] += 1;
            degree[v] += 1;
        }
        ForestSample {
            edges,
            degree,
            seed,
            replica,
        }
    }
}

/// Edges of a uniform spanning tree of a connected graph, by loop-erased
/// random walks towards `root`. Walks step along a uniformly chosen incident
/// half-edge, so parallel edges carry their multiplicity.
pub fn wilson_tree_edges<R: Rng + ?Sized>(
    graph: &FiniteGraph,
    root: usize,
    rng: &mut R,
) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut in_tree = vec![false; n];
    let mut next = vec![(usize::MAX, usize::MAX); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[root] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let nbrs = graph.neighbors(u);
            next[u] = nbrs[rng.random_range(0..nbrs.len())];
            u = next[u].0;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            edges.push(next[u].1);
            u = next[u].0;
        }
    }
    edges
}

/// Uniform spanning tree of `graph`, replica 0 of `seed`.
pub fn wilson_ust(graph: &FiniteGraph, root: usize, seed: u64) -> Result<ForestSample> {
    wilson_ust_replica(graph, root, seed, 0)
}

pub fn wilson_ust_replica(
    graph: &FiniteGraph,
    root: usize,
    seed: u64,
    replica: u64,
) -> Result<ForestSample> {
    if root >= graph.vertex_count() {
        return Err(Error::OutOfRange(root));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rng = replica_rng(seed, replica);
    let edges = wilson_tree_edges(graph, root, &mut rng);
    Ok(ForestSample::from_edges(
        graph.vertex_count(),
        edges,
        |e| graph.edges()[e],
        seed,
        replica,
    ))
}

/// Reusable free or wired forest sampler on a ball; samples are reported on
/// the ball's own vertex and edge indices.
#[derive(Debug, Clone)]
pub struct BallForest {
    mode: BoundaryMode,
    ball_graph: FiniteGraph,
    sampling: FiniteGraph,
    /// Sampling-graph edge → ball edge.
    edge_map: Vec<usize>,
    /// Contracted vertex in wired mode; its edges are dropped from samples.
    ground: Option<usize>,
}

impl BallForest {
    pub fn new(ball: &CayleyBall, mode: BoundaryMode) -> Result<Self> {
        if ball.radius() < 1 {
            return Err(Error::Precondition("ball radius must be at least 1".into()));
        }
        let ball_graph = FiniteGraph::from_ball(ball);
        let has_outer = (0..ball.len()).any(|v| !ball.is_interior(v));
        if mode == BoundaryMode::Free || !has_outer {
            return Ok(BallForest {
                mode,
                sampling: ball_graph.clone(),
                edge_map: (0..ball.edges().len()).collect(),
                ball_graph,
                ground: None,
            });
        }

        let mut slot = vec![usize::MAX; ball.len()];
        let mut m = 0;
        for (v, slot) in slot.iter_mut().enumerate() {
            if ball.is_interior(v) {
                *slot = m;
                m += 1;
            }
        }
        let ground = m;
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (e, edge) in ball.edges().iter().enumerate() {
            let map = |x: usize| if slot[x] == usize::MAX { ground } else { slot[x] };
            let (a, b) = (map(edge.u), map(edge.v));
            if a != b {
                edges.push((a, b));
                edge_map.push(e);
            }
        }
        let sampling = FiniteGraph::new(m + 1, edges)?;
        Ok(BallForest {
            mode,
            ball_graph,
            sampling,
            edge_map,
            ground: Some(ground),
        })
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    /// The induced ball graph with the outer sphere marked as boundary.
    pub fn ball_graph(&self) -> &FiniteGraph {
        &self.ball_graph
    }

    pub fn sample(&self, seed: u64, replica: u64) -> ForestSample {
        let mut rng = replica_rng(seed, replica);
        let root = self.ground.unwrap_or(0);
        let edges: Vec<usize> = wilson_tree_edges(&self.sampling, root, &mut rng)
            .into_iter()
            .filter(|&e| {
                let (a, b) = self.sampling.edges()[e];
                self.ground.is_none_or(|g| a != g && b != g)
            })
            .map(|e| self.edge_map[e])
            .collect();
        ForestSample::from_edges(
            self.ball_graph.vertex_count(),
            edges,
            |e| self.ball_graph.edges()[e],
            seed,
            replica,
        )
    }
}

/// One free or wired forest on a ball.
pub fn ball_forest(ball: &CayleyBall, mode: BoundaryMode, seed: u64) -> Result<ForestSample> {
    Ok(BallForest::new(ball, mode)?.sample(seed, 0))
}

/// Degree statistics at the base vertex with the derived estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub samples: u64,
    pub mean_degree: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub standard_error: f64,
    /// 99% normal-approximation half-width for the mean degree.
    pub ci99: f64,
    pub cost_estimate: f64,
    pub cost_ci99: f64,
    pub beta1_estimate: f64,
    pub beta1_ci99: f64,
}

impl DegreeStats {
    pub fn from_degrees(degrees: &[u32]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::Precondition("at least one sample is required".into()));
        }
        let n = degrees.len() as u64;
        let sum: u64 = degrees.iter().map(|&d| d as u64).sum();
        let mean = sum as f64 / n as f64;
        let variance = if n > 1 {
            degrees
                .iter()
                .map(|&d| (d as f64 - mean).powi(2))
                .sum::<f64>()
                / (n - 1) as f64
        } else {
            0.0
        };
        let standard_error = (variance / n as f64).sqrt();
        let ci99 = Z_99 * standard_error;
        Ok(DegreeStats {
            samples: n,
            mean_degree: mean,
            variance,
            standard_error,
            ci99,
            cost_estimate: mean / 2.0,
            cost_ci99: ci99 / 2.0,
            beta1_estimate: mean / 2.0 - 1.0,
            beta1_ci99: ci99 / 2.0,
        })
    }

    /// Whether `value` lies in the 99% interval around the β₁ estimate.
    pub fn beta1_ci_contains(&self, value: f64) -> bool {
        (self.beta1_estimate - value).abs() <= self.beta1_ci99
    }
}

fn collect_replicas<T: Send>(n: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Degrees at `vertex` over `n_samples` uniform spanning trees of `graph`.
pub fn sample_tree_degrees(
    graph: &FiniteGraph,
    vertex: usize,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<u32>> {
    if vertex >= graph.vertex_count() {
        return Err(Error::OutOfRange(vertex));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(collect_replicas(n_samples, |i| {
        let mut rng = replica_rng(seed, i);
        wilson_tree_edges(graph, 0, &mut rng)
            .into_iter()
            .filter(|&e| {
                let (a, b) = graph.edges()[e];
                a == vertex || b == vertex
            })
            .count() as u32
    }))
}

/// Degrees at the identity over `n_samples` forests of a ball.
pub fn sample_ball_degrees(sampler: &BallForest, n_samples: u64, seed: u64) -> Vec<u32> {
    collect_replicas(n_samples, |i| sampler.sample(seed, i).degree[0])
}

/// Samples forests on `B(r)` and aggregates the degree at the identity.
pub fn estimate_beta1(
    spec: &GroupSpec,
    gens: &GeneratingSet,
    radius: u32,
    mode: BoundaryMode,
    n_samples: u64,
    seed: u64,
    cap: usize,
) -> Result<DegreeStats> {
    if n_samples < 1 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let ball = cayley_ball_with_cap(spec, gens, radius, cap)?;
    let sampler = BallForest::new(&ball, mode)?;
    DegreeStats::from_degrees(&sample_ball_degrees(&sampler, n_samples, seed))
}

/// Per-sample check of `Σ_{x∈A} deg_F(x) ≤ 2|A| + |∂A|`, which holds for
/// every forest `F` of `graph`.
pub fn check_rsf_inequality(
    sample: &ForestSample,
    graph: &FiniteGraph,
    members: &[usize],
) -> Result<bool> {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    for &v in &members {
        if v >= graph.vertex_count() {
            return Err(Error::OutOfRange(v));
        }
        if graph.is_boundary(v) {
            return Err(Error::Precondition(format!(
                "vertex {v} lies on the boundary of the sampled region"
            )));
        }
    }
    let degree_sum: u64 = members.iter().map(|&v| sample.degree[v] as u64).sum();
    let bound = 2 * members.len() as u64 + graph.edge_boundary(&members) as u64;
    Ok(degree_sum <= bound)
}

/// Discrete torus `(Z/n)^d` for `d ∈ {1, 2}`.
pub fn torus_graph(n: usize, d: usize) -> Result<FiniteGraph> {
    if n < 3 {
        return Err(Error::Precondition("torus side must be at least 3".into()));
    }
    let edges = match d {
        1 => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        2 => {
            let at = |x: usize, y: usize| (x % n) + n * (y % n);
            let mut edges = Vec::with_capacity(2 * n * n);
            for y in 0..n {
                for x in 0..n {
                    edges.push((at(x, y), at(x + 1, y)));
                    edges.push((at(x, y), at(x, y + 1)));
                }
            }
            edges
        }
        _ => return Err(Error::Precondition("torus dimension must be 1 or 2".into())),
    };
    FiniteGraph::new(n.pow(d as u32), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cayley_ball, parse_group_spec};
    use crate::DEFAULT_VERTEX_CAP;

    fn ball(spec: &str, r: u32) -> CayleyBall {
        let spec = parse_group_spec(spec).unwrap();
        cayley_ball(&spec, &GeneratingSet::standard(&spec), r).unwrap()
    }

    fn is_forest(n: usize, edges: &[(usize, usize)], picked: &[usize]) -> bool {
        let mut uf = crate::union_find::UnionFind::new(n);
        picked.iter().all(|&e| uf.union(edges[e].0, edges[e].1))
    }

    #[test]
    fn tree_input_is_returned() {
        let path = FiniteGraph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        for seed in 0..5 {
            assert_eq!(wilson_ust(&path, 2, seed).unwrap().edges, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = FiniteGraph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(wilson_ust(&g, 0, 1), Err(Error::Disconnected));
        assert!(FiniteGraph::new(2, vec![(1, 1)]).is_err());
    }

    #[test]
    fn samples_are_spanning_trees_and_reproducible() {
        let g = torus_graph(4, 2).unwrap();
        for i in 0..20 {
            let s = wilson_ust_replica(&g, 0, 9, i).unwrap();
            assert_eq!(s.edges.len(), 15);
            assert!(is_forest(16, g.edges(), &s.edges));
            assert_eq!(s, wilson_ust_replica(&g, 0, 9, i).unwrap());
        }
        assert_ne!(
            wilson_ust_replica(&g, 0, 9, 0).unwrap().edges,
            wilson_ust_replica(&g, 0, 9, 1).unwrap().edges
        );
    }

    #[test]
    fn torus_shapes() {
        let c5 = torus_graph(5, 1).unwrap();
        assert_eq!((c5.vertex_count(), c5.edges().len()), (5, 5));
        let t3 = torus_graph(3, 2).unwrap();
        assert_eq!((t3.vertex_count(), t3.edges().len()), (9, 18));
        assert!((0..9).all(|v| t3.degree(v) == 4));
        assert!(torus_graph(2, 2).is_err());
        assert!(torus_graph(4, 3).is_err());
    }

    #[test]
    fn free_tree_ball_is_the_whole_ball() {
        let b = ball("F2", 3);
        let s = ball_forest(&b, BoundaryMode::Free, 5).unwrap();
        assert_eq!(s.edges.len(), b.len() - 1);
        assert_eq!(s.degree[0], 4);
    }

    #[test]
    fn wired_forest_stays_on_interior() {
        let b = ball("F2", 3);
        for seed in 0..20 {
            let s = ball_forest(&b, BoundaryMode::Wired, seed).unwrap();
            assert!(s.degree[0] <= 4);
            for (v, &d) in s.degree.iter().enumerate() {
                if !b.is_interior(v) {
                    assert_eq!(d, 0);
                }
            }
            let edges: Vec<(usize, usize)> = b.edges().iter().map(|e| (e.u, e.v)).collect();
            assert!(is_forest(b.len(), &edges, &s.edges));
        }
    }

    #[test]
    fn path_ball_center_degree() {
        let b = ball("Z", 4);
        assert_eq!(ball_forest(&b, BoundaryMode::Free, 3).unwrap().degree[0], 2);
    }

    #[test]
    fn estimators_on_trees_are_exact() {
        let spec = parse_group_spec("F2").unwrap();
        let gens = GeneratingSet::standard(&spec);
        let stats =
            estimate_beta1(&spec, &gens, 4, BoundaryMode::Free, 50, 1, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(stats.mean_degree, 4.0);
        assert_eq!(stats.variance, 0.0);
        assert_eq!(stats.beta1_estimate, 1.0);
        assert_eq!(stats.cost_estimate - 1.0, stats.beta1_estimate);

        let spec = parse_group_spec("Z").unwrap();
        let gens = GeneratingSet::standard(&spec);
        let stats =
            estimate_beta1(&spec, &gens, 6, BoundaryMode::Free, 30, 1, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(stats.beta1_estimate, 0.0);
        assert!(estimate_beta1(&spec, &gens, 6, BoundaryMode::Free, 0, 1, DEFAULT_VERTEX_CAP).is_err());
    }

    #[test]
    fn stats_transform_affinely() {
        let s = DegreeStats::from_degrees(&[1, 2, 2, 3]).unwrap();
        assert_eq!(s.mean_degree, 2.0);
        assert!((s.variance - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.cost_estimate, 1.0);
        assert_eq!(s.beta1_estimate, 0.0);
        assert_eq!(s.beta1_ci99, s.ci99 / 2.0);
        assert!(s.beta1_ci_contains(0.0));
        assert_eq!(DegreeStats::from_degrees(&[3]).unwrap().variance, 0.0);
    }

    #[test]
    fn rsf_inequality_worked_cases() {
        let c5 = torus_graph(5, 1).unwrap();
        let s = wilson_ust(&c5, 0, 2).unwrap();
        let all: Vec<usize> = (0..5).collect();
        assert!(check_rsf_inequality(&s, &c5, &all).unwrap());
        let sum: u32 = s.degree.iter().sum();
        assert_eq!(sum, 8);

        let b = ball("F2", 2);
        let g = FiniteGraph::from_ball(&b);
        let s = ball_forest(&b, BoundaryMode::Free, 0).unwrap();
        let b1: Vec<usize> = (0..5).collect();
        let degree_sum: u32 = b1.iter().map(|&v| s.degree[v]).sum();
        assert_eq!(degree_sum, 20);
        assert!(check_rsf_inequality(&s, &g, &b1).unwrap());
        assert!(check_rsf_inequality(&s, &g, &[5]).is_err());
    }
}
