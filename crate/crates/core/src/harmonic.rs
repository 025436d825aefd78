//! Harmonic 1-chains on finite balls.
//!
//! Relative cycles are edge flows with zero net flux at every interior vertex
//! (flux through the outer sphere is free); inner cycles are the cycles of the
//! subgraph induced on the interior. The harmonic space is the orthogonal
//! complement of the inner cycles inside the relative cycles, and its
//! projector `P` is represented by an orthonormal basis.
//!
//! Two routes compute the diagonal of `P` at the identity edges. The dense
//! route builds fundamental cycle bases, orthonormalizes them and extracts
//! the complement with an SVD. The resistance route uses that the diagonal
//! of the projector onto the cycle space of a graph at an edge `e` is
//! `1 - R_eff(e)`; the relative cycle space is the cycle space of the ball
//! with its outer sphere contracted, so
//! `P(e,e) = R_inner(e) - R_wired(e)` for inner edges and
//! `1 - R_wired(e)` otherwise. Resistances are solved by conjugate gradient.

use nalgebra::{DMatrix, DVector};

use crate::graph::FiniteGraph;
use crate::groups::CayleyBall;
use crate::{Error, Rational, Result};

/// Largest edge count handled by the dense route.
pub const DENSE_EDGE_LIMIT: usize = 2000;

/// Relative singular-value threshold for numerical ranks.
pub const RANK_TOLERANCE: f64 = 1e-8;

const CG_TOLERANCE: f64 = 1e-13;

/// Oriented edges of a ball or graph with its interior mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    vertex_count: usize,
    /// `(tail, head)`; the boundary of an edge is `head - tail`.
    edges: Vec<(usize, usize)>,
    interior: Vec<bool>,
    /// One edge at the base vertex per generator.
    center_edges: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

impl ChainComplex {
    /// Orients each ball edge from the smaller sphere to the larger one,
    /// ties broken by vertex index.
    pub fn from_ball(ball: &CayleyBall) -> Result<Self> {
        if ball.radius() < 1 {
            return Err(Error::Precondition("ball radius must be at least 1".into()));
        }
        let edges = ball
            .edges()
            .iter()
            .map(|e| {
                let key = |v: usize| (ball.sphere_of(v), v);
                if key(e.u) <= key(e.v) {
                    (e.u, e.v)
                } else {
                    (e.v, e.u)
                }
            })
            .collect();
        let interior = (0..ball.len()).map(|v| ball.is_interior(v)).collect();
        let mut center_edges = Vec::with_capacity(ball.generator_count());
        for label in 0..ball.generator_count() {
            let e = ball
                .incident(0)
                .iter()
                .copied()
                .find(|&e| ball.edges()[e].u == 0 && ball.edges()[e].label == label)
                .ok_or_else(|| {
                    Error::Precondition(format!("identity has no edge for generator {label}"))
                })?;
            center_edges.push(e);
        }
        Ok(Self::assemble(ball.len(), edges, interior, center_edges))
    }

    /// Orients each edge from the smaller vertex index to the larger one.
    pub fn from_graph(
        graph: &FiniteGraph,
        interior: Vec<bool>,
        center_edges: Vec<usize>,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        if interior.len() != n {
            return Err(Error::Precondition("interior mask length mismatch".into()));
        }
        for &e in &center_edges {
            let (u, v) = *graph.edges().get(e).ok_or(Error::OutOfRange(e))?;
            if u != graph.base() && v != graph.base() {
                return Err(Error::Precondition(format!(
                    "edge {e} is not incident to the base vertex"
                )));
            }
        }
        let edges = graph
            .edges()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        Ok(Self::assemble(n, edges, interior, center_edges))
    }

    fn assemble(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        interior: Vec<bool>,
        center_edges: Vec<usize>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (e, &(t, h)) in edges.iter().enumerate() {
            adjacency[t].push(e);
            adjacency[h].push(e);
        }
        ChainComplex {
            vertex_count,
            edges,
            interior,
            center_edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn oriented_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn center_edges(&self) -> &[usize] {
        &self.center_edges
    }

    /// Column `e` of the signed incidence matrix as `[(tail, -1), (head, +1)]`.
    pub fn boundary_column(&self, e: usize) -> [(usize, i8); 2] {
        let (t, h) = self.edges[e];
        [(t, -1), (h, 1)]
    }

    fn is_inner_edge(&self, e: usize) -> bool {
        let (t, h) = self.edges[e];
        self.interior[t] && self.interior[h]
    }

    fn has_outer(&self) -> bool {
        self.interior.iter().any(|&i| !i)
    }

    /// Node map contracting every non-interior vertex to one ground node.
    fn wired_nodes(&self) -> (Vec<usize>, usize) {
        let ground = self.interior.iter().filter(|&&x| x).count();
        let mut next = 0;
        let node = self
            .interior
            .iter()
            .map(|&inside| {
                if inside {
                    next += 1;
                    next - 1
                } else {
                    ground
                }
            })
            .collect();
        (node, ground + usize::from(self.has_outer()))
    }

    /// `dim` of the relative cycle space, `|E| - rank(∂ on interior rows)`.
    pub fn relative_cycle_dimension(&self) -> usize {
        let (node, count) = self.wired_nodes();
        let edges: Vec<usize> = (0..self.edge_count()).collect();
        let forest = spanning_forest(count, &edges, |e| {
            let (t, h) = self.edges[e];
            (node[t], node[h])
        });
        self.edge_count() - forest.tree_edges
    }

    /// `dim` of the cycle space of the interior-induced subgraph.
    pub fn inner_cycle_dimension(&self) -> usize {
        let inner: Vec<usize> = (0..self.edge_count())
            .filter(|&e| self.is_inner_edge(e))
            .collect();
        let forest = spanning_forest(self.vertex_count, &inner, |e| self.edges[e]);
        inner.len() - forest.tree_edges
    }

    /// Combinatorial dimension of the harmonic space.
    pub fn harmonic_dimension(&self) -> usize {
        self.relative_cycle_dimension() - self.inner_cycle_dimension()
    }

    fn edge_boundary(&self, inside: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(t, h)| inside[t] != inside[h])
            .count()
    }
}

struct Forest {
    /// Parent node and tree edge, `None` for roots.
    parent: Vec<Option<(usize, usize)>>,
    in_tree: Vec<bool>,
    tree_edges: usize,
}

/// BFS spanning forest over `count` nodes using the listed edges.
fn spanning_forest(
    count: usize,
    edges: &[usize],
    ends: impl Fn(usize) -> (usize, usize),
) -> Forest {
    let max_edge = edges.iter().copied().max().map_or(0, |e| e + 1);
    let mut adjacency = vec![Vec::new(); count];
    for &e in edges {
        let (a, b) = ends(e);
        if a != b {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
    }
    let mut parent = vec![None; count];
    let mut seen = vec![false; count];
    let mut in_tree = vec![false; max_edge];
    let mut tree_edges = 0;
    let mut queue = std::collections::VecDeque::new();
    for root in 0..count {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        while let Some(a) = queue.pop_front() {
            for &(b, e) in &adjacency[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some((a, e));
                    in_tree[e] = true;
                    tree_edges += 1;
                    queue.push_back(b);
                }
            }
        }
    }
    Forest {
        parent,
        in_tree,
        tree_edges,
    }
}

/// Integer fundamental cycles of the listed edges, as columns over all edges
/// of `cc`. `ends` gives each edge's `(tail node, head node)`.
fn fundamental_cycles(
    cc: &ChainComplex,
    count: usize,
    edges: &[usize],
    ends: impl Fn(usize) -> (usize, usize),
) -> DMatrix<f64> {
    let forest = spanning_forest(count, edges, &ends);
    let chords: Vec<usize> = edges
        .iter()
        .copied()
        .filter(|&e| !forest.in_tree.get(e).copied().unwrap_or(false))
        .collect();
    let mut basis = DMatrix::zeros(cc.edge_count(), chords.len());
    // Adds `sign` times the tree path from `x` up to its root.
    let add_path = |col: &mut nalgebra::DVectorViewMut<'_, f64>, mut x: usize, sign: f64| {
        while let Some((p, e)) = forest.parent[x] {
            let (tail, _) = ends(e);
            col[e] += if tail == x { sign } else { -sign };
            x = p;
        }
    };
    for (j, &e) in chords.iter().enumerate() {
        let (a, b) = ends(e);
        let mut col = basis.column_mut(j);
        col[e] += 1.0;
        if a != b {
            add_path(&mut col, b, 1.0);
            add_path(&mut col, a, -1.0);
        }
    }
    basis
}

fn check_dense(cc: &ChainComplex) -> Result<()> {
    if cc.edge_count() > DENSE_EDGE_LIMIT {
        return Err(Error::TooLarge(format!(
            "{} edges exceed the dense limit of {DENSE_EDGE_LIMIT}",
            cc.edge_count()
        )));
    }
    Ok(())
}

/// Orthonormal basis of a subspace of edge space.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub basis: DMatrix<f64>,
}

impl Subspace {
    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    fn from_independent(cc: &ChainComplex, columns: DMatrix<f64>) -> Self {
        if columns.ncols() == 0 {
            return Subspace {
                basis: DMatrix::zeros(cc.edge_count(), 0),
            };
        }
        Subspace {
            basis: columns.qr().q(),
        }
    }
}

/// Kernel of the incidence matrix restricted to interior rows.
pub fn relative_cycle_space(cc: &ChainComplex) -> Result<Subspace> {
    check_dense(cc)?;
    let (node, count) = cc.wired_nodes();
    let edges: Vec<usize> = (0..cc.edge_count()).collect();
    let cycles = fundamental_cycles(cc, count, &edges, |e| {
        let (t, h) = cc.edges[e];
        (node[t], node[h])
    });
    Ok(Subspace::from_independent(cc, cycles))
}

/// Cycle space of the interior-induced subgraph.
pub fn inner_cycle_space(cc: &ChainComplex) -> Result<Subspace> {
    check_dense(cc)?;
    let inner: Vec<usize> = (0..cc.edge_count())
        .filter(|&e| cc.is_inner_edge(e))
        .collect();
    let cycles = fundamental_cycles(cc, cc.vertex_count, &inner, |e| cc.edges[e]);
    Ok(Subspace::from_independent(cc, cycles))
}

/// Orthonormal basis of relative cycles orthogonal to inner cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpace {
    pub basis: DMatrix<f64>,
    pub center_edges: Vec<usize>,
    /// Smallest retained singular value over the largest discarded one in
    /// the complement extraction; `None` when nothing was discarded.
    pub singular_gap: Option<f64>,
}

impl HarmonicSpace {
    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    /// Diagonal entry `P(e, e)`.
    pub fn projector_diagonal(&self, e: usize) -> f64 {
        self.basis.row(e).norm_squared()
    }

    /// `Σ_s ⟨P δ_s, δ_s⟩` over the identity edges.
    pub fn center_trace(&self) -> f64 {
        self.center_edges
            .iter()
            .map(|&e| self.projector_diagonal(e))
            .sum()
    }

    /// Largest interior flux and largest inner product with an orthonormal
    /// inner-cycle basis, over all basis columns.
    pub fn verify(&self, cc: &ChainComplex) -> Result<(f64, f64)> {
        let mut flux = DMatrix::<f64>::zeros(cc.vertex_count, self.dimension());
        for (e, &(t, h)) in cc.edges.iter().enumerate() {
            for j in 0..self.dimension() {
                let x = self.basis[(e, j)];
                flux[(t, j)] -= x;
                flux[(h, j)] += x;
            }
        }
        let max_flux = (0..cc.vertex_count)
            .filter(|&v| cc.interior[v])
            .flat_map(|v| flux.row(v).iter().map(|x| x.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        let inner = inner_cycle_space(cc)?;
        let overlap = (inner.basis.transpose() * &self.basis).amax();
        Ok((max_flux, overlap))
    }
}

/// Dense extraction of the harmonic space.
pub fn harmonic_projector(cc: &ChainComplex) -> Result<HarmonicSpace> {
    let relative = relative_cycle_space(cc)?;
    let inner = inner_cycle_space(cc)?;
    let expected = relative.dimension() - inner.dimension();
    let m = cc.edge_count();
    if relative.dimension() == 0 || expected == 0 {
        return Ok(HarmonicSpace {
            basis: DMatrix::zeros(m, 0),
            center_edges: cc.center_edges.clone(),
            singular_gap: None,
        });
    }
    let residual =
        &relative.basis - &inner.basis * (inner.basis.transpose() * &relative.basis);
    let svd = residual.svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::Numerical("SVD did not return left vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = numerical_rank_of(&sigma);
    if rank != expected {
        return Err(Error::Numerical(format!(
            "harmonic rank {rank} differs from the combinatorial dimension {expected}"
        )));
    }
    let mut basis = DMatrix::zeros(m, rank);
    for (j, &i) in order.iter().take(rank).enumerate() {
        basis.set_column(j, &u.column(i));
    }
    Ok(HarmonicSpace {
        basis,
        center_edges: cc.center_edges.clone(),
        singular_gap: singular_gap(&sigma, rank),
    })
}

fn numerical_rank_of(sorted_desc: &[f64]) -> usize {
    let Some(&top) = sorted_desc.first() else {
        return 0;
    };
    if top <= 0.0 {
        return 0;
    }
    sorted_desc
        .iter()
        .take_while(|&&s| s > RANK_TOLERANCE * top)
        .count()
}

fn singular_gap(sorted_desc: &[f64], rank: usize) -> Option<f64> {
    if rank == 0 || rank >= sorted_desc.len() {
        return None;
    }
    Some(sorted_desc[rank - 1] / sorted_desc[rank])
}

/// Numerical rank of a matrix and the gap `σ_k / σ_{k+1}` at that rank.
pub fn numerical_rank(m: &DMatrix<f64>) -> (usize, Option<f64>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0, None);
    }
    let mut sigma: Vec<f64> = m.singular_values().iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let rank = numerical_rank_of(&sigma);
    (rank, singular_gap(&sigma, rank))
}

/// Laplacian with some vertices held at potential zero, restricted to the
/// remaining active vertices.
struct GroundedLaplacian {
    slot: Vec<usize>,
    neighbors: Vec<Vec<usize>>,
    diagonal: Vec<f64>,
}

impl GroundedLaplacian {
    /// `active[v]` marks free vertices; every listed edge with at least one
    /// active endpoint contributes to the diagonal.
    fn new(n: usize, edges: impl Iterator<Item = (usize, usize)>, active: &[bool]) -> Self {
        let mut slot = vec![usize::MAX; n];
        let mut k = 0;
        for v in 0..n {
            if active[v] {
                slot[v] = k;
                k += 1;
            }
        }
        let mut neighbors = vec![Vec::new(); k];
        let mut diagonal = vec![0.0; k];
        for (a, b) in edges {
            if a == b {
                continue;
            }
            let (sa, sb) = (slot[a], slot[b]);
            if sa != usize::MAX {
                diagonal[sa] += 1.0;
                if sb != usize::MAX {
                    neighbors[sa].push(sb);
                }
            }
            if sb != usize::MAX {
                diagonal[sb] += 1.0;
                if sa != usize::MAX {
                    neighbors[sb].push(sa);
                }
            }
        }
        GroundedLaplacian {
            slot,
            neighbors,
            diagonal,
        }
    }

    fn apply(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        for i in 0..self.diagonal.len() {
            let s: f64 = self.neighbors[i].iter().map(|&j| x[j]).sum();
            out[i] = self.diagonal[i] * x[i] - s;
        }
    }

    /// Effective resistance between `u` and `v`.
    fn resistance(&self, u: usize, v: usize) -> Result<f64> {
        let k = self.diagonal.len();
        let mut b = DVector::zeros(k);
        if self.slot[u] != usize::MAX {
            b[self.slot[u]] += 1.0;
        }
        if self.slot[v] != usize::MAX {
            b[self.slot[v]] -= 1.0;
        }
        let x = self.solve(&b)?;
        let potential = |w: usize| {
            if self.slot[w] == usize::MAX {
                0.0
            } else {
                x[self.slot[w]]
            }
        };
        Ok(potential(u) - potential(v))
    }

    /// Jacobi-preconditioned conjugate gradient.
    fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let k = b.len();
        let mut x = DVector::zeros(k);
        let b_norm = b.norm();
        if b_norm == 0.0 {
            return Ok(x);
        }
        let precondition = |r: &DVector<f64>| {
            DVector::from_iterator(k, r.iter().zip(&self.diagonal).map(|(ri, d)| ri / d))
        };
        let mut r = b.clone();
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = r.dot(&z);
        let mut ap = DVector::zeros(k);
        for _ in 0..(20 * k + 100) {
            if r.norm() <= CG_TOLERANCE * b_norm {
                return Ok(x);
            }
            self.apply(&p, &mut ap);
            let alpha = rz / p.dot(&ap);
            x.axpy(alpha, &p, 1.0);
            r.axpy(-alpha, &ap, 1.0);
            z = precondition(&r);
            let rz_next = r.dot(&z);
            p = &z + (rz_next / rz) * &p;
            rz = rz_next;
        }
        if r.norm() <= 1e-9 * b_norm {
            return Ok(x);
        }
        Err(Error::Numerical(format!(
            "conjugate gradient stalled at relative residual {:e}",
            r.norm() / b_norm
        )))
    }
}

/// `P(e, e)` from effective resistances, without forming a basis.
pub fn projector_diagonal_resistance(cc: &ChainComplex, e: usize) -> Result<f64> {
    let (t, h) = *cc.edges.get(e).ok_or(Error::OutOfRange(e))?;
    let wired = GroundedLaplacian::new(cc.vertex_count, cc.edges.iter().copied(), &cc.interior);
    let r_wired = if cc.has_outer() {
        wired.resistance(t, h)?
    } else {
        inner_resistance(cc, t, h, false)?
    };
    let free = if cc.is_inner_edge(e) {
        inner_resistance(cc, t, h, true)?
    } else {
        1.0
    };
    Ok(free - r_wired)
}

/// Resistance between the endpoints of an edge inside the component of `t`,
/// using only inner edges when `inner_only` is set.
fn inner_resistance(cc: &ChainComplex, t: usize, h: usize, inner_only: bool) -> Result<f64> {
    let usable = |e: usize| !inner_only || cc.is_inner_edge(e);
    let mut component = vec![false; cc.vertex_count];
    component[t] = true;
    let mut stack = vec![t];
    while let Some(a) = stack.pop() {
        for &e in &cc.adjacency[a] {
            if !usable(e) {
                continue;
            }
            let (x, y) = cc.edges[e];
            let b = if x == a { y } else { x };
            if !component[b] {
                component[b] = true;
                stack.push(b);
            }
        }
    }
    let mut active = component;
    active[t] = false;
    let edges = (0..cc.edge_count())
        .filter(|&e| usable(e))
        .map(|e| cc.edges[e])
        .filter(|&(a, b)| active[a] || active[b] || a == t || b == t);
    GroundedLaplacian::new(cc.vertex_count, edges, &active).resistance(h, t)
}

/// Center trace through the resistance route.
pub fn center_trace_resistance(cc: &ChainComplex) -> Result<f64> {
    cc.center_edges
        .iter()
        .map(|&e| projector_diagonal_resistance(cc, e))
        .sum()
}

/// Center trace through the dense route when the complex is small enough and
/// through the resistance route otherwise.
pub fn center_trace(cc: &ChainComplex) -> Result<f64> {
    if cc.edge_count() <= DENSE_EDGE_LIMIT {
        Ok(harmonic_projector(cc)?.center_trace())
    } else {
        center_trace_resistance(cc)
    }
}

/// Ranks of the harmonic basis restricted to the edges touching `A` and to
/// the edge boundary of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionRanks {
    pub rank_as: usize,
    pub rank_boundary: usize,
    pub equal: bool,
    pub as_edges: usize,
    pub boundary_edges: usize,
    pub gap_as: Option<f64>,
    pub gap_boundary: Option<f64>,
}

fn admissible_mask(cc: &ChainComplex, members: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; cc.vertex_count];
    for &v in members {
        if v >= cc.vertex_count {
            return Err(Error::OutOfRange(v));
        }
        inside[v] = true;
    }
    for &v in members {
        let neighbors_interior = cc.adjacency[v].iter().all(|&e| {
            let (t, h) = cc.edges[e];
            cc.interior[t] && cc.interior[h]
        });
        if !cc.interior[v] || !neighbors_interior {
            return Err(Error::Precondition(format!(
                "vertex {v} or one of its neighbors is not interior"
            )));
        }
    }
    Ok(inside)
}

pub fn restriction_rank_check(
    h: &HarmonicSpace,
    cc: &ChainComplex,
    members: &[usize],
) -> Result<RestrictionRanks> {
    let inside = admissible_mask(cc, members)?;
    let touching: Vec<usize> = (0..cc.edge_count())
        .filter(|&e| {
            let (t, hd) = cc.edges[e];
            inside[t] || inside[hd]
        })
        .collect();
    let boundary: Vec<usize> = touching
        .iter()
        .copied()
        .filter(|&e| {
            let (t, hd) = cc.edges[e];
            inside[t] != inside[hd]
        })
        .collect();
    let rows = |idx: &[usize]| h.basis.select_rows(idx.iter());
    let (rank_as, gap_as) = numerical_rank(&rows(&touching));
    let (rank_boundary, gap_boundary) = numerical_rank(&rows(&boundary));
    Ok(RestrictionRanks {
        rank_as,
        rank_boundary,
        equal: rank_as == rank_boundary,
        as_edges: touching.len(),
        boundary_edges: boundary.len(),
        gap_as,
        gap_boundary,
    })
}

/// Finite version of the trace bound chain for one set `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgReport {
    pub center_trace: f64,
    pub size: usize,
    pub ranks: RestrictionRanks,
    pub edge_boundary: usize,
    pub rank_ratio: f64,
    pub boundary_ratio: Rational,
    /// `rank_as = rank_boundary ≤ |∂A|`.
    pub rank_ok: bool,
    /// `center_trace ≤ rank_as / |A|`; informational.
    pub trace_below_rank_ratio: bool,
}

pub fn cg_inequality_report(
    h: &HarmonicSpace,
    cc: &ChainComplex,
    members: &[usize],
) -> Result<CgReport> {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    let ranks = restriction_rank_check(h, cc, &members)?;
    let inside = admissible_mask(cc, &members)?;
    let edge_boundary = cc.edge_boundary(&inside);
    let size = members.len();
    let center_trace = h.center_trace();
    let rank_ratio = ranks.rank_as as f64 / size as f64;
    Ok(CgReport {
        center_trace,
        size,
        edge_boundary,
        rank_ratio,
        boundary_ratio: Rational::new(edge_boundary as u64, size as u64),
        rank_ok: ranks.equal && ranks.rank_boundary <= edge_boundary,
        trace_below_rank_ratio: center_trace <= rank_ratio + 1e-12,
        ranks,
    })
}
