//! Edge and inner boundaries of finite vertex sets in Cayley balls, exact
//! minimum boundary ratios, ball profiles and growth estimates.
//!
//! All sets live in the interior `B(r - 1)` of a radius-`r` ball so that
//! every neighbor of a member is present and boundary counts agree with the
//! infinite Cayley graph.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::groups::{cayley_ball_with_cap, CayleyBall, GeneratingSet, GroupSpec};
use crate::{Error, Rational, Result};

/// Default node budget for [`min_ratio_exact`].
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Tolerance used when comparing the Kazhdan displacement to `sqrt(ratio)`.
pub const KAZHDAN_TOLERANCE: f64 = 1e-12;

/// Sorted set of interior vertices of a ball.
#[derive(Debug, Clone)]
pub struct VertexSet<'a> {
    ball: &'a CayleyBall,
    members: Vec<usize>,
}

impl<'a> VertexSet<'a> {
    pub fn new(ball: &'a CayleyBall, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        for &v in &members {
            if v >= ball.len() {
                return Err(Error::OutOfRange(v));
            }
            if !ball.is_interior(v) {
                return Err(Error::NotInterior {
                    vertex: v,
                    sphere: ball.sphere_of(v),
                    radius: ball.radius(),
                });
            }
        }
        Ok(VertexSet { ball, members })
    }

    pub fn ball(&self) -> &'a CayleyBall {
        self.ball
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    fn outside_neighbors(&self, v: usize) -> usize {
        self.ball
            .incident(v)
            .iter()
            .filter(|&&e| !self.contains(self.ball.edges()[e].other(v)))
            .count()
    }
}

/// Number of edges with exactly one endpoint in `set`.
pub fn edge_boundary(set: &VertexSet<'_>) -> u64 {
    set.members
        .iter()
        .map(|&v| set.outside_neighbors(v) as u64)
        .sum()
}

/// Number of members with at least one neighbor outside `set`.
pub fn inner_boundary(set: &VertexSet<'_>) -> u64 {
    set.members
        .iter()
        .filter(|&&v| set.outside_neighbors(v) > 0)
        .count() as u64
}

/// Whether some member has no neighbor inside `set`.
pub fn has_isolated_vertex(set: &VertexSet<'_>) -> bool {
    set.members
        .iter()
        .any(|&v| set.outside_neighbors(v) == set.ball.degree(v))
}

/// `max_s |A Δ As|` over the generators.
fn max_translation_defect(set: &VertexSet<'_>) -> u64 {
    let ball = set.ball;
    (0..ball.generator_count())
        .map(|s| {
            let kept = set
                .members
                .iter()
                .filter(|&&a| {
                    ball.right_multiply(a, s)
                        .is_some_and(|b| set.contains(b))
                })
                .count();
            2 * (set.len() - kept) as u64
        })
        .max()
        .unwrap_or(0)
}

/// Largest displacement `sqrt(|A Δ As| / |A|)` of the normalized
/// characteristic vector under right translation by a generator.
pub fn kazhdan_ratio(set: &VertexSet<'_>) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok((max_translation_defect(set) as f64 / set.len() as f64).sqrt())
}

/// Boundary data of a vertex set with the Følner sandwich and Kazhdan checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub size: u64,
    pub edge_boundary: u64,
    pub inner_boundary: u64,
    pub ratio: Rational,
    pub folner_ratio: Rational,
    pub kazhdan_value: f64,
    /// `2|S| - 1`.
    pub sandwich_factor: u64,
    pub has_isolated_vertex: bool,
    /// `Føl ≤ ratio ≤ (2|S|-1)·Føl`, or `None` when skipped because of an
    /// isolated vertex.
    pub sandwich: Option<bool>,
    pub kazhdan_ok: bool,
    /// `(2|S|-1)(1 - 1/ω)` for a supplied growth estimate; informational.
    pub growth_bound: Option<f64>,
}

impl BoundaryReport {
    /// True when every asserted comparison holds.
    pub fn passed(&self) -> bool {
        self.kazhdan_ok && self.sandwich.unwrap_or(true)
    }
}

pub fn check_comparisons(
    set: &VertexSet<'_>,
    growth_estimate: Option<f64>,
) -> Result<BoundaryReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let size = set.len() as u64;
    let boundary = edge_boundary(set);
    let inner = inner_boundary(set);
    let ratio = Rational::new(boundary, size);
    let folner = Rational::new(inner, size);
    let factor = 2 * set.ball.generator_count() as u64 - 1;
    let isolated = has_isolated_vertex(set);
    let sandwich = (!isolated).then(|| folner <= ratio && ratio <= folner * factor);

    let defect = max_translation_defect(set);
    let kazhdan_value = (defect as f64 / size as f64).sqrt();
    let exact_ok = defect <= boundary;
    let float_ok = kazhdan_value <= (boundary as f64 / size as f64).sqrt() + KAZHDAN_TOLERANCE;

    Ok(BoundaryReport {
        size,
        edge_boundary: boundary,
        inner_boundary: inner,
        ratio,
        folner_ratio: folner,
        kazhdan_value,
        sandwich_factor: factor,
        has_isolated_vertex: isolated,
        sandwich,
        kazhdan_ok: exact_ok && float_ok,
        growth_bound: growth_estimate.map(|w| factor as f64 * (1.0 - 1.0 / w)),
    })
}

/// Minimizer found by [`min_ratio_exact`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinRatio {
    pub members: Vec<usize>,
    pub boundary: u64,
    pub ratio: Rational,
    /// Connected sets visited.
    pub nodes: u64,
}

pub fn min_ratio_exact(ball: &CayleyBall, max_size: usize) -> Result<MinRatio> {
    min_ratio_exact_with_budget(ball, max_size, DEFAULT_NODE_BUDGET)
}

/// Exact minimum of `|∂A| / |A|` over nonempty interior sets with
/// `|A| ≤ max_size`.
///
/// If `A` splits into induced components `A_1, ..., A_m`, its boundary is the
/// disjoint union of theirs and its ratio is a mediant of theirs, so some
/// component does at least as well; the search therefore enumerates connected
/// induced subsets only, each exactly once, keyed by its smallest vertex.
/// Ties go to the lexicographically smallest sorted member list.
pub fn min_ratio_exact_with_budget(
    ball: &CayleyBall,
    max_size: usize,
    budget: u64,
) -> Result<MinRatio> {
    if max_size == 0 {
        return Err(Error::Precondition("max_size must be at least 1".into()));
    }
    let interior = ball.interior_vertices();
    if interior.is_empty() {
        return Err(Error::Precondition("ball has no interior vertices".into()));
    }
    let neighbors: Vec<Vec<usize>> = (0..ball.len())
        .map(|v| {
            if !ball.is_interior(v) {
                return Vec::new();
            }
            let mut ns: Vec<usize> = ball
                .incident(v)
                .iter()
                .map(|&e| ball.edges()[e].other(v))
                .filter(|&w| ball.is_interior(w))
                .collect();
            ns.sort_unstable();
            ns.dedup();
            ns
        })
        .collect();
    let counter = AtomicU64::new(0);
    let shared = Shared {
        ball,
        neighbors: &neighbors,
        max_size,
        budget,
        counter: &counter,
    };

    #[cfg(feature = "parallel")]
    let per_root: Vec<Result<Option<Best>>> = interior
        .par_iter()
        .map_init(|| Search::new(ball.len()), |search, &root| search.run(&shared, root))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let per_root: Vec<Result<Option<Best>>> = {
        let mut search = Search::new(ball.len());
        interior.iter().map(|&root| search.run(&shared, root)).collect()
    };

    let mut best: Option<Best> = None;
    for result in per_root {
        if let Some(candidate) = result? {
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                best = Some(candidate);
            }
        }
    }
    let best = best.expect("interior is nonempty");
    Ok(MinRatio {
        ratio: Rational::new(best.boundary, best.members.len() as u64),
        boundary: best.boundary,
        members: best.members,
        nodes: counter.load(AtomicOrdering::Relaxed),
    })
}

struct Shared<'a> {
    ball: &'a CayleyBall,
    neighbors: &'a [Vec<usize>],
    max_size: usize,
    budget: u64,
    counter: &'a AtomicU64,
}

#[derive(Debug, Clone)]
struct Best {
    boundary: u64,
    members: Vec<usize>,
}

impl Best {
    fn cmp_ratio(boundary: u64, size: usize, other: &Best) -> Ordering {
        (boundary as u128 * other.members.len() as u128)
            .cmp(&(other.boundary as u128 * size as u128))
    }

    fn beats(&self, other: &Best) -> bool {
        match Self::cmp_ratio(self.boundary, self.members.len(), other) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.members < other.members,
        }
    }
}

struct Search {
    blocked: Vec<u32>,
    in_set: Vec<bool>,
    set: Vec<usize>,
    best: Option<Best>,
}

impl Search {
    fn new(n: usize) -> Self {
        Search {
            blocked: vec![0; n],
            in_set: vec![false; n],
            set: Vec::new(),
            best: None,
        }
    }

    fn run(&mut self, shared: &Shared<'_>, root: usize) -> Result<Option<Best>> {
        self.best = None;
        let ext: Vec<usize> = shared.neighbors[root]
            .iter()
            .copied()
            .filter(|&u| u > root)
            .collect();
        let boundary = shared.ball.degree(root) as u64;
        self.push(shared, root);
        let outcome = self
            .visit(shared, boundary)
            .and_then(|_| self.extend(shared, root, ext, boundary));
        self.pop(shared, root);
        outcome.map(|_| self.best.take())
    }

    fn push(&mut self, shared: &Shared<'_>, w: usize) {
        self.in_set[w] = true;
        self.set.push(w);
        self.blocked[w] += 1;
        for &u in &shared.neighbors[w] {
            self.blocked[u] += 1;
        }
    }

    fn pop(&mut self, shared: &Shared<'_>, w: usize) {
        self.in_set[w] = false;
        self.set.pop();
        self.blocked[w] -= 1;
        for &u in &shared.neighbors[w] {
            self.blocked[u] -= 1;
        }
    }

    fn visit(&mut self, shared: &Shared<'_>, boundary: u64) -> Result<()> {
        if shared.counter.fetch_add(1, AtomicOrdering::Relaxed) >= shared.budget {
            return Err(Error::BudgetExceeded {
                budget: shared.budget,
            });
        }
        let improves = match &self.best {
            None => true,
            Some(b) => Best::cmp_ratio(boundary, self.set.len(), b) != Ordering::Greater,
        };
        if improves {
            let mut members = self.set.clone();
            members.sort_unstable();
            let candidate = Best { boundary, members };
            if self.best.as_ref().is_none_or(|b| candidate.beats(b)) {
                self.best = Some(candidate);
            }
        }
        Ok(())
    }

    fn extend(
        &mut self,
        shared: &Shared<'_>,
        root: usize,
        mut ext: Vec<usize>,
        boundary: u64,
    ) -> Result<()> {
        if self.set.len() >= shared.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(
                shared.neighbors[w]
                    .iter()
                    .copied()
                    .filter(|&u| u > root && self.blocked[u] == 0),
            );
            let ball = shared.ball;
            let inner = ball
                .incident(w)
                .iter()
                .filter(|&&e| self.in_set[ball.edges()[e].other(w)])
                .count() as u64;
            let new_boundary = boundary + ball.degree(w) as u64 - 2 * inner;
            self.push(shared, w);
            let outcome = self
                .visit(shared, new_boundary)
                .and_then(|_| self.extend(shared, root, next, new_boundary));
            self.pop(shared, w);
            outcome?;
        }
        Ok(())
    }
}

/// One row of a ball profile: the boundary ratio of `B(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub n: u32,
    pub ball: u64,
    pub boundary: u64,
    pub ratio: Rational,
}

/// Boundary ratios of `B(n)` for `n ≤ r_max`, computed inside `B(r_max + 1)`.
pub fn ratio_profile(
    spec: &GroupSpec,
    gens: &GeneratingSet,
    r_max: u32,
    cap: usize,
) -> Result<Vec<ProfileRow>> {
    if r_max < 1 {
        return Err(Error::Precondition("r_max must be at least 1".into()));
    }
    let ball = cayley_ball_with_cap(spec, gens, r_max + 1, cap)?;
    Ok(ball_profile(&ball))
}

/// Profile rows for every `n < ball.radius()`.
pub fn ball_profile(ball: &CayleyBall) -> Vec<ProfileRow> {
    let r = ball.radius() as usize;
    let mut crossing = vec![0u64; r + 1];
    for e in ball.edges() {
        let (a, b) = (ball.sphere_of(e.u), ball.sphere_of(e.v));
        if a != b {
            crossing[a.min(b) as usize] += 1;
        }
    }
    let sizes = ball.ball_sizes();
    (0..r)
        .map(|n| ProfileRow {
            n: n as u32,
            ball: sizes[n],
            boundary: crossing[n],
            ratio: Rational::new(crossing[n], sizes[n]),
        })
        .collect()
}

/// Growth-rate data from ball sizes `|B(0)|, ..., |B(N)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    /// `|S(N)| / |S(N-1)|`, or 1 once the ball has saturated.
    pub estimate: f64,
    /// `|B(N)|^(1/N)`.
    pub root_estimate: f64,
    /// `|S(n)| / |S(n-1)|` for `n = 1, ..., N` while the spheres are nonempty.
    pub sphere_ratios: Vec<f64>,
}

pub fn growth_rate(ball_sizes: &[u64]) -> Result<GrowthEstimate> {
    if ball_sizes.len() < 2 {
        return Err(Error::Precondition("at least two radii are required".into()));
    }
    let spheres: Vec<u64> = std::iter::once(ball_sizes[0])
        .chain(ball_sizes.windows(2).map(|w| w[1] - w[0]))
        .collect();
    let sphere_ratios: Vec<f64> = spheres
        .windows(2)
        .take_while(|w| w[0] > 0)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect();
    let top = ball_sizes.len() - 1;
    let saturated = spheres[top] == 0;
    let estimate = if saturated {
        1.0
    } else {
        *sphere_ratios.last().expect("spheres are nonempty")
    };
    Ok(GrowthEstimate {
        estimate,
        root_estimate: (ball_sizes[top] as f64).powf(1.0 / top as f64),
        sphere_ratios,
    })
}
