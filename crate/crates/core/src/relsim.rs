//! Finite models of measured equivalence relations.
//!
//! The space is `{0, …, N-1}` with every point of mass `1/N`. A graphing is a
//! list of partial injections; the relation it generates is the orbit
//! partition. Symmetric vertices are permutations whose graph lies in the
//! relation, and a witness family is a set of pairwise disjoint ones. For a
//! point `x` the fiber of a family `W` is `{w(x) : w ∈ W}`, and its boundary is
//! counted in the graph on the class of `x` with one edge per map pair.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::replica_rng;
use crate::union_find::UnionFind;
use crate::{Error, Rational, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSpace {
    n: usize,
}

impl FiniteSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("a space needs at least 2 points".into()));
        }
        Ok(FiniteSpace { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::OutOfRange(x));
        }
        Ok(())
    }
}

/// Injective partial map `x ↦ y`, stored in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialInjection {
    pairs: Vec<(usize, usize)>,
    forward: Vec<usize>,
}

impl PartialInjection {
    pub fn new(space: FiniteSpace, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut forward = vec![NONE; space.n];
        let mut hit = vec![false; space.n];
        for &(x, y) in &pairs {
            space.check(x)?;
            space.check(y)?;
            if forward[x] != NONE {
                return Err(Error::Precondition(format!("point {x} mapped twice")));
            }
            if hit[y] {
                return Err(Error::Precondition(format!("point {y} hit twice")));
            }
            forward[x] = y;
            hit[y] = true;
        }
        Ok(PartialInjection { pairs, forward })
    }

    pub fn from_permutation(space: FiniteSpace, perm: &[usize]) -> Result<Self> {
        if perm.len() != space.n {
            return Err(Error::Precondition("permutation length mismatch".into()));
        }
        Self::new(space, perm.iter().copied().enumerate().collect())
    }

    /// `x ↦ x + step mod N`.
    pub fn rotation(space: FiniteSpace, step: usize) -> Self {
        let n = space.n;
        Self::new(space, (0..n).map(|x| (x, (x + step) % n)).collect())
            .expect("rotations are bijective")
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.forward.get(x).copied().filter(|&y| y != NONE)
    }

    pub fn domain_size(&self) -> usize {
        self.pairs.len()
    }

    pub fn cost(&self) -> Rational {
        Rational::new(self.pairs.len() as u64, self.forward.len() as u64)
    }

    pub fn is_total(&self) -> bool {
        self.pairs.len() == self.forward.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graphing {
    space: FiniteSpace,
    maps: Vec<PartialInjection>,
}

impl Graphing {
    pub fn new(space: FiniteSpace, maps: Vec<PartialInjection>) -> Result<Self> {
        if maps.iter().any(|m| m.forward.len() != space.n) {
            return Err(Error::Precondition("map acts on a different space".into()));
        }
        Ok(Graphing { space, maps })
    }

    pub fn space(&self) -> FiniteSpace {
        self.space
    }

    pub fn maps(&self) -> &[PartialInjection] {
        &self.maps
    }

    /// Undirected edges `{x, y}`, deduplicated within each map, loops dropped.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut all = Vec::new();
        for m in &self.maps {
            let mut own: Vec<(usize, usize)> = m
                .pairs
                .iter()
                .filter(|(x, y)| x != y)
                .map(|&(x, y)| (x.min(y), x.max(y)))
                .collect();
            own.sort_unstable();
            own.dedup();
            all.extend(own);
        }
        all
    }
}

/// Orbit classes sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn same_class(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }
}

pub fn orbit_partition(g: &Graphing) -> Partition {
    let mut uf = UnionFind::new(g.space.n);
    for m in &g.maps {
        for &(x, y) in &m.pairs {
            uf.union(x, y);
        }
    }
    let classes = uf.classes();
    let mut class_of = vec![0; g.space.n];
    for (i, class) in classes.iter().enumerate() {
        for &x in class {
            class_of[x] = i;
        }
    }
    Partition { classes, class_of }
}

/// `Σ |dom φ_i| / N`.
pub fn cost(g: &Graphing) -> Rational {
    let total: usize = g.maps.iter().map(|m| m.domain_size()).sum();
    Rational::new(total as u64, g.space.n as u64)
}

/// Bijection of the space, used as a symmetric vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricVertex {
    perm: Vec<usize>,
}

impl SymmetricVertex {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; perm.len()];
        for &y in &perm {
            if y >= perm.len() || std::mem::replace(&mut hit[y], true) {
                return Err(Error::Precondition("symmetric vertex is not a bijection".into()));
            }
        }
        Ok(SymmetricVertex { perm })
    }

    pub fn identity(space: FiniteSpace) -> Self {
        SymmetricVertex {
            perm: (0..space.n).collect(),
        }
    }

    /// `φ^power` for a total map `φ`.
    pub fn power_of(phi: &PartialInjection, power: usize) -> Result<Self> {
        if !phi.is_total() {
            return Err(Error::Precondition("powers need a total map".into()));
        }
        let perm = (0..phi.forward.len())
            .map(|x| (0..power).fold(x, |y, _| phi.forward[y]))
            .collect();
        Ok(SymmetricVertex { perm })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.perm[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }
}

/// Pairwise disjoint symmetric vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFamily {
    vertices: Vec<SymmetricVertex>,
}

impl WitnessFamily {
    pub fn new(vertices: Vec<SymmetricVertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySet);
        }
        let n = vertices[0].perm.len();
        if vertices.iter().any(|w| w.perm.len() != n) {
            return Err(Error::Precondition("symmetric vertices on different spaces".into()));
        }
        let mut fiber = Vec::with_capacity(vertices.len());
        for x in 0..n {
            fiber.clear();
            fiber.extend(vertices.iter().map(|w| w.perm[x]));
            fiber.sort_unstable();
            if fiber.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::Precondition(format!(
                    "symmetric vertices agree at point {x}"
                )));
            }
        }
        Ok(WitnessFamily { vertices })
    }

    /// `{φ^0, …, φ^max_power}`.
    pub fn powers(phi: &PartialInjection, max_power: usize) -> Result<Self> {
        Self::new(
            (0..=max_power)
                .map(|i| SymmetricVertex::power_of(phi, i))
                .collect::<Result<_>>()?,
        )
    }

    pub fn vertices(&self) -> &[SymmetricVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn point_count(&self) -> usize {
        self.vertices[0].perm.len()
    }
}

fn check_family(g: &Graphing, w: &WitnessFamily, partition: &Partition) -> Result<()> {
    if w.point_count() != g.space.n {
        return Err(Error::Precondition("witness family on a different space".into()));
    }
    for v in &w.vertices {
        for x in 0..g.space.n {
            if !partition.same_class(x, v.perm[x]) {
                return Err(Error::Precondition(format!(
                    "symmetric vertex leaves the class of point {x}"
                )));
            }
        }
    }
    Ok(())
}

/// Per-point boundary sizes `|∂A^x|`.
fn fiber_boundaries(g: &Graphing, w: &WitnessFamily) -> Vec<u64> {
    let n = g.space.n;
    let mut adjacency = vec![Vec::new(); n];
    for (a, b) in g.edges() {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut mark = vec![NONE; n];
    (0..n)
        .map(|x| {
            for v in &w.vertices {
                mark[v.perm[x]] = x;
            }
            let mut boundary = 0u64;
            for v in &w.vertices {
                let y = v.perm[x];
                boundary += adjacency[y].iter().filter(|&&z| mark[z] != x).count() as u64;
            }
            boundary
        })
        .collect()
}

/// `Σ_x |∂A^x| / (N |W|)`.
pub fn witness_ratio(g: &Graphing, w: &WitnessFamily) -> Result<Rational> {
    let partition = orbit_partition(g);
    check_family(g, w, &partition)?;
    let total: u64 = fiber_boundaries(g, w).iter().sum();
    Ok(Rational::new(total, (g.space.n * w.len()) as u64))
}

/// Spanning forest of every orbit class, keeping pairs in map order.
pub fn spanning_treeing(g: &Graphing) -> Graphing {
    let mut uf = UnionFind::new(g.space.n);
    let maps = g
        .maps
        .iter()
        .map(|m| {
            let kept = m
                .pairs
                .iter()
                .copied()
                .filter(|&(x, y)| uf.union(x, y))
                .collect();
            PartialInjection::new(g.space, kept).expect("sub-injection of an injection")
        })
        .collect();
    Graphing {
        space: g.space,
        maps,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainReport {
    pub cost: Rational,
    pub cost_treeing: Rational,
    pub classes: usize,
    pub witness_ratio: Rational,
    /// `2 C(F)`.
    pub lhs: Rational,
    /// `2 + witness ratio`.
    pub rhs: Rational,
    pub holds: bool,
    /// `Σ_x deg_F(x) = 2 N C(F)`.
    pub degree_identity: bool,
    /// `Σ_{w} deg_F(w(x)) ≤ 2|W| + |∂A^x|` at every point.
    pub fiberwise: bool,
}

impl MainReport {
    pub fn passed(&self) -> bool {
        self.holds && self.degree_identity && self.fiberwise
    }
}

pub fn check_main_inequality(g: &Graphing, w: &WitnessFamily) -> Result<MainReport> {
    let ratio = witness_ratio(g, w)?;
    let n = g.space.n;
    let treeing = spanning_treeing(g);
    let cost_treeing = cost(&treeing);
    let classes = orbit_partition(g).len();

    let mut degree = vec![0u64; n];
    for (a, b) in treeing.edges() {
        degree[a] += 1;
        degree[b] += 1;
    }
    let degree_sum: u64 = degree.iter().sum();
    let degree_identity = Rational::new(degree_sum, 2 * n as u64) == cost_treeing
        && cost_treeing == Rational::new((n - classes) as u64, n as u64);

    let boundaries = fiber_boundaries(g, w);
    let k = w.len() as u64;
    let fiberwise = (0..n).all(|x| {
        let forest_degree: u64 = w.vertices.iter().map(|v| degree[v.perm[x]]).sum();
        forest_degree <= 2 * k + boundaries[x]
    });

    let lhs = cost_treeing * 2;
    let rhs = ratio + 2;
    Ok(MainReport {
        cost: cost(g),
        cost_treeing,
        classes,
        witness_ratio: ratio,
        lhs,
        rhs,
        holds: lhs <= rhs,
        degree_identity,
        fiberwise,
    })
}

/// Levels `B_1, …, B_n` of a tower for a single-cycle map and the residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RokhlinTower {
    pub levels: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
}

impl RokhlinTower {
    pub fn residual_measure(&self, space: FiniteSpace) -> Rational {
        Rational::new(self.residual.len() as u64, space.n as u64)
    }
}

/// Cuts the orbit of 0 into consecutive blocks of length `n`; the leftover
/// block is the residual.
pub fn rokhlin_tower(space: FiniteSpace, phi: &PartialInjection, n: usize) -> Result<RokhlinTower> {
    let size = space.n;
    if n < 1 {
        return Err(Error::Precondition("tower height must be at least 1".into()));
    }
    if size < 4 * (n - 1) {
        return Err(Error::Precondition(format!(
            "N = {size} is below 4(n - 1) = {}",
            4 * (n - 1)
        )));
    }
    if !phi.is_total() || phi.forward.len() != size {
        return Err(Error::Precondition("tower map must be a permutation of the space".into()));
    }
    let mut orbit = Vec::with_capacity(size);
    let mut x = 0;
    loop {
        orbit.push(x);
        x = phi.forward[x];
        if x == 0 {
            break;
        }
    }
    if orbit.len() != size {
        return Err(Error::Precondition("tower map is not a single cycle".into()));
    }
    let q = size / n;
    let levels = (0..n)
        .map(|i| (0..q).map(|j| orbit[j * n + i]).collect())
        .collect();
    Ok(RokhlinTower {
        levels,
        residual: orbit[q * n..].to_vec(),
    })
}

/// The rotation `φ` together with a sparse partial injection `ψ` whose
/// domain and image sit in the first tower level.
#[derive(Debug, Clone, PartialEq)]
pub struct HzeroGraphing {
    pub graphing: Graphing,
    pub tower: RokhlinTower,
    pub n: usize,
    pub psi_size: usize,
}

impl HzeroGraphing {
    pub fn phi(&self) -> &PartialInjection {
        &self.graphing.maps[0]
    }

    pub fn psi(&self) -> &PartialInjection {
        &self.graphing.maps[1]
    }

    /// `{φ^0, …, φ^n}`.
    pub fn witness(&self) -> Result<WitnessFamily> {
        WitnessFamily::powers(self.phi(), self.n)
    }

    /// Whether the domain and the image of `ψ` each meet every segment
    /// `{x, φx, …, φⁿx}` in at most one point.
    pub fn segment_property(&self) -> bool {
        let size = self.graphing.space.n;
        let mut in_domain = vec![false; size];
        let mut in_image = vec![false; size];
        for &(x, y) in self.psi().pairs() {
            in_domain[x] = true;
            in_image[y] = true;
        }
        let phi = self.phi();
        (0..size).all(|start| {
            let (mut d, mut i, mut x) = (0, 0, start);
            for _ in 0..=self.n {
                d += usize::from(in_domain[x]);
                i += usize::from(in_image[x]);
                x = phi.forward[x];
            }
            d <= 1 && i <= 1
        })
    }
}

/// `⌈εN⌉` with a small allowance for binary rounding of `ε`.
pub fn psi_size(size: usize, eps: f64) -> usize {
    (eps * size as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Cost `1 + ⌈εN⌉/N` graphing of the single-orbit relation of the rotation.
///
/// `ψ` maps the level point at orbit position `2jn` to the one at `(2j+1)n`
/// for `j < ⌈εN⌉`, so consecutive domain points (and image points) are `2n`
/// apart along the orbit, including across the wrap-around.
pub fn build_hzero_graphing(size: usize, n: usize, eps: f64) -> Result<HzeroGraphing> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition("eps must lie in (0, 1]".into()));
    }
    let space = FiniteSpace::new(size)?;
    let phi = PartialInjection::rotation(space, 1);
    let tower = rokhlin_tower(space, &phi, n)?;
    let m = psi_size(size, eps);
    if m < 1 {
        return Err(Error::Precondition("eps N rounds up to zero".into()));
    }
    let q = size / n;
    let wrap_capacity = if size > n { (size - n - 1) / (2 * n) + 1 } else { 0 };
    let capacity = wrap_capacity.min(q / 2);
    if m > capacity {
        return Err(Error::Precondition(format!(
            "cannot place {m} points of psi in the first tower level (room for {capacity})"
        )));
    }
    let pairs = (0..m).map(|j| (2 * j * n, (2 * j + 1) * n)).collect();
    let psi = PartialInjection::new(space, pairs)?;
    Ok(HzeroGraphing {
        graphing: Graphing::new(space, vec![phi, psi])?,
        tower,
        n,
        psi_size: m,
    })
}

/// Witness transfer from a subset `Y` to the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressReport {
    pub total_points: usize,
    pub subset_points: usize,
    pub n: usize,
    pub k: usize,
    /// `|Y_i| = |Z|`.
    pub part_size: usize,
    pub delta: Rational,
    pub mu_y: Rational,
    /// `Σ_{x∈X} |∂_{K'} A'^x|`.
    pub lifted_boundary: u64,
    /// `Σ_{y∈Y} |∂_K A^y|`.
    pub base_boundary: u64,
    /// `base_boundary + k·s + 3·n·s`.
    pub bound: u64,
    /// `ν(∂_{K'}A')` and the bound divided by `N`.
    pub lifted_measure: Rational,
    pub bound_measure: Rational,
    pub lifted_ratio: Rational,
    pub base_ratio: Rational,
    pub holds: bool,
}

/// Lifts a witness family `W` of a graphing `K` on `Y = {0, …, |Y|-1}` to
/// `X = {0, …, N-1}`: `X∖Y` is cut into `n` consecutive parts `Y_0, …,
/// Y_{n-1}` of size `s` that `φ` permutes cyclically, `θ` sends the first `s`
/// points of `Y` onto `Y_0`, and `ψ'_j = φ^j ⊔ ψ_j`.
pub fn compress(
    k_graphing: &Graphing,
    w: &WitnessFamily,
    total_points: usize,
    n: usize,
) -> Result<CompressReport> {
    let y_size = k_graphing.space.n;
    let k = w.len();
    if n <= k {
        return Err(Error::Precondition(format!(
            "n = {n} must exceed the family size k = {k}"
        )));
    }
    if total_points < y_size {
        return Err(Error::Precondition("Y must be a subset of X".into()));
    }
    let rest = total_points - y_size;
    if !rest.is_multiple_of(n) {
        return Err(Error::Precondition(format!(
            "|X \\ Y| = {rest} is not divisible into {n} parts"
        )));
    }
    let s = rest / n;
    if s > y_size {
        return Err(Error::Precondition("Y is too small to hold Z".into()));
    }
    let base = witness_ratio(k_graphing, w)?;
    let base_boundary: u64 = fiber_boundaries(k_graphing, w).iter().sum();

    let space = FiniteSpace::new(total_points)?;
    let part = |i: usize, t: usize| y_size + (i % n) * s + t;
    let mut maps: Vec<PartialInjection> = k_graphing
        .maps
        .iter()
        .map(|m| PartialInjection::new(space, m.pairs.clone()))
        .collect::<Result<_>>()?;
    if s > 0 {
        maps.push(PartialInjection::new(space, (0..s).map(|t| (t, part(0, t))).collect())?);
        let phi_pairs = (0..n)
            .flat_map(|i| (0..s).map(move |t| (i, t)))
            .map(|(i, t)| (part(i, t), part(i + 1, t)))
            .collect();
        maps.push(PartialInjection::new(space, phi_pairs)?);
    }
    let lifted = Graphing::new(space, maps)?;
    let family = WitnessFamily::new(
        w.vertices
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let mut perm = v.perm.clone();
                for i in 0..n {
                    for t in 0..s {
                        perm.push(part(i + j + 1, t));
                    }
                }
                SymmetricVertex::new(perm)
            })
            .collect::<Result<_>>()?,
    )?;
    let lifted_ratio = witness_ratio(&lifted, &family)?;
    let lifted_boundary: u64 = fiber_boundaries(&lifted, &family).iter().sum();
    let bound = base_boundary + (k * s) as u64 + (3 * n * s) as u64;
    let big_n = total_points as u64;
    Ok(CompressReport {
        total_points,
        subset_points: y_size,
        n,
        k,
        part_size: s,
        delta: Rational::new(s as u64, big_n),
        mu_y: Rational::new(y_size as u64, big_n),
        lifted_boundary,
        base_boundary,
        bound,
        lifted_measure: Rational::new(lifted_boundary, big_n),
        bound_measure: Rational::new(bound, big_n),
        lifted_ratio,
        base_ratio: base,
        holds: lifted_boundary <= bound,
    })
}

/// The `Z²` translation action on the torus `(Z/m)²` with its two generator
/// translations and the witness family of translations by `offsets`.
pub fn translation_action(m: usize, offsets: &[(i64, i64)]) -> Result<(Graphing, WitnessFamily)> {
    let space = FiniteSpace::new(m * m)?;
    let shift = |(dx, dy): (i64, i64)| -> Vec<usize> {
        let md = m as i64;
        (0..m * m)
            .map(|p| {
                let (x, y) = ((p % m) as i64, (p / m) as i64);
                let nx = (x + dx).rem_euclid(md) as usize;
                let ny = (y + dy).rem_euclid(md) as usize;
                nx + m * ny
            })
            .collect()
    };
    let maps = vec![
        PartialInjection::from_permutation(space, &shift((1, 0)))?,
        PartialInjection::from_permutation(space, &shift((0, 1)))?,
    ];
    let family = WitnessFamily::new(
        offsets
            .iter()
            .map(|&o| SymmetricVertex::new(shift(o)))
            .collect::<Result<_>>()?,
    )?;
    Ok((Graphing::new(space, maps)?, family))
}

/// Random graphing scenario with a witness family of powers of a
/// class-preserving cyclic permutation.
pub fn random_scenario(size: usize, seed: u64, replica: u64) -> Result<(Graphing, WitnessFamily)> {
    let space = FiniteSpace::new(size)?;
    let mut rng = replica_rng(seed, replica);
    let map_count = rng.random_range(1..=4);
    let mut maps = Vec::with_capacity(map_count);
    for i in 0..map_count {
        let mut image: Vec<usize> = (0..size).collect();
        image.shuffle(&mut rng);
        let density = if i == 0 && rng.random_bool(0.5) {
            1.0
        } else {
            rng.random_range(0.0..1.0)
        };
        let pairs = (0..size)
            .filter(|_| rng.random_bool(density))
            .map(|x| (x, image[x]))
            .collect();
        maps.push(PartialInjection::new(space, pairs)?);
    }
    let g = Graphing::new(space, maps)?;
    let partition = orbit_partition(&g);
    let mut sigma = vec![0; size];
    let mut smallest = size;
    for class in &partition.classes {
        let mut order = class.clone();
        order.shuffle(&mut rng);
        for (i, &x) in order.iter().enumerate() {
            sigma[x] = order[(i + 1) % order.len()];
        }
        smallest = smallest.min(class.len());
    }
    let sigma = PartialInjection::from_permutation(space, &sigma)?;
    let max_power = rng.random_range(0..smallest.min(8));
    Ok((g, WitnessFamily::powers(&sigma, max_power)?))
}
