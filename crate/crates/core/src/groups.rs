//! Finitely generated groups with decidable normal forms and their Cayley balls.
//!
//! Supported groups are free groups `F<k>`, free abelian groups `Z^<d>`,
//! finite abelian groups `Zmod<m>^<d>` and direct products of these. Every
//! group carries a list of default generator names (`a`, `b`, `c`, ...) which
//! generating-set words are written in; an uppercase letter denotes the
//! inverse of the corresponding generator.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use crate::{Error, Result, DEFAULT_VERTEX_CAP};

const NAME_POOL: &str = "abcdefghijklmnopqrstuvwxyz";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Free { rank: usize },
    FreeAbelian { dim: usize },
    CyclicPower { modulus: u32, dim: usize },
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

/// A group together with the names of its default generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    generator_names: Vec<char>,
}

/// Normal form of a group element.
///
/// Free words store letters as `±(i + 1)` for the `i`-th generator and never
/// contain an adjacent inverse pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Word(Vec<i32>),
    Vector(Vec<i64>),
    Residues(Vec<u32>),
    Pair(Box<Element>, Box<Element>),
}

impl GroupSpec {
    pub fn free(rank: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::InvalidSpec("free rank must be at least 1".into()));
        }
        Self::named(GroupKind::Free { rank })
    }

    pub fn free_abelian(dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        Self::named(GroupKind::FreeAbelian { dim })
    }

    pub fn cyclic_power(modulus: u32, dim: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidSpec("modulus must be at least 2".into()));
        }
        if dim < 1 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        Self::named(GroupKind::CyclicPower { modulus, dim })
    }

    pub fn product(left: GroupSpec, right: GroupSpec) -> Result<Self> {
        Self::named(GroupKind::Product(Box::new(left), Box::new(right)))
    }

    fn named(kind: GroupKind) -> Result<Self> {
        let mut spec = GroupSpec {
            kind,
            generator_names: Vec::new(),
        };
        let mut names = NAME_POOL.chars();
        spec.assign_names(&mut names)?;
        Ok(spec)
    }

    fn assign_names(&mut self, pool: &mut std::str::Chars<'_>) -> Result<()> {
        self.generator_names.clear();
        match &mut self.kind {
            GroupKind::Product(left, right) => {
                left.assign_names(pool)?;
                right.assign_names(pool)?;
                self.generator_names = left
                    .generator_names
                    .iter()
                    .chain(right.generator_names.iter())
                    .copied()
                    .collect();
            }
            _ => {
                for _ in 0..self.rank() {
                    let name = pool.next().ok_or_else(|| {
                        Error::InvalidSpec("more than 26 default generators".into())
                    })?;
                    self.generator_names.push(name);
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generator_names(&self) -> &[char] {
        &self.generator_names
    }

    /// Number of default generators.
    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Free { rank } => *rank,
            GroupKind::FreeAbelian { dim } => *dim,
            GroupKind::CyclicPower { dim, .. } => *dim,
            GroupKind::Product(l, r) => l.rank() + r.rank(),
        }
    }

    /// Group order, `None` for infinite groups.
    pub fn order(&self) -> Option<u64> {
        match &self.kind {
            GroupKind::Free { .. } | GroupKind::FreeAbelian { .. } => None,
            GroupKind::CyclicPower { modulus, dim } => {
                (*modulus as u64).checked_pow(*dim as u32)
            }
            GroupKind::Product(l, r) => l.order()?.checked_mul(r.order()?),
        }
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::Free { .. } => Element::Word(Vec::new()),
            GroupKind::FreeAbelian { dim } => Element::Vector(vec![0; *dim]),
            GroupKind::CyclicPower { dim, .. } => Element::Residues(vec![0; *dim]),
            GroupKind::Product(l, r) => {
                Element::Pair(Box::new(l.identity()), Box::new(r.identity()))
            }
        }
    }

    /// The `index`-th default generator.
    pub fn generator(&self, index: usize) -> Result<Element> {
        if index >= self.rank() {
            return Err(Error::OutOfRange(index));
        }
        Ok(match &self.kind {
            GroupKind::Free { .. } => Element::Word(vec![index as i32 + 1]),
            GroupKind::FreeAbelian { dim } => {
                let mut v = vec![0; *dim];
                v[index] = 1;
                Element::Vector(v)
            }
            GroupKind::CyclicPower { dim, .. } => {
                let mut v = vec![0; *dim];
                v[index] = 1;
                Element::Residues(v)
            }
            GroupKind::Product(l, r) => {
                if index < l.rank() {
                    Element::Pair(Box::new(l.generator(index)?), Box::new(r.identity()))
                } else {
                    Element::Pair(
                        Box::new(l.identity()),
                        Box::new(r.generator(index - l.rank())?),
                    )
                }
            }
        })
    }

    /// Product `g·h` of two normal forms.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        match (&self.kind, g, h) {
            (GroupKind::Free { .. }, Element::Word(a), Element::Word(b)) => {
                let mut out = a.clone();
                for &letter in b {
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                Element::Word(out)
            }
            (GroupKind::FreeAbelian { .. }, Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (GroupKind::CyclicPower { modulus, .. }, Element::Residues(a), Element::Residues(b)) => {
                Element::Residues(a.iter().zip(b).map(|(x, y)| (x + y) % modulus).collect())
            }
            (GroupKind::Product(l, r), Element::Pair(a1, a2), Element::Pair(b1, b2)) => {
                Element::Pair(Box::new(l.multiply(a1, b1)), Box::new(r.multiply(a2, b2)))
            }
            _ => panic!("element shape does not match group {self}"),
        }
    }

    pub fn inverse(&self, g: &Element) -> Element {
        match (&self.kind, g) {
            (GroupKind::Free { .. }, Element::Word(w)) => {
                Element::Word(w.iter().rev().map(|x| -x).collect())
            }
            (GroupKind::FreeAbelian { .. }, Element::Vector(v)) => {
                Element::Vector(v.iter().map(|x| -x).collect())
            }
            (GroupKind::CyclicPower { modulus, .. }, Element::Residues(v)) => {
                Element::Residues(v.iter().map(|x| (modulus - x) % modulus).collect())
            }
            (GroupKind::Product(l, r), Element::Pair(a, b)) => {
                Element::Pair(Box::new(l.inverse(a)), Box::new(r.inverse(b)))
            }
            _ => panic!("element shape does not match group {self}"),
        }
    }

    /// Brings an arbitrary representative into normal form.
    pub fn normalize(&self, g: &Element) -> Result<Element> {
        let bad = || Error::InvalidSpec(format!("element {g:?} does not belong to {self}"));
        match (&self.kind, g) {
            (GroupKind::Free { rank }, Element::Word(w)) => {
                let mut out: Vec<i32> = Vec::with_capacity(w.len());
                for &letter in w {
                    if letter == 0 || letter.unsigned_abs() as usize > *rank {
                        return Err(bad());
                    }
                    if out.last() == Some(&-letter) {
                        out.pop();
                    } else {
                        out.push(letter);
                    }
                }
                Ok(Element::Word(out))
            }
            (GroupKind::FreeAbelian { dim }, Element::Vector(v)) if v.len() == *dim => {
                Ok(g.clone())
            }
            (GroupKind::CyclicPower { modulus, dim }, Element::Residues(v)) if v.len() == *dim => {
                Ok(Element::Residues(v.iter().map(|x| x % modulus).collect()))
            }
            (GroupKind::Product(l, r), Element::Pair(a, b)) => Ok(Element::Pair(
                Box::new(l.normalize(a)?),
                Box::new(r.normalize(b)?),
            )),
            _ => Err(bad()),
        }
    }

    /// Evaluates a word over the default generator names; uppercase letters
    /// are inverses and `1` (or the empty word) is the identity.
    pub fn parse_word(&self, word: &str) -> Result<Element> {
        let word = word.trim();
        let mut g = self.identity();
        if word == "1" {
            return Ok(g);
        }
        for (position, c) in word.char_indices() {
            let lower = c.to_ascii_lowercase();
            let index = self
                .generator_names
                .iter()
                .position(|&n| n == lower)
                .ok_or_else(|| Error::Parse {
                    position,
                    message: format!("unknown generator '{c}'"),
                })?;
            let s = self.generator(index)?;
            let s = if c.is_ascii_uppercase() {
                self.inverse(&s)
            } else {
                s
            };
            g = self.multiply(&g, &s);
        }
        Ok(g)
    }

    /// Human-readable label of a normal form.
    pub fn label(&self, g: &Element) -> String {
        match (&self.kind, g) {
            (GroupKind::Free { .. }, Element::Word(w)) => {
                if w.is_empty() {
                    return "1".to_string();
                }
                w.iter()
                    .map(|&x| {
                        let c = self.generator_names[x.unsigned_abs() as usize - 1];
                        if x < 0 {
                            c.to_ascii_uppercase()
                        } else {
                            c
                        }
                    })
                    .collect()
            }
            (_, Element::Vector(v)) => format!(
                "({})",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            (_, Element::Residues(v)) => format!(
                "({})",
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            (GroupKind::Product(l, r), Element::Pair(a, b)) => {
                format!("({};{})", l.label(a), r.label(b))
            }
            _ => format!("{g:?}"),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Free { rank } => write!(f, "F{rank}"),
            GroupKind::FreeAbelian { dim } => write!(f, "Z^{dim}"),
            GroupKind::CyclicPower { modulus, dim } => write!(f, "Zmod{modulus}^{dim}"),
            GroupKind::Product(l, r) => write!(f, "({l}) x ({r})"),
        }
    }
}

/// Parses `F<k> | Z^<d> | Zmod<m>^<d> | (<spec>) x (<spec>)`.
///
/// `Z` and `Zmod<m>` are accepted as shorthands for exponent 1.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let mut parser = SpecParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let kind = parser.product()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    GroupSpec::named(kind)
}

struct SpecParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl SpecParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.bytes[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn product(&mut self) -> Result<GroupKind> {
        let mut left = self.term()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'x') {
                self.pos += 1;
                let right = self.term()?;
                left = GroupKind::Product(
                    Box::new(GroupSpec {
                        kind: left,
                        generator_names: Vec::new(),
                    }),
                    Box::new(GroupSpec {
                        kind: right,
                        generator_names: Vec::new(),
                    }),
                );
            } else {
                return Ok(left);
            }
        }
    }

    fn term(&mut self) -> Result<GroupKind> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.product()?;
            self.skip_ws();
            if self.peek() != Some(b')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        self.atom()
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                position: start,
                message: "number out of range".into(),
            })
    }

    fn exponent(&mut self) -> Result<u64> {
        if self.eat("^") {
            self.number()
        } else {
            Ok(1)
        }
    }

    fn atom(&mut self) -> Result<GroupKind> {
        let start = self.pos;
        let at = |message: &str| Error::Parse {
            position: start,
            message: message.to_string(),
        };
        if self.eat("F") {
            let rank = self.number()? as usize;
            if rank < 1 {
                return Err(at("free rank must be at least 1"));
            }
            Ok(GroupKind::Free { rank })
        } else if self.eat("Zmod") {
            let modulus = self.number()?;
            if modulus < 2 || modulus > u32::MAX as u64 {
                return Err(at("modulus must be at least 2"));
            }
            let dim = self.exponent()? as usize;
            if dim < 1 {
                return Err(at("dimension must be at least 1"));
            }
            Ok(GroupKind::CyclicPower {
                modulus: modulus as u32,
                dim,
            })
        } else if self.eat("Z") {
            let dim = self.exponent()? as usize;
            if dim < 1 {
                return Err(at("dimension must be at least 1"));
            }
            Ok(GroupKind::FreeAbelian { dim })
        } else {
            Err(self.error("expected F<k>, Z^<d>, Zmod<m>^<d> or '('"))
        }
    }
}

/// Ordered multiset of non-identity generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    elements: Vec<Element>,
    words: Vec<String>,
}

impl GeneratingSet {
    /// The default generators `a, b, ...` of `spec`.
    pub fn standard(spec: &GroupSpec) -> Self {
        let words: Vec<String> = spec.generator_names.iter().map(|c| c.to_string()).collect();
        let elements = (0..spec.rank())
            .map(|i| spec.generator(i).expect("index in range"))
            .collect();
        GeneratingSet { elements, words }
    }

    /// Parses a comma-separated list of words such as `a,b` or `aB,ab`.
    pub fn from_words(spec: &GroupSpec, text: &str) -> Result<Self> {
        let words: Vec<String> = text
            .split(',')
            .map(|w| w.trim().to_string())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::InvalidGenerators("no generators given".into()));
        }
        let elements = words
            .iter()
            .map(|w| spec.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        Self::checked(spec, elements, words)
    }

    pub fn new(spec: &GroupSpec, elements: Vec<Element>) -> Result<Self> {
        let elements = elements
            .iter()
            .map(|g| spec.normalize(g))
            .collect::<Result<Vec<_>>>()?;
        let words = elements.iter().map(|g| spec.label(g)).collect();
        Self::checked(spec, elements, words)
    }

    fn checked(spec: &GroupSpec, elements: Vec<Element>, words: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGenerators("no generators given".into()));
        }
        let id = spec.identity();
        if let Some(i) = elements.iter().position(|g| *g == id) {
            return Err(Error::InvalidGenerators(format!(
                "generator {} ('{}') is the identity",
                i, words[i]
            )));
        }
        Ok(GeneratingSet { elements, words })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Undirected edge `{u, v}` with `v = u·s_label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: usize,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Radius-`r` ball around the identity in a Cayley graph.
///
/// Vertices are stored in breadth-first order with the identity at index 0,
/// so the vertices of a smaller ball are a prefix of those of a larger one.
/// The edge list is that of the induced subgraph: one edge per unordered pair
/// `{g, gs}` and generator `s`, with a single edge for involutive generators.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    spec: GroupSpec,
    generators: GeneratingSet,
    radius: u32,
    vertices: Vec<Element>,
    index: HashMap<Element, usize>,
    sphere: Vec<u32>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
    forward: Vec<usize>,
    involutions: Vec<bool>,
}

const NO_VERTEX: usize = usize::MAX;

pub fn cayley_ball(spec: &GroupSpec, gens: &GeneratingSet, radius: u32) -> Result<CayleyBall> {
    cayley_ball_with_cap(spec, gens, radius, DEFAULT_VERTEX_CAP)
}

pub fn cayley_ball_with_cap(
    spec: &GroupSpec,
    gens: &GeneratingSet,
    radius: u32,
    cap: usize,
) -> Result<CayleyBall> {
    let id = spec.identity();
    let steps: Vec<(Element, Element)> = gens
        .elements()
        .iter()
        .map(|s| (s.clone(), spec.inverse(s)))
        .collect();
    let involutions: Vec<bool> = gens
        .elements()
        .iter()
        .map(|s| spec.multiply(s, s) == id)
        .collect();

    let mut vertices = vec![id.clone()];
    let mut sphere = vec![0u32];
    let mut index = HashMap::new();
    index.insert(id, 0usize);
    let mut head = 0;
    while head < vertices.len() {
        let d = sphere[head];
        if d >= radius {
            break;
        }
        let g = vertices[head].clone();
        for (s, s_inv) in &steps {
            for step in [s, s_inv] {
                let h = spec.multiply(&g, step);
                if !index.contains_key(&h) {
                    if vertices.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    index.insert(h.clone(), vertices.len());
                    vertices.push(h);
                    sphere.push(d + 1);
                }
            }
        }
        head += 1;
    }

    let k = steps.len();
    let n = vertices.len();
    let mut forward = vec![NO_VERTEX; n * k];
    let mut edges = Vec::new();
    for (u, g) in vertices.iter().enumerate() {
        for (i, (s, _)) in steps.iter().enumerate() {
            if let Some(&v) = index.get(&spec.multiply(g, s)) {
                forward[u * k + i] = v;
                if !(involutions[i] && v < u) {
                    edges.push(Edge { u, v, label: i });
                }
            }
        }
    }
    let mut adjacency = vec![Vec::new(); n];
    for (e, edge) in edges.iter().enumerate() {
        adjacency[edge.u].push(e);
        adjacency[edge.v].push(e);
    }

    Ok(CayleyBall {
        spec: spec.clone(),
        generators: gens.clone(),
        radius,
        vertices,
        index,
        sphere,
        edges,
        adjacency,
        forward,
        involutions,
    })
}

impl CayleyBall {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generators(&self) -> &GeneratingSet {
        &self.generators
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Element] {
        &self.vertices
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn sphere_of(&self, v: usize) -> u32 {
        self.sphere[v]
    }

    pub fn spheres(&self) -> &[u32] {
        &self.sphere
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Indices of the edges incident to `v`, parallel edges included.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn generator_count(&self) -> usize {
        self.involutions.len()
    }

    pub fn is_involution(&self, label: usize) -> bool {
        self.involutions[label]
    }

    /// Degree of a vertex of the full Cayley graph: `2|S| - #involutions`.
    pub fn full_degree(&self) -> usize {
        self.involutions.iter().map(|&inv| if inv { 1 } else { 2 }).sum()
    }

    /// `v·s_label` when it lies in the ball.
    pub fn right_multiply(&self, v: usize, label: usize) -> Option<usize> {
        let w = self.forward[v * self.generator_count() + label];
        (w != NO_VERTEX).then_some(w)
    }

    /// Vertices at distance at most `radius - 1`: all of their neighbors lie
    /// in the ball, so boundaries computed there are exact.
    pub fn is_interior(&self, v: usize) -> bool {
        self.sphere[v] < self.radius
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_interior(v)).collect()
    }

    /// `|S(n)|` for `n = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.radius as usize + 1];
        for &d in &self.sphere {
            sizes[d as usize] += 1;
        }
        sizes
    }

    /// `|B(n)|` for `n = 0..=radius`.
    pub fn ball_sizes(&self) -> Vec<u64> {
        self.sphere_sizes()
            .iter()
            .scan(0u64, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    /// Whether the outermost sphere is empty, i.e. the ball is the whole group.
    pub fn is_saturated(&self) -> bool {
        self.radius > 0 && self.sphere_sizes()[self.radius as usize] == 0
    }

    /// Serialized form `{radius, vertices, sphere, edges}`.
    pub fn to_json(&self) -> Value {
        json!({
            "radius": self.radius,
            "vertices": self.vertices.iter().map(|g| self.spec.label(g)).collect::<Vec<_>>(),
            "sphere": self.sphere,
            "edges": self.edges.iter().map(|e| [e.u, e.v, e.label]).collect::<Vec<_>>(),
        })
    }
}
