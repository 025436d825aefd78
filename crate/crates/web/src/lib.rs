//! Browser bindings: each export takes plain arguments and returns a JSON
//! string. The `*_json` functions hold the logic and also run natively.

use isolab_core::forests::{sample_ball_degrees, BallForest, BoundaryMode, DegreeStats};
use isolab_core::groups::{
    cayley_ball_with_cap, parse_group_spec, CayleyBall, Element, GeneratingSet, GroupSpec,
};
use isolab_core::harmonic::{center_trace, ChainComplex};
use isolab_core::isoperimetry::{ball_profile, growth_rate, min_ratio_exact_with_budget};
use isolab_core::relsim::{build_hzero_graphing, check_main_inequality, witness_ratio};
use isolab_core::Rational;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Vertex cap for anything drawn in the page.
pub const WEB_VERTEX_CAP: usize = 20_000;
/// Connected sets visited by the exact minimizer before giving up.
pub const WEB_NODE_BUDGET: u64 = 2_000_000;
/// Largest space whose `ψ` pairs are returned for drawing.
const DRAWN_POINTS: usize = 2_000;

fn rational(r: Rational) -> Value {
    json!({"num": *r.numer(), "den": *r.denom(), "value": *r.numer() as f64 / *r.denom() as f64})
}

fn setup(group: &str, gens: &str) -> Result<(GroupSpec, GeneratingSet), String> {
    let spec = parse_group_spec(group).map_err(|e| e.to_string())?;
    let gens = if gens.trim().is_empty() {
        GeneratingSet::standard(&spec)
    } else {
        GeneratingSet::from_words(&spec, gens).map_err(|e| e.to_string())?
    };
    Ok((spec, gens))
}

fn ball(group: &str, gens: &str, radius: u32) -> Result<CayleyBall, String> {
    let (spec, gens) = setup(group, gens)?;
    cayley_ball_with_cap(&spec, &gens, radius, WEB_VERTEX_CAP).map_err(|e| e.to_string())
}

/// Plane positions in `[-1, 1]²`: lattice coordinates for `Z` and `Z²`, and a
/// radial layout of the BFS tree otherwise, where each vertex splits its
/// angular sector evenly among its children.
pub fn layout(ball: &CayleyBall) -> Vec<[f64; 2]> {
    let r = ball.radius().max(1) as f64;
    let lattice = ball.vertices().iter().all(|g| matches!(g, Element::Vector(v) if v.len() <= 2));
    if lattice {
        return ball
            .vertices()
            .iter()
            .map(|g| match g {
                Element::Vector(v) => [
                    v.first().copied().unwrap_or(0) as f64 / r,
                    -(v.get(1).copied().unwrap_or(0) as f64) / r,
                ],
                _ => unreachable!(),
            })
            .collect();
    }
    let n = ball.len();
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[0] = true;
    // BFS order is the vertex order, so parents precede children.
    for (v, kids) in children.iter_mut().enumerate() {
        for &e in ball.incident(v) {
            let w = ball.edges()[e].other(v);
            if !seen[w] && ball.sphere_of(w) == ball.sphere_of(v) + 1 {
                seen[w] = true;
                kids.push(w);
            }
        }
    }
    let mut sector = vec![(0.0, std::f64::consts::TAU); n];
    let mut pos = vec![[0.0, 0.0]; n];
    for v in 0..n {
        let (lo, hi) = sector[v];
        let rho = ball.sphere_of(v) as f64 / r;
        let mid = (lo + hi) / 2.0;
        pos[v] = [rho * mid.cos(), rho * mid.sin()];
        let k = children[v].len() as f64;
        for (i, &c) in children[v].iter().enumerate() {
            let step = (hi - lo) / k;
            sector[c] = (lo + step * i as f64, lo + step * (i as f64 + 1.0));
        }
    }
    pos
}

fn ball_value(ball: &CayleyBall) -> Value {
    let pos = layout(ball);
    json!({
        "radius": ball.radius(),
        "labels": ball.vertices().iter().map(|g| ball.spec().label(g)).collect::<Vec<_>>(),
        "sphere": ball.spheres(),
        "pos": pos,
        "edges": ball.edges().iter().map(|e| [e.u, e.v, e.label]).collect::<Vec<_>>(),
    })
}

/// Ball, sphere profile, growth, and the exact minimizer of `|∂A|/|A|` over
/// connected interior sets with at most `max_size` vertices.
pub fn isoperimetry_json(group: &str, gens: &str, radius: u32, max_size: usize) -> Result<Value, String> {
    let b = ball(group, gens, radius)?;
    let profile: Vec<Value> = ball_profile(&b)
        .iter()
        .map(|row| json!({"n": row.n, "ball": row.ball, "boundary": row.boundary, "ratio": rational(row.ratio)}))
        .collect();
    let growth = growth_rate(&b.ball_sizes()).map_err(|e| e.to_string())?;
    let minimizer = match min_ratio_exact_with_budget(&b, max_size, WEB_NODE_BUDGET) {
        Ok(m) => json!({
            "members": m.members,
            "boundary": m.boundary,
            "ratio": rational(m.ratio),
            "nodes": m.nodes,
        }),
        Err(e) => json!({"error": e.to_string()}),
    };
    Ok(json!({
        "ball": ball_value(&b),
        "profile": profile,
        "growth": growth.estimate,
        "minimizer": minimizer,
    }))
}

/// One forest on the ball, degree statistics at the identity over `samples`
/// forests, and the harmonic center trace of the ball.
pub fn forest_json(
    group: &str,
    gens: &str,
    radius: u32,
    mode: &str,
    samples: u64,
    seed: u64,
) -> Result<Value, String> {
    let mode: BoundaryMode = mode.parse().map_err(|e: isolab_core::Error| e.to_string())?;
    let b = ball(group, gens, radius)?;
    let sampler = BallForest::new(&b, mode).map_err(|e| e.to_string())?;
    let shown = sampler.sample(seed, 0);
    let stats = DegreeStats::from_degrees(&sample_ball_degrees(&sampler, samples, seed))
        .map_err(|e| e.to_string())?;
    let trace = ChainComplex::from_ball(&b)
        .and_then(|cc| center_trace(&cc))
        .ok();
    Ok(json!({
        "ball": ball_value(&b),
        "mode": mode.to_string(),
        "forest": shown.edges,
        "center_degree": shown.degree[0],
        "samples": stats.samples,
        "mean_degree": stats.mean_degree,
        "beta1_estimate": stats.beta1_estimate,
        "beta1_ci99": stats.beta1_ci99,
        "cost_estimate": stats.cost_estimate,
        "harmonic_trace": trace,
    }))
}

/// Cost-one graphing of a single orbit with its witness family and the
/// forest inequality checked on it.
pub fn hzero_json(points: usize, n: usize, eps: f64) -> Result<Value, String> {
    let h = build_hzero_graphing(points, n, eps).map_err(|e| e.to_string())?;
    let w = h.witness().map_err(|e| e.to_string())?;
    let ratio = witness_ratio(&h.graphing, &w).map_err(|e| e.to_string())?;
    let main = check_main_inequality(&h.graphing, &w).map_err(|e| e.to_string())?;
    let psi = (points <= DRAWN_POINTS).then(|| h.psi().pairs().to_vec());
    Ok(json!({
        "points": points,
        "n": n,
        "psi_size": h.psi_size,
        "cost": rational(main.cost),
        "witness_ratio": rational(ratio),
        "ratio_bound": rational(Rational::new(4, n as u64 + 1)),
        "tower_levels": h.tower.levels.len(),
        "segment_property": h.segment_property(),
        "lhs": rational(main.lhs),
        "rhs": rational(main.rhs),
        "holds": main.passed(),
        "psi": psi,
    }))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn isoperimetry(group: &str, gens: &str, radius: u32, max_size: usize) -> Result<String, JsError> {
    to_js(isoperimetry_json(group, gens, radius, max_size))
}

#[wasm_bindgen]
pub fn forest(group: &str, gens: &str, radius: u32, mode: &str, samples: u32, seed: u32) -> Result<String, JsError> {
    to_js(forest_json(group, gens, radius, mode, samples.into(), seed.into()))
}

#[wasm_bindgen]
pub fn hzero(points: usize, n: usize, eps: f64) -> Result<String, JsError> {
    to_js(hzero_json(points, n, eps))
}
