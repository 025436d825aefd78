//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are computed independently of the library paths
//! they check (closed forms, brute-force enumeration, direct group
//! arithmetic).

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use isolab_cli::{run, RunConfig};
use isolab_core::forests::{
    ball_forest, check_rsf_inequality, estimate_beta1, sample_tree_degrees, torus_graph,
    wilson_ust_replica, BoundaryMode, DegreeStats, FiniteGraph,
};
use isolab_core::groups::{cayley_ball, parse_group_spec, CayleyBall, Element, GeneratingSet};
use isolab_core::harmonic::{center_trace, harmonic_projector, restriction_rank_check, ChainComplex};
use isolab_core::isoperimetry::{
    check_comparisons, growth_rate, min_ratio_exact, ratio_profile, VertexSet,
};
use isolab_core::relsim::{
    build_hzero_graphing, check_main_inequality, compress, cost, psi_size, random_scenario,
    witness_ratio, FiniteSpace, Graphing, PartialInjection, WitnessFamily,
};
use isolab_core::rng::{replica_rng, DEFAULT_SEED};
use isolab_core::{Rational, DEFAULT_VERTEX_CAP};
use rand::seq::IndexedRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ball(spec: &str, r: u32) -> CayleyBall {
    let spec = parse_group_spec(spec).unwrap();
    cayley_ball(&spec, &GeneratingSet::standard(&spec), r).unwrap()
}

fn rat(n: u64, d: u64) -> Rational {
    Rational::new(n, d)
}

/// `|B(n)|` in `F_k` with free generators.
fn free_ball_size(k: u64, n: u32) -> u64 {
    1 + 2 * k * ((2 * k - 1).pow(n) - 1) / (2 * k - 2)
}

fn criterion_1() -> Outcome {
    let spec = parse_group_spec("F2").unwrap();
    let rows = ratio_profile(&spec, &GeneratingSet::standard(&spec), 8, DEFAULT_VERTEX_CAP)
        .map_err(|e| e.to_string())?;
    ensure(rows[1].ratio == rat(12, 5) && rows[2].ratio == rat(36, 17), || {
        format!("first values {} {}", rows[1].ratio, rows[2].ratio)
    })?;
    for row in &rows[1..] {
        let size = free_ball_size(2, row.n);
        let outward = 4 * 3u64.pow(row.n);
        ensure(row.ball == size && row.ratio == rat(outward, size), || {
            format!("n={} gave {}", row.n, row.ratio)
        })?;
        ensure(row.ratio > rat(2, 1), || format!("n={} not above 2", row.n))?;
    }
    ensure(rows.windows(2).all(|w| w[1].ratio < w[0].ratio), || "not strictly decreasing".into())?;
    let last = rows[8].ratio;
    let value = *last.numer() as f64 / *last.denom() as f64;
    let target = 2.0 + 2.0 / free_ball_size(2, 8) as f64;
    ensure((value - target).abs() < 0.01, || format!("r=8 ratio {value} vs {target}"))?;
    Ok(format!("r=8 ratio {last} = {value:.9}, 2 + 2/|B(8)| = {target:.9}"))
}

/// Connected interior sets of size ≤ `max`, by level-wise extension with
/// deduplication.
fn connected_sets(b: &CayleyBall, max: usize) -> Vec<Vec<usize>> {
    let interior: Vec<usize> = b.interior_vertices();
    let mut level: HashSet<Vec<usize>> = interior.iter().map(|&v| vec![v]).collect();
    let mut all: Vec<Vec<usize>> = level.iter().cloned().collect();
    for _ in 1..max {
        let mut next = HashSet::new();
        for set in &level {
            for &v in set {
                for &e in b.incident(v) {
                    let w = b.edges()[e].other(v);
                    if b.is_interior(w) && set.binary_search(&w).is_err() {
                        let mut grown = set.clone();
                        grown.insert(grown.binary_search(&w).unwrap_err(), w);
                        next.insert(grown);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

fn criterion_2() -> Outcome {
    let mut total = 0usize;
    for (r, max) in [(3, 12), (4, 10)] {
        let b = ball("F2", r);
        let sets = connected_sets(&b, max);
        for set in &sets {
            let boundary = b
                .edges()
                .iter()
                .filter(|e| set.binary_search(&e.u).is_ok() != set.binary_search(&e.v).is_ok())
                .count();
            ensure(boundary == 2 * set.len() + 2, || format!("r={r} set {set:?}: {boundary}"))?;
        }
        // The library's enumeration visits exactly the same family.
        let visited = min_ratio_exact(&b, max).map_err(|e| e.to_string())?.nodes;
        ensure(visited as usize == sets.len(), || {
            format!("r={r}: library visited {visited}, oracle found {}", sets.len())
        })?;
        total += sets.len();
    }
    Ok(format!("{total} connected interior sets (B(3) up to size 12, B(4) up to size 10)"))
}

/// Random interior set: grown connected or scattered.
fn random_set<R: Rng>(b: &CayleyBall, rng: &mut R) -> Vec<usize> {
    let interior = b.interior_vertices();
    if rng.random_bool(0.5) {
        let k = rng.random_range(1..=interior.len().min(20));
        return interior.choose_multiple(rng, k).copied().collect();
    }
    let mut set = vec![*interior.choose(rng).unwrap()];
    for _ in 0..rng.random_range(0..25) {
        let frontier: Vec<usize> = set
            .iter()
            .flat_map(|&v| b.incident(v).iter().map(move |&e| b.edges()[e].other(v)))
            .filter(|w| b.is_interior(*w) && !set.contains(w))
            .collect();
        match frontier.choose(rng) {
            Some(&w) => set.push(w),
            None => break,
        }
    }
    set
}

fn criterion_3() -> Outcome {
    let mut rng = replica_rng(DEFAULT_SEED, 3);
    let mut sandwiches = 0;
    for (name, r) in [("F2", 4), ("Z", 12), ("Z^2", 6), ("Zmod7^2", 6)] {
        let b = ball(name, r);
        let spec = b.spec().clone();
        let gens: Vec<Element> = b.generators().elements().to_vec();
        for _ in 0..250 {
            let mut members = random_set(&b, &mut rng);
            members.sort_unstable();
            members.dedup();
            let report = check_comparisons(&VertexSet::new(&b, members.clone()).unwrap(), None)
                .map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("{name} {members:?}: {report:?}"))?;

            // Oracle: counts and translates from group arithmetic. Each
            // non-involution contributes the edges to g·s and g·s⁻¹.
            let elems: HashSet<Element> = members.iter().map(|&v| b.vertices()[v].clone()).collect();
            let mut boundary = 0u64;
            let mut inner = 0u64;
            let mut isolated = false;
            for g in &elems {
                let mut outside = 0;
                let mut inside = 0;
                for s in &gens {
                    let mut steps = vec![s.clone()];
                    if spec.multiply(s, s) != spec.identity() {
                        steps.push(spec.inverse(s));
                    }
                    for t in steps {
                        if elems.contains(&spec.multiply(g, &t)) {
                            inside += 1;
                        } else {
                            outside += 1;
                        }
                    }
                }
                boundary += outside;
                inner += u64::from(outside > 0);
                isolated |= inside == 0;
            }
            let size = elems.len() as u64;
            ensure(report.edge_boundary == boundary && report.inner_boundary == inner, || {
                format!("{name}: counts {} {} vs oracle {boundary} {inner}", report.edge_boundary, report.inner_boundary)
            })?;
            if !isolated {
                sandwiches += 1;
                let factor = 2 * gens.len() as u64 - 1;
                ensure(inner <= boundary && boundary <= factor * inner, || format!("{name}: sandwich"))?;
            }
            let sqrt_ratio = (boundary as f64 / size as f64).sqrt();
            for s in &gens {
                let moved: HashSet<Element> = elems.iter().map(|g| spec.multiply(g, s)).collect();
                let delta = elems.symmetric_difference(&moved).count() as f64;
                let value = (delta / size as f64).sqrt();
                ensure(value <= sqrt_ratio + 1e-12, || format!("{name}: kazhdan {value} > {sqrt_ratio}"))?;
            }
        }
    }
    Ok(format!("1000 sets, {sandwiches} without isolated vertices"))
}

fn criterion_4() -> Outcome {
    let b = ball("F2", 10);
    let g = growth_rate(&b.ball_sizes()).map_err(|e| e.to_string())?;
    ensure((2.9..=3.0).contains(&g.estimate), || format!("estimate {}", g.estimate))?;
    Ok(format!(
        "sphere ratio {:.6}, |B(10)|^(1/10) = {:.6}",
        g.estimate, g.root_estimate
    ))
}

/// All spanning trees of a small graph by brute force.
fn spanning_trees(g: &FiniteGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let m = g.edges().len();
    (0u32..(1 << m))
        .filter(|mask| mask.count_ones() as usize == n - 1)
        .map(|mask| (0..m).filter(|e| mask >> e & 1 == 1).collect::<Vec<_>>())
        .filter(|edges| {
            let mut label: Vec<usize> = (0..n).collect();
            edges.iter().all(|&e| {
                let (a, b) = g.edges()[e];
                let (la, lb) = (label[a], label[b]);
                if la == lb {
                    return false;
                }
                for l in label.iter_mut() {
                    if *l == lb {
                        *l = la;
                    }
                }
                true
            })
        })
        .collect()
}

fn chi_square(g: &FiniteGraph, samples: u64, seed: u64) -> (usize, f64) {
    let trees = spanning_trees(g);
    let index: HashMap<&[usize], usize> =
        trees.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let mut counts = vec![0u64; trees.len()];
    for r in 0..samples {
        let s = wilson_ust_replica(g, 0, seed, r).unwrap();
        counts[index[s.edges.as_slice()]] += 1;
    }
    let expected = samples as f64 / trees.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((trees.len() - 1) as f64).unwrap().cdf(stat);
    (trees.len(), p)
}

fn criterion_5() -> Outcome {
    let grid = FiniteGraph::new(6, vec![(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
    let mut notes = Vec::new();
    for (name, g) in [("C3", torus_graph(3, 1).unwrap()), ("grid 2x3", grid)] {
        let (trees, p) = chi_square(&g, 100_000, DEFAULT_SEED);
        ensure(p > 1e-3, || format!("{name}: p = {p}"))?;
        notes.push(format!("{name} {trees} trees p={p:.3}"));
    }
    let mut worst: f64 = 0.0;
    for (side, d) in [(3, 1), (5, 1), (8, 1), (3, 2), (4, 2), (5, 2), (6, 2)] {
        let g = torus_graph(side, d).unwrap();
        let v = g.vertex_count() as f64;
        let degrees = sample_tree_degrees(&g, 0, 20_000, DEFAULT_SEED).unwrap();
        let stats = DegreeStats::from_degrees(&degrees).unwrap();
        let z = (stats.mean_degree - 2.0 * (v - 1.0) / v).abs() / stats.standard_error;
        worst = worst.max(z);
        ensure(z < 4.0, || format!("torus {side}^{d}: {z:.2} standard errors"))?;
    }
    notes.push(format!("transitive means within {worst:.2} SE"));
    Ok(notes.join(", "))
}

fn criterion_6() -> Outcome {
    let beta = |name: &str, r: u32, samples: u64| {
        let spec = parse_group_spec(name).unwrap();
        let gens = GeneratingSet::standard(&spec);
        estimate_beta1(&spec, &gens, r, BoundaryMode::Free, samples, DEFAULT_SEED, DEFAULT_VERTEX_CAP)
            .map_err(|e| e.to_string())
    };
    for r in 2..=6 {
        let s = beta("F2", r, 500)?;
        ensure(s.beta1_estimate == 1.0 && s.variance == 0.0, || format!("F2 r={r}: {s:?}"))?;
    }
    for r in 2..=10 {
        let s = beta("Z", r, 500)?;
        ensure(s.beta1_estimate == 0.0, || format!("Z r={r}: {s:?}"))?;
    }
    let s = beta("Z^2", 8, 10_000)?;
    ensure(s.beta1_ci_contains(0.0), || {
        format!("Z^2 r=8: {} ± {}", s.beta1_estimate, s.beta1_ci99)
    })?;
    Ok(format!(
        "Z^2 r=8: beta1 {:.4} ± {:.4} (99%)",
        s.beta1_estimate, s.beta1_ci99
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = replica_rng(DEFAULT_SEED, 7);
    let mut checks = 0u64;
    for trial in 0..10u64 {
        let mut edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        for a in 0..10 {
            for b in a + 2..10 {
                if rng.random_bool(0.3) {
                    edges.push((a, b));
                }
            }
        }
        let g = FiniteGraph::new(10, edges).unwrap();
        for r in 0..100 {
            let s = wilson_ust_replica(&g, 0, DEFAULT_SEED + trial, r).unwrap();
            for mask in 1u32..(1 << 10) {
                if mask.count_ones() <= 6 {
                    let members: Vec<usize> = (0..10).filter(|i| mask >> i & 1 == 1).collect();
                    let sum: u32 = members.iter().map(|&v| s.degree[v]).sum();
                    let bound = 2 * members.len() + g.edge_boundary(&members);
                    ensure(sum as usize <= bound, || format!("graph {trial} sample {r} set {members:?}"))?;
                    checks += 1;
                }
            }
        }
    }
    for (name, r) in [("F2", 5), ("Z^2", 8)] {
        let b = ball(name, r);
        let g = FiniteGraph::from_ball(&b);
        let sizes = b.ball_sizes();
        for mode in [BoundaryMode::Free, BoundaryMode::Wired] {
            for seed in 0..100 {
                let s = ball_forest(&b, mode, seed).unwrap();
                for &k in &sizes[..r as usize] {
                    let members: Vec<usize> = (0..k as usize).collect();
                    ensure(check_rsf_inequality(&s, &g, &members).unwrap(), || {
                        format!("{name} {mode} seed {seed} B-size {k}")
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (sample, set) pairs"))
}

/// Center trace of `F_2` balls from the series-parallel reduction of the
/// tree with the outer sphere grounded.
fn free_trace_oracle(r: u32) -> f64 {
    let f = |h: u32| (0..h).fold(0.0, |acc, _| (1.0 + acc) / 3.0);
    2.0 / (1.0 + f(r) + f(r - 1))
}

fn criterion_8() -> Outcome {
    for r in 2..=50 {
        let b = ball("Z", r);
        let t = center_trace(&ChainComplex::from_ball(&b).unwrap()).map_err(|e| e.to_string())?;
        ensure((t - 1.0 / (2.0 * r as f64)).abs() < 1e-8, || format!("Z r={r}: {t}"))?;
    }
    let mut sweep = Vec::new();
    for r in 2..=8 {
        let b = ball("F2", r);
        let t = center_trace(&ChainComplex::from_ball(&b).unwrap()).map_err(|e| e.to_string())?;
        ensure((t - free_trace_oracle(r)).abs() < 1e-9, || format!("F2 r={r}: {t}"))?;
        sweep.push(t);
    }
    let f2 = *sweep.last().unwrap();
    ensure((f2 - 1.0).abs() < 0.1, || format!("F2 r=8 trace {f2}"))?;
    let z2_radius = 128;
    let z2 = center_trace(&ChainComplex::from_ball(&ball("Z^2", z2_radius)).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(z2.abs() < 0.1, || format!("Z^2 trace {z2}"))?;

    let mut rng = replica_rng(DEFAULT_SEED, 8);
    let mut tested = 0;
    for (name, r) in [("Z", 10), ("Z^2", 6), ("F2", 4)] {
        let b = ball(name, r);
        let cc = ChainComplex::from_ball(&b).unwrap();
        let h = harmonic_projector(&cc).map_err(|e| e.to_string())?;
        let admissible: Vec<usize> = (0..b.len()).filter(|&v| b.sphere_of(v) + 2 <= r).collect();
        let count = if name == "F2" { 34 } else { 33 };
        for _ in 0..count {
            let k = rng.random_range(1..=admissible.len().min(15));
            let set: Vec<usize> = admissible.choose_multiple(&mut rng, k).copied().collect();
            let ranks = restriction_rank_check(&h, &cc, &set).map_err(|e| e.to_string())?;
            ensure(ranks.equal && ranks.rank_boundary <= ranks.boundary_edges, || {
                format!("{name} {set:?}: {ranks:?}")
            })?;
            tested += 1;
        }
    }
    let fmt: Vec<String> = sweep.iter().map(|t| format!("{t:.6}")).collect();
    Ok(format!(
        "F2 sweep [{}], Z^2 r={z2_radius} trace {z2:.2e}, {tested} restriction checks",
        fmt.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for size in [1000usize, 10_000] {
        for n in [5usize, 10, 50] {
            for eps in [1e-2, 1e-3] {
                let h = build_hzero_graphing(size, n, eps).map_err(|e| format!("{size} {n} {eps}: {e}"))?;
                let m = (eps * size as f64).round() as u64;
                ensure(psi_size(size, eps) as u64 == m, || format!("psi size {size} {eps}"))?;
                ensure(cost(&h.graphing) == rat(size as u64 + m, size as u64), || format!("cost {size} {n} {eps}"))?;
                ensure(h.segment_property(), || format!("segments {size} {n} {eps}"))?;
                let w = h.witness().map_err(|e| e.to_string())?;
                let ratio = witness_ratio(&h.graphing, &w).map_err(|e| e.to_string())?;
                ensure(ratio <= rat(4, n as u64 + 1), || format!("ratio {ratio} at {size} {n} {eps}"))?;
                worst = worst.max((*ratio.numer() as f64 / *ratio.denom() as f64) * (n as f64 + 1.0));
                let main = check_main_inequality(&h.graphing, &w).map_err(|e| e.to_string())?;
                ensure(main.passed(), || format!("main {size} {n} {eps}: {main:?}"))?;
            }
        }
    }
    for replica in 0..100 {
        let (g, w) = random_scenario(60, DEFAULT_SEED, replica).map_err(|e| e.to_string())?;
        let main = check_main_inequality(&g, &w).map_err(|e| e.to_string())?;
        ensure(main.passed(), || format!("random scenario {replica}: {main:?}"))?;
    }
    let y = FiniteSpace::new(100).unwrap();
    let sigma = PartialInjection::rotation(y, 1);
    let k = Graphing::new(y, vec![sigma.clone()]).unwrap();
    let w = WitnessFamily::powers(&sigma, 4).unwrap();
    let rep = compress(&k, &w, 200, 10).map_err(|e| e.to_string())?;
    // Σ_Y |∂A^y| = 2·100; bound adds k·s + 3·n·s with s = 10.
    ensure(rep.base_boundary == 200 && rep.bound == 200 + 5 * 10 + 3 * 10 * 10, || format!("{rep:?}"))?;
    ensure(rep.holds, || format!("compression {} > {}", rep.lifted_boundary, rep.bound))?;
    Ok(format!(
        "12 hzero scenarios (max ratio·(n+1) = {worst:.3}), 100 random graphings, compression {} ≤ {}",
        rep.lifted_boundary, rep.bound
    ))
}

fn criterion_10() -> Outcome {
    let configs = [
        "isolab cheeger --group F2 --radius 4 --max-size 8 --exact",
        "isolab profile --group Z^2 --radius 6",
        "isolab forest --group Z^2 --radius 5 --samples 2000 --seed 9",
        "isolab forest --group F2 --radius 4 --mode wired --samples 500",
        "isolab betti --group F2 --sweep 2:5 --restr-samples 5",
        "isolab relsim hzero --N 1000 --n 10 --eps 0.01",
        "isolab relsim main-check --scenario random --seed 7 --count 5",
        "isolab relsim compress",
    ];
    for line in configs {
        let args: Vec<&str> = line.split_whitespace().collect();
        let render = |extra: &[&str]| -> Result<String, String> {
            let mut all = args.clone();
            all.extend_from_slice(extra);
            let config = RunConfig::try_parse_from(all).map_err(|e| e.to_string())?;
            Ok(run(&config).map_err(|e| e.to_string())?.render())
        };
        let first = render(&[])?;
        ensure(first == render(&[])?, || format!("'{line}' differs between runs"))?;
        ensure(first == render(&["--jobs", "3"])?, || format!("'{line}' depends on --jobs"))?;
    }
    let dir = std::env::temp_dir().join(format!("isolab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!("run{i}.json"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_isolab"))
            .args(["forest", "--group", "F2", "--radius", "3", "--mode", "wired", "--samples", "300", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("binary exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(outputs[0] == outputs[1], || "binary outputs differ".into())?;
    Ok(format!("{} configs twice and with --jobs 3, binary twice", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("free-group isoperimetry", Duration::from_secs(5), criterion_1),
        ("tree boundary law", Duration::from_secs(30), criterion_2),
        ("sandwich and Kazhdan bounds", Duration::from_secs(60), criterion_3),
        ("growth of F2", Duration::from_secs(5), criterion_4),
        ("Wilson correctness", Duration::from_secs(120), criterion_5),
        ("beta1 estimators", Duration::from_secs(120), criterion_6),
        ("per-sample forest inequality", Duration::from_secs(60), criterion_7),
        ("harmonic traces and ranks", Duration::from_secs(600), criterion_8),
        ("finite graphings", Duration::from_secs(60), criterion_9),
        ("determinism", Duration::from_secs(600), criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {}s limit", limit.as_secs())),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{status} criterion {:>2} {name} ({:.2}s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
