use isolab_core::groups::{cayley_ball, parse_group_spec, GeneratingSet};
use isolab_core::harmonic::{
    center_trace_resistance, harmonic_projector, restriction_rank_check, ChainComplex,
};
use rand::seq::IndexedRandom;
use rand::Rng;

#[test]
fn restriction_ranks_agree_on_random_sets() {
    let mut rng = isolab_core::rng::replica_rng(8, 0);
    for (spec, r) in [("Z", 9), ("Z^2", 5), ("F2", 4), ("Zmod5^2", 5)] {
        let spec = parse_group_spec(spec).unwrap();
        let ball = cayley_ball(&spec, &GeneratingSet::standard(&spec), r).unwrap();
        let cc = ChainComplex::from_ball(&ball).unwrap();
        let h = harmonic_projector(&cc).unwrap();
        let admissible: Vec<usize> = (0..ball.len()).filter(|&v| ball.sphere_of(v) + 2 <= r).collect();
        for _ in 0..25 {
            let k = rng.random_range(1..=admissible.len().min(12));
            let set: Vec<usize> = admissible.choose_multiple(&mut rng, k).copied().collect();
            let ranks = restriction_rank_check(&h, &cc, &set).unwrap();
            assert!(ranks.equal, "{spec} {set:?}: {ranks:?}");
            assert!(ranks.rank_boundary <= ranks.boundary_edges);
        }
    }
}

#[test]
fn square_lattice_trace_decreases() {
    let spec = parse_group_spec("Z^2").unwrap();
    let gens = GeneratingSet::standard(&spec);
    let traces: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&r| {
            let ball = cayley_ball(&spec, &gens, r).unwrap();
            center_trace_resistance(&ChainComplex::from_ball(&ball).unwrap()).unwrap()
        })
        .collect();
    assert!(traces.windows(2).all(|w| w[1] < w[0]), "{traces:?}");
    assert!(traces[2] < 0.01);
}
