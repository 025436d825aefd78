use isolab_core::forests::{ball_forest, check_rsf_inequality, wilson_ust_replica, BoundaryMode, FiniteGraph};
use isolab_core::groups::{cayley_ball, parse_group_spec, CayleyBall, GeneratingSet};
use isolab_core::isoperimetry::{check_comparisons, edge_boundary, VertexSet};
use proptest::prelude::*;

fn ball(spec: &str, r: u32) -> CayleyBall {
    let spec = parse_group_spec(spec).unwrap();
    cayley_ball(&spec, &GeneratingSet::standard(&spec), r).unwrap()
}

/// Connected interior set grown from `seed_vertex` by picks from `choices`.
fn grow(b: &CayleyBall, start: usize, choices: &[usize]) -> Vec<usize> {
    let mut set = vec![start];
    for &c in choices {
        let frontier: Vec<usize> = set
            .iter()
            .flat_map(|&v| b.incident(v).iter().map(move |&e| b.edges()[e].other(v)))
            .filter(|w| b.is_interior(*w) && !set.contains(w))
            .collect();
        if frontier.is_empty() {
            break;
        }
        set.push(frontier[c % frontier.len()]);
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sandwich_and_kazhdan(which in 0usize..5, start in 0usize..1000, picks in prop::collection::vec(0usize..1000, 0..20), sparse in prop::collection::vec(any::<bool>(), 0..60)) {
        let specs = [("F2", 4), ("Z", 8), ("Z^2", 5), ("Zmod7^2", 6), ("F3", 3)];
        let (spec, r) = specs[which];
        let b = ball(spec, r);
        let interior = b.interior_vertices();
        let connected = grow(&b, interior[start % interior.len()], &picks);
        let report = check_comparisons(&VertexSet::new(&b, connected).unwrap(), None).unwrap();
        prop_assert!(report.passed());

        let scattered: Vec<usize> = interior.iter().zip(&sparse).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
        if !scattered.is_empty() {
            let report = check_comparisons(&VertexSet::new(&b, scattered).unwrap(), None).unwrap();
            prop_assert!(report.passed());
        }
    }

    #[test]
    fn free_group_tree_law(start in 0usize..1000, picks in prop::collection::vec(0usize..1000, 0..15)) {
        let b = ball("F2", 4);
        let interior = b.interior_vertices();
        let set = grow(&b, interior[start % interior.len()], &picks);
        let size = set.len() as u64;
        prop_assert_eq!(edge_boundary(&VertexSet::new(&b, set).unwrap()), 2 * size + 2);
    }

    #[test]
    fn rsf_on_random_graphs(seed in 0u64..10_000, mask in prop::collection::vec(any::<bool>(), 45)) {
        let mut edges: Vec<(usize, usize)> = (0..9).map(|i| (i, i + 1)).collect();
        let mut k = 0;
        for a in 0..10 {
            for b in a + 2..10 {
                if mask[k] {
                    edges.push((a, b));
                }
                k += 1;
            }
        }
        let g = FiniteGraph::new(10, edges).unwrap();
        let s = wilson_ust_replica(&g, 0, seed, 0).unwrap();
        for subset in 1u32..(1 << 10) {
            if subset.count_ones() <= 6 {
                let members: Vec<usize> = (0..10).filter(|i| subset >> i & 1 == 1).collect();
                prop_assert!(check_rsf_inequality(&s, &g, &members).unwrap());
            }
        }
    }
}

#[test]
fn rsf_on_ball_witnesses() {
    for (spec, r) in [("F2", 4), ("Z^2", 6)] {
        let b = ball(spec, r);
        let g = FiniteGraph::from_ball(&b);
        let interior = b.interior_vertices();
        for mode in [BoundaryMode::Free, BoundaryMode::Wired] {
            for seed in 0..20 {
                let s = ball_forest(&b, mode, seed).unwrap();
                for k in 1..=interior.len().min(40) {
                    assert!(check_rsf_inequality(&s, &g, &interior[..k]).unwrap());
                }
            }
        }
    }
}
