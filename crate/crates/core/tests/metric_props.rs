mod common;

use common::{q, r, random_space};
use maprad_core::metric::{
    builtin, discretize_graph, graph_metric, kuratowski_embedding, EmbeddedPointSet,
    FiniteMetricSpace, WeightedGraph,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn revalidate(x: &FiniteMetricSpace) {
    FiniteMetricSpace::new(x.labels().to_vec(), x.matrix().to_vec()).unwrap();
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    // a random spanning tree plus a few extra edges, parallel ones allowed
    let mut edges: Vec<(usize, usize, maprad_core::Rational)> = (1..n)
        .map(|i| (rng.random_range(0..i), i, q(rng.random_range(1..=6), rng.random_range(1..=2))))
        .collect();
    for _ in 0..rng.random_range(0..=n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push((a, b, q(rng.random_range(1..=6), 2)));
        }
    }
    WeightedGraph::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_metric_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=7);
        let x = random_space(&mut rng, n);
        revalidate(&x);
        let again = graph_metric(&x.complete_graph()).unwrap();
        prop_assert_eq!(again.matrix(), x.matrix());
    }

    #[test]
    fn subdivision_keeps_vertex_distances(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=5);
        let g = random_graph(&mut rng, n);
        let base = graph_metric(&g).unwrap();
        let fine = discretize_graph(&g, k).unwrap();
        revalidate(&fine);
        let idx: Vec<usize> = base.labels().iter().map(|l| fine.index_of(l).unwrap()).collect();
        let sub = fine.subspace(&idx).unwrap();
        prop_assert_eq!(sub.matrix(), base.matrix());
    }

    #[test]
    fn kuratowski_is_isometric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let x = random_space(&mut rng, n);
        let e = kuratowski_embedding(&x);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(&EmbeddedPointSet::sup_distance(&e.points[i], &e.points[j]), x.d(i, j));
            }
        }
    }
}

#[test]
fn builtins_satisfy_axioms() {
    for spec in ["D_5", "cycle(3,7)", "line(0,1/3,2)", "seven_point"] {
        revalidate(&builtin(spec).unwrap().into_space().unwrap());
    }
    for spec in ["octahedron_skeleton", "tetrahedron_skeleton", "cube_skeleton"] {
        for k in 1..=3 {
            revalidate(&builtin(spec).unwrap().discretized(k).unwrap());
        }
    }
}

#[test]
fn even_cycles_have_robust_antipodes() {
    for (len, k) in [(r(4), 1), (r(4), 4), (q(7, 2), 3)] {
        let x = builtin(&format!("cycle({len},{})", 2 * k)).unwrap().into_space().unwrap();
        let half = &len / &r(2);
        for p in 0..x.len() {
            let a = (p + k) % (2 * k);
            assert_eq!(x.d(p, a), &half);
            for w in 0..x.len() {
                assert_eq!(&(x.d(p, w) + x.d(w, a)), &half);
            }
        }
    }
}
