use proptest::prelude::*;
use sigscreen::corr::{center_matrix, dcorr, mgc, rv_coefficient, Metric, SampleMatrix};
use sigscreen::graph::{induced_subgraph, AdjacencyMatrix, VertexSet};
use sigscreen::roc_auc;

fn samples(m: usize, d: usize) -> impl Strategy<Value = SampleMatrix> {
    prop::collection::vec(-5.0f64..5.0, m * d)
        .prop_map(move |v| SampleMatrix::new(m, d, v).unwrap())
}

fn paired() -> impl Strategy<Value = (SampleMatrix, SampleMatrix)> {
    (4usize..20, 1usize..4, 1usize..3).prop_flat_map(|(m, dx, dy)| (samples(m, dx), samples(m, dy)))
}

fn graph(n: usize) -> impl Strategy<Value = AdjacencyMatrix> {
    prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let mut g = AdjacencyMatrix::zeros(n, false);
        let mut k = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if bits[k] {
                    g.set_edge(u, v, 1.0).unwrap();
                }
                k += 1;
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistics_stay_in_unit_interval((x, y) in paired()) {
        for v in [
            dcorr(&x, Metric::Euclidean, &y, Metric::Euclidean).unwrap().value,
            mgc(&x, Metric::Euclidean, &y, Metric::Euclidean).unwrap().value,
            rv_coefficient(&x, &y).unwrap().value,
        ] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn dcorr_is_symmetric((x, y) in paired()) {
        let a = dcorr(&x, Metric::Euclidean, &y, Metric::Euclidean).unwrap().value;
        let b = dcorr(&y, Metric::Euclidean, &x, Metric::Euclidean).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn centering_is_idempotent(x in samples(9, 2)) {
        let d = sigscreen::corr::pairwise_distances(&x, Metric::Euclidean).unwrap();
        let once = center_matrix(d.as_matrix());
        let twice = center_matrix(&once);
        prop_assert!((once - twice).abs().max() < 1e-10);
    }

    #[test]
    fn roc_is_monotone_with_fixed_endpoints(
        (n, ranking, k) in (3usize..40).prop_flat_map(|n| {
            (Just(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 1..n)
        })
    ) {
        let truth = VertexSet::new((0..k).collect()).unwrap();
        let (curve, auc) = roc_auc(&ranking, &truth, n).unwrap();
        prop_assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        prop_assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
        for w in curve.points.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
        prop_assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn induced_subgraphs_compose(
        g in graph(12),
        outer in prop::collection::btree_set(0usize..12, 2..12),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..6),
    ) {
        let outer = VertexSet::new(outer.into_iter().collect()).unwrap();
        let inner = VertexSet::from_unsorted(picks.iter().map(|i| i.index(outer.len())).collect());
        let nested = induced_subgraph(&induced_subgraph(&g, &outer).unwrap(), &inner).unwrap();
        let direct = induced_subgraph(&g, &outer.compose(&inner).unwrap()).unwrap();
        prop_assert_eq!(nested, direct);
    }
}
