use annc_core::candidates::{enumerate, is_candidate, vertex_pool, CandidateRequest};
use annc_core::oracle::brute_candidates;
use annc_core::{distance, Curve, GridSpec, Metric};
use proptest::prelude::*;

fn metric_strategy() -> impl Strategy<Value = Metric> {
    prop_oneof![
        Just(Metric::Frechet),
        Just(Metric::Dtw),
        Just(Metric::Lp(2.0)),
        Just(Metric::Lp(3.0))
    ]
}

fn curve_strategy(max_len: usize, d: usize) -> impl Strategy<Value = Curve> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), 1..=max_len)
        .prop_map(|rows| Curve::from_rows("a", rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The search emits exactly the grid curves the brute-force product
    /// accepts, in lexicographic order.
    #[test]
    fn enumeration_matches_brute_force(
        d in 1usize..=2,
        metric in metric_strategy(),
        seed_curve in curve_strategy(3, 2),
        out_len in 1usize..=3,
        radius in 0.3f64..1.2,
    ) {
        let rows: Vec<Vec<f64>> = seed_curve.points().map(|p| p[..d].to_vec()).collect();
        let anchor = Curve::from_rows("a", rows).unwrap();
        let edge = if d == 1 { 0.3 } else { 0.45 };
        let grid = GridSpec::with_edge(edge, d).unwrap();
        let pool: Vec<Vec<i64>> = vertex_pool(&anchor, radius, &grid).unwrap().into_iter().map(|p| p.0).collect();
        let product = (pool.len() as u64).saturating_pow(out_len as u32);
        prop_assume!(product <= 200_000);
        let brute = brute_candidates(&anchor, &pool, edge, out_len, radius, metric).unwrap();
        let req = CandidateRequest::new(&anchor, out_len, radius, grid, metric);
        let got: Vec<Vec<i64>> = enumerate(&req).unwrap().keys.iter().map(|k| k.cells().to_vec()).collect();
        let mut sorted = got.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(&sorted, &got, "output must be sorted and duplicate-free");
        prop_assert_eq!(got, brute.into_iter().collect::<Vec<_>>());
    }

    /// Snapped perturbations of the anchor that stay within the radius are
    /// always generated, and `is_candidate` agrees with membership.
    #[test]
    fn completeness_witness(
        metric in metric_strategy(),
        anchor in curve_strategy(3, 2),
        noise in prop::collection::vec(-0.4f64..0.4, 6),
    ) {
        let grid = GridSpec::derive(1.0, 1.0, 2, anchor.len(), metric).unwrap();
        let radius = 1.5;
        let rows: Vec<Vec<f64>> = anchor
            .points()
            .enumerate()
            .map(|(i, p)| vec![p[0] + noise[2 * i], p[1] + noise[2 * i + 1]])
            .collect();
        let moved = Curve::from_rows("w", rows).unwrap();
        let key = grid.snap_curve(&moved).unwrap();
        let w = grid.key_to_curve(&key, "w");
        let req = CandidateRequest::new(&anchor, anchor.len(), radius, grid, metric);
        let set = enumerate(&req).unwrap();
        let within = distance(&anchor, &w, metric).unwrap() <= radius;
        prop_assert_eq!(set.contains(&key), within);
        prop_assert_eq!(is_candidate(&req, key.cells()), within);
    }

    /// The optional filter intersects the candidate set with a second ball.
    #[test]
    fn filter_is_intersection(
        anchor in curve_strategy(2, 1),
        other in curve_strategy(3, 1),
        out_len in 1usize..=2,
    ) {
        let grid = GridSpec::with_edge(0.25, 1).unwrap();
        for metric in [Metric::Frechet, Metric::Dtw] {
            let plain = enumerate(&CandidateRequest::new(&anchor, out_len, 1.5, grid, metric)).unwrap();
            let filtered =
                enumerate(&CandidateRequest::new(&anchor, out_len, 1.5, grid, metric).with_filter(&other, 1.0)).unwrap();
            let expected: Vec<_> = plain
                .keys
                .iter()
                .filter(|k| distance(&other, &grid.key_to_curve(k, "k"), metric).unwrap() <= 1.0)
                .cloned()
                .collect();
            prop_assert_eq!(filtered.keys, expected);
        }
    }
}

#[test]
fn streaming_and_collected_agree() {
    let anchor = Curve::from_rows("a", vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![1.5, -0.5]]).unwrap();
    for metric in [Metric::Frechet, Metric::Dtw, Metric::Lp(2.0)] {
        let grid = GridSpec::derive(1.0, 1.0, 2, 3, metric).unwrap();
        let req = CandidateRequest::new(&anchor, 3, 1.5, grid, metric);
        let mut streamed = Vec::new();
        let n = annc_core::candidates::for_each_candidate(&req, |c| streamed.push(c.to_vec())).unwrap();
        let collected: Vec<Vec<i64>> = enumerate(&req)
            .unwrap()
            .keys
            .iter()
            .map(|k| k.cells().to_vec())
            .collect();
        assert_eq!(n as usize, streamed.len());
        assert_eq!(streamed, collected);
        assert!(!streamed.is_empty());
    }
}
