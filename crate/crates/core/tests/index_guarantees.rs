use annc_core::oracle::{count_within, linear_scan_nn};
use annc_core::{distance, Backend, Curve, CurveIndex, IndexParams, Metric, Mode, QueryResult};
use proptest::prelude::*;

fn curves(d: usize, m: usize) -> impl Strategy<Value = Vec<Curve>> {
    prop::collection::vec(prop::collection::vec(0.0f64..4.0, m * d), 1..6).prop_map(move |rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, c)| Curve::from_flat(format!("c{i}"), d, c).unwrap())
            .collect()
    })
}

fn setup() -> impl Strategy<Value = (Vec<Curve>, Vec<Curve>, Metric, f64)> {
    (
        1usize..=2,
        1usize..=3,
        prop_oneof![Just(Metric::Frechet), Just(Metric::Dtw), Just(Metric::Lp(2.0))],
        prop_oneof![Just(0.5), Just(1.0)],
    )
        .prop_flat_map(|(d, m, metric, eps)| {
            let queries =
                prop::collection::vec(prop::collection::vec(0.0f64..4.0, m * d), 1..8).prop_map(move |rows| {
                    rows.into_iter()
                        .enumerate()
                        .map(|(i, c)| Curve::from_flat(format!("q{i}"), d, c).unwrap())
                        .collect::<Vec<_>>()
                });
            (curves(d, m), queries, Just(metric), Just(eps))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn near_neighbour_guarantees((inputs, queries, metric, eps) in setup(), backend in prop_oneof![Just(Backend::Hash), Just(Backend::Trie)]) {
        let r = 1.0;
        let index = CurveIndex::build(&inputs, IndexParams::new(eps, r, metric).backend(backend)).unwrap();
        // Inputs themselves and their near perturbations must all be found.
        for q in inputs.iter().chain(&queries) {
            let truth = linear_scan_nn(&inputs, q, metric, r).unwrap();
            match index.query(q).unwrap() {
                QueryResult::Match { id, guarantee } => {
                    prop_assert_eq!(guarantee, (1.0 + eps) * r);
                    let d = distance(index.curve(&id).unwrap(), q, metric).unwrap();
                    prop_assert!(d <= (1.0 + eps) * r, "returned {} at {}", id, d);
                }
                QueryResult::NoMatch => prop_assert!(truth.nearest_distance > r),
            }
        }
    }

    #[test]
    fn counting_sandwich((inputs, queries, metric, eps) in setup()) {
        let r = 1.0;
        let index = CurveIndex::build(&inputs, IndexParams::new(eps, r, metric).mode(Mode::RangeCount)).unwrap();
        for q in inputs.iter().chain(&queries) {
            let c = index.count(q).unwrap() as usize;
            prop_assert!(count_within(&inputs, q, metric, r).unwrap() <= c);
            prop_assert!(c <= count_within(&inputs, q, metric, (1.0 + eps) * r).unwrap());
        }
    }

    #[test]
    fn asymmetric_guarantees(
        inputs in curves(1, 5),
        queries in prop::collection::vec(prop::collection::vec(0.0f64..4.0, 2), 1..8),
        eps in prop_oneof![Just(0.5), Just(1.0)],
    ) {
        let r = 1.0;
        let index = CurveIndex::build(&inputs, IndexParams::new(eps, r, Metric::Frechet).asymmetric(2)).unwrap();
        for c in &inputs {
            if let Some(pi) = index.simplification(c.id()) {
                prop_assert!(distance(c, pi, Metric::Frechet).unwrap() <= 2.0 * r);
            }
        }
        for (i, coords) in queries.into_iter().enumerate() {
            let q = Curve::from_flat(format!("q{i}"), 1, coords).unwrap();
            let truth = linear_scan_nn(&inputs, &q, Metric::Frechet, r).unwrap();
            match index.query(&q).unwrap() {
                QueryResult::Match { id, .. } => {
                    let d = distance(index.curve(&id).unwrap(), &q, Metric::Frechet).unwrap();
                    prop_assert!(d <= (1.0 + eps) * r);
                }
                QueryResult::NoMatch => prop_assert!(truth.nearest_distance > r),
            }
        }
    }
}

#[test]
fn save_load_preserves_answers() {
    let inputs: Vec<Curve> = (0..6)
        .map(|i| Curve::from_flat(format!("c{i}"), 2, vec![i as f64, 0.5, i as f64 + 0.5, 2.0]).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    for (metric, mode) in [
        (Metric::Frechet, Mode::NearNeighbor),
        (Metric::Lp(2.0), Mode::RangeCount),
    ] {
        let params = IndexParams::new(0.5, 1.0, metric).mode(mode);
        let index = CurveIndex::build(&inputs, params.clone()).unwrap();
        let path = dir.path().join("i.annc");
        index.save(&path).unwrap();
        for backend in [Backend::Hash, Backend::Trie] {
            let back = CurveIndex::load(&path, backend).unwrap();
            for q in &inputs {
                match mode {
                    Mode::NearNeighbor => assert_eq!(back.query(q).unwrap(), index.query(q).unwrap()),
                    Mode::RangeCount => assert_eq!(back.count(q).unwrap(), index.count(q).unwrap()),
                }
            }
        }
    }
}
