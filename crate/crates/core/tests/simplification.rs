use annc_core::oracle::exact_meb_small_d;
use annc_core::simplify::{approx_meb, greedy_simplify_with, simplify_dfd, simplify_dfd_with, CoverTest};
use annc_core::{distance, Curve, Metric, Point, SimplifyOutcome};
use proptest::prelude::*;

/// Cover test backed by the exact enclosing ball.
struct ExactCover;

const EXACT_SLACK: f64 = 1e-9;

fn exact_radius(flat: &[f64], dim: usize) -> (Vec<f64>, f64) {
    let points: Vec<Point> = flat
        .chunks_exact(dim)
        .map(|c| Point::new(c.to_vec()).unwrap())
        .collect();
    let ball = exact_meb_small_d(&points).unwrap();
    (ball.center.coords().to_vec(), ball.radius)
}

impl CoverTest for ExactCover {
    fn cover(&self, flat: &[f64], dim: usize, r: f64) -> Option<Vec<f64>> {
        let (c, radius) = exact_radius(flat, dim);
        (radius <= r * (1.0 + EXACT_SLACK)).then_some(c)
    }

    fn covering_radius(&self, r: f64) -> f64 {
        r * (1.0 + EXACT_SLACK)
    }
}

/// Fewest contiguous runs, each inside a ball of radius `r`.
fn minimal_runs(curve: &Curve, r: f64) -> usize {
    let n = curve.len();
    let dim = curve.dim();
    let flat = curve.flat();
    let mut best = vec![usize::MAX; n + 1];
    best[0] = 0;
    for j in 1..=n {
        for i in 0..j {
            if best[i] == usize::MAX {
                continue;
            }
            if ExactCover.cover(&flat[i * dim..j * dim], dim, r).is_some() {
                best[j] = best[j].min(best[i] + 1);
            }
        }
    }
    best[n]
}

fn curve_strategy() -> impl Strategy<Value = Curve> {
    (1usize..=3, 1usize..=12).prop_flat_map(|(d, m)| {
        prop::collection::vec(-3.0f64..3.0, m * d).prop_map(move |c| Curve::from_flat("c", d, c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn approximate_ball_brackets_exact(
        d in 1usize..=3,
        coords in prop::collection::vec(-5.0f64..5.0, 3..30),
        eps in 0.1f64..=1.0,
    ) {
        let points: Vec<Point> = coords.chunks_exact(d).map(|c| Point::new(c.to_vec()).unwrap()).collect();
        prop_assume!(!points.is_empty());
        let exact = exact_meb_small_d(&points).unwrap();
        let approx = approx_meb(&points, eps).unwrap();
        prop_assert!(exact.radius <= approx.radius * (1.0 + 1e-9) + 1e-12);
        prop_assert!(approx.radius <= (1.0 + eps) * exact.radius * (1.0 + 1e-9) + 1e-12);
        for p in &points {
            prop_assert!(approx.contains(p.coords(), 1e-9));
        }
    }

    #[test]
    fn simplification_within_bound(curve in curve_strategy(), k in 1usize..=6, r in 0.3f64..3.0, eps in 0.1f64..=1.0) {
        match simplify_dfd(&curve, k, r, eps).unwrap() {
            SimplifyOutcome::Simplified(pi) => {
                prop_assert_eq!(pi.len(), k);
                let d = distance(&curve, &pi, Metric::Frechet).unwrap();
                prop_assert!(d <= (1.0 + eps) * r * (1.0 + 1e-9), "d={} bound={}", d, (1.0 + eps) * r);
            }
            SimplifyOutcome::Infeasible => {
                // The exact optimum needs more than k runs.
                prop_assert!(minimal_runs(&curve, r) > k);
            }
        }
    }

    #[test]
    fn greedy_with_exact_balls_is_minimal(curve in curve_strategy(), r in 0.3f64..3.0) {
        let greedy = greedy_simplify_with(&curve, r, &ExactCover);
        prop_assert_eq!(greedy.len(), minimal_runs(&curve, r));
        let d = distance(&curve, &greedy, Metric::Frechet).unwrap();
        prop_assert!(d <= r * (1.0 + 1e-6));
        let k = greedy.len();
        prop_assert!(simplify_dfd_with(&curve, k, r, &ExactCover).unwrap().curve().is_some());
        if k > 1 {
            prop_assert_eq!(simplify_dfd_with(&curve, k - 1, r, &ExactCover).unwrap(), SimplifyOutcome::Infeasible);
        }
    }
}
