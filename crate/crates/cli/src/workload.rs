//! Seeded random workloads with oracle-labelled queries.

use annc_core::oracle::linear_scan_nn;
use annc_core::{Curve, Metric, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_a11c;

/// Side of the box `[0, span]^d` input vertices are drawn from.
pub const DEFAULT_SPAN: f64 = 10.0;

/// Rejection-sampling attempts per query before giving up on its label.
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadSpec {
    pub n: usize,
    /// Input curve length.
    pub m: usize,
    pub d: usize,
    pub metric: Metric,
    pub epsilon: f64,
    pub r: f64,
    /// Total queries; even positions are near, odd positions far.
    pub queries: usize,
    /// Query length for the asymmetric workload; `None` queries with length `m`.
    pub k: Option<usize>,
    pub span: f64,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn new(n: usize, m: usize, d: usize, metric: Metric, epsilon: f64, r: f64) -> Self {
        WorkloadSpec {
            n,
            m,
            d,
            metric,
            epsilon,
            r,
            queries: 200,
            k: None,
            span: DEFAULT_SPAN,
            seed: DEFAULT_SEED,
        }
    }

    pub fn name(&self) -> String {
        match self.k {
            Some(k) => format!("asym-k{k}"),
            None => "random".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Workload {
    pub curves: Vec<Curve>,
    pub queries: Vec<Curve>,
}

fn uniform_point(rng: &mut ChaCha8Rng, d: usize, span: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(0.0..span)).collect()
}

/// A point drawn uniformly from the unit ball.
fn unit_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn displace(rng: &mut ChaCha8Rng, base: &[f64], scale: f64) -> Vec<f64> {
    let v = unit_ball(rng, base.len());
    base.iter().zip(v).map(|(b, x)| b + scale * x).collect()
}

/// Per-vertex displacement under which the diagonal alignment of two
/// equal-length curves stays within `r`.
fn vertex_budget(metric: Metric, m: usize, r: f64) -> f64 {
    match metric {
        Metric::Frechet => r,
        _ => r / (m as f64).powf(1.0 / metric.p()),
    }
}

fn random_curve(rng: &mut ChaCha8Rng, id: String, len: usize, d: usize, span: f64) -> Curve {
    let coords = (0..len).flat_map(|_| uniform_point(rng, d, span)).collect();
    Curve::from_flat(id, d, coords).expect("finite coordinates")
}

/// Inputs of length `m` made of `k` clusters of vertices around a random
/// `k`-vertex skeleton, so every input has a `k`-vertex curve within `r`.
fn skeleton_inputs(rng: &mut ChaCha8Rng, spec: &WorkloadSpec, k: usize) -> (Vec<Curve>, Vec<Curve>) {
    let mut curves = Vec::with_capacity(spec.n);
    let mut skeletons = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let skeleton: Vec<Vec<f64>> = (0..k).map(|_| uniform_point(rng, spec.d, spec.span)).collect();
        // Random composition of m into k positive parts.
        let mut cuts: Vec<usize> = (1..spec.m).collect();
        for j in (1..cuts.len()).rev() {
            let t = rng.gen_range(0..=j);
            cuts.swap(j, t);
        }
        let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
        cuts.sort_unstable();
        cuts.push(spec.m);
        let mut coords = Vec::with_capacity(spec.m * spec.d);
        let mut start = 0;
        for (s, &end) in skeleton.iter().zip(&cuts) {
            for _ in start..end {
                coords.extend(displace(rng, s, 0.9 * spec.r));
            }
            start = end;
        }
        curves.push(Curve::from_flat(format!("c{i}"), spec.d, coords).expect("finite coordinates"));
        skeletons.push(Curve::from_rows(format!("s{i}"), skeleton).expect("finite coordinates"));
    }
    (curves, skeletons)
}

/// Generates inputs and queries. Near queries are perturbations of an input
/// (or its skeleton) confirmed within `r` by the oracle; far queries are
/// random curves confirmed farther than `(1+ε)r` from every input.
pub fn generate(spec: &WorkloadSpec) -> Result<Workload> {
    assert!(spec.n > 0 && spec.m > 0 && spec.d > 0, "workload needs n, m, d >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (curves, bases) = match spec.k {
        Some(k) => {
            assert!(k >= 1 && k <= spec.m, "asymmetric k must lie in 1..=m");
            skeleton_inputs(&mut rng, spec, k)
        }
        None => {
            let curves: Vec<Curve> = (0..spec.n)
                .map(|i| random_curve(&mut rng, format!("c{i}"), spec.m, spec.d, spec.span))
                .collect();
            (curves.clone(), curves)
        }
    };
    let qlen = spec.k.unwrap_or(spec.m);
    let far_radius = (1.0 + spec.epsilon) * spec.r;
    let mut queries = Vec::with_capacity(spec.queries);
    for q in 0..spec.queries {
        let id = format!("q{q}");
        let mut chosen = None;
        for _ in 0..MAX_ATTEMPTS {
            let candidate = if q % 2 == 0 {
                let base = &bases[rng.gen_range(0..bases.len())];
                let scale = match spec.k {
                    Some(_) => 0.5 * spec.r,
                    None => vertex_budget(spec.metric, qlen, spec.r),
                };
                let u: f64 = rng.gen_range(0.0..1.0);
                let coords = base.points().flat_map(|p| displace(&mut rng, p, u * scale)).collect();
                Curve::from_flat(id.clone(), spec.d, coords).expect("finite coordinates")
            } else {
                random_curve(&mut rng, id.clone(), qlen, spec.d, spec.span)
            };
            let nearest = linear_scan_nn(&curves, &candidate, spec.metric, spec.r)?.nearest_distance;
            let accept = if q % 2 == 0 {
                nearest <= spec.r
            } else {
                nearest > far_radius
            };
            if accept {
                chosen = Some(candidate);
                break;
            }
        }
        match chosen {
            Some(c) => queries.push(c),
            None => {
                return Err(annc_core::Error::InvalidParameter(format!(
                    "could not draw a {} query after {MAX_ATTEMPTS} attempts",
                    if q % 2 == 0 { "near" } else { "far" }
                )))
            }
        }
    }
    Ok(Workload { curves, queries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use annc_core::distance;

    #[test]
    fn deterministic_per_seed() {
        let spec = WorkloadSpec::new(5, 3, 2, Metric::Dtw, 0.5, 1.0);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.curves, b.curves);
        assert_eq!(a.queries, b.queries);
        let c = generate(&WorkloadSpec { seed: 1, ..spec }).unwrap();
        assert_ne!(a.curves, c.curves);
    }

    #[test]
    fn near_and_far_labels_hold() {
        for metric in [Metric::Frechet, Metric::Dtw, Metric::Lp(2.0)] {
            let mut spec = WorkloadSpec::new(6, 3, 1, metric, 0.5, 1.0);
            spec.queries = 20;
            let w = generate(&spec).unwrap();
            for (i, q) in w.queries.iter().enumerate() {
                let nearest = w
                    .curves
                    .iter()
                    .map(|c| distance(c, q, metric).unwrap())
                    .fold(f64::INFINITY, f64::min);
                if i % 2 == 0 {
                    assert!(nearest <= 1.0);
                } else {
                    assert!(nearest > 1.5);
                }
            }
        }
    }

    #[test]
    fn skeleton_inputs_are_simplifiable() {
        let mut spec = WorkloadSpec::new(8, 8, 2, Metric::Frechet, 0.5, 1.0);
        spec.k = Some(3);
        spec.queries = 10;
        let w = generate(&spec).unwrap();
        for c in &w.curves {
            assert_eq!(c.len(), 8);
            let pi = annc_core::simplify_dfd(c, 3, 1.0, 1.0).unwrap();
            assert!(pi.curve().is_some(), "curve {} should be simplifiable", c.id());
        }
        assert!(w.queries.iter().all(|q| q.len() == 3));
    }
}
