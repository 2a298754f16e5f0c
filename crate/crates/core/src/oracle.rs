//! Slow, obviously-correct baselines for tests and benchmarks.
//!
//! Everything here is a linear scan or an exhaustive enumeration over the
//! geometry kernels. Nothing from the grid, candidate, dictionary or index
//! modules is used, so a bug there cannot leak into the reference answers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{distance, euclidean, Ball, Curve, Metric, Point};

/// Largest Cartesian product [`brute_candidates`] will scan.
pub const MAX_BRUTE_PRODUCT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleAnswer {
    pub nearest_id: String,
    pub nearest_distance: f64,
    /// Ids of all curves within the requested radius, in input order.
    pub within: Vec<String>,
}

/// Exact nearest neighbour by full distance evaluation; ties go to the
/// earlier curve. `within` lists every curve at distance `<= radius`.
pub fn linear_scan_nn(curves: &[Curve], q: &Curve, metric: Metric, radius: f64) -> Result<OracleAnswer> {
    if curves.is_empty() {
        return Err(Error::InvalidParameter("oracle over an empty dataset".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    let mut within = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let d = distance(c, q, metric)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
        if d <= radius {
            within.push(c.id().to_string());
        }
    }
    let (i, d) = best.expect("non-empty dataset");
    Ok(OracleAnswer {
        nearest_id: curves[i].id().to_string(),
        nearest_distance: d,
        within,
    })
}

/// Number of curves at distance `<= radius` from `q`.
pub fn count_within(curves: &[Curve], q: &Curve, metric: Metric, radius: f64) -> Result<usize> {
    let mut n = 0;
    for c in curves {
        if distance(c, q, metric)? <= radius {
            n += 1;
        }
    }
    Ok(n)
}

/// Every curve of `out_len` vertices drawn from `pool` (lattice points scaled
/// by `edge`) whose distance to `anchor` is at most `radius`. Keys are the
/// flattened lattice coordinates.
pub fn brute_candidates(
    anchor: &Curve,
    pool: &[Vec<i64>],
    edge: f64,
    out_len: usize,
    radius: f64,
    metric: Metric,
) -> Result<BTreeSet<Vec<i64>>> {
    let product = (pool.len() as u64).checked_pow(out_len as u32).unwrap_or(u64::MAX);
    if product > MAX_BRUTE_PRODUCT {
        return Err(Error::Capacity {
            limit: MAX_BRUTE_PRODUCT,
            context: format!("{} pool points to the power {out_len}", pool.len()),
        });
    }
    let mut out = BTreeSet::new();
    if pool.is_empty() {
        return Ok(out);
    }
    let dim = anchor.dim();
    let mut digits = vec![0usize; out_len];
    loop {
        let cells: Vec<i64> = digits.iter().flat_map(|&i| pool[i].iter().copied()).collect();
        let coords = cells.iter().map(|&c| c as f64 * edge).collect();
        let cand = Curve::from_flat("candidate", dim, coords)?;
        if distance(anchor, &cand, metric)? <= radius {
            out.insert(cells);
        }
        let mut pos = out_len;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < pool.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Exact minimum enclosing ball for `d <= 3`.
///
/// The optimal ball is the circumscribed ball of an affinely independent
/// support set of at most `d + 1` points, centred in their affine hull. All
/// such subsets are tried; the smallest ball that encloses every point wins.
pub fn exact_meb_small_d(points: &[Point]) -> Result<Ball> {
    let dim = points
        .first()
        .map(Point::dim)
        .ok_or_else(|| Error::InvalidParameter("enclosing ball of an empty set".into()))?;
    if dim > 3 {
        return Err(Error::InvalidParameter(format!(
            "exact enclosing ball supports d <= 3, got {dim}"
        )));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            found: p.dim(),
        });
    }
    let n = points.len();
    let scale = points
        .iter()
        .flat_map(|p| p.coords().iter().map(|c| c.abs()))
        .fold(1.0f64, f64::max);
    let slack = 1e-9 * scale;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut subset = Vec::with_capacity(dim + 1);
    for size in 1..=(dim + 1).min(n) {
        for_each_subset(n, size, 0, &mut subset, &mut |idx| {
            let support: Vec<&[f64]> = idx.iter().map(|&i| points[i].coords()).collect();
            let Some(center) = circumcenter(&support) else {
                return;
            };
            let radius = euclidean(&center, support[0]);
            if best.as_ref().is_some_and(|(_, r)| radius >= *r) {
                return;
            }
            if points.iter().all(|p| euclidean(&center, p.coords()) <= radius + slack) {
                best = Some((center, radius));
            }
        });
    }
    let (center, _) = best.expect("a single point always encloses a singleton; pairs cover the rest");
    let radius = points
        .iter()
        .map(|p| euclidean(&center, p.coords()))
        .fold(0.0, f64::max);
    Ok(Ball {
        center: Point::new(center)?,
        radius,
    })
}

fn for_each_subset(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if cur.len() == size {
        visit(cur);
        return;
    }
    for i in start..n {
        cur.push(i);
        for_each_subset(n, size, i + 1, cur, visit);
        cur.pop();
    }
}

/// Centre of the ball through all `support` points lying in their affine
/// hull, or `None` when the points are affinely dependent.
fn circumcenter(support: &[&[f64]]) -> Option<Vec<f64>> {
    let p0 = support[0];
    let k = support.len() - 1;
    if k == 0 {
        return Some(p0.to_vec());
    }
    let dirs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // Centre = p0 + Σ λ_j dir_j with dir_i·(c − p0) = |dir_i|²/2.
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| dot(&dirs[i], &dirs[j])).collect();
            row.push(dot(&dirs[i], &dirs[i]) / 2.0);
            row
        })
        .collect();
    let lambda = solve(&mut a, k)?;
    let mut c = p0.to_vec();
    for (l, d) in lambda.iter().zip(&dirs) {
        for (ci, di) in c.iter_mut().zip(d) {
            *ci += l * di;
        }
    }
    Some(c)
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// system.
fn solve(a: &mut [Vec<f64>], k: usize) -> Option<Vec<f64>> {
    let norm = a.iter().flat_map(|r| r[..k].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    if norm == 0.0 {
        return None;
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * norm {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(id: &str, rows: &[&[f64]]) -> Curve {
        Curve::from_rows(id, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn pts(rows: &[&[f64]]) -> Vec<Point> {
        rows.iter().map(|r| Point::new(r.to_vec()).unwrap()).collect()
    }

    #[test]
    fn nn_examples() {
        let a = curve("a", &[&[0.0]]);
        let ans = linear_scan_nn(std::slice::from_ref(&a), &a, Metric::Frechet, 0.0).unwrap();
        assert_eq!(ans.nearest_distance, 0.0);
        assert_eq!(ans.within, vec!["a"]);

        let near = curve("near", &[&[1.0]]);
        let far = curve("far", &[&[2.0]]);
        let q = curve("q", &[&[0.0]]);
        let ans = linear_scan_nn(&[near.clone(), far.clone()], &q, Metric::Frechet, 1.5).unwrap();
        assert_eq!(ans.nearest_id, "near");
        assert_eq!(ans.within, vec!["near"]);

        let twin = curve("twin", &[&[-1.0]]);
        let ans = linear_scan_nn(&[near, twin], &q, Metric::Frechet, 0.5).unwrap();
        assert_eq!(ans.nearest_id, "near");
        assert!(ans.within.is_empty());

        assert!(linear_scan_nn(&[], &q, Metric::Frechet, 1.0).is_err());
    }

    #[test]
    fn brute_examples() {
        let a = curve("a", &[&[0.0]]);
        let pool = vec![vec![-1], vec![0], vec![1]];
        assert_eq!(
            brute_candidates(&a, &pool, 1.0, 1, 1.5, Metric::Frechet).unwrap().len(),
            3
        );
        let only: Vec<_> = brute_candidates(&a, &pool, 1.0, 1, 0.4, Metric::Frechet)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(only, vec![vec![0]]);
        let pairs = brute_candidates(&a, &pool, 1.0, 2, 1.0, Metric::Frechet).unwrap();
        // Every pair of pool points is within 1 of the single anchor vertex.
        assert_eq!(pairs.len(), 9);
        let pairs = brute_candidates(&a, &pool, 1.0, 2, 0.5, Metric::Frechet).unwrap();
        assert_eq!(pairs.into_iter().collect::<Vec<_>>(), vec![vec![0, 0]]);
        let big: Vec<Vec<i64>> = (0..1001).map(|i| vec![i]).collect();
        assert!(matches!(
            brute_candidates(&a, &big, 1.0, 2, 1.0, Metric::Frechet),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn exact_meb_examples() {
        let b = exact_meb_small_d(&pts(&[&[-1.0], &[1.0]])).unwrap();
        assert!((b.center.coords()[0]).abs() < 1e-12 && (b.radius - 1.0).abs() < 1e-12);

        let b = exact_meb_small_d(&pts(&[&[3.0, 4.0]])).unwrap();
        assert_eq!(b.radius, 0.0);

        let b = exact_meb_small_d(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert!((b.center.coords()[0] - 0.5).abs() < 1e-12);
        assert!((b.center.coords()[1] - 0.5).abs() < 1e-12);
        assert!((b.radius - 2f64.sqrt() / 2.0).abs() < 1e-12);

        // Obtuse triangle: the ball is spanned by the long side.
        let b = exact_meb_small_d(&pts(&[&[0.0, 0.0], &[4.0, 0.0], &[2.0, 0.5]])).unwrap();
        assert!((b.radius - 2.0).abs() < 1e-12);

        // Regular tetrahedron corners of a cube.
        let b = exact_meb_small_d(&pts(&[
            &[1.0, 1.0, 1.0],
            &[1.0, -1.0, -1.0],
            &[-1.0, 1.0, -1.0],
            &[-1.0, -1.0, 1.0],
        ]))
        .unwrap();
        assert!((b.radius - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn exact_meb_rejects_high_dim() {
        assert!(exact_meb_small_d(&pts(&[&[0.0, 0.0, 0.0, 0.0]])).is_err());
        assert!(exact_meb_small_d(&[]).is_err());
    }

    #[test]
    fn exact_meb_handles_duplicates_and_collinear() {
        let b = exact_meb_small_d(&pts(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(b.radius, 0.0);
        let b = exact_meb_small_d(&pts(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]])).unwrap();
        assert!((b.radius - 1.5 * 2f64.sqrt()).abs() < 1e-12);
    }
}
