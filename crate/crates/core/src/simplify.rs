//! Greedy curve simplification under the discrete Fréchet distance.
//!
//! The curve is cut into maximal runs of consecutive vertices that fit in a
//! ball of radius `r`, and each run is replaced by the centre of its ball.
//! Run boundaries are found by doubling probes followed by binary search,
//! each probe answered by an enclosing-ball test.

use crate::error::{Error, Result};
use crate::geometry::{euclidean, Ball, Curve, Point};

/// Result of an (approximate) minimum enclosing ball computation.
pub type MebResult = Ball;

/// Approximate minimum enclosing ball by the farthest-point core-set
/// iteration: start at the first point and, for `⌈1/eps²⌉` rounds, move the
/// centre a `1/(i+1)` fraction of the way toward the current farthest point.
/// The returned radius is the exact farthest distance from the final centre
/// and is at most `(1 + eps)` times the optimum.
pub fn approx_meb(points: &[Point], eps: f64) -> Result<MebResult> {
    let dim = points
        .first()
        .map(Point::dim)
        .ok_or_else(|| Error::InvalidParameter("enclosing ball of an empty set".into()))?;
    let mut flat = Vec::with_capacity(points.len() * dim);
    for p in points {
        if p.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: p.dim(),
            });
        }
        flat.extend_from_slice(p.coords());
    }
    check_eps(eps)?;
    let (center, radius) = approx_meb_flat(&flat, dim, eps);
    Ok(Ball {
        center: Point::new(center)?,
        radius,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps={eps} outside (0, 1]")));
    }
    Ok(())
}

fn farthest(flat: &[f64], dim: usize, center: &[f64]) -> (usize, f64) {
    flat.chunks_exact(dim)
        .map(|p| euclidean(p, center))
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (i, d)| if d > best.1 { (i, d) } else { best },
        )
}

pub(crate) fn approx_meb_flat(flat: &[f64], dim: usize, eps: f64) -> (Vec<f64>, f64) {
    let mut center = flat[..dim].to_vec();
    let rounds = (1.0 / (eps * eps)).ceil() as usize;
    for i in 1..=rounds {
        let (far, dist) = farthest(flat, dim, &center);
        if dist == 0.0 {
            break;
        }
        let step = 1.0 / (i as f64 + 1.0);
        for (c, &f) in center.iter_mut().zip(&flat[far * dim..(far + 1) * dim]) {
            *c += (f - *c) * step;
        }
    }
    let radius = farthest(flat, dim, &center).1;
    (center, radius)
}

/// Decides whether a point set fits in a ball.
///
/// Implementations answer `Some(center)` when a ball at `center` with the
/// implementation's inflated radius covers the set, and `None` only when the
/// exact minimum enclosing ball is certainly larger than `r`.
pub trait CoverTest {
    fn cover(&self, flat: &[f64], dim: usize, r: f64) -> Option<Vec<f64>>;

    /// Radius of the covering balls reported for target radius `r`.
    fn covering_radius(&self, r: f64) -> f64;
}

/// Cover test backed by [`approx_meb`]: covers at `(1 + eps)·r`.
#[derive(Clone, Copy, Debug)]
pub struct ApproxCover {
    pub eps: f64,
}

impl CoverTest for ApproxCover {
    fn cover(&self, flat: &[f64], dim: usize, r: f64) -> Option<Vec<f64>> {
        let (center, radius) = approx_meb_flat(flat, dim, self.eps);
        // radius > (1+eps)·r implies the optimum exceeds r.
        (radius <= (1.0 + self.eps) * r).then_some(center)
    }

    fn covering_radius(&self, r: f64) -> f64 {
        (1.0 + self.eps) * r
    }
}

/// Longest prefix `A[..s]` the cover test accepts, found by doubling probes
/// and then binary search. Returns the covering centre and `s`.
///
/// When `s < |A|` the test rejected `A[..s + 1]`.
pub fn cover_prefix_with(flat: &[f64], dim: usize, r: f64, test: &impl CoverTest) -> (Vec<f64>, usize) {
    let n = flat.len() / dim;
    let prefix = |len: usize| &flat[..len * dim];
    let mut good = 1;
    let mut center = flat[..dim].to_vec();
    let mut bad = loop {
        if good == n {
            return (center, n);
        }
        let probe = (2 * good).min(n);
        match test.cover(prefix(probe), dim, r) {
            Some(c) => {
                good = probe;
                center = c;
            }
            None => break probe,
        }
    };
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        match test.cover(prefix(mid), dim, r) {
            Some(c) => {
                good = mid;
                center = c;
            }
            None => bad = mid,
        }
    }
    (center, good)
}

/// [`cover_prefix_with`] using the approximate enclosing ball.
pub fn cover_prefix(points: &[Point], r: f64, eps: f64) -> Result<(Point, usize)> {
    let curve = Curve::new("prefix", points.to_vec())?;
    check_eps(eps)?;
    check_radius(r)?;
    let (center, s) = cover_prefix_with(curve.flat(), curve.dim(), r, &ApproxCover { eps });
    Ok((Point::new(center)?, s))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius {r} must be positive")));
    }
    Ok(())
}

/// Greedy simplification: the sequence of covering centres, one per run.
pub fn greedy_simplify_with(curve: &Curve, r: f64, test: &impl CoverTest) -> Curve {
    let dim = curve.dim();
    let flat = curve.flat();
    let mut centers = Vec::new();
    let mut start = 0;
    let n = curve.len();
    while start < n {
        let (center, s) = cover_prefix_with(&flat[start * dim..], dim, r, test);
        centers.extend(center);
        start += s;
    }
    Curve::from_flat(curve.id(), dim, centers).expect("centres of finite points are finite")
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimplifyOutcome {
    /// A curve of exactly `k` vertices within `(1 + eps)·r` of the input.
    Simplified(Curve),
    /// Every curve of at most `k` vertices is farther than `r` from the input.
    Infeasible,
}

impl SimplifyOutcome {
    pub fn curve(&self) -> Option<&Curve> {
        match self {
            SimplifyOutcome::Simplified(c) => Some(c),
            SimplifyOutcome::Infeasible => None,
        }
    }
}

/// Simplifies `curve` to `k` vertices within `(1 + eps)·r`, or reports that
/// no `k`-vertex curve is within `r`. Short results are padded by repeating
/// the last centre.
pub fn simplify_dfd(curve: &Curve, k: usize, r: f64, eps: f64) -> Result<SimplifyOutcome> {
    check_eps(eps)?;
    simplify_dfd_with(curve, k, r, &ApproxCover { eps })
}

pub fn simplify_dfd_with(curve: &Curve, k: usize, r: f64, test: &impl CoverTest) -> Result<SimplifyOutcome> {
    if k == 0 {
        return Err(Error::InvalidParameter("simplification length must be >= 1".into()));
    }
    check_radius(r)?;
    let greedy = greedy_simplify_with(curve, r, test);
    if greedy.len() > k {
        return Ok(SimplifyOutcome::Infeasible);
    }
    Ok(SimplifyOutcome::Simplified(pad_to(greedy, k)))
}

fn pad_to(curve: Curve, k: usize) -> Curve {
    let dim = curve.dim();
    let mut flat = curve.flat().to_vec();
    let last = flat[flat.len() - dim..].to_vec();
    while flat.len() < k * dim {
        flat.extend_from_slice(&last);
    }
    Curve::from_flat(curve.id(), dim, flat).expect("padding keeps the buffer well formed")
}
