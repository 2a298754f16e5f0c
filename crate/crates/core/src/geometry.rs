//! Points, curves, alignments and the exact distance kernels.
//!
//! All three distances share one shape: minimise, over monotone couplings of
//! the two vertex sequences, an aggregate of the matched Euclidean distances.
//! The aggregate is the maximum for the discrete Fréchet distance, the sum for
//! dynamic time warping and the `ℓ_p` norm in general.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `m1 + m2` accepted by [`enumerate_alignments`].
pub const MAX_ALIGNMENT_ENUM: usize = 24;

/// A point in `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidCurve("point has no coordinates".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Euclidean distance between two coordinate slices of equal length.
///
/// Every predicate in the crate goes through this function so that pool
/// filters, pruning tests and final verification agree bit for bit.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A polygonal curve: a non-empty sequence of points of uniform dimension.
///
/// Vertices are stored row-major in one flat buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    id: String,
    dim: usize,
    coords: Vec<f64>,
}

impl Curve {
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| Error::InvalidCurve("curve has no points".into()))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend(p.into_coords());
        }
        Ok(Curve {
            id: id.into(),
            dim,
            coords,
        })
    }

    /// Builds a curve from nested coordinate rows, validating every value.
    pub fn from_rows(id: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let points = rows.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
        Curve::new(id, points)
    }

    /// Builds a curve from a flat row-major buffer.
    pub fn from_flat(id: impl Into<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCurve(format!(
                "flat buffer of {} values does not hold whole {dim}-d points",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite coordinate {bad}")));
        }
        Ok(Curve {
            id: id.into(),
            dim,
            coords,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th vertex (0-based).
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    fn check_dim(&self, other: &Curve) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// An `ℓ_{p,2}` curve distance. `p = ∞` is the discrete Fréchet distance and
/// `p = 1` is dynamic time warping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Frechet,
    Dtw,
    /// Finite `p > 1`.
    Lp(f64),
}

impl Metric {
    pub fn from_p(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("metric exponent p={p} must be >= 1")));
        }
        Ok(if p == f64::INFINITY {
            Metric::Frechet
        } else if p == 1.0 {
            Metric::Dtw
        } else {
            Metric::Lp(p)
        })
    }

    pub fn p(self) -> f64 {
        match self {
            Metric::Frechet => f64::INFINITY,
            Metric::Dtw => 1.0,
            Metric::Lp(p) => p,
        }
    }

    pub fn is_frechet(self) -> bool {
        matches!(self, Metric::Frechet)
    }

    /// Per-pair cost contribution, `‖x − y‖^p` for finite `p`.
    #[inline]
    pub(crate) fn pair_cost(self, dist: f64) -> f64 {
        match self {
            Metric::Frechet | Metric::Dtw => dist,
            Metric::Lp(2.0) => dist * dist,
            Metric::Lp(p) => dist.powf(p),
        }
    }

    /// Maps an aggregated pair cost back to a distance.
    #[inline]
    pub(crate) fn finish(self, cost: f64) -> f64 {
        match self {
            Metric::Frechet | Metric::Dtw => cost,
            Metric::Lp(2.0) => cost.sqrt(),
            Metric::Lp(p) => cost.powf(1.0 / p),
        }
    }

    /// The aggregated-cost threshold corresponding to distance `radius`.
    #[inline]
    pub(crate) fn budget(self, radius: f64) -> f64 {
        self.pair_cost(radius)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Frechet => f.write_str("dfd"),
            Metric::Dtw => f.write_str("dtw"),
            Metric::Lp(p) => write!(f, "p={p}"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    /// Accepts `dfd`, `dtw` or `p=<real>` (with `p=inf` for the Fréchet distance).
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dfd" | "frechet" => Ok(Metric::Frechet),
            "dtw" => Ok(Metric::Dtw),
            other => {
                let p = other
                    .strip_prefix("p=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("unknown metric `{s}`; expected dfd, dtw or p=<real>"))
                    })?;
                Metric::from_p(p)
            }
        }
    }
}

/// A coupling of two vertex sequences, stored with 1-based index pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Alignment { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that this couples sequences of lengths `m1` and `m2`.
    pub fn validate(&self, m1: usize, m2: usize) -> Result<()> {
        let first = self.pairs.first().copied();
        let last = self.pairs.last().copied();
        if first != Some((1, 1)) {
            return Err(Error::InvalidAlignment(format!("first pair is {first:?}, not (1, 1)")));
        }
        if last != Some((m1, m2)) {
            return Err(Error::InvalidAlignment(format!(
                "last pair is {last:?}, not ({m1}, {m2})"
            )));
        }
        for w in self.pairs.windows(2) {
            let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(Error::InvalidAlignment(format!(
                    "illegal step {:?} -> {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Positions `k` (0-based) whose pair is redundant: removing it leaves a
    /// valid alignment that never costs more.
    pub fn redundant_positions(&self) -> Vec<usize> {
        let p = &self.pairs;
        (1..p.len().saturating_sub(1))
            .filter(|&k| {
                let (prev, cur, next) = (p[k - 1], p[k], p[k + 1]);
                let horizontal_then_vertical = prev == (cur.0, cur.1 - 1) && next == (cur.0 + 1, cur.1);
                let vertical_then_horizontal = prev == (cur.0 - 1, cur.1) && next == (cur.0, cur.1 + 1);
                horizontal_then_vertical || vertical_then_horizontal
            })
            .collect()
    }

    pub fn without_pair(&self, position: usize) -> Alignment {
        let mut pairs = self.pairs.clone();
        pairs.remove(position);
        Alignment { pairs }
    }
}

/// Cost of a specific alignment of `p` and `q`.
pub fn alignment_cost(tau: &Alignment, p: &Curve, q: &Curve, metric: Metric) -> Result<f64> {
    p.check_dim(q)?;
    tau.validate(p.len(), q.len())?;
    let matched = tau
        .pairs()
        .iter()
        .map(|&(i, j)| euclidean(p.point(i - 1), q.point(j - 1)));
    Ok(match metric {
        Metric::Frechet => matched.fold(0.0, f64::max),
        _ => metric.finish(matched.map(|d| metric.pair_cost(d)).sum()),
    })
}

/// Exact `ℓ_{p,2}` distance by the `O(m1·m2)` dynamic program.
pub fn distance(p: &Curve, q: &Curve, metric: Metric) -> Result<f64> {
    p.check_dim(q)?;
    Ok(distance_unchecked(p, q, metric))
}

pub(crate) fn distance_unchecked(p: &Curve, q: &Curve, metric: Metric) -> f64 {
    distance_flat(p.flat(), q.flat(), p.dim(), metric)
}

/// The distance DP over flat row-major vertex buffers of dimension `dim`.
pub(crate) fn distance_flat(p: &[f64], q: &[f64], dim: usize, metric: Metric) -> f64 {
    let (m1, m2) = (p.len() / dim, q.len() / dim);
    // Rolling row over q; `row[j]` is the best cost of p[..=i] against q[..=j].
    let mut row = vec![0.0f64; m2];
    let combine = |acc: f64, c: f64| match metric {
        Metric::Frechet => acc.max(c),
        _ => acc + c,
    };
    for i in 0..m1 {
        let pi = &p[i * dim..(i + 1) * dim];
        let mut diag = 0.0_f64;
        for j in 0..m2 {
            let c = metric.pair_cost(euclidean(pi, &q[j * dim..(j + 1) * dim]));
            let above = row[j];
            let best_prev = match (i, j) {
                (0, 0) => None,
                (0, _) => Some(row[j - 1]),
                (_, 0) => Some(above),
                _ => Some(diag.min(above).min(row[j - 1])),
            };
            diag = above;
            row[j] = match best_prev {
                None => c,
                Some(b) => combine(b, c),
            };
        }
    }
    metric.finish(row[m2 - 1])
}

/// All alignments of lengths `m1` and `m2`, optionally keeping only those
/// without a redundant pair. Output is in lexicographic order of the step
/// sequence (diagonal, then down, then right).
pub fn enumerate_alignments(m1: usize, m2: usize, non_redundant_only: bool) -> Result<Vec<Alignment>> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidParameter("alignment lengths must be >= 1".into()));
    }
    if m1 + m2 > MAX_ALIGNMENT_ENUM {
        return Err(Error::Capacity {
            limit: MAX_ALIGNMENT_ENUM as u64,
            context: format!("enumerate_alignments({m1}, {m2}) exceeds m1+m2 guard"),
        });
    }
    let mut out = Vec::new();
    let mut path = vec![(1, 1)];
    extend_alignments(m1, m2, &mut path, &mut out);
    if non_redundant_only {
        out.retain(|a| a.redundant_positions().is_empty());
    }
    Ok(out)
}

fn extend_alignments(m1: usize, m2: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Alignment>) {
    let (i, j) = *path.last().expect("path starts non-empty");
    if (i, j) == (m1, m2) {
        out.push(Alignment::new(path.clone()));
        return;
    }
    for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
        let next = (i + di, j + dj);
        if next.0 <= m1 && next.1 <= m2 {
            path.push(next);
            extend_alignments(m1, m2, path, out);
            path.pop();
        }
    }
}

/// A closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        euclidean(self.center.coords(), x) <= self.radius + slack
    }
}
