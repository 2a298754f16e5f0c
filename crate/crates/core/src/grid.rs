//! Uniform grid anchored at the origin: edge derivation, snapping and
//! enumeration of lattice points inside Euclidean balls.

use crate::error::{Error, Result};
use crate::geometry::{euclidean, Curve, Metric};

/// Largest lattice coordinate magnitude accepted at snapping time.
pub const MAX_LATTICE_COORD: f64 = 4_611_686_018_427_387_904.0; // 2^62

/// Edge length and dimension of a uniform grid.
///
/// The remaining fields record how the edge was derived and are carried into
/// the persisted header; they do not influence snapping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub edge: f64,
    pub dim: usize,
    pub epsilon: f64,
    pub r: f64,
    pub m_norm: usize,
    pub metric: Metric,
}

impl GridSpec {
    /// The grid used by the index: edge `εr/√d` for the Fréchet distance and
    /// `εr/((2·m_norm)^{1/p}·√d)` for finite `p`.
    pub fn derive(epsilon: f64, r: f64, dim: usize, m_norm: usize, metric: Metric) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon={epsilon} outside (0, 1]")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r={r} must be positive")));
        }
        if dim == 0 || m_norm == 0 {
            return Err(Error::InvalidParameter("dimension and m_norm must be >= 1".into()));
        }
        let sqrt_d = (dim as f64).sqrt();
        let edge = match metric {
            Metric::Frechet => epsilon * r / sqrt_d,
            _ => epsilon * r / ((2.0 * m_norm as f64).powf(1.0 / metric.p()) * sqrt_d),
        };
        Ok(GridSpec {
            edge,
            dim,
            epsilon,
            r,
            m_norm,
            metric,
        })
    }

    /// A bare grid with the given edge; derivation fields are placeholders.
    pub fn with_edge(edge: f64, dim: usize) -> Result<Self> {
        if !(edge > 0.0 && edge.is_finite()) || dim == 0 {
            return Err(Error::InvalidParameter(format!("bad grid edge {edge} / dim {dim}")));
        }
        Ok(GridSpec {
            edge,
            dim,
            epsilon: 1.0,
            r: edge * (dim as f64).sqrt(),
            m_norm: 1,
            metric: Metric::Frechet,
        })
    }

    /// Worst-case Euclidean snapping error, `edge·√d/2`.
    pub fn snap_error_bound(&self) -> f64 {
        self.edge * (self.dim as f64).sqrt() / 2.0
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// Rounds one coordinate to the nearest lattice index, ties toward +∞.
    #[inline]
    fn round_coord(&self, x: f64) -> Result<i64> {
        let scaled = x / self.edge;
        if scaled.abs() > MAX_LATTICE_COORD {
            return Err(Error::InvalidParameter(format!(
                "coordinate {x} is outside the representable lattice range"
            )));
        }
        Ok((scaled + 0.5).floor() as i64)
    }

    pub fn snap(&self, x: &[f64]) -> Result<LatticePoint> {
        self.check_dim(x.len())?;
        let coords = x.iter().map(|&c| self.round_coord(c)).collect::<Result<Vec<_>>>()?;
        Ok(LatticePoint(coords))
    }

    pub fn snap_curve(&self, curve: &Curve) -> Result<LatticeCurveKey> {
        self.check_dim(curve.dim())?;
        let mut cells = Vec::with_capacity(curve.flat().len());
        for &c in curve.flat() {
            cells.push(self.round_coord(c)?);
        }
        Ok(LatticeCurveKey::from_flat(self.dim, cells))
    }

    /// Physical coordinates of a lattice point.
    pub fn physical(&self, z: &[i64]) -> Vec<f64> {
        z.iter().map(|&k| k as f64 * self.edge).collect()
    }

    pub(crate) fn physical_into(&self, z: &[i64], out: &mut [f64]) {
        for (o, &k) in out.iter_mut().zip(z) {
            *o = k as f64 * self.edge;
        }
    }

    /// The curve whose vertices are the physical positions of `key`.
    pub fn key_to_curve(&self, key: &LatticeCurveKey, id: impl Into<String>) -> Curve {
        let coords = key.cells().iter().map(|&k| k as f64 * self.edge).collect();
        Curve::from_flat(id, self.dim, coords).expect("lattice keys are non-empty and finite")
    }

    /// Lattice points whose physical position lies in the closed ball
    /// `B(center, radius)`, in lexicographic order.
    pub fn points_in_ball(&self, center: &[f64], radius: f64) -> Result<Vec<LatticePoint>> {
        let mut out = Vec::new();
        self.for_each_in_ball(center, radius, |z| out.push(LatticePoint(z.to_vec())))?;
        Ok(out)
    }

    /// Scans the bounding box of the ball and reports each lattice point inside.
    pub fn for_each_in_ball(&self, center: &[f64], radius: f64, mut visit: impl FnMut(&[i64])) -> Result<()> {
        self.check_dim(center.len())?;
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} is negative")));
        }
        let lo: Vec<i64> = center
            .iter()
            .map(|&c| ((c - radius) / self.edge).ceil() as i64 - 1)
            .collect();
        let hi: Vec<i64> = center
            .iter()
            .map(|&c| ((c + radius) / self.edge).floor() as i64 + 1)
            .collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(());
        }
        // The box is widened by one cell so rounding in the bounds never hides
        // a point the distance test accepts.
        let mut z = lo.clone();
        let mut phys = vec![0.0; self.dim];
        loop {
            self.physical_into(&z, &mut phys);
            if euclidean(&phys, center) <= radius {
                visit(&z);
            }
            // Odometer increment, last coordinate fastest.
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return Ok(());
                }
                axis -= 1;
                if z[axis] < hi[axis] {
                    z[axis] += 1;
                    break;
                }
                z[axis] = lo[axis];
            }
        }
    }
}

/// Integer grid coordinates; the physical point is `coords × edge`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

/// A snapped curve: one lattice point per vertex, flattened row-major.
///
/// Ordering is lexicographic over the flattened integers, which coincides with
/// vertex-by-vertex lexicographic order since all keys of one dictionary share
/// the same dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeCurveKey {
    cells: Box<[i64]>,
    dim: u32,
}

impl LatticeCurveKey {
    pub fn from_flat(dim: usize, cells: Vec<i64>) -> Self {
        assert!(
            dim > 0 && !cells.is_empty() && cells.len().is_multiple_of(dim),
            "malformed lattice key"
        );
        LatticeCurveKey {
            cells: cells.into_boxed_slice(),
            dim: dim as u32,
        }
    }

    pub fn from_points(points: &[LatticePoint]) -> Self {
        let dim = points.first().map(|p| p.0.len()).unwrap_or(0);
        let cells = points.iter().flat_map(|p| p.0.iter().copied()).collect();
        Self::from_flat(dim, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn len(&self) -> usize {
        self.cells.len() / self.dim as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn vertex(&self, i: usize) -> &[i64] {
        let d = self.dim as usize;
        &self.cells[i * d..(i + 1) * d]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.cells.chunks_exact(self.dim as usize)
    }
}
