//! Approximate near-neighbour search and range counting for polygonal curves
//! under the discrete Fréchet distance, dynamic time warping and `ℓ_{p,2}`
//! alignment distances.
//!
//! Queries cost one dictionary lookup; all the work happens at build time,
//! where every grid curve close to an input curve is precomputed.

pub mod candidates;
pub mod dictionary;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod index;
pub mod oracle;
pub mod simplify;

pub use dictionary::{Backend, CurveId, Dictionary, Mode, Payload};
pub use error::{Error, Result};
pub use geometry::{distance, Alignment, Curve, Metric, Point};
pub use grid::{GridSpec, LatticeCurveKey, LatticePoint};
pub use index::{BuildStats, CurveIndex, IndexParams, QueryResult};
pub use simplify::{simplify_dfd, SimplifyOutcome};
