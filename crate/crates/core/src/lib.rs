//! Exact symmetric-function machinery for averages of products and ratios of
//! characteristic polynomials over circular beta-ensembles.
//!
//! The crate is organized around independent evaluation routes for the same
//! ensemble average, so that every value can be cross-checked:
//!
//! - [`partition`]: Young diagrams, hook data, generalized Pochhammer symbols.
//! - [`symfun`]: exact symmetric-function algebra at a fixed rational alpha
//!   (monomial/power-sum/Jack bases, inner product, structure coefficients).
//! - [`superjack`]: Jack functions in two alphabets evaluated at points.
//! - [`multialt`]: hyperdeterminants, Pfaffians, and the rectangular-Jack
//!   closed forms built from them.
//! - [`ensemble`]: the ensemble density, normalization constant, and a
//!   deterministic torus-quadrature oracle.
//! - [`ratioavg`]: the closed-form ratio-average routes and their adapters.

pub mod ensemble;
pub mod multialt;
pub mod num;
pub mod partition;
pub mod ratioavg;
pub mod report;
pub mod superjack;
pub mod symfun;

pub use crate::num::{AlphaParam, PointVal, Rat, Scalar};
pub use ensemble::{EnsembleParams, PsiFactor, QuadratureConfig};
pub use partition::{dominance_leq, enumerate_partitions, EnumBounds, Partition};
pub use ratioavg::{AverageValue, RatioQuery, Route, TruncationPolicy};
pub use symfun::{Basis, JackCtx, SymPoly};
