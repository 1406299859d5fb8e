//! Exact computations for toric algebraic stacks.
//!
//! The crate works bottom-up:
//!
//! * [`linalg`]: arbitrary-precision integer/rational linear algebra
//!   (Hermite and Smith normal forms, saturation, cokernels).
//! * [`cones`]: rational polyhedral cones, duals, faces, multiplicities.
//! * [`monoids`]: toric monoids `σ^∨ ∩ M`, Hilbert bases, minimal and
//!   admissible free resolutions.
//! * [`stackyfan`]: simplicial fans with level structures, completeness and
//!   tameness.
//! * [`charts`]: local quotient presentations `[A^r / G] × G_m^(d-r)`,
//!   stabilizers and torus-invariant cycles.
//! * [`cli`]: the JSON document format and the reports behind the
//!   `toristack` binary.

pub mod charts;
pub mod cli;
pub mod cones;
pub mod linalg;
pub mod monoids;
pub mod stackyfan;

pub use cones::{ConeError, RationalCone};
pub use linalg::{FiniteAbelianGroup, IntVector, IntegerMatrix, RationalVector};
