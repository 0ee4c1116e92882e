//! Matrix p -> q operator norms, block-diagonal matrix algebras, and
//! numerical checks of norm recovery through algebra-valued pairings.
//!
//! The crate is organized around three layers:
//!
//! * [`matrix`], [`exponent`], [`norms`], [`opnorm`]: dense complex matrices,
//!   Hölder-conjugate exponents, vector p-norms, and p -> q operator norms
//!   (exact formulas, a restarted nonlinear power iteration, and a
//!   deterministic grid oracle for certification at small dimension).
//! * [`block`], [`pairing`]: compositions, block-diagonal and
//!   basis-parametrized matrix algebras, stacked row/column module elements,
//!   the algebra-valued pairing, norm-achieving witness constructions, and
//!   the gap between an element's norm and the pairing supremum.
//! * [`experiments`]: end-to-end counterexample reproductions and the sweep
//!   over p, with CSV output.
//!
//! Restart batches and oracle grid cells run on rayon when the default
//! `parallel` feature is enabled; reductions are deterministic either way.

pub mod block;
pub mod error;
pub mod experiments;
pub mod exponent;
pub mod matrix;
pub mod norms;
pub mod opnorm;
pub mod optim;
pub mod pairing;
pub mod par;

#[doc(hidden)]
pub mod testutil;

pub use block::{Algebra, BlockDiagAlgebra, ColumnModuleElement, Composition, ParametrizedAlgebra, RowModuleElement};
pub use error::{Error, Result};
pub use exponent::PExponent;
pub use matrix::{ComplexMatrix, ComplexVector};
pub use opnorm::{Method, NormEstimate, OptimizerConfig};
pub use pairing::{CertificationStatus, GapReport, Side};
