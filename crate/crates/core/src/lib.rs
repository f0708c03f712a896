//! Numerical certification toolkit for indefinite-metric (Krein) quantization
//! of the free electromagnetic potential.
//!
//! The crate is organized along the pipeline it certifies:
//!
//! - [`krein`]: finite-dimensional indefinite inner-product spaces, metric
//!   operators, Krein normalization, null quotients and seminorm dominance.
//! - [`borchers`]: a degree-truncated free involutive tensor algebra over a
//!   finite test-function basis, Wightman functionals and the GNS quotient.
//! - [`fock`]: a mode-truncated bosonic Fock space for the four-component
//!   vector potential with covariant commutation relations and the diagonal
//!   Krein structure `(-1)^{N_0}`.
//! - [`gupta`]: the Gupta-Bleuler subsidiary condition: physical subspace,
//!   positivity, null quotient, observable preservation, weak Maxwell
//!   equations.
//! - [`twopoint`]: smeared covariant two-point functions for general gauge
//!   parameters, the forward-shell kernels behind them, and locality,
//!   indefiniteness and gauge-independence diagnostics.
//!
//! All values are plain data once constructed and safe to share across
//! threads; the hot inner loops go through [`par`], which is backed by rayon
//! when the `parallel` feature (default) is enabled and falls back to
//! sequential iteration otherwise.

pub mod borchers;
pub mod error;
pub mod fock;
pub mod gupta;
pub mod jsonio;
pub mod krein;
pub mod linalg;
pub mod par;
pub mod twopoint;

pub use error::{Error, Result};
pub use par::Execution;

/// Minkowski metric signature convention, fixed project-wide: g = diag(+1,-1,-1,-1).
pub const METRIC_DIAG: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
