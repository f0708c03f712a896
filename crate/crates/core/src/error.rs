//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input matrix deviates from its conjugate transpose beyond tolerance.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} >= tolerance {tol:.3e}")]
    NonHermitian { deviation: f64, tol: f64 },

    /// Auxiliary scalar product fails positive definiteness.
    #[error("auxiliary product is not positive definite: min eigenvalue {min_eig:.3e}")]
    AuxNotPositive { min_eig: f64 },

    /// Metric operator has an eigenvalue inside the null band.
    #[error("metric operator is singular: eigenvalue {eig:.3e} within null tolerance {tol:.3e}")]
    SingularEta { eig: f64, tol: f64 },

    /// Gram restricted to the candidate physical sector has a genuinely
    /// negative eigenvalue; the subsidiary condition failed.
    #[error("gram is not positive semidefinite: eigenvalue {eig:.3e}")]
    NotPositiveSemidefinite { eig: f64 },

    /// Wightman functional fails the Hermiticity identity.
    #[error("Wightman functional is not Hermitian: deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A tensor word would exceed the degree truncation. Signals the
    /// truncation boundary, never physics.
    #[error("tensor degree {degree} exceeds the truncation cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    /// Fock basis enumeration would exceed the configured size limit.
    #[error("Fock basis size {dim} exceeds the configured limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    /// Test function amplitudes do not match the lattice layout.
    #[error("test function has {found} amplitude slots, lattice expects {expected}")]
    ModeMismatch { expected: usize, found: usize },

    /// Joint kernel came out empty; the vacuum always qualifies, so this
    /// indicates a bug rather than a physical statement.
    #[error("physical subspace is empty")]
    EmptySubspace,

    /// Test function cannot supply smooth amplitudes on the quadrature grid.
    #[error("test function supplies no closed-form amplitude on the quadrature grid")]
    GridMismatch,

    /// Richardson guard tripped: halving the mass-derivative step moved the
    /// result more than allowed.
    #[error("mass-derivative step too large: halving moved the result by {deviation:.3e} (rel), allowed {tol:.3e}")]
    StepTooLarge { deviation: f64, tol: f64 },

    /// Landau gauge lambda = 1 is excluded.
    #[error("gauge parameter lambda = {lambda} is within {tol:.1e} of the excluded Landau point 1")]
    LandauGauge { lambda: f64, tol: f64 },

    /// Gaussian centers violate the spacelike-separation margin.
    #[error("centers are not spacelike separated: margin {margin:.3} <= required {required:.3}")]
    NotSpacelike { margin: f64, required: f64 },

    /// Malformed JSON input for a matrix or functional.
    #[error("invalid JSON payload: {0}")]
    InvalidJson(String),
}
