//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by lattice, polyhedral and series computations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Generators span a subgroup of rank lower than the ambient dimension.
    #[error("generators span a rank-deficient subgroup (rank {rank} < dim {dim})")]
    RankDeficient { rank: usize, dim: usize },

    /// First lattice is not contained in the second.
    #[error("lattice is not a sublattice of the given superlattice")]
    NotSublattice,

    /// An exponent lies in the lattice generated by the previous ones.
    #[error("exponent #{index} lies in the lattice generated by the previous data")]
    NotCharacteristic { index: usize },

    /// Exponents are not componentwise increasing.
    #[error("exponent #{index} does not componentwise dominate its predecessor")]
    NotMonotone { index: usize },

    /// First exponent is a pure first-coordinate power below one.
    #[error("input is not normalized: first exponent is ({value}, 0, ..., 0) with {value} < 1")]
    NotNormalized { value: String },

    /// Newton data with an empty generator set.
    #[error("empty generator set")]
    EmptyGenerators,

    /// Cone passed where a simplicial cone is required.
    #[error("cone with {rays} rays and dimension {dim} is not simplicial")]
    NotSimplicial { rays: usize, dim: usize },

    /// A denominator ray maps to the trivial factor under substitution.
    #[error("substitution sends denominator ray {ray} to the zero factor")]
    InvalidSubstitution { ray: String },

    /// A series coefficient failed to normalize to a Laurent polynomial.
    #[error("series coefficient of T^{degree} is not a Laurent polynomial in L")]
    NonPolynomialCoefficient { degree: usize },

    /// Numerator reconstruction did not stabilize within the guard window.
    #[error("numerator reconstruction left nonzero coefficients in the guard window (first at T^{degree})")]
    NotStabilized { degree: usize },

    /// Enumeration exceeded its configured budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// An internal cross-check failed; indicates a bug, never expected.
    #[error("internal consistency failure: {0}")]
    InternalInconsistency(String),

    /// Malformed input description.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
