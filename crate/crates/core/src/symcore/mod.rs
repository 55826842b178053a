//! Exact symbolic arithmetic: variable registries, multivariate polynomials
//! and rational functions over the rationals, truncated Laurent expansions at
//! infinity, shuffle combinatorics, and dense matrices with super structure.
//!
//! Everything downstream (envelopes, R-matrices, Yangian modules) reduces to
//! identities between these objects, so canonical forms here are what make
//! repeated runs byte-identical.

pub mod matrix;
pub mod poly;
pub mod registry;
pub mod rf;
pub mod series;
pub mod shuffles;

pub use matrix::{block_diag, kron, super_kron, tensor_parity, Mat};
pub use poly::{Mono, MultiPoly};
pub use registry::{Registry, RegistryBuilder, Var, VarKind};
pub use rf::{rat, RationalFunction};
pub use series::{expand_at_infinity, Series};

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("substitution makes a denominator vanish")]
    SingularSubstitution,
    #[error("no value bound for variable {0}")]
    UnboundVariable(String),
    #[error(
        "no expansion at infinity in {var}: numerator degree {num_deg} exceeds denominator degree {den_deg}"
    )]
    PoleAtInfinity {
        var: String,
        num_deg: u32,
        den_deg: u32,
    },
    #[error("series truncated at {var}^{lo}; coefficient of {var}^{wanted} not available")]
    TruncationExceeded { var: String, lo: i64, wanted: i64 },
    #[error("series operation needs strictly negative exponents, found top exponent {0}")]
    NotSmallAtInfinity(i64),
    #[error("cannot invert a series that is zero to working precision")]
    ZeroSeries,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("shape mismatch: {0}")]
    Shape(String),
}
