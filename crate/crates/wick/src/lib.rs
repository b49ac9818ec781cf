//! Tools for *-algebras defined by deformed commutation relations of the form
//!
//! ```text
//! a_i* a_j = delta_ij 1 + sum_{k,l} T[i][j][k][l] a_l a_k*
//! ```
//!
//! where the coefficient tensor carries the Hermitian symmetry
//! `T[i][j][k][l] = conj(T[j][i][l][k])`. Such an algebra admits Wick
//! (normal) ordering, and its Fock representation lives on the truncated
//! tensor algebra over a `d`-dimensional one-particle space.
//!
//! The crate builds the associated operator family on tensor powers
//! (`T_i`, `R_n`, and the Gram operators `P_n` of the Fock inner product),
//! classifies the positivity of each `P_n`, extracts and predicts inner
//! product kernels, realizes the quotient Fock representation as explicit
//! matrices, normal-orders symbolic *-polynomials, and audits the standard
//! positivity / kernel-structure / faithfulness statements numerically.
//!
//! Entry points:
//!
//! - [`coefficients::WickCoefficients`]: the defining tensor, with
//!   `q`-deformed and twisted-CCR presets.
//! - [`operators`]: `T_i`, `R_n`, `P_n`, braid check, positivity verdicts,
//!   predicted kernels.
//! - [`fock::FockTruncation`] / [`fock::RepMatrices`]: Gram operators,
//!   quotient coordinates, creation/annihilation blocks.
//! - [`symbolic`]: parsing, Wick ordering, and evaluation of *-polynomials
//!   in the truncated representation.
//! - [`audit`]: one-call verification report over all checks.
//!
//! Conventions (fixed once, inherited everywhere):
//!
//! - Matrices are dense, row-major, over `Complex64`.
//! - Tensor-power bases are ordered with the **leftmost factor most
//!   significant**: `e_{i_1} ⊗ ... ⊗ e_{i_n}` has index
//!   `i_1·d^{n-1} + ... + i_n`.
//! - Generator indices are 0-based internally and 1-based in all text I/O
//!   (`a1`, `a2*`, ...).
//!
//! Every value in the crate is immutable after construction and every
//! operation is a pure function of its inputs (no globals, no interior
//! mutability), so everything can be shared and called across threads
//! freely; single-threaded use needs nothing special.

pub mod audit;
pub mod coefficients;
pub mod fock;
pub mod linalg;
pub mod operators;
pub mod rng;
pub mod symbolic;

pub use num_complex::Complex64;

/// Default relative tolerance for rank/positivity decisions.
///
/// Entries of the Gram operators grow with the degree, so every threshold
/// in the crate is of the form `rel_tol * max(1, scale)` with a
/// context-dependent scale; absolute tolerances are never used for rank
/// decisions.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Default cap on matrix dimensions (`d^n` rows).
///
/// Tensor powers grow geometrically; the cap turns a runaway request into
/// an error instead of an allocation storm. Override explicitly when more
/// is really wanted.
pub const DEFAULT_DIM_CAP: usize = 20_000;

/// Tolerance for the structural identities that must hold to float
/// precision: Wick symmetry of the coefficient tensor, self-adjointness of
/// the assembled degree-2 operator, orthonormality of subspace bases.
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Coefficients below this magnitude are dropped from sparse polynomials
/// after every rewrite pass. Far below every test tolerance in the crate.
pub const COEFF_PRUNE_TOL: f64 = 1e-14;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum WickError {
    #[error("dimension cap exceeded: required {required} rows > cap {cap}")]
    DimensionCap { required: usize, cap: usize },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {allowed:.3e}")]
    NotHermitian { residual: f64, allowed: f64 },

    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("Gram operator indefinite at degree {degree} (min eigenvalue {min_eigenvalue:.6e})")]
    IndefiniteGram { degree: usize, min_eigenvalue: f64 },

    #[error("degree {degree} exceeds truncation bound {max_degree}")]
    DegreeOutOfRange { degree: usize, max_degree: usize },

    #[error("generator index {index} out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error(
        "quotient ill-defined at degree {degree}: creation does not preserve the kernel \
         (residual {residual:.3e})"
    )]
    KernelNotCovariant { degree: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, WickError>;
