use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Matrix inversion rejected: determinant below the degeneracy tolerance.
    #[error("singular matrix: |det| = {det_abs:.3e} is below tolerance {tol:.3e}")]
    SingularMatrix { det_abs: f64, tol: f64 },

    /// Root bracketing failed: no sign change over the supplied interval.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// |mass * b| = 1: the origin matching matrix diverges there. The
    /// quantization condition itself stays regular on this surface.
    #[error("singular coupling: |mass*b| = 1 has no origin matching matrix")]
    SingularCoupling,

    /// Non-positive or non-finite configuration input.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Extension parameter vector is not on the unit sphere.
    #[error("parameter vector norm {norm} deviates from 1 beyond tolerance")]
    BadNorm { norm: f64 },

    /// The general matching-matrix denominator vanishes.
    #[error("matching-matrix denominator vanishes for these parameters")]
    SingularDenominator,

    /// m1 = m2 = 0: the wall-side transfer map is undefined in this
    /// parametrization (its determinant scale is zero).
    #[error("degenerate wall transfer: boundary matrix has m1 = m2 = 0")]
    DegenerateTransfer,

    /// The normalizer under the square root of the parameter map vanished.
    #[error("degenerate parameter point: square-root normalizer vanished")]
    DegenerateA,

    /// Eigenfunction requested at a wavenumber that does not solve the
    /// Dirichlet-wall determinant.
    #[error("k = {k} is not an eigenvalue: determinant {det:.3e} exceeds tolerance {tol:.3e}")]
    NotAnEigenvalue { k: f64, det: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
