//! Boundary and matching matrices of the two parametrizations, the wall-side
//! and origin-side transfer maps, and the consistency residuals between them.
//!
//! Plane-wave conventions: on the left half the amplitudes are (d, c), on the
//! right half (a, b); with alpha = 2ck + 1, beta = 2ck - 1 the wall
//! conditions become R (a, b)^T = V (d, c)^T, so the wall transfer map is
//! R^{-1} V. The origin matching matrix T acts on (psi, psi') limits and is
//! conjugated by the plane-wave basis matrix M to give the origin transfer
//! map M^{-1} T M. When the two parametrizations describe the same operator
//! at a wavenumber k, the two transfer maps agree.

use crate::error::{Error, Result};
use crate::model::{
    ExtensionParams, GeneralMatchingParams, MatchingParams, WellConfig, SINGULAR_COUPLING_TOL,
};
use crate::numerics::{Complex, Mat2};

/// Relative tolerance on |Delta| (in units of its analytic bound 8ck) below
/// which the wall transfer map is treated as degenerate.
pub const DELTA_REL_TOL: f64 = 1e-12;

/// Wall-side unitary boundary matrix
/// U = e^{i phi} [[m0 - i m3, -m2 - i m1], [m2 - i m1, m0 + i m3]].
///
/// Unitary whenever the parameter vector sits on the unit sphere;
/// det U = e^{2 i phi}.
pub fn build_u(ext: &ExtensionParams) -> Mat2 {
    let ph = Complex::cis(ext.phi);
    Mat2::new(
        ph * Complex::new(ext.m0, -ext.m3),
        ph * Complex::new(-ext.m2, -ext.m1),
        ph * Complex::new(ext.m2, -ext.m1),
        ph * Complex::new(ext.m0, ext.m3),
    )
}

/// Diagonal / lower-triangular split of the origin matching matrix:
/// the matrix has diagonal (t1, 1/t1) and lower-left entry t2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TDecomposition {
    /// (1 + mb) / (1 - mb)
    pub t1: f64,
    /// -2ma / (1 - m^2 b^2)
    pub t2: f64,
}

/// Origin matching matrix for the couplings (a, b):
/// [[(1+mb)/(1-mb), 0], [-2ma/(1-m^2b^2), (1-mb)/(1+mb)]].
/// Its determinant is exactly 1; it does not exist at |mass*b| = 1.
pub fn build_t(p: &MatchingParams, mass: f64) -> Result<(Mat2, TDecomposition)> {
    let mb = mass * p.b;
    if (mb.abs() - 1.0).abs() <= SINGULAR_COUPLING_TOL {
        return Err(Error::SingularCoupling);
    }
    let ma = mass * p.a;
    let t1 = (1.0 + mb) / (1.0 - mb);
    let t2 = -2.0 * ma / (1.0 - mb * mb);
    let t = Mat2::new(
        Complex::from(t1),
        Complex::ZERO,
        Complex::from(t2),
        Complex::from(1.0 / t1),
    );
    Ok((t, TDecomposition { t1, t2 }))
}

/// General four-parameter origin matching matrix, with common denominator
/// (2 - i x3)^2 + x1 x4 - x2^2. The lower-left numerator carries the sign
/// that makes the (2ma, 2mb, 0, 0) slice equal `build_t` exactly.
pub fn matching_matrix_general(g: &GeneralMatchingParams) -> Result<Mat2> {
    let GeneralMatchingParams { x1, x2, x3, x4 } = *g;
    let two_minus_ix3 = Complex::new(2.0, -x3);
    let denom = two_minus_ix3 * two_minus_ix3 + Complex::from(x1 * x4 - x2 * x2);
    let scale = [x1, x2, x3, x4]
        .iter()
        .fold(2.0_f64, |s, v| s.max(v.abs()));
    if denom.abs() <= 1e-14 * scale * scale {
        return Err(Error::SingularDenominator);
    }
    let n11 = Complex::from((2.0 + x2).powi(2) - x1 * x4 + x3 * x3);
    let n12 = Complex::from(-4.0 * x4);
    let n21 = Complex::from(-4.0 * x1);
    let n22 = Complex::from((2.0 - x2).powi(2) - x1 * x4 + x3 * x3);
    Ok(Mat2::new(n11 / denom, n12 / denom, n21 / denom, n22 / denom))
}

/// Wall-side system matrices R, V at wavenumber k, and the determinant scale
/// Delta = U12 (alpha^2 - beta^2) = -8ck (i m1 + m2) e^{i phi}.
///
/// Delta = 0 (m1 = m2 = 0) is reported here, not thrown: the division by
/// Delta happens only in `wall_transfer`.
pub fn assemble_rv(ext: &ExtensionParams, cfg: &WellConfig, k: f64) -> (Mat2, Mat2, Complex) {
    let u = build_u(ext);
    let alpha = 2.0 * cfg.c * k + 1.0;
    let beta = 2.0 * cfg.c * k - 1.0;
    let e_plus = Complex::cis(k * cfg.c);
    let e_minus = Complex::cis(-k * cfg.c);

    let r = Mat2::new(
        u.a12 * beta * e_plus,
        -(u.a12 * alpha * e_minus),
        (Complex::from(alpha) - u.a22 * beta) * e_plus,
        -((Complex::from(beta) - u.a22 * alpha) * e_minus),
    );
    let v = Mat2::new(
        (Complex::from(beta) - u.a11 * alpha) * e_minus,
        -((Complex::from(alpha) - u.a11 * beta) * e_plus),
        u.a21 * alpha * e_minus,
        -(u.a21 * beta * e_plus),
    );
    let delta = u.a12 * (alpha * alpha - beta * beta);
    (r, v, delta)
}

/// Wall transfer map R^{-1} V.
///
/// Fails with `DegenerateTransfer` when |Delta| <= DELTA_REL_TOL * 8ck, i.e.
/// for extensions with m1 = m2 = 0, whose wall map is undefined in this
/// parametrization.
pub fn wall_transfer(ext: &ExtensionParams, cfg: &WellConfig, k: f64) -> Result<Mat2> {
    wall_transfer_with_tol(ext, cfg, k, DELTA_REL_TOL)
}

/// `wall_transfer` with an explicit relative tolerance on |Delta|.
pub fn wall_transfer_with_tol(
    ext: &ExtensionParams,
    cfg: &WellConfig,
    k: f64,
    rel_tol: f64,
) -> Result<Mat2> {
    let (r, v, delta) = assemble_rv(ext, cfg, k);
    if delta.abs() <= rel_tol * 8.0 * cfg.c * k {
        return Err(Error::DegenerateTransfer);
    }
    // det R = Delta, already checked above
    let r_inv = r.inv_with_tol(0.0)?;
    Ok(r_inv * v)
}

/// Origin transfer map M^{-1} T M with M = [[1, 1], [ik, -ik]].
/// Its determinant is 1 (det T = 1 and conjugation preserves determinants).
pub fn origin_transfer(p: &MatchingParams, mass: f64, k: f64) -> Result<Mat2> {
    let (t, _) = build_t(p, mass)?;
    origin_transfer_given_t(t, k)
}

pub(crate) fn origin_transfer_given_t(t: Mat2, k: f64) -> Result<Mat2> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "wavenumber must be positive and finite, got {k}"
        )));
    }
    let m = Mat2::new(
        Complex::ONE,
        Complex::ONE,
        Complex::new(0.0, k),
        Complex::new(0.0, -k),
    );
    // det M = -2ik, nonzero for k > 0
    let m_inv = m.inv_with_tol(0.0)?;
    Ok(m_inv * t * m)
}

/// Both transfer maps evaluated at the same wavenumber, with the wall-side
/// determinant scale.
#[derive(Clone, Copy, Debug)]
pub struct TransferPair {
    pub wall: Mat2,
    pub origin: Mat2,
    pub k: f64,
    pub delta: Complex,
}

pub fn transfer_pair(
    ext: &ExtensionParams,
    p: &MatchingParams,
    cfg: &WellConfig,
    k: f64,
) -> Result<TransferPair> {
    let wall = wall_transfer(ext, cfg, k)?;
    let origin = origin_transfer(p, cfg.mass, k)?;
    let (_, _, delta) = assemble_rv(ext, cfg, k);
    Ok(TransferPair {
        wall,
        origin,
        k,
        delta,
    })
}

/// (lhs, rhs) of the four scalar identities equivalent to the transfer-map
/// equality, cleared of the 1/Delta factor and the wall phases. These are
/// audit steps 31-34.
pub fn transfer_component_identities(
    ext: &ExtensionParams,
    p: &MatchingParams,
    cfg: &WellConfig,
    k: f64,
) -> Result<[(Complex, Complex); 4]> {
    let u = build_u(ext);
    let (_, td) = build_t(p, cfg.mass)?;
    let (t1, t2) = (td.t1, td.t2);
    let alpha = 2.0 * cfg.c * k + 1.0;
    let beta = 2.0 * cfg.c * k - 1.0;
    let (_, _, delta) = assemble_rv(ext, cfg, k);
    let e2 = Complex::cis(2.0 * k * cfg.c);
    let em2 = Complex::cis(-2.0 * k * cfg.c);
    let two_ik = Complex::new(0.0, 2.0 * k);

    let ra = Complex::from(beta) - u.a22 * alpha; // beta - U22 alpha
    let rb = Complex::from(alpha) - u.a22 * beta; // alpha - U22 beta
    let va = Complex::from(beta) - u.a11 * alpha; // beta - U11 alpha
    let vb = Complex::from(alpha) - u.a11 * beta; // alpha - U11 beta
    let uu = u.a12 * u.a21;

    let lhs31 = -(ra * va) + uu * (alpha * alpha);
    let lhs32 = ra * vb - uu * (alpha * beta);
    let lhs33 = -(rb * va) + uu * (alpha * beta);
    let lhs34 = rb * vb - uu * (beta * beta);

    let q_pp = Complex::new(t2, k * (t1 + 1.0 / t1)) / two_ik;
    let q_mp = Complex::new(t2, k * (t1 - 1.0 / t1)) / two_ik;
    let q_mm = Complex::new(-t2, k * (t1 - 1.0 / t1)) / two_ik;
    let q_pm = Complex::new(-t2, k * (t1 + 1.0 / t1)) / two_ik;

    let rhs31 = q_pp * e2 * delta;
    let rhs32 = q_mp * delta;
    let rhs33 = q_mm * delta;
    let rhs34 = q_pm * em2 * delta;

    Ok([
        (lhs31, rhs31),
        (lhs32, rhs32),
        (lhs33, rhs33),
        (lhs34, rhs34),
    ])
}

/// Residuals of the transfer-map equality: the max-entry magnitude of
/// wall - origin, and |lhs - rhs| of each of the four component identities.
/// Purely diagnostic; nothing here asserts a zero.
#[derive(Clone, Copy, Debug)]
pub struct ConsistencyResiduals {
    pub matrix_residual: f64,
    pub eq31: f64,
    pub eq32: f64,
    pub eq33: f64,
    pub eq34: f64,
}

pub fn consistency_residuals(
    ext: &ExtensionParams,
    p: &MatchingParams,
    cfg: &WellConfig,
    k: f64,
) -> Result<ConsistencyResiduals> {
    let pair = transfer_pair(ext, p, cfg, k)?;
    let matrix_residual = (pair.wall - pair.origin).max_abs();
    let comps = transfer_component_identities(ext, p, cfg, k)?;
    Ok(ConsistencyResiduals {
        matrix_residual,
        eq31: (comps[0].0 - comps[0].1).abs(),
        eq32: (comps[1].0 - comps[1].1).abs(),
        eq33: (comps[2].0 - comps[2].1).abs(),
        eq34: (comps[3].0 - comps[3].1).abs(),
    })
}
