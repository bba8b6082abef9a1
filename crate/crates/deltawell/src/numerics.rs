//! Self-contained complex scalar / 2x2 complex matrix kit and a
//! guaranteed-convergence bracketed root finder.
//!
//! Everything downstream (boundary matrices, transfer maps, spectra) builds
//! on these three pieces. All data is plain values and all functions are
//! pure, so any number of workers may call them concurrently.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Complex number with `f64` components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    /// e^{i theta}.
    pub fn cis(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex { re: c, im: s }
    }

    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    /// Modulus |z|.
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Complex::new(re, 0.0)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    fn mul(self, rhs: f64) -> Complex {
        Complex::new(self.re * rhs, self.im * rhs)
    }
}

impl Div for Complex {
    type Output = Complex;
    fn div(self, rhs: Complex) -> Complex {
        let d = rhs.norm_sqr();
        Complex::new(
            (self.re * rhs.re + self.im * rhs.im) / d,
            (self.im * rhs.re - self.re * rhs.im) / d,
        )
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

/// Default relative degeneracy tolerance for matrix inversion.
pub const DEFAULT_INV_TOL: f64 = 1e-14;

/// 2x2 complex matrix, stored by value in row-major order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2 {
    pub a11: Complex,
    pub a12: Complex,
    pub a21: Complex,
    pub a22: Complex,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a11: Complex::ONE,
        a12: Complex::ZERO,
        a21: Complex::ZERO,
        a22: Complex::ONE,
    };

    pub const fn new(a11: Complex, a12: Complex, a21: Complex, a22: Complex) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Determinant, computed exactly as a11*a22 - a12*a21.
    pub fn det(self) -> Complex {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Conjugate transpose.
    pub fn adjoint(self) -> Self {
        Mat2::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }

    pub fn scale(self, z: Complex) -> Self {
        Mat2::new(self.a11 * z, self.a12 * z, self.a21 * z, self.a22 * z)
    }

    /// Largest entry modulus.
    pub fn max_abs(self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Inverse with the default degeneracy tolerance.
    pub fn inv(self) -> Result<Self> {
        self.inv_with_tol(DEFAULT_INV_TOL)
    }

    /// Inverse via the adjugate. Rejected as singular when
    /// |det| <= tol * max_abs^2: entries grow like 2ck in the transfer
    /// matrices, so the threshold must scale with the squared entry size
    /// rather than being absolute.
    pub fn inv_with_tol(self, tol: f64) -> Result<Self> {
        let det = self.det();
        let det_abs = det.abs();
        let scale = self.max_abs();
        let threshold = tol * scale * scale;
        if det_abs <= threshold {
            return Err(Error::SingularMatrix {
                det_abs,
                tol: threshold,
            });
        }
        Ok(Mat2::new(
            self.a22 / det,
            -self.a12 / det,
            -self.a21 / det,
            self.a11 / det,
        ))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

/// Standard matrix product.
pub fn mat_mul(lhs: Mat2, rhs: Mat2) -> Mat2 {
    lhs * rhs
}

/// Inverse with the default degeneracy tolerance.
pub fn mat_inv(x: Mat2) -> Result<Mat2> {
    x.inv()
}

/// Bisection root finder on [lo, hi].
///
/// Needs f(lo) and f(hi) with opposite signs, or an endpoint whose residual
/// is already within `tol` (exact-boundary-root case; `tol` doubles as that
/// absolute acceptance). Refinement is pure bisection, so the result carries
/// the bisection guarantee: the final bracket width is below
/// tol * max(1, |root|) and the returned point is its midpoint.
/// Deterministic for a deterministic `f`.
pub fn bracketed_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let tol = tol.max(4.0 * f64::EPSILON);
    let f_lo = f(lo);
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if !(lo < hi) || !f_lo.is_finite() || !f_hi.is_finite() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut lo, mut hi, mut f_lo) = (lo, hi, f_lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cm(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn identity_times_identity() {
        assert_eq!(Mat2::IDENTITY * Mat2::IDENTITY, Mat2::IDENTITY);
    }

    #[test]
    fn swap_matrix_is_an_involution() {
        let x = Mat2::new(Complex::ZERO, Complex::ONE, Complex::ONE, Complex::ZERO);
        assert_eq!(x * x, Mat2::IDENTITY);
    }

    #[test]
    fn closed_form_inverse_of_plane_wave_matrix() {
        // m = [[1, 1], [ik, -ik]] at k = 1; its inverse is
        // (1/2ik) [[ik, 1], [ik, -1]] in closed form.
        let k = 1.0;
        let m = Mat2::new(Complex::ONE, Complex::ONE, cm(0.0, k), cm(0.0, -k));
        let closed = Mat2::new(cm(0.0, k), Complex::ONE, cm(0.0, k), -Complex::ONE)
            .scale(Complex::ONE / cm(0.0, 2.0 * k));
        let prod = mat_mul(closed, m);
        assert!((prod - Mat2::IDENTITY).max_abs() <= 1e-14);

        let inv = mat_inv(m).unwrap();
        assert!((inv - closed).max_abs() <= 1e-14);
        assert!((mat_mul(m, inv) - Mat2::IDENTITY).max_abs() <= 1e-13);
    }

    #[test]
    fn inverse_of_identity() {
        assert_eq!(mat_inv(Mat2::IDENTITY).unwrap(), Mat2::IDENTITY);
    }

    #[test]
    fn singular_matrix_rejected() {
        let x = Mat2::new(Complex::ONE, Complex::ONE, Complex::ONE, Complex::ONE);
        assert!(matches!(mat_inv(x), Err(Error::SingularMatrix { .. })));
        let zero = Mat2::default();
        assert!(matches!(mat_inv(zero), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn bracketed_root_finds_pi() {
        let r = bracketed_root(|x| x.sin(), 3.0, 3.3, 1e-13).unwrap();
        assert!((r - PI).abs() <= 1e-12);
        assert!((3.0..=3.3).contains(&r));
    }

    #[test]
    fn bracketed_root_finds_half_pi() {
        // k sin(2k) vanishes at pi/2 inside [1.4, 1.7]
        let r = bracketed_root(|k| k * (2.0 * k).sin(), 1.4, 1.7, 1e-13).unwrap();
        assert!((r - PI / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn bracketed_root_rejects_signless_interval() {
        let err = bracketed_root(|k| k * k + 1.0, 0.0, 1.0, 1e-13).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn bracketed_root_accepts_endpoint_root() {
        let r = bracketed_root(|x| x - 2.0, 2.0, 3.0, 1e-13).unwrap();
        assert_eq!(r, 2.0);
    }

    fn arb_complex() -> impl Strategy<Value = Complex> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex::new(re, im))
    }

    fn arb_mat() -> impl Strategy<Value = Mat2> {
        (arb_complex(), arb_complex(), arb_complex(), arb_complex())
            .prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in arb_mat(), b in arb_mat()) {
            let lhs = (a * b).det();
            let rhs = a.det() * b.det();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn double_inverse_is_identity_when_well_conditioned(m in arb_mat()) {
            let norm = m.max_abs();
            prop_assume!(m.det().abs() >= 1e-6 * norm * norm && norm > 1e-3);
            let back = mat_inv(mat_inv(m).unwrap()).unwrap();
            prop_assert!((back - m).max_abs() <= 1e-12 * norm.max(1.0));
        }

        #[test]
        fn bisection_result_stays_bracketed(shift in 0.01..0.99f64) {
            // root of cos between 0 and pi at pi/2; shift the bracket around it
            let lo = shift;
            let hi = shift + PI / 2.0;
            prop_assume!(lo < PI / 2.0 && hi > PI / 2.0);
            let r = bracketed_root(|x| x.cos(), lo, hi, 1e-13).unwrap();
            prop_assert!(r >= lo && r <= hi);
            prop_assert!((r - PI / 2.0).abs() <= 1e-12);
        }
    }
}
