//! Bound-state spectra.
//!
//! The main solver locates roots of the transcendental quantization function
//! Q(k) = k (1 + (mb)^2) sin(2ck) + ma cos(2ck) by cell-wise bracketing: the
//! endpoint values Q(n pi / 2c) = ma (-1)^n alternate in sign for a != 0, so
//! each cell ((n-1) pi / 2c, n pi / 2c) carries exactly one bracket and no
//! scanning is needed. A companion Dirichlet-wall model (hard zeros at the
//! walls plus the origin matching matrix) is assembled numerically and solved
//! by sign-scan + bisection; it shares no algebra with Q(k) on purpose, so
//! the two level lists can be compared as independent routes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boundary::origin_transfer;
use crate::error::{Error, Result};
use crate::model::{MatchingParams, SpectralLevel, WellConfig};
use crate::numerics::{bracketed_root, Complex, Mat2};

/// Relative bracket-width tolerance used by every level search.
pub const LEVEL_TOL: f64 = 1e-13;

/// The Dirichlet determinant is scanned with step pi / (SCAN_DIVISOR * c).
pub const SCAN_DIVISOR: f64 = 200.0;

/// Determinant magnitude (relative to the squared matrix scale) above which
/// a wavenumber is rejected as an eigenvalue.
pub const EIGEN_DET_TOL: f64 = 1e-6;

/// The quantization function with its captured configuration.
///
/// Q(0) = ma and Q(n pi / 2c) = ma (-1)^n exactly; defined for every
/// coupling, including |mb| = 1.
#[derive(Clone, Copy, Debug)]
pub struct QuantizationFn {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
    pub c: f64,
}

impl QuantizationFn {
    pub fn new(p: &MatchingParams, cfg: &WellConfig) -> Self {
        QuantizationFn {
            a: p.a,
            b: p.b,
            mass: cfg.mass,
            c: cfg.c,
        }
    }

    pub fn eval(&self, k: f64) -> f64 {
        let ma = self.mass * self.a;
        let mb = self.mass * self.b;
        let (s, c) = (2.0 * self.c * k).sin_cos();
        k * (1.0 + mb * mb) * s + ma * c
    }
}

/// Value of the quantization function at `k`.
pub fn q_eval(p: &MatchingParams, cfg: &WellConfig, k: f64) -> f64 {
    QuantizationFn::new(p, cfg).eval(k)
}

/// First `n_max` levels of the quantization condition, one per cell, with
/// energies k^2 / (2 mass).
///
/// For a = 0 the roots are the cell boundaries n pi / 2c and are returned
/// analytically (they are independent of b); for a != 0 each cell is
/// bisected to relative tolerance `LEVEL_TOL` using the guaranteed endpoint
/// sign alternation. Couplings with 0 < |ma| below roughly 1e-13 sit inside
/// rounding noise of the boundaries and degrade to boundary values.
pub fn find_levels(p: &MatchingParams, cfg: &WellConfig, n_max: u32) -> Vec<SpectralLevel> {
    let q = QuantizationFn::new(p, cfg);
    let ma = cfg.mass * p.a;
    let mut levels = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let hi = f64::from(n) * PI / (2.0 * cfg.c);
        let k = if ma == 0.0 {
            hi
        } else {
            let lo = f64::from(n - 1) * PI / (2.0 * cfg.c);
            match bracketed_root(|k| q.eval(k), lo, hi, LEVEL_TOL) {
                Ok(k) => k,
                // endpoint signs are lost to rounding only when |ma| is at
                // noise level; the root then sits within rounding of a boundary
                Err(_) => {
                    if q.eval(lo).abs() <= q.eval(hi).abs() {
                        lo
                    } else {
                        hi
                    }
                }
            }
        };
        levels.push(SpectralLevel {
            n,
            k,
            energy: k * k / (2.0 * cfg.mass),
        });
    }
    levels
}

fn plane_wave_rows(g: &Mat2, c: f64, k: f64) -> Mat2 {
    let ep = Complex::cis(k * c);
    let em = Complex::cis(-k * c);
    // row 1: psi(-c) = 0 in the left amplitudes (d, c)
    // row 2: psi(c) = 0 transported left through the origin transfer map
    Mat2::new(
        em,
        ep,
        ep * g.a11 + em * g.a21,
        ep * g.a12 + em * g.a22,
    )
}

fn dirichlet_det_given_t(t: Mat2, c: f64, k: f64) -> f64 {
    let g = origin_transfer_unchecked(t, k);
    let s = plane_wave_rows(&g, c, k);
    // det = -2i * real for real couplings; i/2 strips the constant phase and
    // the imaginary remainder is pure rounding
    (s.det() * Complex::new(0.0, 0.5)).re
}

fn origin_transfer_unchecked(t: Mat2, k: f64) -> Mat2 {
    crate::boundary::origin_transfer_given_t(t, k).expect("positive wavenumber")
}

/// Real-valued Dirichlet-wall determinant at `k`, after phase normalization.
///
/// Zeros of this function are the eigenvalues of the companion model with
/// hard walls psi(+-c) = 0 and the origin matching matrix.
pub fn dirichlet_determinant(p: &MatchingParams, cfg: &WellConfig, k: f64) -> Result<f64> {
    let g = origin_transfer(p, cfg.mass, k)?;
    let s = plane_wave_rows(&g, cfg.c, k);
    Ok((s.det() * Complex::new(0.0, 0.5)).re)
}

/// First `n_max` eigenvalues of the Dirichlet-wall model, by dense sign scan
/// (step pi / 200c) of the numerically assembled determinant followed by
/// bisection. Levels are indexed in increasing k; they need not respect the
/// quantization-condition cells.
pub fn dirichlet_levels(
    p: &MatchingParams,
    cfg: &WellConfig,
    n_max: u32,
) -> Result<Vec<SpectralLevel>> {
    let (t, _) = crate::boundary::build_t(p, cfg.mass)?;
    let c = cfg.c;
    let f = |k: f64| dirichlet_det_given_t(t, c, k);
    let h = PI / (SCAN_DIVISOR * c);
    let mut roots: Vec<f64> = Vec::with_capacity(n_max as usize);

    // the sin(ck) factor guarantees at least one sign change per pi/c window,
    // so this ceiling is never reached for finite couplings
    let max_steps = (SCAN_DIVISOR as u64) * (2 * u64::from(n_max) + 16);
    let mut k_prev = h;
    let mut f_prev = f(k_prev);
    if f_prev == 0.0 {
        roots.push(k_prev);
    }
    let mut j: u64 = 2;
    while (roots.len() as u32) < n_max && j <= max_steps {
        let k_next = j as f64 * h;
        let f_next = f(k_next);
        if f_next == 0.0 {
            roots.push(k_next);
        } else if f_prev != 0.0 && f_prev.signum() != f_next.signum() {
            roots.push(bracketed_root(f, k_prev, k_next, LEVEL_TOL)?);
        }
        k_prev = k_next;
        f_prev = f_next;
        j += 1;
    }
    debug_assert_eq!(roots.len() as u32, n_max);

    Ok(roots
        .into_iter()
        .take(n_max as usize)
        .enumerate()
        .map(|(i, k)| SpectralLevel {
            n: i as u32 + 1,
            k,
            energy: k * k / (2.0 * cfg.mass),
        })
        .collect())
}

/// Plane-wave amplitudes of a Dirichlet-model eigenfunction:
/// psi_left = d e^{ikx} + c e^{-ikx} on [-c, 0),
/// psi_right = a e^{ikx} + b e^{-ikx} on (0, c].
#[derive(Clone, Copy, Debug)]
pub struct Coefficients {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Coefficients {
    pub fn psi_left(&self, k: f64, x: f64) -> Complex {
        self.d * Complex::cis(k * x) + self.c * Complex::cis(-k * x)
    }

    pub fn psi_right(&self, k: f64, x: f64) -> Complex {
        self.a * Complex::cis(k * x) + self.b * Complex::cis(-k * x)
    }

    pub fn psi_left_deriv(&self, k: f64, x: f64) -> Complex {
        (self.d * Complex::cis(k * x) - self.c * Complex::cis(-k * x)) * Complex::new(0.0, k)
    }

    pub fn psi_right_deriv(&self, k: f64, x: f64) -> Complex {
        (self.a * Complex::cis(k * x) - self.b * Complex::cis(-k * x)) * Complex::new(0.0, k)
    }

    /// Closed-form L2 norm squared of the piecewise plane waves over [-c, c].
    pub fn norm_sqr(&self, k: f64, c: f64) -> f64 {
        let two_ik = Complex::new(0.0, 2.0 * k);
        let int_left = (Complex::ONE - Complex::cis(-2.0 * k * c)) / two_ik;
        let int_right = (Complex::cis(2.0 * k * c) - Complex::ONE) / two_ik;
        let left = (self.d.norm_sqr() + self.c.norm_sqr()) * c
            + 2.0 * (self.d * self.c.conj() * int_left).re;
        let right = (self.a.norm_sqr() + self.b.norm_sqr()) * c
            + 2.0 * (self.a * self.b.conj() * int_right).re;
        left + right
    }
}

/// Null-space eigenfunction of the Dirichlet-wall model at `k`, normalized
/// to unit L2 norm via the closed-form piecewise integral.
///
/// `k` must solve the Dirichlet determinant within its tolerance, otherwise
/// `NotAnEigenvalue` is returned.
pub fn eigenfunction(p: &MatchingParams, cfg: &WellConfig, k: f64) -> Result<Coefficients> {
    let g = origin_transfer(p, cfg.mass, k)?;
    let s = plane_wave_rows(&g, cfg.c, k);
    let det = (s.det() * Complex::new(0.0, 0.5)).re;
    let scale = s.max_abs();
    let tol = EIGEN_DET_TOL * (scale * scale).max(1.0);
    if det.abs() > tol {
        return Err(Error::NotAnEigenvalue { k, det, tol });
    }

    // null vector orthogonal (bilinearly) to the better-scaled row
    let use_second = s.a21.norm_sqr() + s.a22.norm_sqr() > s.a11.norm_sqr() + s.a12.norm_sqr();
    let (dv, cv) = if use_second {
        (s.a22, -s.a21)
    } else {
        (s.a12, -s.a11)
    };
    let av = g.a11 * dv + g.a12 * cv;
    let bv = g.a21 * dv + g.a22 * cv;
    let raw = Coefficients {
        a: av,
        b: bv,
        c: cv,
        d: dv,
    };
    let inv_norm = 1.0 / raw.norm_sqr(k, cfg.c).sqrt();
    Ok(Coefficients {
        a: raw.a * inv_norm,
        b: raw.b * inv_norm,
        c: raw.c * inv_norm,
        d: raw.d * inv_norm,
    })
}

/// One row of the two-model comparison table. `diff` is
/// k_quantization - k_dirichlet; it is reported, never asserted to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: u32,
    pub k_quantization: f64,
    pub k_dirichlet: f64,
    pub diff: f64,
}

/// Level-by-level comparison of the quantization condition against the
/// Dirichlet-wall model.
pub fn compare_models(
    p: &MatchingParams,
    cfg: &WellConfig,
    n_max: u32,
) -> Result<Vec<CompareRow>> {
    let quant = find_levels(p, cfg, n_max);
    let diri = dirichlet_levels(p, cfg, n_max)?;
    Ok(quant
        .iter()
        .zip(diri.iter())
        .map(|(q, d)| CompareRow {
            n: q.n,
            k_quantization: q.k,
            k_dirichlet: d.k,
            diff: q.k - d.k,
        })
        .collect())
}
