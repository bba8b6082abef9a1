//! Domain records and validation for both parametrizations of the boundary
//! conditions, plus canonicalization of the wall-side parameters.
//!
//! Units: hbar = 1 throughout; only the products mass*a, mass*b and c*k
//! enter any downstream formula.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance around |mass*b| = 1 treated as singular coupling.
pub const SINGULAR_COUPLING_TOL: f64 = 1e-12;

/// Tolerance on |m| - 1 accepted by `canonicalize_extension` before
/// renormalizing.
pub const NORM_TOL: f64 = 1e-9;

/// Geometry and mass of the well: the box occupies [-c, c].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellConfig {
    /// Half-width (length units), strictly positive.
    pub c: f64,
    /// Particle mass, strictly positive.
    pub mass: f64,
}

impl WellConfig {
    pub fn new(c: f64, mass: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "half-width must be positive and finite, got {c}"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        Ok(WellConfig { c, mass })
    }
}

/// Point-interaction couplings: `a` multiplies the delta, `b` its derivative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingParams {
    pub a: f64,
    pub b: f64,
}

impl MatchingParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "couplings must be finite, got a = {a}, b = {b}"
            )));
        }
        Ok(MatchingParams { a, b })
    }
}

/// Ok exactly when the origin matching matrix exists: |mass*b| != 1 within
/// `SINGULAR_COUPLING_TOL` and all inputs are finite and positive where
/// required. This gate applies only to matching-matrix paths; the
/// quantization-condition spectrum stays defined at |mass*b| = 1.
pub fn validate_matching(p: &MatchingParams, cfg: &WellConfig) -> Result<()> {
    if !cfg.c.is_finite() || cfg.c <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "half-width must be positive and finite, got {}",
            cfg.c
        )));
    }
    if !cfg.mass.is_finite() || cfg.mass <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "mass must be positive and finite, got {}",
            cfg.mass
        )));
    }
    if !p.a.is_finite() || !p.b.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "couplings must be finite, got a = {}, b = {}",
            p.a, p.b
        )));
    }
    if ((cfg.mass * p.b).abs() - 1.0).abs() <= SINGULAR_COUPLING_TOL {
        return Err(Error::SingularCoupling);
    }
    Ok(())
}

/// Wall-side boundary-condition parameters: a phase `phi` in [0, pi] and a
/// unit 4-vector (m0, m1, m2, m3).
///
/// Use [`canonicalize_extension`] (or [`ExtensionParams::new`]) to construct
/// validated values; [`ExtensionParams::from_raw`] skips validation for
/// diagnostic parameter solutions that are allowed to drift off the unit
/// sphere away from quantization roots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub phi: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl ExtensionParams {
    pub fn new(phi: f64, m: [f64; 4]) -> Result<Self> {
        canonicalize_extension(phi, m)
    }

    pub const fn from_raw(phi: f64, m: [f64; 4]) -> Self {
        ExtensionParams {
            phi,
            m0: m[0],
            m1: m[1],
            m2: m[2],
            m3: m[3],
        }
    }

    pub fn m(&self) -> [f64; 4] {
        [self.m0, self.m1, self.m2, self.m3]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.m0 * self.m0 + self.m1 * self.m1 + self.m2 * self.m2 + self.m3 * self.m3
    }
}

/// Folds `phi` into [0, pi) using the exact symmetry
/// U(phi + pi, m) = U(phi, -m), and renormalizes m to unit length.
///
/// Rejects vectors whose norm deviates from 1 by more than `NORM_TOL`.
/// Idempotent: a canonical input passes through bit-for-bit.
pub fn canonicalize_extension(phi: f64, m: [f64; 4]) -> Result<ExtensionParams> {
    if !phi.is_finite() || m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig(
            "extension parameters must be finite".to_string(),
        ));
    }
    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::BadNorm { norm });
    }

    let mut phi = phi.rem_euclid(2.0 * PI);
    let mut m = m;
    if phi >= PI {
        phi -= PI;
        for x in &mut m {
            *x = -*x;
        }
    }
    // skip renormalization once within rounding of 1 so the map is idempotent
    if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
        for x in &mut m {
            *x /= norm;
        }
    }
    Ok(ExtensionParams::from_raw(phi, m))
}

/// One bound-state level: index, wavenumber, energy = k^2 / (2 mass).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub n: u32,
    pub k: f64,
    pub energy: f64,
}

/// Four-parameter family of origin matching conditions; the (x1, x2, 0, 0)
/// slice realizes the delta + delta' interaction with x1 = 2 mass a and
/// x2 = 2 mass b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralMatchingParams {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::build_u;

    #[test]
    fn validate_accepts_generic_couplings() {
        let cfg = WellConfig::new(1.0, 1.0).unwrap();
        let p = MatchingParams::new(1.0, 0.0).unwrap();
        assert!(validate_matching(&p, &cfg).is_ok());
    }

    #[test]
    fn validate_rejects_singular_coupling() {
        // mass*b = 1 exactly
        let cfg = WellConfig::new(2.5, 0.5).unwrap();
        let p = MatchingParams::new(4.0, 2.0).unwrap();
        assert_eq!(validate_matching(&p, &cfg), Err(Error::SingularCoupling));
        // and with the opposite sign
        let p = MatchingParams::new(4.0, -2.0).unwrap();
        assert_eq!(validate_matching(&p, &cfg), Err(Error::SingularCoupling));
    }

    #[test]
    fn validate_rejects_bad_geometry() {
        let bad = WellConfig { c: -1.0, mass: 0.5 };
        let p = MatchingParams::new(0.0, 0.0).unwrap();
        assert!(matches!(
            validate_matching(&p, &bad),
            Err(Error::InvalidConfig(_))
        ));
        assert!(WellConfig::new(-1.0, 0.5).is_err());
        assert!(WellConfig::new(1.0, 0.0).is_err());
    }

    #[test]
    fn canonicalize_folds_phase_by_half_turn() {
        let m = [0.5, 0.5, 0.5, 0.5];
        let folded = canonicalize_extension(1.5 * PI, m).unwrap();
        assert!((folded.phi - 0.5 * PI).abs() <= 1e-15);
        assert_eq!(folded.m(), [-0.5, -0.5, -0.5, -0.5]);

        // same boundary matrix before and after folding
        let raw = ExtensionParams::from_raw(1.5 * PI, m);
        let diff = (build_u(&raw) - build_u(&folded)).max_abs();
        assert!(diff <= 1e-14, "boundary matrices differ by {diff}");
    }

    #[test]
    fn canonicalize_is_identity_on_canonical_input() {
        let e = canonicalize_extension(PI / 2.0, [0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.phi, PI / 2.0);
        assert_eq!(e.m(), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let e = canonicalize_extension(4.2, [0.3, -0.4, 0.5, 0.7071067811865476]).unwrap();
        let e2 = canonicalize_extension(e.phi, e.m()).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn canonicalize_rejects_bad_norm() {
        let err = canonicalize_extension(0.0, [2.0, 0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::BadNorm { .. }));
    }
}
