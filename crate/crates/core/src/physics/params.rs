use serde::{Deserialize, Serialize};

use super::{lifetime_from_linewidth, transform_limit};
use crate::error::{Error, Result};

/// Reduced ground-state coupling shared by all group-IV presets, GHz^-2.
pub const REFERENCE_ALPHA: f64 = 7.51e-9;
/// Reduced excited-state coupling of SiV, GHz^-2.
pub const SIV_ALPHA_ES: f64 = 1.75e-8;

/// Relative tolerance between `gamma0` and the transform limit of `lifetime`.
const CONSISTENCY_TOL: f64 = 0.01;

/// Physical constants of one color center.
///
/// Splittings in GHz, lifetime in ns, linewidths in MHz, couplings in GHz^-2
/// (reduced form, see the module docs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    pub name: String,
    /// Ground-state splitting.
    pub f_gs: f64,
    /// Excited-state splitting.
    pub f_es: f64,
    /// Radiative lifetime of the excited state.
    pub lifetime: f64,
    /// Transform-limited FWHM.
    pub gamma0: f64,
    pub alpha_gs: f64,
    pub alpha_es: f64,
    /// Residual broadening; may be negative.
    pub gamma_others: f64,
    /// Zero-phonon-line emission fraction. Metadata only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dw_fraction: Option<f64>,
}

impl EmitterParams {
    /// Builds parameters from a transform limit, deriving the lifetime.
    pub fn from_gamma0(
        name: impl Into<String>,
        f_gs: f64,
        f_es: f64,
        gamma0: f64,
        alpha_gs: f64,
        alpha_es: f64,
        gamma_others: f64,
    ) -> Result<Self> {
        let lifetime = lifetime_from_linewidth(gamma0)
            .map_err(|_| Error::InvalidParams(format!("gamma0 must be positive, got {gamma0}")))?;
        let p = EmitterParams {
            name: name.into(),
            f_gs,
            f_es,
            lifetime,
            gamma0,
            alpha_gs,
            alpha_es,
            gamma_others,
            dw_fraction: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(format!("{}: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::InvalidParams("name must not be empty".into()));
        }
        for (field, v) in [("f_gs", self.f_gs), ("f_es", self.f_es)] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{field} must be positive, got {v}"));
            }
        }
        for (field, v) in [("alpha_gs", self.alpha_gs), ("alpha_es", self.alpha_es)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{field} must be nonnegative, got {v}"));
            }
        }
        if !(self.lifetime > 0.0) || !self.lifetime.is_finite() {
            return bad(format!("lifetime must be positive, got {}", self.lifetime));
        }
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return bad(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if !self.gamma_others.is_finite() {
            return bad("gamma_others must be finite".into());
        }
        if let Some(dw) = self.dw_fraction {
            if !(0.0..=1.0).contains(&dw) {
                return bad(format!("dw_fraction must lie in [0, 1], got {dw}"));
            }
        }
        let expected = transform_limit(self.lifetime)?;
        if ((self.gamma0 - expected) / expected).abs() > CONSISTENCY_TOL {
            return bad(format!(
                "gamma0 {} MHz inconsistent with lifetime {} ns (transform limit {:.4} MHz)",
                self.gamma0, self.lifetime, expected
            ));
        }
        Ok(())
    }

    pub fn siv() -> Self {
        EmitterParams {
            name: "SiV".into(),
            f_gs: 50.0,
            f_es: 260.0,
            lifetime: lifetime_from_linewidth(92.5).unwrap(),
            gamma0: 92.5,
            alpha_gs: REFERENCE_ALPHA,
            alpha_es: SIV_ALPHA_ES,
            gamma_others: 0.0,
            dw_fraction: None,
        }
    }

    pub fn gev() -> Self {
        EmitterParams {
            name: "GeV".into(),
            f_gs: 200.0,
            f_es: 1120.0,
            lifetime: 5.5,
            gamma0: 28.9,
            alpha_gs: REFERENCE_ALPHA,
            alpha_es: REFERENCE_ALPHA,
            gamma_others: 0.0,
            dw_fraction: None,
        }
    }

    pub fn snv() -> Self {
        EmitterParams {
            name: "SnV".into(),
            f_gs: 821.0,
            f_es: 3000.0,
            lifetime: lifetime_from_linewidth(30.6).unwrap(),
            gamma0: 30.6,
            alpha_gs: REFERENCE_ALPHA,
            alpha_es: REFERENCE_ALPHA,
            gamma_others: -1.8,
            dw_fraction: None,
        }
    }

    pub fn pbv() -> Self {
        EmitterParams {
            name: "PbV".into(),
            f_gs: 3870.0,
            f_es: 6920.0,
            lifetime: 4.4,
            gamma0: 36.2,
            alpha_gs: REFERENCE_ALPHA,
            alpha_es: REFERENCE_ALPHA,
            gamma_others: 2.7,
            dw_fraction: Some(0.30),
        }
    }

    /// The four built-in presets, lightest element first.
    pub fn presets() -> [EmitterParams; 4] {
        [Self::siv(), Self::gev(), Self::snv(), Self::pbv()]
    }
}
