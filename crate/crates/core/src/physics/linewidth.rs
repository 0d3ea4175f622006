use std::fmt;

use serde::{Deserialize, Serialize};

use super::{cubic_broadening, phonon_rates, EmitterParams};
use crate::error::{Error, Result};

/// Above this temperature the single-phonon picture is no longer trusted.
pub const VALIDITY_LIMIT_K: f64 = 20.0;

const BRACKET_LOW_K: f64 = 0.1;
const BRACKET_HIGH_K: f64 = 400.0;
const BRACKET_MAX_K: f64 = 1.0e7;
const THRESHOLD_TOL_K: f64 = 1.0e-3;

/// Zero-phonon line from the lower excited branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    /// To the lower ground branch; broadened by phonon absorption.
    #[default]
    #[serde(alias = "C")]
    C,
    /// To the upper ground branch; broadened by phonon emission.
    #[serde(alias = "D")]
    D,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::C => f.write_str("C"),
            Transition::D => f.write_str("D"),
        }
    }
}

/// Contributions to one transition linewidth, all in MHz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinewidthBreakdown {
    pub transition: Transition,
    pub temperature: f64,
    pub gamma0: f64,
    pub gamma_others: f64,
    /// Ground-state phonon term: absorption for C, emission for D.
    pub gs_term: f64,
    /// Excited-state phonon absorption term.
    pub es_term: f64,
    pub total: f64,
}

impl LinewidthBreakdown {
    pub fn phonon_total(&self) -> f64 {
        self.gs_term + self.es_term
    }

    /// Total went negative because of a negative residual broadening.
    pub fn is_negative(&self) -> bool {
        self.total < 0.0
    }

    pub fn beyond_validity(&self) -> bool {
        self.temperature > VALIDITY_LIMIT_K
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.is_negative() {
            w.push(format!("negative total linewidth {:.6} MHz", self.total));
        }
        if self.beyond_validity() {
            w.push("beyond single-phonon validity (T > 20 K)".to_string());
        }
        w
    }
}

/// Linewidth of the chosen transition at temperature `t` (K).
pub fn linewidth(p: &EmitterParams, t: f64, transition: Transition) -> Result<LinewidthBreakdown> {
    p.validate()?;
    let gs = phonon_rates(p.f_gs, t, p.alpha_gs)?;
    let es = phonon_rates(p.f_es, t, p.alpha_es)?;
    let gs_term = match transition {
        Transition::C => gs.gamma_up,
        Transition::D => gs.gamma_down,
    };
    let es_term = es.gamma_up;
    Ok(LinewidthBreakdown {
        transition,
        temperature: t,
        gamma0: p.gamma0,
        gamma_others: p.gamma_others,
        gs_term,
        es_term,
        total: p.gamma0 + p.gamma_others + gs_term + es_term,
    })
}

pub fn linewidth_c(p: &EmitterParams, t: f64) -> Result<LinewidthBreakdown> {
    linewidth(p, t, Transition::C)
}

pub fn linewidth_d(p: &EmitterParams, t: f64) -> Result<LinewidthBreakdown> {
    linewidth(p, t, Transition::D)
}

/// `Gamma_D - Gamma_C` in MHz. Independent of temperature.
pub fn linewidth_difference(p: &EmitterParams) -> Result<f64> {
    p.validate()?;
    Ok(cubic_broadening(p.f_gs, p.alpha_gs))
}

/// Temperature at which the C line reaches `ratio` times the transform limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Crossing temperature in K.
    At(f64),
    /// Residual broadening alone already exceeds the target at 0 K.
    AlreadyExceeded,
    /// The criterion is never violated.
    Unbounded,
}

impl Threshold {
    pub fn kelvin(self) -> Option<f64> {
        match self {
            Threshold::At(t) => Some(t),
            Threshold::AlreadyExceeded => Some(0.0),
            Threshold::Unbounded => None,
        }
    }
}

/// Solves `linewidth_c(p, T) = ratio * gamma0` for `T` by bisection.
pub fn temperature_threshold(p: &EmitterParams, ratio: f64) -> Result<Threshold> {
    if !(ratio > 1.0) || !ratio.is_finite() {
        return Err(Error::domain(format!("ratio must exceed 1, got {ratio}")));
    }
    p.validate()?;
    let target = ratio * p.gamma0;
    let excess = |t: f64| -> Result<f64> { Ok(linewidth_c(p, t)?.total - target) };

    if excess(0.0)? >= 0.0 {
        return Ok(Threshold::AlreadyExceeded);
    }
    if p.alpha_gs == 0.0 && p.alpha_es == 0.0 {
        return Ok(Threshold::Unbounded);
    }

    let (mut lo, mut hi) = if excess(BRACKET_LOW_K)? >= 0.0 {
        (0.0, BRACKET_LOW_K)
    } else {
        (BRACKET_LOW_K, BRACKET_HIGH_K)
    };
    while excess(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_MAX_K {
            return Ok(Threshold::Unbounded);
        }
    }
    while hi - lo > THRESHOLD_TOL_K {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold::At(0.5 * (lo + hi)))
}
