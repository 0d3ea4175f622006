use serde::{Deserialize, Serialize};

use super::{FitReport, ModelKind};
use crate::error::{Error, Result};
use crate::io::data_digest;
use crate::physics::{cubic_broadening, EmitterParams};

/// Measured C/D linewidth difference for one emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingPoint {
    /// Ground-state splitting, GHz.
    pub f_gs: f64,
    /// `Gamma_D - Gamma_C`, MHz.
    pub delta_gamma: f64,
}

/// Weighting of the through-origin regression.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum AlphaWeights {
    /// `w = 1 / delta_gamma^2`, i.e. equal relative errors.
    #[default]
    Relative,
    Uniform,
    /// Absolute one-sigma errors on each difference, MHz.
    Sigmas(Vec<f64>),
}

/// Weighted least squares of `delta_gamma = alpha * f^3` through the origin.
///
/// The reported `alpha` is in GHz^-2 (reduced form).
pub fn fit_cubic_alpha(points: &[SplittingPoint], weights: &AlphaWeights) -> Result<FitReport> {
    if points.is_empty() {
        return Err(Error::InsufficientData("no splitting points".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if !(p.f_gs > 0.0) || !(p.delta_gamma > 0.0) {
            return Err(Error::InvalidData(format!(
                "point {i}: splitting and difference must be positive"
            )));
        }
    }
    // regressor in GHz^3, response and weights in GHz
    let w: Vec<f64> = match weights {
        AlphaWeights::Relative => points
            .iter()
            .map(|p| (p.delta_gamma * 1e-3).powi(-2))
            .collect(),
        AlphaWeights::Uniform => vec![1.0; points.len()],
        AlphaWeights::Sigmas(s) => {
            if s.len() != points.len() || s.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::InvalidData(
                    "need one positive sigma per point".into(),
                ));
            }
            s.iter().map(|v| (v * 1e-3).powi(-2)).collect()
        }
    };

    let x: Vec<f64> = points.iter().map(|p| p.f_gs.powi(3)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.delta_gamma * 1e-3).collect();
    let sxx: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
    let sxy: f64 = x.iter().zip(&y).zip(&w).map(|((x, y), w)| w * x * y).sum();
    let alpha = sxy / sxx;
    let chi2: f64 = x
        .iter()
        .zip(&y)
        .zip(&w)
        .map(|((x, y), w)| w * (y - alpha * x).powi(2))
        .sum();
    let dof = points.len() - 1;

    let f: Vec<f64> = points.iter().map(|p| p.f_gs).collect();
    let d: Vec<f64> = points.iter().map(|p| p.delta_gamma).collect();
    let mut report = FitReport::new(ModelKind::CubicAlpha, data_digest(&[&f, &d]));
    report.params.insert("alpha".into(), alpha);
    report.units.insert("alpha".into(), "GHz^-2".into());
    report.converged = true;
    report.n_iterations = 1;
    report.reduced_chi2 = if dof > 0 { chi2 / dof as f64 } else { 0.0 };
    // absolute sigmas fix the scale; otherwise the scatter sets it
    match weights {
        AlphaWeights::Sigmas(_) => {
            report.std_errors.insert("alpha".into(), sxx.sqrt().recip());
        }
        _ if dof > 0 => {
            report
                .std_errors
                .insert("alpha".into(), (report.reduced_chi2 / sxx).sqrt());
        }
        _ => {}
    }
    for p in [EmitterParams::siv(), EmitterParams::snv()] {
        report.derived.insert(
            format!("predicted_delta_{}_mhz", p.name.to_lowercase()),
            cubic_broadening(p.f_gs, alpha),
        );
    }
    Ok(report)
}
