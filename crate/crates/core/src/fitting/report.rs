use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lm::LmOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lorentzian,
    Exp1,
    Exp2,
    CubicAlpha,
    TempSeries,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Lorentzian => "lorentzian",
            ModelKind::Exp1 => "exp1",
            ModelKind::Exp2 => "exp2",
            ModelKind::CubicAlpha => "cubic_alpha",
            ModelKind::TempSeries => "temp_series",
        };
        f.write_str(s)
    }
}

/// Outcome of one fit, in the shape written to report files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: ModelKind,
    pub params: BTreeMap<String, f64>,
    pub std_errors: BTreeMap<String, f64>,
    pub units: BTreeMap<String, String>,
    /// Quantities computed from the fitted parameters (transform limits,
    /// predictions, fixed fit settings).
    #[serde(default)]
    pub derived: BTreeMap<String, f64>,
    pub reduced_chi2: f64,
    pub n_iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
    pub toolkit_version: String,
    /// SHA-256 of the canonical data block the fit consumed.
    pub input_digest: String,
}

impl FitReport {
    pub(crate) fn new(model: ModelKind, input_digest: String) -> Self {
        FitReport {
            model,
            params: BTreeMap::new(),
            std_errors: BTreeMap::new(),
            units: BTreeMap::new(),
            derived: BTreeMap::new(),
            reduced_chi2: 0.0,
            n_iterations: 0,
            converged: false,
            warnings: Vec::new(),
            toolkit_version: crate::TOOLKIT_VERSION.to_string(),
            input_digest,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.std_errors.get(name).copied()
    }

    /// Fills parameters, uncertainties and statistics from a solver run.
    ///
    /// `names` pairs each solver slot with its name and unit.
    /// With `scale_by_chi2`, the covariance is multiplied by the reduced chi2.
    pub(crate) fn absorb(
        &mut self,
        names: &[(&str, &str)],
        outcome: &LmOutcome,
        n_points: usize,
        scale_by_chi2: bool,
    ) {
        let dof = n_points.saturating_sub(names.len());
        self.reduced_chi2 = if dof > 0 { outcome.chi2 / dof as f64 } else { 0.0 };
        self.n_iterations = outcome.iterations;
        self.converged = outcome.converged;
        for (&(name, unit), &v) in names.iter().zip(&outcome.params) {
            self.params.insert(name.to_string(), v);
            self.units.insert(name.to_string(), unit.to_string());
        }
        if !outcome.converged {
            self.warnings.push(format!(
                "did not converge after {} iterations",
                outcome.iterations
            ));
        }
        if let Some(cov) = &outcome.covariance {
            if scale_by_chi2 && dof == 0 {
                return;
            }
            let scale = if scale_by_chi2 { self.reduced_chi2 } else { 1.0 };
            for (j, &(name, _)) in names.iter().enumerate() {
                let var = cov[(j, j)] * scale;
                if var.is_finite() && var >= 0.0 {
                    self.std_errors.insert(name.to_string(), var.sqrt());
                }
            }
        }
    }
}
