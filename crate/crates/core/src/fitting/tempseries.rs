use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions, Model};
use super::{FitReport, ModelKind};
use crate::error::{Error, Result};
use crate::io::data_digest;
use crate::physics::{cubic_broadening, occupation_unchecked, EmitterParams, VALIDITY_LIMIT_K};

/// One measured C-line width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempPoint {
    /// K
    pub temperature: f64,
    /// FWHM, MHz
    pub linewidth: f64,
    /// One-sigma error, MHz.
    #[serde(default)]
    pub sigma: Option<f64>,
}

impl TempPoint {
    pub fn new(temperature: f64, linewidth: f64) -> Self {
        TempPoint {
            temperature,
            linewidth,
            sigma: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParams {
    #[default]
    GammaOthers,
    GammaOthersAndAlpha,
}

impl FreeParams {
    fn count(self) -> usize {
        match self {
            FreeParams::GammaOthers => 1,
            FreeParams::GammaOthersAndAlpha => 2,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TempSeriesOptions {
    pub free: FreeParams,
    /// Drop points above the single-phonon validity limit before fitting.
    pub exclude_above_validity: bool,
    pub lm: LmOptions,
}

/// C-line width versus temperature with `gamma_others` (and optionally
/// `alpha_gs`) free; everything else is taken from the emitter.
#[derive(Debug, Clone)]
pub struct TempSeriesModel {
    pub base: EmitterParams,
    pub free: FreeParams,
}

impl Model for TempSeriesModel {
    fn n_params(&self) -> usize {
        self.free.count()
    }

    fn eval(&self, t: f64, p: &[f64]) -> f64 {
        let b = &self.base;
        let alpha_gs = if p.len() > 1 { p[1] } else { b.alpha_gs };
        b.gamma0
            + p[0]
            + cubic_broadening(b.f_gs, alpha_gs) * occupation_unchecked(b.f_gs, t)
            + cubic_broadening(b.f_es, b.alpha_es) * occupation_unchecked(b.f_es, t)
    }

    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        if p.len() > 1 {
            out[1] = cubic_broadening(self.base.f_gs, 1.0) * occupation_unchecked(self.base.f_gs, t);
        }
    }

    fn is_valid(&self, p: &[f64]) -> bool {
        p.len() < 2 || p[1] >= 0.0
    }
}

pub fn fit_temperature_series(
    points: &[TempPoint],
    params: &EmitterParams,
    opts: &TempSeriesOptions,
) -> Result<FitReport> {
    params.validate()?;
    for (i, p) in points.iter().enumerate() {
        if !(p.temperature >= 0.0) || !p.linewidth.is_finite() {
            return Err(Error::InvalidData(format!(
                "point {i}: temperature must be nonnegative and linewidth finite"
            )));
        }
        if let Some(s) = p.sigma {
            if !(s > 0.0) {
                return Err(Error::InvalidData(format!("point {i}: sigma must be positive")));
            }
        }
    }
    let used: Vec<TempPoint> = points
        .iter()
        .copied()
        .filter(|p| !opts.exclude_above_validity || p.temperature <= VALIDITY_LIMIT_K)
        .collect();
    let needed = opts.free.count().max(2);
    if used.len() < needed {
        return Err(Error::InsufficientData(format!(
            "{} usable points for {} free parameters (need at least {needed})",
            used.len(),
            opts.free.count()
        )));
    }
    let mut temps: Vec<f64> = used.iter().map(|p| p.temperature).collect();
    temps.sort_by(f64::total_cmp);
    if temps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidData("temperatures must be distinct".into()));
    }

    let t: Vec<f64> = used.iter().map(|p| p.temperature).collect();
    let y: Vec<f64> = used.iter().map(|p| p.linewidth).collect();
    let have_sigmas = used.iter().all(|p| p.sigma.is_some());
    let w: Vec<f64> = used
        .iter()
        .map(|p| if have_sigmas { p.sigma.unwrap().powi(-2) } else { 1.0 })
        .collect();

    let model = TempSeriesModel {
        base: params.clone(),
        free: opts.free,
    };
    let phonon_free: Vec<f64> = t.iter().map(|&ti| model.eval(ti, &[0.0]) - params.gamma0).collect();
    let go0 = y
        .iter()
        .zip(&phonon_free)
        .map(|(yi, ph)| yi - params.gamma0 - ph)
        .sum::<f64>()
        / y.len() as f64;
    let p0 = match opts.free {
        FreeParams::GammaOthers => vec![go0],
        FreeParams::GammaOthersAndAlpha => {
            let a = if params.alpha_gs > 0.0 { params.alpha_gs } else { crate::physics::REFERENCE_ALPHA };
            vec![go0, a]
        }
    };
    let outcome = levenberg_marquardt(&model, &t, &y, &w, &p0, &opts.lm);

    let all_t: Vec<f64> = points.iter().map(|p| p.temperature).collect();
    let all_y: Vec<f64> = points.iter().map(|p| p.linewidth).collect();
    let mut report = FitReport::new(ModelKind::TempSeries, data_digest(&[&all_t, &all_y]));
    let names: &[(&str, &str)] = match opts.free {
        FreeParams::GammaOthers => &[("gamma_others", "MHz")],
        FreeParams::GammaOthersAndAlpha => &[("gamma_others", "MHz"), ("alpha_gs", "GHz^-2")],
    };
    report.absorb(names, &outcome, t.len(), !have_sigmas);
    report.derived.insert("gamma0_mhz".into(), params.gamma0);
    report.derived.insert("n_points_used".into(), t.len() as f64);
    if opts.free == FreeParams::GammaOthers {
        report.derived.insert("alpha_gs".into(), params.alpha_gs);
    }
    if outcome.params[0] < 0.0 {
        report.warnings.push(format!(
            "negative residual broadening ({:.4} MHz)",
            outcome.params[0]
        ));
    }
    if !opts.exclude_above_validity && t.iter().any(|&ti| ti > VALIDITY_LIMIT_K) {
        report
            .warnings
            .push("points above 20 K are beyond single-phonon validity".into());
    }
    Ok(report)
}
