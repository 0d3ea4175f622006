use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, linear_lstsq, LmOptions, Model};
use super::{poisson_weights, DecayTrace, FitReport, ModelKind};
use crate::error::{Error, Result};
use crate::io::data_digest;
use crate::physics::transform_limit;

/// Lifetime ratio below which two exponential components are not resolved.
pub const DEGENERACY_RATIO: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    #[default]
    Exp1,
    Exp2,
}

impl FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp1" => Ok(DecayModel::Exp1),
            "exp2" => Ok(DecayModel::Exp2),
            other => Err(Error::config("model", format!("unknown decay model '{other}'"))),
        }
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayModel::Exp1 => f.write_str("exp1"),
            DecayModel::Exp2 => f.write_str("exp2"),
        }
    }
}

/// `A exp(-(t - t0)/tau) + b`, parameters `[A, tau, b]`.
#[derive(Debug, Clone, Copy)]
pub struct SingleExp {
    pub t0: f64,
}

impl Model for SingleExp {
    fn n_params(&self) -> usize {
        3
    }

    fn eval(&self, t: f64, p: &[f64]) -> f64 {
        p[0] * (-(t - self.t0) / p[1]).exp() + p[2]
    }

    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let s = t - self.t0;
        let e = (-s / p[1]).exp();
        out[0] = e;
        out[1] = p[0] * e * s / (p[1] * p[1]);
        out[2] = 1.0;
    }

    fn is_valid(&self, p: &[f64]) -> bool {
        p[1] > 0.0
    }
}

/// `A1 exp(-(t - t0)/tau1) + A2 exp(-(t - t0)/tau2) + b`,
/// parameters `[A1, tau1, A2, tau2, b]`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleExp {
    pub t0: f64,
}

impl Model for DoubleExp {
    fn n_params(&self) -> usize {
        5
    }

    fn eval(&self, t: f64, p: &[f64]) -> f64 {
        let s = t - self.t0;
        p[0] * (-s / p[1]).exp() + p[2] * (-s / p[3]).exp() + p[4]
    }

    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let s = t - self.t0;
        let e1 = (-s / p[1]).exp();
        let e2 = (-s / p[3]).exp();
        out[0] = e1;
        out[1] = p[0] * e1 * s / (p[1] * p[1]);
        out[2] = e2;
        out[3] = p[2] * e2 * s / (p[3] * p[3]);
        out[4] = 1.0;
    }

    fn is_valid(&self, p: &[f64]) -> bool {
        p[1] > 0.0 && p[3] > 0.0
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecayFitOptions {
    pub model: DecayModel,
    /// Fit window start in ns; defaults to the bin with the most counts.
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
    pub lm: LmOptions,
}

impl DecayFitOptions {
    pub fn new(model: DecayModel) -> Self {
        DecayFitOptions {
            model,
            ..Default::default()
        }
    }
}

pub fn fit_decay(trace: &DecayTrace, model: DecayModel) -> Result<FitReport> {
    fit_decay_with(trace, &DecayFitOptions::new(model))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn fit_decay_with(trace: &DecayTrace, opts: &DecayFitOptions) -> Result<FitReport> {
    let all_t = trace.bin_centers();
    let all_y: Vec<f64> = trace.counts().iter().map(|&c| c as f64).collect();
    if trace.total_counts() == 0 {
        return Err(Error::NoDecay);
    }
    let start = match opts.window_start {
        Some(t) => all_t.iter().position(|&c| c >= t).ok_or_else(|| {
            Error::InvalidData(format!("window start {t} ns lies beyond the trace"))
        })?,
        None => all_y
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap_or(0),
    };
    let end = match opts.window_end {
        Some(t) => all_t.iter().rposition(|&c| c <= t).map_or(0, |i| i + 1),
        None => all_t.len(),
    };
    if end <= start {
        return Err(Error::InvalidData("empty fit window".into()));
    }
    let t = &all_t[start..end];
    let y = &all_y[start..end];
    let n_params = match opts.model {
        DecayModel::Exp1 => 3,
        DecayModel::Exp2 => 5,
    };
    let ymax = y.iter().copied().fold(f64::MIN, f64::max);
    let ymin = y.iter().copied().fold(f64::MAX, f64::min);
    if ymax <= ymin {
        return Err(Error::NoDecay);
    }
    if t.len() < n_params + 2 {
        return Err(Error::InsufficientData(format!(
            "{} bins in the fit window, need at least {}",
            t.len(),
            n_params + 2
        )));
    }

    let t0 = t[0];
    let w = poisson_weights(y);
    let shifted: Vec<f64> = t.iter().map(|v| v - t0).collect();
    let bw = trace.bin_width();
    let span = shifted[shifted.len() - 1].max(bw);
    let taus = log_grid(0.3 * bw, 5.0 * span, 60);
    let decay = |tau: f64| -> Vec<f64> { shifted.iter().map(|s| (-s / tau).exp()).collect() };
    let ones = vec![1.0; t.len()];

    let kind = match opts.model {
        DecayModel::Exp1 => ModelKind::Exp1,
        DecayModel::Exp2 => ModelKind::Exp2,
    };
    let mut report = FitReport::new(
        kind,
        data_digest(&[all_t, &all_y]),
    );
    report.derived.insert("t0_ns".into(), t0);

    match opts.model {
        DecayModel::Exp1 => {
            let mut best: Option<([f64; 3], f64)> = None;
            for &tau in &taus {
                if let Some((c, chi2)) = linear_lstsq(&[decay(tau), ones.clone()], y, &w) {
                    if best.as_ref().is_none_or(|b| chi2 < b.1) {
                        best = Some(([c[0], tau, c[1]], chi2));
                    }
                }
            }
            let (p0, _) = best.ok_or(Error::NoDecay)?;
            let model = SingleExp { t0 };
            let out = levenberg_marquardt(&model, t, y, &w, &p0, &opts.lm);
            report.absorb(
                &[("amplitude", "counts"), ("tau", "ns"), ("offset", "counts")],
                &out,
                t.len(),
                false,
            );
            report
                .derived
                .insert("gamma0_mhz".into(), transform_limit(out.params[1])?);
        }
        DecayModel::Exp2 => {
            let basis: Vec<Vec<f64>> = taus.iter().map(|&tau| decay(tau)).collect();
            let mut best: Option<([f64; 5], f64)> = None;
            for i in 0..taus.len() {
                for j in i + 1..taus.len() {
                    let cols = [basis[i].clone(), basis[j].clone(), ones.clone()];
                    if let Some((c, chi2)) = linear_lstsq(&cols, y, &w) {
                        if best.as_ref().is_none_or(|b| chi2 < b.1) {
                            best = Some(([c[0], taus[i], c[1], taus[j], c[2]], chi2));
                        }
                    }
                }
            }
            let (p0, _) = best.ok_or(Error::NoDecay)?;
            let model = DoubleExp { t0 };
            let out = levenberg_marquardt(&model, t, y, &w, &p0, &opts.lm);
            let names = if out.params[1] <= out.params[3] {
                [
                    ("amplitude_fast", "counts"),
                    ("tau_fast", "ns"),
                    ("amplitude_slow", "counts"),
                    ("tau_slow", "ns"),
                    ("offset", "counts"),
                ]
            } else {
                [
                    ("amplitude_slow", "counts"),
                    ("tau_slow", "ns"),
                    ("amplitude_fast", "counts"),
                    ("tau_fast", "ns"),
                    ("offset", "counts"),
                ]
            };
            report.absorb(&names, &out, t.len(), false);
            let tau_fast = report.params["tau_fast"];
            let tau_slow = report.params["tau_slow"];
            let area_fast = (report.params["amplitude_fast"] * tau_fast).abs();
            let area_slow = (report.params["amplitude_slow"] * tau_slow).abs();
            let minor = area_fast.min(area_slow) / (area_fast + area_slow).max(f64::MIN_POSITIVE);
            if tau_slow / tau_fast < DEGENERACY_RATIO || minor < 1e-3 {
                report.warnings.push(format!(
                    "components degenerate (tau_slow/tau_fast = {:.3}, minor weight {:.2e})",
                    tau_slow / tau_fast,
                    minor
                ));
            }
            report
                .derived
                .insert("gamma0_mhz".into(), transform_limit(tau_slow)?);
        }
    }
    report.derived.insert("window_end_ns".into(), t[t.len() - 1]);
    Ok(report)
}
