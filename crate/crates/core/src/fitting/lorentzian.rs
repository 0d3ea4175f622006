use super::lm::{levenberg_marquardt, LmOptions, Model};
use super::{poisson_weights, FitReport, ModelKind, Spectrum};
use crate::error::{Error, Result};
use crate::io::data_digest;

pub const MIN_POINTS: usize = 8;

/// `offset + amplitude * (w/2)^2 / ((x - center)^2 + (w/2)^2)`,
/// parameters ordered `[center, fwhm, amplitude, offset]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LorentzianModel;

impl Model for LorentzianModel {
    fn n_params(&self) -> usize {
        4
    }

    fn eval(&self, x: f64, p: &[f64]) -> f64 {
        let d = x - p[0];
        let h = 0.25 * p[1] * p[1];
        p[3] + p[2] * h / (d * d + h)
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let d = x - p[0];
        let h = 0.25 * p[1] * p[1];
        let den = d * d + h;
        let den2 = den * den;
        out[0] = p[2] * h * 2.0 * d / den2;
        out[1] = p[2] * 0.5 * p[1] * d * d / den2;
        out[2] = h / den;
        out[3] = 1.0;
    }

    fn is_valid(&self, p: &[f64]) -> bool {
        p[1] > 0.0
    }
}

const NAMES: [(&str, &str); 4] = [
    ("center", "MHz"),
    ("fwhm", "MHz"),
    ("amplitude", "counts"),
    ("offset", "counts"),
];

/// Starting point from the raw trace: median offset, argmax center, and the
/// interpolated width at half maximum.
pub fn initial_guess(s: &Spectrum) -> Result<[f64; 4]> {
    let x = s.detunings();
    let y = s.counts();
    let (imax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::NoPeak)?;
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    if ymax <= ymin {
        return Err(Error::NoPeak);
    }
    let mut offset = median(y);
    if ymax - offset <= 0.0 {
        offset = ymin;
    }
    let amplitude = ymax - offset;
    let half = offset + 0.5 * amplitude;

    let crossing = |i: usize, j: usize| -> f64 {
        // y[i] >= half > y[j]
        let t = (y[i] - half) / (y[i] - y[j]);
        x[i] + t * (x[j] - x[i])
    };
    let left = (0..imax).rev().find(|&j| y[j] < half).map(|j| crossing(j + 1, j));
    let right = (imax + 1..y.len()).find(|&j| y[j] < half).map(|j| crossing(j - 1, j));
    let span = x[x.len() - 1] - x[0];
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (x[imax] - l),
        (None, Some(r)) => 2.0 * (r - x[imax]),
        (None, None) => 0.25 * span,
    };
    let step = span / (x.len() - 1) as f64;
    Ok([x[imax], fwhm.max(0.5 * step), amplitude, offset])
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Poisson-weighted Lorentzian fit of a PLE scan.
pub fn fit_lorentzian(s: &Spectrum) -> Result<FitReport> {
    fit_lorentzian_with(s, &LmOptions::default())
}

pub fn fit_lorentzian_with(s: &Spectrum, opts: &LmOptions) -> Result<FitReport> {
    if s.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "Lorentzian fit needs at least {MIN_POINTS} points, got {}",
            s.len()
        )));
    }
    let p0 = initial_guess(s)?;
    let mut report = FitReport::new(
        ModelKind::Lorentzian,
        data_digest(&[s.detunings(), s.counts()]),
    );
    let med = median(s.counts());
    let ymax = s.counts().iter().copied().fold(0.0, f64::max);
    if ymax <= 1.2 * med {
        report
            .warnings
            .push("weak peak: maximum is within 20% of the median".into());
    }

    let w = poisson_weights(s.counts());
    let outcome = levenberg_marquardt(&LorentzianModel, s.detunings(), s.counts(), &w, &p0, opts);
    report.absorb(&NAMES, &outcome, s.len(), false);
    let center = outcome.params[0];
    if center < s.detunings()[0] || center > s.detunings()[s.len() - 1] {
        report.warnings.push("fitted center lies outside the scan range".into());
    }
    Ok(report)
}
