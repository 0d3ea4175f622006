//! Parameter estimation: Lorentzian PLE lines, lifetime traces, the cubic
//! coupling law and temperature series.
//!
//! Count data are fitted with Poisson weights `1 / max(count, 1)`.

mod alpha;
mod data;
mod decay;
pub mod lm;
mod lorentzian;
mod report;
mod tempseries;

pub use alpha::{fit_cubic_alpha, AlphaWeights, SplittingPoint};
pub use data::{DecayMeta, DecayTrace, Spectrum, SpectrumMeta};
pub use decay::{
    fit_decay, fit_decay_with, DecayFitOptions, DecayModel, DoubleExp, SingleExp,
    DEGENERACY_RATIO,
};
pub use lorentzian::{fit_lorentzian, fit_lorentzian_with, initial_guess, LorentzianModel};
pub use report::{FitReport, ModelKind};
pub use tempseries::{
    fit_temperature_series, FreeParams, TempPoint, TempSeriesModel, TempSeriesOptions,
};

/// Inverse Poisson variances, with the variance floored at one count.
pub fn poisson_weights(counts: &[f64]) -> Vec<f64> {
    counts.iter().map(|&c| 1.0 / c.max(1.0)).collect()
}
