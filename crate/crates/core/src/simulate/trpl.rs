use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{check_positive, check_probability, substream};
use crate::error::{Error, Result};
use crate::fitting::{DecayMeta, DecayTrace};

/// Short-lived background emission mixed into the trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FastComponent {
    /// Fraction of all photons belonging to the fast component.
    #[serde(alias = "a_fast")]
    pub fraction: f64,
    /// ns
    pub tau_fast: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrplConfig {
    /// ns
    pub lifetime: f64,
    pub counts_total: u64,
    #[serde(default)]
    pub background: Option<FastComponent>,
    /// ns
    pub bin_width: f64,
    /// ns
    pub t_max: f64,
    #[serde(default)]
    pub seed: u64,
}

impl TrplConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("lifetime", self.lifetime)?;
        check_positive("bin_width", self.bin_width)?;
        check_positive("t_max", self.t_max)?;
        if self.t_max < 2.0 * self.bin_width {
            return Err(Error::config("t_max", "must span at least two bins"));
        }
        if let Some(b) = self.background {
            check_probability("background.fraction", b.fraction)?;
            check_positive("background.tau_fast", b.tau_fast)?;
        }
        Ok(())
    }

    fn n_bins(&self) -> usize {
        (self.t_max / self.bin_width - 1e-9).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct TrplResult {
    pub trace: DecayTrace,
    /// Photons arriving after `t_max` and therefore not recorded.
    pub dropped: u64,
    pub warnings: Vec<String>,
}

/// Arrival-time histogram after pulsed excitation at t = 0.
pub fn simulate_trpl(cfg: &TrplConfig) -> Result<TrplResult> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if cfg.t_max < 10.0 * cfg.lifetime {
        warnings.push(format!(
            "t_max {} ns is shorter than 10 lifetimes; the tail is truncated",
            cfg.t_max
        ));
    }
    let n_bins = cfg.n_bins();
    let mut counts = vec![0u64; n_bins];
    let mut rng = substream(cfg.seed, 0);
    let slow = Exp::new(1.0 / cfg.lifetime).expect("validated lifetime");
    let fast = cfg
        .background
        .map(|b| (b.fraction, Exp::new(1.0 / b.tau_fast).expect("validated tau")));
    let mut dropped = 0;
    for _ in 0..cfg.counts_total {
        let t = match fast {
            Some((frac, ref d)) if rng.random::<f64>() < frac => d.sample(&mut rng),
            _ => slow.sample(&mut rng),
        };
        let k = (t / cfg.bin_width) as usize;
        if t < cfg.t_max && k < n_bins {
            counts[k] += 1;
        } else {
            dropped += 1;
        }
    }
    let mut trace = DecayTrace::from_uniform_bins(cfg.bin_width, counts)?;
    trace.meta = DecayMeta {
        bin_width_ns: Some(cfg.bin_width),
        excitation_wavelength_nm: None,
    };
    Ok(TrplResult {
        trace,
        dropped,
        warnings,
    })
}
