use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{check_positive, check_probability, substream};
use crate::error::{Error, Result};

/// Coincidence histogram over delays symmetric about zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationHistogram {
    /// Bin centers, ns.
    pub tau_bins: Vec<f64>,
    pub g2: Vec<f64>,
    pub coincidence_counts: Vec<u64>,
    /// Expected uncorrelated coincidences per bin.
    pub normalization: f64,
}

impl CorrelationHistogram {
    fn from_counts(tau_bins: Vec<f64>, counts: Vec<u64>, normalization: f64) -> Self {
        let g2 = counts
            .iter()
            .map(|&c| if normalization > 0.0 { c as f64 / normalization } else { 0.0 })
            .collect();
        CorrelationHistogram {
            tau_bins,
            g2,
            coincidence_counts: counts,
            normalization,
        }
    }

    /// Index of the bin centered on zero delay.
    pub fn zero_index(&self) -> usize {
        self.tau_bins.len() / 2
    }

    pub fn g2_zero(&self) -> f64 {
        self.g2[self.zero_index()]
    }

    /// Poisson standard error of each g2 value.
    pub fn g2_sigma(&self) -> Vec<f64> {
        self.coincidence_counts
            .iter()
            .map(|&c| (c.max(1) as f64).sqrt() / self.normalization)
            .collect()
    }
}

fn bins(bin_width: f64, tau_max: f64) -> Result<(usize, Vec<f64>)> {
    check_positive("bin_width", bin_width)?;
    check_positive("tau_max", tau_max)?;
    let half = (tau_max / bin_width + 1e-9).floor() as usize;
    if half == 0 {
        return Err(Error::config("tau_max", "must be at least one bin width"));
    }
    let centers = (0..=2 * half)
        .map(|k| (k as f64 - half as f64) * bin_width)
        .collect();
    Ok((half, centers))
}

fn check_sorted(name: &str, times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidData(format!("{name}: times must be finite and nonnegative")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidData(format!("{name}: arrival times are not sorted")));
    }
    Ok(())
}

// Adds every delay b[j] - a[i] within the histogram range.
fn accumulate(a: &[f64], b: &[f64], bin_width: f64, half: usize, skip_same: bool, counts: &mut [u64]) {
    let reach = (half as f64 + 0.5) * bin_width;
    let mut lo = 0;
    for (i, &t) in a.iter().enumerate() {
        while lo < b.len() && b[lo] < t - reach {
            lo += 1;
        }
        let mut j = lo;
        while j < b.len() && b[j] < t + reach {
            if !(skip_same && i == j) {
                let k = ((b[j] - t) / bin_width + half as f64 + 0.5).floor();
                if k >= 0.0 && (k as usize) < counts.len() {
                    counts[k as usize] += 1;
                }
            }
            j += 1;
        }
    }
}

/// Autocorrelation of a single sorted stream of arrival times (ns).
///
/// Every ordered pair of distinct photons contributes, so the histogram is
/// exactly symmetric. The duration is the span of the stream.
pub fn correlate_stream(times: &[f64], bin_width: f64, tau_max: f64) -> Result<CorrelationHistogram> {
    check_sorted("times", times)?;
    let (half, centers) = bins(bin_width, tau_max)?;
    if times.len() < 2 {
        return Err(Error::InsufficientData("need at least two arrival times".into()));
    }
    let duration = times[times.len() - 1] - times[0];
    if !(duration > 0.0) {
        return Err(Error::InsufficientData("arrival times span zero duration".into()));
    }
    let mut counts = vec![0u64; centers.len()];
    accumulate(times, times, bin_width, half, true, &mut counts);
    let rate = times.len() as f64 / duration;
    Ok(CorrelationHistogram::from_counts(centers, counts, rate * rate * duration * bin_width))
}

/// Start-stop-free cross-correlation of two detector channels; a positive
/// delay means the `b` photon arrived later. Times and `duration` in ns.
pub fn cross_correlate(
    a: &[f64],
    b: &[f64],
    bin_width: f64,
    tau_max: f64,
    duration: f64,
) -> Result<CorrelationHistogram> {
    check_sorted("a", a)?;
    check_sorted("b", b)?;
    check_positive("duration", duration)?;
    let (half, centers) = bins(bin_width, tau_max)?;
    let mut counts = vec![0u64; centers.len()];
    accumulate(a, b, bin_width, half, false, &mut counts);
    let norm = a.len() as f64 * b.len() as f64 / duration * bin_width;
    Ok(CorrelationHistogram::from_counts(centers, counts, norm))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HbtConfig {
    /// Total detected rate, emitter plus background, counts/s.
    #[serde(alias = "signal_rate")]
    pub count_rate: f64,
    /// Excited-state lifetime, ns.
    pub lifetime: f64,
    /// Emitter share of the detected photons.
    #[serde(alias = "purity_rho")]
    pub purity: f64,
    /// s
    pub duration: f64,
    /// ns
    pub bin_width: f64,
    /// ns
    pub tau_max: f64,
    #[serde(default)]
    pub seed: u64,
}

impl HbtConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("count_rate", self.count_rate)?;
        check_positive("lifetime", self.lifetime)?;
        check_probability("purity", self.purity)?;
        check_positive("duration", self.duration)?;
        bins(self.bin_width, self.tau_max)?;
        if self.emitter_rate() * self.lifetime * 1e-9 >= 1.0 {
            return Err(Error::config(
                "count_rate",
                "emitter rate must stay below one photon per lifetime",
            ));
        }
        Ok(())
    }

    /// counts/s
    pub fn emitter_rate(&self) -> f64 {
        self.purity * self.count_rate
    }

    /// counts/s
    pub fn background_rate(&self) -> f64 {
        (1.0 - self.purity) * self.count_rate
    }

    /// Antibunching time of the emitter, ns. Equals the lifetime in the
    /// low-rate limit.
    pub fn tau_c(&self) -> f64 {
        let s = self.emitter_rate() * 1e-9;
        if s == 0.0 {
            return self.lifetime;
        }
        let pump = 1.0 / (1.0 / s - self.lifetime);
        1.0 / (pump + 1.0 / self.lifetime)
    }

    /// Expected g2 at delay `tau` (ns).
    pub fn expected_g2(&self, tau: f64) -> f64 {
        mixed_g2(tau, self.purity, self.tau_c())
    }

    /// Expected g2 averaged over the bin centered at `tau`.
    pub fn expected_g2_bin(&self, tau: f64) -> f64 {
        let (w, tc, r2) = (self.bin_width, self.tau_c(), self.purity * self.purity);
        let (a, b) = (tau - w / 2.0, tau + w / 2.0);
        // integral of exp(-|t|/tc) over [a, b]
        let prim = |t: f64| t.signum() * tc * (1.0 - (-t.abs() / tc).exp());
        1.0 - r2 * (prim(b) - prim(a)) / w
    }
}

/// g2 of an antibunched emitter mixed with Poisson light, `rho` being the
/// emitter share of the intensity.
pub fn mixed_g2(tau: f64, rho: f64, tau_c: f64) -> f64 {
    1.0 - rho * rho * (-tau.abs() / tau_c).exp()
}

#[derive(Debug, Clone)]
pub struct HbtResult {
    pub histogram: CorrelationHistogram,
    /// ns
    pub tau_c: f64,
    pub detector_counts: [usize; 2],
}

/// Emitter photons form a renewal process whose waiting time is the sum of
/// an excitation delay and a radiative delay; background photons are
/// Poisson. The merged stream is split 50:50 onto two detectors.
pub fn simulate_hbt(cfg: &HbtConfig) -> Result<HbtResult> {
    cfg.validate()?;
    let t_end = cfg.duration * 1e9;
    let mut rng = substream(cfg.seed, 0);

    let mut photons = Vec::new();
    let s = cfg.emitter_rate() * 1e-9;
    if s > 0.0 {
        let pump = Exp::new(1.0 / (1.0 / s - cfg.lifetime)).expect("validated rate");
        let decay = Exp::new(1.0 / cfg.lifetime).expect("validated lifetime");
        let mut t = 0.0;
        loop {
            t += pump.sample(&mut rng) + decay.sample(&mut rng);
            if t >= t_end {
                break;
            }
            photons.push(t);
        }
    }
    let bg_rate = cfg.background_rate() * 1e-9;
    if bg_rate > 0.0 {
        let wait = Exp::new(bg_rate).expect("validated rate");
        let mut t = 0.0;
        loop {
            t += wait.sample(&mut rng);
            if t >= t_end {
                break;
            }
            photons.push(t);
        }
    }
    photons.sort_by(f64::total_cmp);

    let (mut a, mut b) = (Vec::new(), Vec::new());
    for t in photons {
        if rng.random::<bool>() {
            a.push(t);
        } else {
            b.push(t);
        }
    }
    let histogram = cross_correlate(&a, &b, cfg.bin_width, cfg.tau_max, t_end)?;
    Ok(HbtResult {
        histogram,
        tau_c: cfg.tau_c(),
        detector_counts: [a.len(), b.len()],
    })
}
