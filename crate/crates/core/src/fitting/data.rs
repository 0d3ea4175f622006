use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acquisition metadata attached to a PLE scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub temperature_k: Option<f64>,
    pub power_nw: Option<f64>,
    pub scan_index: Option<u64>,
    pub emitter: Option<String>,
}

/// Counts versus laser detuning (MHz).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    detunings: Vec<f64>,
    counts: Vec<f64>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    pub fn new(detunings: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        if detunings.len() != counts.len() {
            return Err(Error::InvalidData(format!(
                "{} detunings but {} counts",
                detunings.len(),
                counts.len()
            )));
        }
        if detunings.is_empty() {
            return Err(Error::InvalidData("empty spectrum".into()));
        }
        if let Some(i) = detunings.iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite detuning at row {i}")));
        }
        if let Some(i) = detunings.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidData(format!(
                "non-monotonic detunings at row {}",
                i + 1
            )));
        }
        if let Some(i) = counts.iter().position(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidData(format!(
                "counts must be nonnegative, row {i} has {}",
                counts[i]
            )));
        }
        Ok(Spectrum {
            detunings,
            counts,
            meta: SpectrumMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: SpectrumMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Point-wise mean of scans taken on a common detuning grid.
    pub fn average(scans: &[Spectrum]) -> Result<Spectrum> {
        let first = scans
            .first()
            .ok_or_else(|| Error::InvalidData("no scans to average".into()))?;
        let mut sum = vec![0.0; first.len()];
        for s in scans {
            if s.detunings != first.detunings {
                return Err(Error::InvalidData("scans use different detuning grids".into()));
            }
            for (acc, c) in sum.iter_mut().zip(&s.counts) {
                *acc += c;
            }
        }
        let n = scans.len() as f64;
        let mut avg = Spectrum::new(first.detunings.clone(), sum.into_iter().map(|c| c / n).collect())?;
        avg.meta = SpectrumMeta {
            scan_index: None,
            ..first.meta.clone()
        };
        Ok(avg)
    }
}

/// Acquisition metadata attached to a TRPL histogram.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayMeta {
    pub bin_width_ns: Option<f64>,
    pub excitation_wavelength_nm: Option<f64>,
}

/// Photon counts per uniformly spaced time bin (ns) after pulsed excitation.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTrace {
    bin_centers: Vec<f64>,
    counts: Vec<u64>,
    pub meta: DecayMeta,
}

const SPACING_TOL: f64 = 1e-9;

impl DecayTrace {
    pub fn new(bin_centers: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if bin_centers.len() != counts.len() {
            return Err(Error::InvalidData(format!(
                "{} bins but {} counts",
                bin_centers.len(),
                counts.len()
            )));
        }
        if bin_centers.len() < 2 {
            return Err(Error::InvalidData("decay trace needs at least two bins".into()));
        }
        if bin_centers.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidData("non-finite bin time".into()));
        }
        let width = bin_centers[1] - bin_centers[0];
        if !(width > 0.0) {
            return Err(Error::InvalidData("bin times must increase".into()));
        }
        if let Some(i) = bin_centers
            .windows(2)
            .position(|w| ((w[1] - w[0] - width) / width).abs() > SPACING_TOL)
        {
            return Err(Error::InvalidData(format!(
                "non-uniform bin spacing at row {}",
                i + 1
            )));
        }
        Ok(DecayTrace {
            bin_centers,
            counts,
            meta: DecayMeta {
                bin_width_ns: Some(width),
                excitation_wavelength_nm: None,
            },
        })
    }

    /// Uniform bins `[k w, (k + 1) w)` reported by their centers.
    pub fn from_uniform_bins(bin_width: f64, counts: Vec<u64>) -> Result<Self> {
        let centers = (0..counts.len()).map(|k| (k as f64 + 0.5) * bin_width).collect();
        DecayTrace::new(centers, counts)
    }

    pub fn bin_centers(&self) -> &[f64] {
        &self.bin_centers
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_centers[1] - self.bin_centers[0]
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}
