use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_nonnegative, check_positive, check_probability, poisson, substream};
use crate::error::{Error, Result};
use crate::fitting::{Spectrum, SpectrumMeta};
use crate::io::EmitterFile;
use crate::physics::{linewidth, lorentzian_profile, EmitterParams, Transition};
use crate::registry::EmitterRegistry;

/// Emitter given by registry name or inline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmitterSpec {
    Name(String),
    Inline(Box<EmitterFile>),
}

impl EmitterSpec {
    pub fn resolve(&self) -> Result<EmitterParams> {
        match self {
            EmitterSpec::Name(n) => EmitterRegistry::new().lookup(n),
            EmitterSpec::Inline(f) => (**f).clone().into_params(),
        }
    }
}

/// Laser detuning grid, MHz. Inclusive of `stop` when it falls on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

/// How a dark (ionized) emitter returns to the bright charge state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repump {
    /// Stays dark for the rest of the series.
    #[default]
    None,
    /// Restored before every scan after the first.
    BetweenScans,
    /// The resonant laser repumps with this probability per expected
    /// absorbed count.
    Resonant(f64),
}

fn default_scans() -> usize {
    1
}

/// Configuration of a repeated PLE measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSeriesConfig {
    pub emitter: EmitterSpec,
    /// K
    pub temperature: f64,
    #[serde(default)]
    pub transition: Transition,
    pub grid: Grid,
    /// Integration time per grid point, s.
    pub dwell: f64,
    /// Signal count rate at resonance, counts/s.
    pub peak_rate: f64,
    /// counts/s
    pub background_rate: f64,
    #[serde(default = "default_scans")]
    pub n_scans: usize,
    /// Line center of the first scan, MHz.
    #[serde(default)]
    pub center: f64,
    /// Standard deviation of the per-scan center random walk, MHz.
    #[serde(default)]
    pub diffusion_sigma: f64,
    /// Probability per scan of an additional large jump.
    #[serde(default)]
    pub jump_prob: f64,
    #[serde(default)]
    pub jump_sigma: f64,
    /// Ionization probability per expected detected signal count.
    #[serde(default)]
    pub ionization_coeff: f64,
    #[serde(default)]
    pub repump: Repump,
    #[serde(default)]
    pub seed: u64,
    /// Emit expected counts instead of Poisson draws.
    #[serde(default)]
    pub noiseless: bool,
}

impl ScanSeriesConfig {
    /// A quiet single-scan configuration for `emitter` at `temperature`.
    pub fn new(emitter: EmitterSpec, temperature: f64) -> Self {
        ScanSeriesConfig {
            emitter,
            temperature,
            transition: Transition::C,
            grid: Grid {
                start: -200.0,
                stop: 200.0,
                step: 4.0,
            },
            dwell: 0.1,
            peak_rate: 1.0e4,
            background_rate: 100.0,
            n_scans: 1,
            center: 0.0,
            diffusion_sigma: 0.0,
            jump_prob: 0.0,
            jump_sigma: 0.0,
            ionization_coeff: 0.0,
            repump: Repump::None,
            seed: 0,
            noiseless: false,
        }
    }

    /// Checks every field and resolves the emitter.
    pub fn validate(&self) -> Result<EmitterParams> {
        let g = &self.grid;
        check_positive("grid.step", g.step)?;
        if !(g.stop >= g.start) || !g.start.is_finite() || !g.stop.is_finite() {
            return Err(Error::config("grid", "stop must not precede start"));
        }
        if g.points().len() < 2 {
            return Err(Error::config("grid", "needs at least two points"));
        }
        check_positive("dwell", self.dwell)?;
        check_nonnegative("temperature", self.temperature)?;
        check_nonnegative("peak_rate", self.peak_rate)?;
        check_nonnegative("background_rate", self.background_rate)?;
        check_nonnegative("diffusion_sigma", self.diffusion_sigma)?;
        check_nonnegative("jump_sigma", self.jump_sigma)?;
        check_probability("jump_prob", self.jump_prob)?;
        check_probability("ionization_coeff", self.ionization_coeff)?;
        if let Repump::Resonant(r) = self.repump {
            check_probability("repump.resonant", r)?;
        }
        if self.n_scans == 0 {
            return Err(Error::config("n_scans", "must be at least 1"));
        }
        if !self.center.is_finite() {
            return Err(Error::config("center", "must be finite"));
        }
        let params = self
            .emitter
            .resolve()
            .map_err(|e| Error::config("emitter", e.to_string()))?;
        Ok(params)
    }

    /// FWHM (MHz) of the simulated line.
    pub fn linewidth(&self) -> Result<f64> {
        let p = self.validate()?;
        let lw = linewidth(&p, self.temperature, self.transition)?;
        if !(lw.total > 0.0) {
            return Err(Error::config(
                "emitter",
                format!("model linewidth {} MHz is not positive", lw.total),
            ));
        }
        Ok(lw.total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ScanStart,
    Jump,
    Ionization,
    Repump,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ScanStart => "scan_start",
            EventKind::Jump => "jump",
            EventKind::Ionization => "ionization",
            EventKind::Repump => "repump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvent {
    pub scan_index: usize,
    pub kind: EventKind,
    /// Experiment time since the start of the series, s.
    pub time: f64,
    /// Laser detuning when the event happened, MHz.
    pub laser_detuning: f64,
    /// Line center of the current scan, MHz.
    pub center: f64,
}

#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub scans: Vec<Spectrum>,
    pub events: Vec<SeriesEvent>,
    /// Line center used for each scan, MHz.
    pub centers: Vec<f64>,
    /// Fraction of total dwell time spent in the bright charge state.
    pub bright_fraction: f64,
    /// FWHM of the simulated line, MHz.
    pub fwhm: f64,
}

/// One PLE scan: the first scan of [`simulate_scan_series`].
pub fn simulate_ple_scan(cfg: &ScanSeriesConfig) -> Result<Spectrum> {
    let single = ScanSeriesConfig {
        n_scans: 1,
        ..cfg.clone()
    };
    Ok(simulate_scan_series(&single)?
        .scans
        .pop()
        .expect("one scan"))
}

pub fn simulate_scan_series(cfg: &ScanSeriesConfig) -> Result<SeriesResult> {
    let params = cfg.validate()?;
    let fwhm = cfg.linewidth()?;
    let grid = cfg.grid.points();
    let scan_time = grid.len() as f64 * cfg.dwell;

    let mut master = substream(cfg.seed, 0);
    let diffusion = Normal::new(0.0, cfg.diffusion_sigma).expect("validated sigma");
    let jump = Normal::new(0.0, cfg.jump_sigma).expect("validated sigma");

    let mut scans = Vec::with_capacity(cfg.n_scans);
    let mut events = Vec::new();
    let mut centers = Vec::with_capacity(cfg.n_scans);
    let mut center = cfg.center;
    let mut bright = true;
    let mut bright_time = 0.0;

    for k in 0..cfg.n_scans {
        let scan_start = k as f64 * scan_time;
        if k > 0 {
            center += diffusion.sample(&mut master);
            if master.random::<f64>() < cfg.jump_prob {
                center += jump.sample(&mut master);
                events.push(SeriesEvent {
                    scan_index: k,
                    kind: EventKind::Jump,
                    time: scan_start,
                    laser_detuning: grid[0],
                    center,
                });
            }
            if !bright && cfg.repump == Repump::BetweenScans {
                bright = true;
                events.push(SeriesEvent {
                    scan_index: k,
                    kind: EventKind::Repump,
                    time: scan_start,
                    laser_detuning: grid[0],
                    center,
                });
            }
        }
        centers.push(center);
        events.push(SeriesEvent {
            scan_index: k,
            kind: EventKind::ScanStart,
            time: scan_start,
            laser_detuning: grid[0],
            center,
        });

        let mut rng = substream(cfg.seed, k as u64 + 1);
        let mut counts = Vec::with_capacity(grid.len());
        for (i, &det) in grid.iter().enumerate() {
            let point_start = scan_start + i as f64 * cfg.dwell;
            let signal_rate = cfg.peak_rate * lorentzian_profile(det - center, fwhm);
            let ion_rate = cfg.ionization_coeff * signal_rate;
            let rec_rate = match cfg.repump {
                Repump::Resonant(r) => r * signal_rate,
                _ => 0.0,
            };
            // continuous-time two-state process within the dwell window
            let mut t = 0.0;
            let mut on = 0.0;
            loop {
                let rate = if bright { ion_rate } else { rec_rate };
                let dt = if rate > 0.0 {
                    -(1.0 - rng.random::<f64>()).ln() / rate
                } else {
                    f64::INFINITY
                };
                if t + dt >= cfg.dwell {
                    if bright {
                        on += cfg.dwell - t;
                    }
                    break;
                }
                if bright {
                    on += dt;
                }
                t += dt;
                bright = !bright;
                events.push(SeriesEvent {
                    scan_index: k,
                    kind: if bright { EventKind::Repump } else { EventKind::Ionization },
                    time: point_start + t,
                    laser_detuning: det,
                    center,
                });
            }
            bright_time += on;
            let mean = cfg.background_rate * cfg.dwell + signal_rate * on;
            counts.push(if cfg.noiseless { mean } else { poisson(&mut rng, mean) });
        }
        let spectrum = Spectrum::new(grid.clone(), counts)?.with_meta(SpectrumMeta {
            temperature_k: Some(cfg.temperature),
            power_nw: None,
            scan_index: Some(k as u64),
            emitter: Some(params.name.clone()),
        });
        scans.push(spectrum);
    }

    Ok(SeriesResult {
        scans,
        events,
        centers,
        bright_fraction: bright_time / (cfg.n_scans as f64 * scan_time),
        fwhm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::fit_lorentzian;

    fn pbv_config() -> ScanSeriesConfig {
        ScanSeriesConfig {
            peak_rate: 1.0e4,
            background_rate: 100.0,
            dwell: 0.1,
            ..ScanSeriesConfig::new(EmitterSpec::Name("PbV".into()), 6.2)
        }
    }

    #[test]
    fn grid_points_include_stop() {
        let g = Grid { start: -2.0, stop: 2.0, step: 0.5 };
        assert_eq!(g.points().len(), 9);
        assert_eq!(*g.points().last().unwrap(), 2.0);
    }

    #[test]
    fn background_only_scan() {
        let cfg = ScanSeriesConfig {
            peak_rate: 0.0,
            background_rate: 500.0,
            dwell: 0.2,
            grid: Grid { start: -500.0, stop: 500.0, step: 1.0 },
            seed: 3,
            ..pbv_config()
        };
        let s = simulate_ple_scan(&cfg).unwrap();
        let n = s.len() as f64;
        let mean = s.counts().iter().sum::<f64>() / n;
        assert!((mean - 100.0).abs() < 3.0 * (100.0 / n).sqrt());
    }

    #[test]
    fn noiseless_scan_closes_with_fit() {
        let cfg = ScanSeriesConfig { noiseless: true, ..pbv_config() };
        let s = simulate_ple_scan(&cfg).unwrap();
        let r = fit_lorentzian(&s).unwrap();
        let want = cfg.linewidth().unwrap();
        assert!(((r.param("fwhm").unwrap() - want) / want).abs() < 1e-6);
        assert!((want - 38.9).abs() < 1e-6);
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = ScanSeriesConfig {
            n_scans: 5,
            diffusion_sigma: 5.0,
            ionization_coeff: 1e-4,
            repump: Repump::BetweenScans,
            seed: 99,
            ..pbv_config()
        };
        let a = simulate_scan_series(&cfg).unwrap();
        let b = simulate_scan_series(&cfg).unwrap();
        assert_eq!(a.scans, b.scans);
        assert_eq!(a.events, b.events);
        let c = simulate_scan_series(&ScanSeriesConfig { seed: 100, ..cfg }).unwrap();
        assert_ne!(a.scans, c.scans);
    }

    #[test]
    fn ionization_with_repump_between_scans() {
        let cfg = ScanSeriesConfig {
            n_scans: 20,
            ionization_coeff: 2e-4,
            repump: Repump::BetweenScans,
            seed: 5,
            ..pbv_config()
        };
        let r = simulate_scan_series(&cfg).unwrap();
        let ion: Vec<_> = r.events.iter().filter(|e| e.kind == EventKind::Ionization).collect();
        assert!(!ion.is_empty());
        // extinction happens near resonance
        let mut offsets: Vec<f64> = ion.iter().map(|e| (e.laser_detuning - e.center).abs()).collect();
        offsets.sort_by(f64::total_cmp);
        assert!(offsets[offsets.len() / 2] < r.fwhm, "{offsets:?}");
        let first = ion[0].scan_index;
        assert!(first + 1 < cfg.n_scans);
        assert!(r
            .events
            .iter()
            .any(|e| e.kind == EventKind::Repump && e.scan_index == first + 1));
        assert!(r.bright_fraction < 1.0);
    }

    #[test]
    fn no_repump_stays_dark() {
        let cfg = ScanSeriesConfig {
            n_scans: 10,
            ionization_coeff: 1e-2,
            repump: Repump::None,
            seed: 1,
            ..pbv_config()
        };
        let r = simulate_scan_series(&cfg).unwrap();
        assert!(!r.events.iter().any(|e| e.kind == EventKind::Repump));
        let last = r.scans.last().unwrap();
        let bg = cfg.background_rate * cfg.dwell;
        let mean = last.counts().iter().sum::<f64>() / last.len() as f64;
        assert!((mean - bg).abs() < 5.0 * (bg / last.len() as f64).sqrt());
    }

    #[test]
    fn resonant_repump_recovers_within_series() {
        let cfg = ScanSeriesConfig {
            n_scans: 10,
            ionization_coeff: 1e-3,
            repump: Repump::Resonant(1e-3),
            seed: 8,
            ..pbv_config()
        };
        let r = simulate_scan_series(&cfg).unwrap();
        assert!(r.events.iter().any(|e| e.kind == EventKind::Repump));
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            ScanSeriesConfig { dwell: 0.0, ..pbv_config() },
            ScanSeriesConfig { jump_prob: 1.5, ..pbv_config() },
            ScanSeriesConfig { peak_rate: -1.0, ..pbv_config() },
            ScanSeriesConfig { grid: Grid { start: 0.0, stop: 10.0, step: 0.0 }, ..pbv_config() },
            ScanSeriesConfig { emitter: EmitterSpec::Name("NV".into()), ..pbv_config() },
            ScanSeriesConfig { n_scans: 0, ..pbv_config() },
        ];
        for cfg in bad {
            assert!(matches!(simulate_scan_series(&cfg), Err(Error::Config { .. })), "{cfg:?}");
        }
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{
            "emitter": "SnV", "temperature": 6.2,
            "grid": {"start": -100, "stop": 100, "step": 2},
            "dwell": 0.05, "peak_rate": 2e4, "background_rate": 50,
            "n_scans": 3, "repump": {"resonant": 0.001}, "seed": 4
        }"#;
        let cfg: ScanSeriesConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.repump, Repump::Resonant(0.001));
        let back: ScanSeriesConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let inline = r#"{"emitter": {"name":"X","f_gs":100,"f_es":500,"gamma0":30,
            "alpha_gs":1e-9,"alpha_es":1e-9}, "temperature": 4,
            "grid": {"start": -100, "stop": 100, "step": 2},
            "dwell": 0.05, "peak_rate": 2e4, "background_rate": 50}"#;
        let cfg: ScanSeriesConfig = serde_json::from_str(inline).unwrap();
        assert_eq!(cfg.validate().unwrap().name, "X");
    }
}
