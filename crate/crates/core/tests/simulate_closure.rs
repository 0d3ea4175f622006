use vacancy_lines::fitting::{
    fit_decay, fit_decay_with, fit_lorentzian, DecayFitOptions, DecayModel, Spectrum,
};
use vacancy_lines::physics::lorentzian_profile;
use vacancy_lines::simulate::{
    correlate_stream, simulate_hbt, simulate_ple_scan, simulate_scan_series, simulate_trpl,
    substream, EmitterSpec, FastComponent, Grid, HbtConfig, Repump, ScanSeriesConfig, TrplConfig,
};
use vacancy_lines::Error;

fn pbv(temperature: f64) -> ScanSeriesConfig {
    ScanSeriesConfig {
        grid: Grid { start: -148.5, stop: 148.5, step: 3.0 },
        dwell: 0.1,
        peak_rate: 1.0e4,
        background_rate: 100.0,
        ..ScanSeriesConfig::new(EmitterSpec::Name("PbV".into()), temperature)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn poisson_fidelity_per_point() {
    let cfg = ScanSeriesConfig {
        grid: Grid { start: -40.0, stop: 40.0, step: 20.0 },
        dwell: 0.01,
        ..pbv(6.2)
    };
    let expected = simulate_ple_scan(&ScanSeriesConfig { noiseless: true, ..cfg.clone() }).unwrap();
    let reps = 10_000;
    let mut sums = vec![0.0; expected.len()];
    for seed in 0..reps {
        let s = simulate_ple_scan(&ScanSeriesConfig { seed, ..cfg.clone() }).unwrap();
        for (acc, c) in sums.iter_mut().zip(s.counts()) {
            *acc += c;
        }
    }
    for (sum, mean) in sums.iter().zip(expected.counts()) {
        let sample = sum / reps as f64;
        let sigma = (mean / reps as f64).sqrt();
        assert!((sample - mean).abs() < 3.0 * sigma, "{sample} vs {mean}");
    }
}

#[test]
fn pbv_scans_with_1000_count_peaks_recover_linewidth() {
    let want = pbv(6.2).linewidth().unwrap();
    assert!((want - 38.9).abs() < 1e-6);
    let ok = (0..200u64)
        .filter(|&seed| {
            let s = simulate_ple_scan(&ScanSeriesConfig { seed, ..pbv(6.2) }).unwrap();
            let f = fit_lorentzian(&s).unwrap().params["fwhm"];
            ((f - want) / want).abs() < 0.05
        })
        .count();
    assert!(ok >= 190, "{ok}/200");
}

#[test]
fn stable_emitter_centers_scatter_like_shot_noise() {
    let cfg = ScanSeriesConfig { n_scans: 40, seed: 3, ..pbv(6.2) };
    let r = simulate_scan_series(&cfg).unwrap();
    assert!(r.centers.iter().all(|&c| c == 0.0));
    let fits: Vec<_> = r.scans.iter().map(|s| fit_lorentzian(s).unwrap()).collect();
    let centers: Vec<f64> = fits.iter().map(|f| f.params["center"]).collect();
    let n = centers.len() as f64;
    let mean = centers.iter().sum::<f64>() / n;
    let var = centers.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let predicted = fits.iter().map(|f| f.std_errors["center"].powi(2)).sum::<f64>() / n;
    // sample variance of 40 draws lies within a factor ~1.6 of the truth at 3 sigma
    let ratio = var / predicted;
    assert!((0.45..1.8).contains(&ratio), "{ratio}");
}

#[test]
fn diffusion_broadens_the_averaged_line() {
    let cfg = ScanSeriesConfig { n_scans: 50, diffusion_sigma: 5.0, seed: 21, ..pbv(6.2) };
    let r = simulate_scan_series(&cfg).unwrap();
    let mut singles: Vec<f64> = r
        .scans
        .iter()
        .map(|s| fit_lorentzian(s).unwrap().params["fwhm"])
        .collect();
    let avg = Spectrum::average(&r.scans).unwrap();
    let avg_fwhm = fit_lorentzian(&avg).unwrap().params["fwhm"];
    assert!(avg_fwhm > median(&mut singles));

    // oracle: the realized centers convolved with the line, without noise
    let x = avg.detunings().to_vec();
    let bg = cfg.background_rate * cfg.dwell;
    let mix: Vec<f64> = x
        .iter()
        .map(|&d| {
            bg + r
                .centers
                .iter()
                .map(|c| cfg.peak_rate * cfg.dwell * lorentzian_profile(d - c, r.fwhm))
                .sum::<f64>()
                / r.centers.len() as f64
        })
        .collect();
    let oracle = fit_lorentzian(&Spectrum::new(x, mix).unwrap()).unwrap().params["fwhm"];
    assert!(oracle > r.fwhm);
    assert!(((avg_fwhm - oracle) / oracle).abs() < 0.03, "{avg_fwhm} vs {oracle}");
}

#[test]
fn bright_fraction_falls_with_ionization() {
    let coeffs = [0.0, 1e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3];
    let fractions: Vec<f64> = coeffs
        .iter()
        .map(|&k| {
            (0..20u64)
                .map(|seed| {
                    let cfg = ScanSeriesConfig {
                        n_scans: 5,
                        ionization_coeff: k,
                        repump: Repump::BetweenScans,
                        seed,
                        ..pbv(6.2)
                    };
                    simulate_scan_series(&cfg).unwrap().bright_fraction
                })
                .sum::<f64>()
                / 20.0
        })
        .collect();
    assert!((fractions[0] - 1.0).abs() < 1e-12);
    for w in fractions.windows(2) {
        assert!(w[1] <= w[0], "{fractions:?}");
    }
    assert!(fractions[coeffs.len() - 1] < 0.9);
}

#[test]
fn extinction_mid_scan_then_recovery() {
    let cfg = ScanSeriesConfig {
        n_scans: 30,
        ionization_coeff: 5e-5,
        repump: Repump::BetweenScans,
        seed: 12,
        ..pbv(6.2)
    };
    let r = simulate_scan_series(&cfg).unwrap();
    let bg = cfg.background_rate * cfg.dwell;
    let cut = r
        .scans
        .iter()
        .enumerate()
        .find(|(k, _)| {
            r.events.iter().any(|e| {
                e.scan_index == *k
                    && e.kind == vacancy_lines::simulate::EventKind::Ionization
                    && e.laser_detuning < 0.0
            })
        })
        .map(|(k, _)| k)
        .expect("an extinction on the red side of resonance");
    assert!(cut + 1 < cfg.n_scans);
    // the scan that went dark shows no line on the blue side
    let dark = &r.scans[cut];
    let blue: Vec<f64> = dark
        .detunings()
        .iter()
        .zip(dark.counts())
        .filter(|(d, _)| **d > 10.0 && **d < 40.0)
        .map(|(_, c)| *c)
        .collect();
    let blue_mean = blue.iter().sum::<f64>() / blue.len() as f64;
    assert!(blue_mean < 3.0 * bg, "{blue_mean}");
    // and the next scan is bright again
    let next = fit_lorentzian(&r.scans[cut + 1]).unwrap();
    assert!(next.params["amplitude"] > 500.0);
}

#[test]
fn trpl_exp1_closure() {
    let cfg = TrplConfig {
        lifetime: 4.4,
        counts_total: 1_000_000,
        background: None,
        bin_width: 0.05,
        t_max: 60.0,
        seed: 5,
    };
    let r = simulate_trpl(&cfg).unwrap();
    let tau = fit_decay(&r.trace, DecayModel::Exp1).unwrap().params["tau"];
    assert!((tau / 4.4 - 1.0).abs() < 0.01, "{tau}");
}

#[test]
fn trpl_fast_background_closure() {
    let cfg = TrplConfig {
        lifetime: 5.5,
        counts_total: 1_000_000,
        background: Some(FastComponent { fraction: 0.4, tau_fast: 0.5 }),
        bin_width: 0.05,
        t_max: 80.0,
        seed: 9,
    };
    let r = simulate_trpl(&cfg).unwrap();
    let f = fit_decay_with(&r.trace, &DecayFitOptions::new(DecayModel::Exp2)).unwrap();
    assert!((f.params["tau_slow"] / 5.5 - 1.0).abs() < 0.02, "{f:?}");
    assert!((f.params["tau_fast"] / 0.5 - 1.0).abs() < 0.1, "{f:?}");
}

#[test]
fn trpl_without_counts_has_no_decay() {
    let cfg = TrplConfig {
        lifetime: 4.4,
        counts_total: 0,
        background: None,
        bin_width: 0.1,
        t_max: 50.0,
        seed: 0,
    };
    let r = simulate_trpl(&cfg).unwrap();
    assert!(matches!(fit_decay(&r.trace, DecayModel::Exp1), Err(Error::NoDecay)));
}

fn hbt(purity: f64, seed: u64) -> HbtConfig {
    HbtConfig {
        count_rate: 2.0e7,
        lifetime: 4.4,
        purity,
        duration: 0.1,
        bin_width: 0.5,
        tau_max: 20.0,
        seed,
    }
}

#[test]
fn ideal_emitter_has_no_coincidences_at_zero() {
    let r = simulate_hbt(&hbt(1.0, 1)).unwrap();
    let h = &r.histogram;
    let expected = hbt(1.0, 1).expected_g2_bin(0.0);
    let sigma = h.g2_sigma()[h.zero_index()];
    assert!((h.g2_zero() - expected).abs() < 4.0 * sigma, "{} vs {expected}", h.g2_zero());
    assert!(expected < 0.07);
}

#[test]
fn hbt_histogram_is_symmetric_within_statistics() {
    let h = simulate_hbt(&hbt(0.959, 2)).unwrap().histogram;
    let n = h.g2.len();
    let mut chi2 = 0.0;
    for k in 0..n / 2 {
        let (a, b) = (h.coincidence_counts[k] as f64, h.coincidence_counts[n - 1 - k] as f64);
        chi2 += (a - b).powi(2) / (a + b).max(1.0);
    }
    let dof = (n / 2) as f64;
    assert!(chi2 / dof < 2.0, "{}", chi2 / dof);
}

#[test]
fn poisson_stream_autocorrelation_is_flat() {
    let mut rng = substream(8, 0);
    let mut t = 0.0;
    let times: Vec<f64> = (0..200_000)
        .map(|_| {
            t += -(1.0 - rand::Rng::random::<f64>(&mut rng)).ln() * 50.0;
            t
        })
        .collect();
    let h = correlate_stream(&times, 5.0, 50.0).unwrap();
    let sigma = h.normalization.sqrt();
    for (&c, tau) in h.coincidence_counts.iter().zip(&h.tau_bins) {
        assert!((c as f64 - h.normalization).abs() < 4.0 * sigma, "tau {tau}: {c}");
    }
}
