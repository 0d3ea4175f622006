//! Writes and reads back each on-disk format: spectrum and decay CSV, fit
//! report JSON, and a user emitter file.
//!
//! ```text
//! cargo run --example file_formats
//! ```

use vacancy_lines::fitting::fit_lorentzian;
use vacancy_lines::io;
use vacancy_lines::registry::EmitterRegistry;
use vacancy_lines::simulate::{simulate_ple_scan, simulate_trpl, EmitterSpec, ScanSeriesConfig, TrplConfig};
use vacancy_lines::EmitterParams;

fn main() -> vacancy_lines::Result<()> {
    let dir = std::env::temp_dir().join("vacancy-file-formats");
    std::fs::create_dir_all(&dir).expect("create output directory");

    let scan = simulate_ple_scan(&ScanSeriesConfig::new(EmitterSpec::Name("SnV".into()), 4.0))?;
    io::save_spectrum(&scan, dir.join("scan.csv"))?;
    assert_eq!(io::load_spectrum(dir.join("scan.csv"))?, scan);

    let trace = simulate_trpl(&TrplConfig {
        lifetime: 4.4,
        counts_total: 10_000,
        background: None,
        bin_width: 0.1,
        t_max: 50.0,
        seed: 1,
    })?
    .trace;
    io::save_decay_trace(&trace, dir.join("trace.csv"))?;
    assert_eq!(io::load_decay_trace(dir.join("trace.csv"))?.counts(), trace.counts());

    let report = fit_lorentzian(&scan)?;
    io::emit_fit_report(&report, dir.join("report.json"))?;
    assert_eq!(io::load_fit_report(dir.join("report.json"))?, report);

    let custom = EmitterParams::from_gamma0("PbV-hot", 3870.0, 6920.0, 36.2, 7.51e-9, 7.51e-9, 9.0)?;
    io::save_emitter_file(&custom, dir.join("pbv_hot.json"))?;
    let mut registry = EmitterRegistry::new();
    let loaded = registry.load_file(dir.join("pbv_hot.json"))?.clone();
    println!("registered {} with gamma_others {} MHz", loaded.name, loaded.gamma_others);

    println!("fit report:\n{}", io::fit_report_to_json(&report)?);
    println!("files in {}", dir.display());
    Ok(())
}
