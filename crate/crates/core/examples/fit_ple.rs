//! Simulates one PbV PLE scan at 6.2 K and fits a Lorentzian to it.
//!
//! ```text
//! cargo run --example fit_ple
//! ```

use vacancy_lines::fitting::fit_lorentzian;
use vacancy_lines::simulate::{simulate_ple_scan, EmitterSpec, ScanSeriesConfig};

fn main() -> vacancy_lines::Result<()> {
    let cfg = ScanSeriesConfig {
        peak_rate: 5000.0,
        seed: 4,
        ..ScanSeriesConfig::new(EmitterSpec::Name("PbV".into()), 6.2)
    };
    let scan = simulate_ple_scan(&cfg)?;
    let r = fit_lorentzian(&scan)?;
    println!("true fwhm    {:.3} MHz", cfg.linewidth()?);
    for name in ["fwhm", "center", "amplitude", "offset"] {
        println!("{name:<12} {:.3} +/- {:.3}", r.params[name], r.std_errors[name]);
    }
    println!("reduced chi2 {:.3}, {} iterations", r.reduced_chi2, r.n_iterations);
    Ok(())
}
