//! Fifty PbV scans with spectral diffusion, rare jumps and charge blinking.
//! Compares the single-scan width to the width of the averaged line.
//!
//! ```text
//! cargo run --example scan_series
//! ```

use vacancy_lines::fitting::{fit_lorentzian, Spectrum};
use vacancy_lines::simulate::{simulate_scan_series, EmitterSpec, EventKind, Repump, ScanSeriesConfig};

fn main() -> vacancy_lines::Result<()> {
    let cfg = ScanSeriesConfig {
        n_scans: 50,
        diffusion_sigma: 5.0,
        jump_prob: 0.02,
        jump_sigma: 60.0,
        ionization_coeff: 2e-5,
        repump: Repump::BetweenScans,
        seed: 17,
        ..ScanSeriesConfig::new(EmitterSpec::Name("PbV".into()), 6.2)
    };
    let r = simulate_scan_series(&cfg)?;
    let ionizations = r.events.iter().filter(|e| e.kind == EventKind::Ionization).count();
    let jumps = r.events.iter().filter(|e| e.kind == EventKind::Jump).count();
    println!("homogeneous fwhm {:.2} MHz", r.fwhm);
    println!("bright fraction {:.3}, {ionizations} ionizations, {jumps} jumps", r.bright_fraction);

    let first = fit_lorentzian(&r.scans[0])?;
    let avg = fit_lorentzian(&Spectrum::average(&r.scans)?)?;
    println!("first scan fwhm {:.2} MHz", first.params["fwhm"]);
    println!("averaged fwhm   {:.2} MHz", avg.params["fwhm"]);
    Ok(())
}
