//! Intensity autocorrelation of a PbV emitter with 95.9% spectral purity.
//!
//! ```text
//! cargo run --release --example hbt
//! ```

use vacancy_lines::simulate::{simulate_hbt, HbtConfig};

fn main() -> vacancy_lines::Result<()> {
    let cfg = HbtConfig {
        count_rate: 2.0e7,
        lifetime: 4.4,
        purity: 0.959,
        duration: 0.1,
        bin_width: 0.5,
        tau_max: 20.0,
        seed: 11,
    };
    let r = simulate_hbt(&cfg)?;
    let h = &r.histogram;
    println!("tau_c = {:.3} ns, detector counts {:?}", r.tau_c, r.detector_counts);
    println!("{:>8} {:>8} {:>8}", "tau", "g2", "expected");
    for (k, (&tau, &g)) in h.tau_bins.iter().zip(&h.g2).enumerate() {
        if k % 4 == 0 {
            println!("{tau:>8.1} {g:>8.3} {:>8.3}", cfg.expected_g2_bin(tau));
        }
    }
    println!("g2(0) = {:.4} +/- {:.4}", h.g2_zero(), h.g2_sigma()[h.zero_index()]);
    Ok(())
}
