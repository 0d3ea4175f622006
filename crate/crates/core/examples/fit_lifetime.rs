//! Simulated GeV decay with a fast background component, fitted with one
//! and two exponentials.
//!
//! ```text
//! cargo run --example fit_lifetime
//! ```

use vacancy_lines::fitting::{fit_decay, DecayModel};
use vacancy_lines::simulate::{simulate_trpl, FastComponent, TrplConfig};

fn main() -> vacancy_lines::Result<()> {
    let cfg = TrplConfig {
        lifetime: 5.5,
        counts_total: 1_000_000,
        background: Some(FastComponent { fraction: 0.3, tau_fast: 0.5 }),
        bin_width: 0.05,
        t_max: 80.0,
        seed: 7,
    };
    let trace = simulate_trpl(&cfg)?.trace;

    let one = fit_decay(&trace, DecayModel::Exp1)?;
    println!("exp1: tau = {:.3} ns, reduced chi2 {:.2}", one.params["tau"], one.reduced_chi2);

    let two = fit_decay(&trace, DecayModel::Exp2)?;
    println!(
        "exp2: tau_slow = {:.3} ns, tau_fast = {:.3} ns, reduced chi2 {:.2}",
        two.params["tau_slow"], two.params["tau_fast"], two.reduced_chi2
    );
    println!("transform limit {:.2} MHz", two.derived["gamma0_mhz"]);
    for w in &two.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
