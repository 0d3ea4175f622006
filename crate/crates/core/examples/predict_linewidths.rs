//! C- and D-line widths of the four presets from 0 K to 20 K.
//!
//! ```text
//! cargo run --example predict_linewidths
//! ```

use vacancy_lines::physics::{linewidth_c, linewidth_d, linewidth_difference};
use vacancy_lines::EmitterParams;

fn main() -> vacancy_lines::Result<()> {
    for p in EmitterParams::presets() {
        println!("{} (f_gs {} GHz, gamma0 {:.2} MHz)", p.name, p.f_gs, p.gamma0);
        println!("  {:>6} {:>12} {:>14}", "T (K)", "C (MHz)", "D (MHz)");
        for t in [0.0, 2.0, 4.0, 6.2, 10.0, 20.0] {
            let c = linewidth_c(&p, t)?;
            let d = linewidth_d(&p, t)?;
            println!("  {t:>6.1} {:>12.3} {:>14.3}", c.total, d.total);
        }
        println!("  D - C = {:.4} MHz at every temperature", linewidth_difference(&p)?);
    }
    Ok(())
}
