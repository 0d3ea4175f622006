//! Cubic law through measured C/D linewidth differences.
//!
//! ```text
//! cargo run --example fit_alpha
//! ```

use vacancy_lines::fitting::{fit_cubic_alpha, AlphaWeights, SplittingPoint};

fn main() -> vacancy_lines::Result<()> {
    // ground-state splitting (GHz), D minus C (MHz)
    let points = [
        SplittingPoint { f_gs: 200.0, delta_gamma: 44.7 },
        SplittingPoint { f_gs: 821.0, delta_gamma: 4.0e3 },
        SplittingPoint { f_gs: 3870.0, delta_gamma: 4.0e5 },
    ];
    for (label, w) in [
        ("relative", AlphaWeights::Relative),
        ("uniform", AlphaWeights::Uniform),
        ("sigmas", AlphaWeights::Sigmas(vec![5.0, 500.0, 5e4])),
    ] {
        let r = fit_cubic_alpha(&points, &w)?;
        println!(
            "{label:<8} alpha = {:.3e} +/- {:.1e} GHz^-2",
            r.params["alpha"], r.std_errors["alpha"]
        );
    }
    Ok(())
}
