//! Recovers the residual broadening of a PbV-like emitter from C-line
//! widths measured between 2 K and 20 K.
//!
//! ```text
//! cargo run --example temperature_series
//! ```

use vacancy_lines::fitting::{fit_temperature_series, FreeParams, TempPoint, TempSeriesOptions};
use vacancy_lines::physics::linewidth_c;
use vacancy_lines::EmitterParams;

fn main() -> vacancy_lines::Result<()> {
    let truth = EmitterParams::pbv();
    let wiggle = [0.2, -0.1, 0.15, -0.25, 0.05, 0.1, -0.2, 0.3, -0.05, 0.0];
    let points: Vec<TempPoint> = (1..=10)
        .zip(wiggle)
        .map(|(k, dy)| {
            let t = 2.0 * k as f64;
            linewidth_c(&truth, t).map(|w| TempPoint { sigma: Some(0.2), ..TempPoint::new(t, w.total + dy) })
        })
        .collect::<Result<_, _>>()?;

    let start = EmitterParams { gamma_others: 0.0, ..truth.clone() };
    let r = fit_temperature_series(&points, &start, &TempSeriesOptions::default())?;
    println!(
        "gamma_others = {:.3} +/- {:.3} MHz (true {})",
        r.params["gamma_others"], r.std_errors["gamma_others"], truth.gamma_others
    );

    let opts = TempSeriesOptions { free: FreeParams::GammaOthersAndAlpha, ..Default::default() };
    let r = fit_temperature_series(&points, &start, &opts)?;
    println!(
        "with free coupling: gamma_others = {:.3} MHz, alpha_gs = {:.3e} GHz^-2",
        r.params["gamma_others"], r.params["alpha_gs"]
    );
    Ok(())
}
