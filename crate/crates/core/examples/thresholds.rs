//! Warmest temperature at which each preset stays within a given multiple
//! of its transform limit.
//!
//! ```text
//! cargo run --example thresholds -- 1.5
//! ```

use vacancy_lines::physics::{temperature_threshold, Threshold};
use vacancy_lines::EmitterParams;

fn main() -> vacancy_lines::Result<()> {
    let ratio: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("ratio must be a number"))
        .unwrap_or(1.2);
    for p in EmitterParams::presets() {
        match temperature_threshold(&p, ratio)? {
            Threshold::At(t) => println!("{:>4}: {t:7.3} K", p.name),
            Threshold::AlreadyExceeded => println!("{:>4}: exceeded at 0 K", p.name),
            Threshold::Unbounded => println!("{:>4}: never exceeded", p.name),
        }
    }
    Ok(())
}
