//! Regenerates the data files under `fixtures/` from the configurations in
//! `fixtures/configs/`. Output is deterministic; rerunning leaves the files
//! unchanged.
//!
//! ```text
//! cargo run --example generate_fixtures
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use vacancy_lines::io::{self, format_f64};
use vacancy_lines::physics::linewidth_c;
use vacancy_lines::simulate::{simulate_ple_scan, simulate_trpl, substream, ScanSeriesConfig, TrplConfig};
use vacancy_lines::EmitterParams;

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn main() -> vacancy_lines::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let configs = dir.join("configs");

    let ple: ScanSeriesConfig = read(&configs.join("pbv_ple.json"));
    io::save_spectrum(&simulate_ple_scan(&ple)?, dir.join("pbv_ple.csv"))?;

    let trpl: TrplConfig = read(&configs.join("gev_trpl.json"));
    io::save_decay_trace(&simulate_trpl(&trpl)?.trace, dir.join("gev_trpl.csv"))?;

    // PbV C-line widths from 2 K to 20 K with 0.3 MHz Gaussian scatter
    let pbv = EmitterParams::pbv();
    let sigma = 0.3;
    let noise = Normal::new(0.0, sigma).expect("positive sigma");
    let mut rng = substream(31, 0);
    let mut text = String::from("# emitter=PbV\n# synthetic, seed=31\ntemperature_k,linewidth_mhz,sigma_mhz\n");
    for k in 1..=10 {
        let t = 2.0 * k as f64;
        let y = linewidth_c(&pbv, t)?.total + noise.sample(&mut rng);
        let _ = writeln!(text, "{},{},{}", format_f64(t), format_f64(y), format_f64(sigma));
    }
    std::fs::write(dir.join("pbv_tempseries.csv"), text).expect("write tempseries");

    println!("fixtures written to {}", dir.display());
    Ok(())
}
