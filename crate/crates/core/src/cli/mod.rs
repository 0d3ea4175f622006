//! The `vacancy` command line.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 threshold criterion
//! never violated, 4 fit did not converge. [`run`] takes explicit output
//! streams so the commands can be driven in-process.

mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fitting::lm::Model;
use crate::fitting::{
    fit_cubic_alpha, fit_decay_with, fit_lorentzian, fit_temperature_series, AlphaWeights,
    DecayFitOptions, DecayModel, FitReport, FreeParams, LorentzianModel, TempSeriesOptions,
};
use crate::io::{self, format_f64};
use crate::physics::{linewidth, linewidth_c, temperature_threshold, Threshold, Transition};
use crate::registry::EmitterRegistry;
use crate::simulate::{
    simulate_hbt, simulate_ple_scan, simulate_scan_series, simulate_trpl, HbtConfig,
    ScanSeriesConfig, TrplConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNBOUNDED: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

/// Environment variable naming the default `simulate --out` directory.
pub const OUT_DIR_ENV: &str = "VACANCY_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "vacancy",
    version,
    about = "Phonon-limited linewidths of group-IV vacancy centers: predict, fit, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linewidth breakdown at one or more temperatures.
    Predict(PredictArgs),
    /// Temperature at which the C line reaches a multiple of the transform limit.
    Threshold(ThresholdArgs),
    /// Fit measured data and write a JSON report.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Generate synthetic data sets.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Built-in emitter parameters.
    #[command(subcommand)]
    Emitters(EmittersCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransitionArg {
    C,
    D,
}

impl From<TransitionArg> for Transition {
    fn from(t: TransitionArg) -> Self {
        match t {
            TransitionArg::C => Transition::C,
            TransitionArg::D => Transition::D,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Preset name or path to an emitter JSON file.
    #[arg(long)]
    emitter: String,
    /// Temperatures in K; repeat or separate with commas.
    #[arg(long = "temp", required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    temps: Vec<f64>,
    #[arg(long, value_enum, ignore_case = true, default_value = "c")]
    transition: TransitionArg,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    emitter: String,
    /// Allowed multiple of the transform limit.
    #[arg(long, default_value_t = 1.2)]
    ratio: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct FitCommon {
    /// Input data file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write data and model as CSV (x,data,model).
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Also render data and model as an SVG line plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecayModelArg {
    Exp1,
    Exp2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightsArg {
    Relative,
    Uniform,
    Sigmas,
}

#[derive(Debug, Subcommand)]
enum FitCommand {
    /// Lorentzian line of a PLE scan.
    Ple {
        #[command(flatten)]
        common: FitCommon,
    },
    /// Exponential decay of a TRPL histogram.
    Lifetime {
        #[command(flatten)]
        common: FitCommon,
        #[arg(long, value_enum, default_value = "exp1")]
        model: DecayModelArg,
        /// Fit window start, ns (default: the histogram maximum).
        #[arg(long)]
        window_start: Option<f64>,
        /// Fit window end, ns.
        #[arg(long)]
        window_end: Option<f64>,
    },
    /// Cubic coupling law through (splitting, linewidth difference) points.
    Alpha {
        #[command(flatten)]
        common: FitCommon,
        /// Default: sigmas when the file has a sigma column, else relative.
        #[arg(long, value_enum)]
        weights: Option<WeightsArg>,
    },
    /// Residual broadening from C-line widths versus temperature.
    Tempseries {
        #[command(flatten)]
        common: FitCommon,
        #[arg(long)]
        emitter: String,
        /// Fit the ground-state coupling as well.
        #[arg(long)]
        free_alpha: bool,
        /// Ignore points above 20 K.
        #[arg(long = "below-20k")]
        below_20k: bool,
    },
}

#[derive(Debug, Args)]
struct SimArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// One PLE scan.
    Ple(SimArgs),
    /// Repeated PLE scans with spectral diffusion and charge blinking.
    Series(SimArgs),
    /// Time-resolved photoluminescence histogram.
    Trpl(SimArgs),
    /// Hanbury Brown-Twiss correlation histogram.
    Hbt(SimArgs),
}

#[derive(Debug, Subcommand)]
enum EmittersCommand {
    /// List all presets.
    List {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Show one emitter.
    Show {
        name: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

enum Failure {
    Input(String),
    Unbounded(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let mut buf = String::new();
    let mut warnings = Vec::new();
    let result = dispatch(cli.command, &mut buf, &mut warnings);
    let _ = out.write_all(buf.as_bytes());
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok(code) => code,
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Unbounded(m)) => {
            let _ = writeln!(err, "{m}");
            EXIT_UNBOUNDED
        }
    }
}

fn dispatch(cmd: Command, out: &mut String, warnings: &mut Vec<String>) -> CmdResult {
    let registry = EmitterRegistry::new();
    match cmd {
        Command::Predict(a) => predict(&registry, a, out, warnings),
        Command::Threshold(a) => threshold(&registry, a, out),
        Command::Fit(f) => fit(&registry, f, out, warnings),
        Command::Simulate(s) => simulate(s, out, warnings),
        Command::Emitters(e) => emitters(&registry, e, out),
    }
}

fn predict(reg: &EmitterRegistry, a: PredictArgs, out: &mut String, warnings: &mut Vec<String>) -> CmdResult {
    let p = reg.resolve(&a.emitter)?;
    let transition = Transition::from(a.transition);
    let rows = a
        .temps
        .iter()
        .map(|&t| linewidth(&p, t, transition))
        .collect::<Result<Vec<_>>>()?;
    if reg.is_builtin(&p.name) && ["SiV", "GeV"].contains(&p.name.as_str()) {
        warnings.push(format!("{}: gamma_others is not published; taken as 0 MHz", p.name));
    }
    for r in &rows {
        for w in r.warnings() {
            warnings.push(format!("{} K: {w}", format_f64(r.temperature)));
        }
    }
    match a.format {
        Format::Csv => out.push_str(&io::linewidth_table_to_csv(&p.name, &rows)),
        Format::Json => {
            out.push_str(&serde_json::to_string_pretty(&rows).map_err(Error::from)?);
            out.push('\n');
        }
        Format::Table => {
            let _ = writeln!(out, "{} {} transition (MHz)", p.name, transition);
            let _ = writeln!(
                out,
                "{:>10} {:>12} {:>12} {:>14} {:>14} {:>14}  regime",
                "T (K)", "gamma0", "gamma_others", "ground term", "excited term", "total"
            );
            for r in &rows {
                let regime = if r.beyond_validity() { "beyond 20 K validity" } else { "valid" };
                let _ = writeln!(
                    out,
                    "{:>10.3} {:>12.4} {:>12.4} {:>14.6} {:>14.6} {:>14.6}  {}",
                    r.temperature, r.gamma0, r.gamma_others, r.gs_term, r.es_term, r.total, regime
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn threshold(reg: &EmitterRegistry, a: ThresholdArgs, out: &mut String) -> CmdResult {
    let p = reg.resolve(&a.emitter)?;
    let th = temperature_threshold(&p, a.ratio)?;
    let target = a.ratio * p.gamma0;
    let (kelvin, note) = match th {
        Threshold::At(t) => (t, "crossing"),
        Threshold::AlreadyExceeded => (0.0, "exceeded at 0 K"),
        Threshold::Unbounded => {
            return Err(Failure::Unbounded(format!(
                "{}: criterion never violated (linewidth stays below {:.3} MHz at all temperatures)",
                p.name, target
            )))
        }
    };
    match a.format {
        Format::Csv => {
            let _ = writeln!(out, "emitter,ratio,threshold_k,target_mhz");
            let _ = writeln!(out, "{},{},{},{}", p.name, format_f64(a.ratio), format_f64(kelvin), format_f64(target));
        }
        Format::Json => {
            let v = json!({"emitter": p.name, "ratio": a.ratio, "threshold_k": kelvin, "target_mhz": target, "status": note});
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(Error::from)?);
        }
        Format::Table => {
            if th == Threshold::AlreadyExceeded {
                let _ = writeln!(
                    out,
                    "{}: residual broadening alone exceeds {} x {} MHz; T* = 0 K",
                    p.name,
                    a.ratio,
                    p.gamma0
                );
            } else {
                let _ = writeln!(
                    out,
                    "{}: T* = {:.3} K ({} x {} MHz = {:.3} MHz)",
                    p.name, kelvin, a.ratio, p.gamma0, target
                );
            }
        }
    }
    Ok(EXIT_OK)
}

struct Curve {
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    data: Vec<(f64, f64)>,
    model: Vec<(f64, f64)>,
}

fn fit(reg: &EmitterRegistry, cmd: FitCommand, out: &mut String, warnings: &mut Vec<String>) -> CmdResult {
    let (common, report, curve) = match cmd {
        FitCommand::Ple { common } => {
            let s = io::load_spectrum(&common.input)?;
            let r = fit_lorentzian(&s)?;
            let p = ["center", "fwhm", "amplitude", "offset"].map(|k| r.params[k]);
            let pts: Vec<(f64, f64)> = s.detunings().iter().copied().zip(s.counts().iter().copied()).collect();
            let model = pts.iter().map(|&(x, _)| (x, LorentzianModel.eval(x, &p))).collect();
            let curve = Curve {
                title: "PLE scan".into(),
                x_label: "detuning (MHz)",
                y_label: "counts",
                data: pts,
                model,
            };
            (common, r, curve)
        }
        FitCommand::Lifetime { common, model, window_start, window_end } => {
            let trace = io::load_decay_trace(&common.input)?;
            let opts = DecayFitOptions {
                model: match model {
                    DecayModelArg::Exp1 => DecayModel::Exp1,
                    DecayModelArg::Exp2 => DecayModel::Exp2,
                },
                window_start,
                window_end,
                ..Default::default()
            };
            let r = fit_decay_with(&trace, &opts)?;
            let t0 = r.derived["t0_ns"];
            let t_end = r.derived["window_end_ns"];
            let comps: Vec<(f64, f64)> = match opts.model {
                DecayModel::Exp1 => vec![(r.params["amplitude"], r.params["tau"])],
                DecayModel::Exp2 => vec![
                    (r.params["amplitude_fast"], r.params["tau_fast"]),
                    (r.params["amplitude_slow"], r.params["tau_slow"]),
                ],
            };
            let offset = r.params["offset"];
            let data: Vec<(f64, f64)> = trace
                .bin_centers()
                .iter()
                .zip(trace.counts())
                .map(|(&t, &c)| (t, c as f64))
                .collect();
            let model = data
                .iter()
                .filter(|(t, _)| *t >= t0 - 1e-9 && *t <= t_end + 1e-9)
                .map(|&(t, _)| (t, offset + comps.iter().map(|(a, tau)| a * (-(t - t0) / tau).exp()).sum::<f64>()))
                .collect();
            let curve = Curve {
                title: format!("TRPL ({})", opts.model),
                x_label: "time (ns)",
                y_label: "counts",
                data,
                model,
            };
            (common, r, curve)
        }
        FitCommand::Alpha { common, weights } => {
            let (pts, sigmas) = io::load_alpha_points(&common.input)?;
            let w = match (weights, sigmas) {
                (Some(WeightsArg::Relative), _) | (None, None) => AlphaWeights::Relative,
                (Some(WeightsArg::Uniform), _) => AlphaWeights::Uniform,
                (Some(WeightsArg::Sigmas) | None, Some(s)) => AlphaWeights::Sigmas(s),
                (Some(WeightsArg::Sigmas), None) => {
                    return Err(Failure::Input(format!(
                        "{}: --weights sigmas needs a sigma_mhz column",
                        common.input.display()
                    )))
                }
            };
            let r = fit_cubic_alpha(&pts, &w)?;
            let alpha = r.params["alpha"];
            let data: Vec<(f64, f64)> = pts.iter().map(|p| (p.f_gs, p.delta_gamma)).collect();
            let f_max = pts.iter().map(|p| p.f_gs).fold(0.0, f64::max);
            let model = (0..=100)
                .map(|k| {
                    let f = f_max * k as f64 / 100.0;
                    (f, crate::physics::cubic_broadening(f, alpha))
                })
                .collect();
            let curve = Curve {
                title: "linewidth difference".into(),
                x_label: "ground-state splitting (GHz)",
                y_label: "delta gamma (MHz)",
                data,
                model,
            };
            (common, r, curve)
        }
        FitCommand::Tempseries { common, emitter, free_alpha, below_20k } => {
            let base = reg.resolve(&emitter)?;
            let pts = io::load_temperature_series(&common.input)?;
            let opts = TempSeriesOptions {
                free: if free_alpha { FreeParams::GammaOthersAndAlpha } else { FreeParams::GammaOthers },
                exclude_above_validity: below_20k,
                ..Default::default()
            };
            let r = fit_temperature_series(&pts, &base, &opts)?;
            let mut fitted = base.clone();
            fitted.gamma_others = r.params["gamma_others"];
            if let Some(a) = r.param("alpha_gs") {
                fitted.alpha_gs = a;
            }
            let data: Vec<(f64, f64)> = pts.iter().map(|p| (p.temperature, p.linewidth)).collect();
            let t_max = data.iter().map(|d| d.0).fold(0.0, f64::max);
            let model = (0..=100)
                .map(|k| {
                    let t = t_max * k as f64 / 100.0;
                    linewidth_c(&fitted, t).map(|l| (t, l.total))
                })
                .collect::<Result<Vec<_>>>()?;
            let curve = Curve {
                title: format!("{} C-line width", base.name),
                x_label: "temperature (K)",
                y_label: "linewidth (MHz)",
                data,
                model,
            };
            (common, r, curve)
        }
    };

    io::emit_fit_report(&report, &common.out)?;
    if let Some(path) = &common.curve {
        write_curve_csv(path, &curve)?;
    }
    if let Some(path) = &common.svg {
        let text = svg::plot(&curve.title, curve.x_label, curve.y_label, &curve.data, &curve.model);
        write(path, &text)?;
    }
    summarize(&report, out);
    warnings.extend(report.warnings.iter().cloned());
    Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.6e}")
    }
}

fn summarize(r: &FitReport, out: &mut String) {
    let _ = writeln!(out, "model: {}", r.model);
    for (name, v) in &r.params {
        let unit = r.units.get(name).map_or("", String::as_str);
        match r.std_errors.get(name) {
            Some(e) => {
                let _ = writeln!(out, "  {name} = {} +/- {e:.2e} {unit}", num(*v));
            }
            None => {
                let _ = writeln!(out, "  {name} = {} {unit}", num(*v));
            }
        }
    }
    for (name, v) in &r.derived {
        let _ = writeln!(out, "  [{name}] = {}", num(*v));
    }
    let _ = writeln!(
        out,
        "reduced chi2 = {:.4}, iterations = {}, converged = {}",
        r.reduced_chi2, r.n_iterations, r.converged
    );
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        io::ensure_dir(dir)?;
    }
    io::write_file(path, text)
}

fn write_curve_csv(path: &Path, c: &Curve) -> Result<()> {
    let mut s = String::from("x,data,model\n");
    if c.model.len() == c.data.len() && c.model.iter().zip(&c.data).all(|(m, d)| m.0 == d.0) {
        for (d, m) in c.data.iter().zip(&c.model) {
            let _ = writeln!(s, "{},{},{}", format_f64(d.0), format_f64(d.1), format_f64(m.1));
        }
    } else {
        for d in &c.data {
            let _ = writeln!(s, "{},{},", format_f64(d.0), format_f64(d.1));
        }
        for m in &c.model {
            let _ = writeln!(s, "{},,{}", format_f64(m.0), format_f64(m.1));
        }
    }
    write(path, &s)
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes the data files and a manifest echoing the configuration and
/// the SHA-256 of every file.
fn write_outputs<C: Serialize>(
    dir: &Path,
    command: &str,
    config: &C,
    seed: u64,
    files: &[(String, String)],
    summary: serde_json::Value,
) -> Result<()> {
    use sha2::{Digest, Sha256};
    io::ensure_dir(dir)?;
    let mut listed = Vec::new();
    for (name, text) in files {
        io::write_file(&dir.join(name), text)?;
        listed.push(json!({"name": name, "sha256": hex::encode(Sha256::digest(text.as_bytes()))}));
    }
    let manifest = json!({
        "command": command,
        "toolkit_version": crate::TOOLKIT_VERSION,
        "seed": seed,
        "config": config,
        "files": listed,
        "summary": summary,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    io::write_file(&dir.join("manifest.json"), &text)
}

fn simulate(cmd: SimulateCommand, out: &mut String, warnings: &mut Vec<String>) -> CmdResult {
    match cmd {
        SimulateCommand::Ple(a) => {
            let mut cfg: ScanSeriesConfig = load_config(&a.config)?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if cfg.n_scans != 1 {
                warnings.push(format!("n_scans = {} ignored; simulating one scan", cfg.n_scans));
                cfg.n_scans = 1;
            }
            let fwhm = cfg.linewidth()?;
            let s = simulate_ple_scan(&cfg)?;
            let files = vec![("spectrum.csv".to_string(), io::spectrum_to_csv(&s))];
            write_outputs(&a.out, "simulate ple", &cfg, cfg.seed, &files, json!({"fwhm_mhz": fwhm}))?;
            let _ = writeln!(out, "wrote {} points (fwhm {:.4} MHz) to {}", s.len(), fwhm, a.out.display());
        }
        SimulateCommand::Series(a) => {
            let mut cfg: ScanSeriesConfig = load_config(&a.config)?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            let r = simulate_scan_series(&cfg)?;
            let mut files: Vec<(String, String)> = r
                .scans
                .iter()
                .enumerate()
                .map(|(k, s)| (format!("scan_{k:04}.csv"), io::spectrum_to_csv(s)))
                .collect();
            files.push(("events.csv".into(), io::events_to_csv(&r.events)));
            let summary = json!({
                "fwhm_mhz": r.fwhm,
                "bright_fraction": r.bright_fraction,
                "centers_mhz": r.centers,
            });
            write_outputs(&a.out, "simulate series", &cfg, cfg.seed, &files, summary)?;
            let _ = writeln!(
                out,
                "wrote {} scans, {} events, bright fraction {:.4} to {}",
                r.scans.len(),
                r.events.len(),
                r.bright_fraction,
                a.out.display()
            );
        }
        SimulateCommand::Trpl(a) => {
            let mut cfg: TrplConfig = load_config(&a.config)?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            let r = simulate_trpl(&cfg)?;
            warnings.extend(r.warnings.iter().cloned());
            let files = vec![("trace.csv".to_string(), io::decay_trace_to_csv(&r.trace))];
            let summary = json!({"recorded": r.trace.total_counts(), "dropped": r.dropped});
            write_outputs(&a.out, "simulate trpl", &cfg, cfg.seed, &files, summary)?;
            let _ = writeln!(
                out,
                "wrote {} bins ({} counts) to {}",
                r.trace.len(),
                r.trace.total_counts(),
                a.out.display()
            );
        }
        SimulateCommand::Hbt(a) => {
            let mut cfg: HbtConfig = load_config(&a.config)?;
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            let r = simulate_hbt(&cfg)?;
            let h = &r.histogram;
            let expected: Vec<f64> = h.tau_bins.iter().map(|&t| cfg.expected_g2_bin(t)).collect();
            let files = vec![("g2.csv".to_string(), io::correlation_to_csv(h, &expected))];
            let summary = json!({
                "g2_zero": h.g2_zero(),
                "tau_c_ns": r.tau_c,
                "detector_counts": r.detector_counts,
            });
            write_outputs(&a.out, "simulate hbt", &cfg, cfg.seed, &files, summary)?;
            let _ = writeln!(
                out,
                "g2(0) = {:.4} (expected {:.4}), tau_c = {:.4} ns; wrote {}",
                h.g2_zero(),
                expected[h.zero_index()],
                r.tau_c,
                a.out.display()
            );
        }
    }
    Ok(EXIT_OK)
}

fn emitters(reg: &EmitterRegistry, cmd: EmittersCommand, out: &mut String) -> CmdResult {
    match cmd {
        EmittersCommand::List { format } => {
            let all: Vec<_> = reg.iter().collect();
            match format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&all).map_err(Error::from)?);
                }
                Format::Csv => {
                    let _ = writeln!(out, "name,f_gs_ghz,f_es_ghz,gamma0_mhz,lifetime_ns,alpha_gs,alpha_es,gamma_others_mhz");
                    for p in all {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{},{}",
                            p.name,
                            format_f64(p.f_gs),
                            format_f64(p.f_es),
                            format_f64(p.gamma0),
                            format_f64(p.lifetime),
                            format_f64(p.alpha_gs),
                            format_f64(p.alpha_es),
                            format_f64(p.gamma_others)
                        );
                    }
                }
                Format::Table => {
                    let _ = writeln!(
                        out,
                        "{:<6} {:>8} {:>8} {:>10} {:>12} {:>10} {:>10} {:>14}",
                        "name", "f_gs", "f_es", "gamma0", "lifetime", "alpha_gs", "alpha_es", "gamma_others"
                    );
                    let _ = writeln!(
                        out,
                        "{:<6} {:>8} {:>8} {:>10} {:>12} {:>10} {:>10} {:>14}",
                        "", "GHz", "GHz", "MHz", "ns", "GHz^-2", "GHz^-2", "MHz"
                    );
                    for p in all {
                        let _ = writeln!(
                            out,
                            "{:<6} {:>8} {:>8} {:>10} {:>12.4} {:>10.3e} {:>10.3e} {:>14}",
                            p.name, p.f_gs, p.f_es, p.gamma0, p.lifetime, p.alpha_gs, p.alpha_es, p.gamma_others
                        );
                    }
                }
            }
        }
        EmittersCommand::Show { name, format } => {
            let p = reg.resolve(&name)?;
            match format {
                Format::Json | Format::Csv => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&p).map_err(Error::from)?);
                }
                Format::Table => {
                    let _ = writeln!(out, "name          {}", p.name);
                    let _ = writeln!(out, "f_gs          {} GHz", p.f_gs);
                    let _ = writeln!(out, "f_es          {} GHz", p.f_es);
                    let _ = writeln!(out, "gamma0        {} MHz", p.gamma0);
                    let _ = writeln!(out, "lifetime      {:.4} ns", p.lifetime);
                    let _ = writeln!(out, "alpha_gs      {:e} GHz^-2", p.alpha_gs);
                    let _ = writeln!(out, "alpha_es      {:e} GHz^-2", p.alpha_es);
                    let _ = writeln!(out, "gamma_others  {} MHz", p.gamma_others);
                    if let Some(d) = p.dw_fraction {
                        let _ = writeln!(out, "dw_fraction   {d}");
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}
