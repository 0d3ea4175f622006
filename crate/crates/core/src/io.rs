//! On-disk formats.
//!
//! Array data are CSV files with a fixed header row. Lines starting with `#`
//! are comments; comments of the form `# key=value` carry metadata. Numbers
//! are written in shortest round-trip form, so save/load is lossless.
//!
//! ```text
//! # temperature_k=6.2
//! # emitter=PbV
//! detuning_mhz,counts
//! -200.0,11.0
//! -196.0,9.0
//! ```
//!
//! Records (fit reports, emitter parameters, simulation configs) are JSON
//! objects.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fitting::{
    DecayMeta, DecayTrace, FitReport, SplittingPoint, Spectrum, SpectrumMeta, TempPoint,
};
use crate::physics::{
    lifetime_from_linewidth, transform_limit, EmitterParams, LinewidthBreakdown, Transition,
};
use crate::simulate::{CorrelationHistogram, SeriesEvent};

pub const SPECTRUM_HEADER: [&str; 2] = ["detuning_mhz", "counts"];
pub const DECAY_HEADER: [&str; 2] = ["time_ns", "counts"];
pub const ALPHA_HEADER: [&str; 2] = ["f_gs_ghz", "delta_gamma_mhz"];
pub const TEMPSERIES_HEADER: [&str; 2] = ["temperature_k", "linewidth_mhz"];
pub const CORRELATION_HEADER: [&str; 4] = ["tau_ns", "g2", "coincidences", "expected"];
pub const LINEWIDTH_HEADER: [&str; 7] = [
    "temperature_k",
    "linewidth_mhz",
    "gamma0_mhz",
    "gamma_others_mhz",
    "gs_term_mhz",
    "es_term_mhz",
    "beyond_validity",
];
pub const EVENTS_HEADER: [&str; 5] = ["scan_index", "kind", "time_s", "laser_detuning_mhz", "center_mhz"];

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// SHA-256 (hex) of the canonical data block: one line per row, columns
/// joined by `,`, values in [`format_f64`] form, `\n` after every row.
pub fn data_digest(columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut hasher = Sha256::new();
    let mut line = String::new();
    for i in 0..rows {
        line.clear();
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_f64(col[i]));
        }
        line.push('\n');
        hasher.update(line.as_bytes());
    }
    hex::encode(hasher.finalize())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

struct Table {
    meta: BTreeMap<String, (u64, String)>,
    /// `(line number, values)`; optional trailing columns are `NaN` when absent.
    rows: Vec<(u64, Vec<f64>)>,
    n_columns: usize,
}

/// Reads a numeric CSV whose header starts with `required` and may continue
/// with the names in `optional`.
fn read_table(path: &Path, required: &[&str], optional: &[&str]) -> Result<Table> {
    parse_table(&read_text(path)?, path, required, optional)
}

fn parse_table(text: &str, path: &Path, required: &[&str], optional: &[&str]) -> Result<Table> {
    let mut meta = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        if let Some((k, v)) = rest.split_once('=') {
            meta.insert(k.trim().to_string(), ((i + 1) as u64, v.trim().to_string()));
        }
    }
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(0, e.to_string()))?
        .clone();
    let header_line = header.position().map_or(1, |p| p.line());
    let names: Vec<&str> = header.iter().collect();
    let ok_prefix = names.len() >= required.len() && names[..required.len()] == *required;
    let extra = &names[required.len().min(names.len())..];
    let ok_extra = extra.len() <= optional.len() && extra.iter().zip(optional).all(|(a, b)| a == b);
    if !ok_prefix || !ok_extra {
        let mut want = required.join(",");
        for o in optional {
            let _ = write!(want, "[,{o}]");
        }
        return Err(parse_err(
            header_line,
            format!("expected header '{want}', found '{}'", names.join(",")),
        ));
    }
    let n_columns = names.len();

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != n_columns {
            return Err(parse_err(
                line,
                format!("expected {n_columns} fields, found {}", rec.len()),
            ));
        }
        let mut vals = Vec::with_capacity(n_columns);
        for (field, name) in rec.iter().zip(&names) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("{name}: cannot parse '{field}' as a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("{name}: non-finite value")));
            }
            vals.push(v);
        }
        rows.push((line, vals));
    }
    Ok(Table {
        meta,
        rows,
        n_columns,
    })
}

fn meta_f64(path: &Path, meta: &BTreeMap<String, (u64, String)>, key: &str) -> Result<Option<f64>> {
    meta.get(key)
        .map(|(line, v)| {
            v.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("{key}: cannot parse '{v}' as a number"),
            })
        })
        .transpose()
}

fn meta_u64(path: &Path, meta: &BTreeMap<String, (u64, String)>, key: &str) -> Result<Option<u64>> {
    meta.get(key)
        .map(|(line, v)| {
            v.parse::<u64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("{key}: cannot parse '{v}' as an integer"),
            })
        })
        .transpose()
}

fn check_increasing(path: &Path, rows: &[(u64, Vec<f64>)]) -> Result<()> {
    for w in rows.windows(2) {
        if w[1].1[0] <= w[0].1[0] {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: w[1].0,
                message: format!(
                    "non-monotonic: {} follows {}",
                    format_f64(w[1].1[0]),
                    format_f64(w[0].1[0])
                ),
            });
        }
    }
    Ok(())
}

fn check_nonnegative(path: &Path, rows: &[(u64, Vec<f64>)], col: usize, what: &str) -> Result<()> {
    if let Some((line, _)) = rows.iter().find(|(_, v)| v[col] < 0.0) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            message: format!("{what} must be nonnegative"),
        });
    }
    Ok(())
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Spectrum> {
    let path = path.as_ref();
    let table = read_table(path, &SPECTRUM_HEADER, &[])?;
    if table.rows.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            message: "empty spectrum: no data rows".into(),
        });
    }
    check_increasing(path, &table.rows)?;
    check_nonnegative(path, &table.rows, 1, "counts")?;
    let meta = SpectrumMeta {
        temperature_k: meta_f64(path, &table.meta, "temperature_k")?,
        power_nw: meta_f64(path, &table.meta, "power_nw")?,
        scan_index: meta_u64(path, &table.meta, "scan_index")?,
        emitter: table.meta.get("emitter").map(|(_, v)| v.clone()),
    };
    let (x, y) = table.rows.into_iter().map(|(_, v)| (v[0], v[1])).unzip();
    Ok(Spectrum::new(x, y)?.with_meta(meta))
}

pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::new();
    let m = &s.meta;
    if let Some(v) = m.temperature_k {
        let _ = writeln!(out, "# temperature_k={}", format_f64(v));
    }
    if let Some(v) = m.power_nw {
        let _ = writeln!(out, "# power_nw={}", format_f64(v));
    }
    if let Some(v) = m.scan_index {
        let _ = writeln!(out, "# scan_index={v}");
    }
    if let Some(v) = &m.emitter {
        let _ = writeln!(out, "# emitter={v}");
    }
    out.push_str(&SPECTRUM_HEADER.join(","));
    out.push('\n');
    for (x, y) in s.detunings().iter().zip(s.counts()) {
        let _ = writeln!(out, "{},{}", format_f64(*x), format_f64(*y));
    }
    out
}

pub fn save_spectrum(s: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &spectrum_to_csv(s))
}

pub fn load_decay_trace(path: impl AsRef<Path>) -> Result<DecayTrace> {
    let path = path.as_ref();
    let table = read_table(path, &DECAY_HEADER, &[])?;
    if table.rows.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            message: "empty decay trace: no data rows".into(),
        });
    }
    check_increasing(path, &table.rows)?;
    let mut counts = Vec::with_capacity(table.rows.len());
    for (line, v) in &table.rows {
        let c = v[1];
        if c < 0.0 || c.fract() != 0.0 || c > 9.007_199_254_740_992e15 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("counts must be a nonnegative integer, got {}", format_f64(c)),
            });
        }
        counts.push(c as u64);
    }
    let times: Vec<f64> = table.rows.iter().map(|(_, v)| v[0]).collect();
    let mut trace = DecayTrace::new(times, counts).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    trace.meta = DecayMeta {
        bin_width_ns: meta_f64(path, &table.meta, "bin_width_ns")?.or(Some(trace.bin_width())),
        excitation_wavelength_nm: meta_f64(path, &table.meta, "excitation_wavelength_nm")?,
    };
    Ok(trace)
}

pub fn decay_trace_to_csv(t: &DecayTrace) -> String {
    let mut out = String::new();
    if let Some(v) = t.meta.bin_width_ns {
        let _ = writeln!(out, "# bin_width_ns={}", format_f64(v));
    }
    if let Some(v) = t.meta.excitation_wavelength_nm {
        let _ = writeln!(out, "# excitation_wavelength_nm={}", format_f64(v));
    }
    out.push_str(&DECAY_HEADER.join(","));
    out.push('\n');
    for (x, c) in t.bin_centers().iter().zip(t.counts()) {
        let _ = writeln!(out, "{},{c}", format_f64(*x));
    }
    out
}

pub fn save_decay_trace(t: &DecayTrace, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &decay_trace_to_csv(t))
}

/// Reads `f_gs_ghz,delta_gamma_mhz[,sigma_mhz]`. Returns the sigmas only if
/// the column is present.
pub fn load_alpha_points(path: impl AsRef<Path>) -> Result<(Vec<SplittingPoint>, Option<Vec<f64>>)> {
    let path = path.as_ref();
    let table = read_table(path, &ALPHA_HEADER, &["sigma_mhz"])?;
    if table.rows.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            message: "no splitting points".into(),
        });
    }
    for (line, v) in &table.rows {
        if v.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: "all values must be positive".into(),
            });
        }
    }
    let pts = table
        .rows
        .iter()
        .map(|(_, v)| SplittingPoint {
            f_gs: v[0],
            delta_gamma: v[1],
        })
        .collect();
    let sigmas = (table.n_columns == 3).then(|| table.rows.iter().map(|(_, v)| v[2]).collect());
    Ok((pts, sigmas))
}

/// Reads `temperature_k,linewidth_mhz[,sigma_mhz]`.
pub fn load_temperature_series(path: impl AsRef<Path>) -> Result<Vec<TempPoint>> {
    let path = path.as_ref();
    let table = read_table(path, &TEMPSERIES_HEADER, &["sigma_mhz"])?;
    if table.rows.is_empty() {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            message: "no temperature points".into(),
        });
    }
    check_nonnegative(path, &table.rows, 0, "temperature_k")?;
    if table.n_columns == 3 {
        if let Some((line, _)) = table.rows.iter().find(|(_, v)| !(v[2] > 0.0)) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: "sigma_mhz must be positive".into(),
            });
        }
    }
    Ok(table
        .rows
        .iter()
        .map(|(_, v)| TempPoint {
            temperature: v[0],
            linewidth: v[1],
            sigma: v.get(2).copied(),
        })
        .collect())
}

/// Linewidth predictions of one emitter and transition. The first two
/// columns follow the temperature-series layout.
pub fn linewidth_table_to_csv(emitter: &str, rows: &[LinewidthBreakdown]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# emitter={emitter}");
    if let Some(r) = rows.first() {
        let _ = writeln!(out, "# transition={}", r.transition);
    }
    out.push_str(&LINEWIDTH_HEADER.join(","));
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_f64(r.temperature),
            format_f64(r.total),
            format_f64(r.gamma0),
            format_f64(r.gamma_others),
            format_f64(r.gs_term),
            format_f64(r.es_term),
            u8::from(r.beyond_validity())
        );
    }
    out
}

/// Parses the output of [`linewidth_table_to_csv`]. `source` names the
/// input in error messages.
pub fn parse_linewidth_table(text: &str, source: impl AsRef<Path>) -> Result<Vec<LinewidthBreakdown>> {
    let path = source.as_ref();
    let table = parse_table(text, path, &LINEWIDTH_HEADER, &[])?;
    let transition = match table.meta.get("transition").map(|(_, v)| v.as_str()) {
        None | Some("C") | Some("c") => Transition::C,
        Some("D") | Some("d") => Transition::D,
        Some(other) => {
            let line = table.meta["transition"].0;
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("unknown transition '{other}'"),
            });
        }
    };
    Ok(table
        .rows
        .iter()
        .map(|(_, v)| LinewidthBreakdown {
            transition,
            temperature: v[0],
            total: v[1],
            gamma0: v[2],
            gamma_others: v[3],
            gs_term: v[4],
            es_term: v[5],
        })
        .collect())
}

/// Correlation histogram next to the model expectation for each bin.
pub fn correlation_to_csv(h: &CorrelationHistogram, expected: &[f64]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# normalization={}", format_f64(h.normalization));
    out.push_str(&CORRELATION_HEADER.join(","));
    out.push('\n');
    for (i, tau) in h.tau_bins.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_f64(*tau),
            format_f64(h.g2[i]),
            h.coincidence_counts[i],
            format_f64(expected[i])
        );
    }
    out
}

pub fn events_to_csv(events: &[SeriesEvent]) -> String {
    let mut out = EVENTS_HEADER.join(",");
    out.push('\n');
    for e in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.scan_index,
            e.kind.as_str(),
            format_f64(e.time),
            format_f64(e.laser_detuning),
            format_f64(e.center)
        );
    }
    out
}

pub fn fit_report_to_json(r: &FitReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_fit_report(r: &FitReport, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &fit_report_to_json(r)?)
}

pub fn load_fit_report(path: impl AsRef<Path>) -> Result<FitReport> {
    let path = path.as_ref();
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Emitter file layout. Either `lifetime` or `gamma0` may be omitted and is
/// then derived from the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterFile {
    pub name: String,
    pub f_gs: f64,
    pub f_es: f64,
    #[serde(default)]
    pub lifetime: Option<f64>,
    #[serde(default)]
    pub gamma0: Option<f64>,
    pub alpha_gs: f64,
    pub alpha_es: f64,
    #[serde(default)]
    pub gamma_others: Option<f64>,
    #[serde(default)]
    pub dw_fraction: Option<f64>,
}

impl EmitterFile {
    pub fn into_params(self) -> Result<EmitterParams> {
        let (lifetime, gamma0) = match (self.lifetime, self.gamma0) {
            (Some(l), Some(g)) => (l, g),
            (Some(l), None) => (l, transform_limit(l)?),
            (None, Some(g)) => (lifetime_from_linewidth(g)?, g),
            (None, None) => {
                return Err(Error::InvalidParams(
                    "one of 'lifetime' or 'gamma0' is required".into(),
                ))
            }
        };
        let p = EmitterParams {
            name: self.name,
            f_gs: self.f_gs,
            f_es: self.f_es,
            lifetime,
            gamma0,
            alpha_gs: self.alpha_gs,
            alpha_es: self.alpha_es,
            gamma_others: self.gamma_others.unwrap_or(0.0),
            dw_fraction: self.dw_fraction,
        };
        p.validate()?;
        Ok(p)
    }
}

pub fn parse_emitter_json(text: &str) -> Result<EmitterParams> {
    let file: EmitterFile = serde_json::from_str(text)?;
    file.into_params()
}

pub fn load_emitter_file(path: impl AsRef<Path>) -> Result<EmitterParams> {
    let path = path.as_ref();
    let schema = |message: String| Error::Schema {
        path: path.to_path_buf(),
        message,
    };
    let file: EmitterFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| schema(e.to_string()))?;
    file.into_params().map_err(|e| schema(e.to_string()))
}

pub fn save_emitter_file(p: &EmitterParams, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(p)?;
    s.push('\n');
    write_text(path.as_ref(), &s)
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.to_path_buf())
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    write_text(path, text)
}
