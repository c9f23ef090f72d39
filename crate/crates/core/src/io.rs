//! On-disk formats: coefficient grids, dual windows, trajectories and signal
//! tables as CSV, metadata and reports as canonical JSON. Floats are written
//! with 17 significant digits and object keys sorted, so identical inputs
//! give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{GaborError, Result};
use crate::frame::DualWindow;
use crate::model::{CoefficientGrid, Extension, IndexRange, Lattice, SampledTable};

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Canonical JSON: sorted keys, two-space indent, floats in [`format_float`]
/// form, non-finite floats as `null`.
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat("  ").take(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                let _ = write!(out, "{n}");
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&if x.is_finite() { format_float(x) } else { "null".into() });
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[key.as_str()], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| GaborError::Usage(format!("`{}` is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    write_atomic(path, to_canonical_json(value).as_bytes())
}

/// `foo/bar.csv` → `foo/bar.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    pub alpha: f64,
    pub beta: f64,
    pub k_range: IndexRange,
    pub n_range: IndexRange,
    pub signal_id: String,
    pub window_id: String,
}

pub fn grid_csv(grid: &CoefficientGrid) -> String {
    let mut out = String::from("k,n,re,im\n");
    for (k, n, v) in grid.iter() {
        let _ = writeln!(out, "{k},{n},{},{}", format_float(v.re), format_float(v.im));
    }
    out
}

/// Writes `path` (rows k-major, then n) and its sidecar.
pub fn write_grid(path: &Path, grid: &CoefficientGrid) -> Result<()> {
    let lat = grid.lattice();
    let meta = GridMeta {
        alpha: lat.alpha,
        beta: lat.beta,
        k_range: lat.k_range,
        n_range: lat.n_range,
        signal_id: grid.signal_id().into(),
        window_id: grid.window_id().into(),
    };
    write_atomic(path, grid_csv(grid).as_bytes())?;
    write_json(&sidecar_path(path), &serde_json::to_value(meta).expect("metadata serializes"))
}

fn csv_error(e: csv::Error) -> GaborError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    GaborError::Parse {
        line,
        message: e.to_string(),
    }
}

/// Reads numeric CSV rows after checking the header; every row comes back
/// with its line number.
fn read_rows(text: &str, header: &[&str]) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let found: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(GaborError::Parse {
            line: 1,
            message: format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let values = record
            .iter()
            .zip(header)
            .map(|(field, name)| {
                field.parse::<f64>().map_err(|_| GaborError::Parse {
                    line,
                    message: format!("column `{name}`: `{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| GaborError::Config(format!("cannot read `{}`: {e}", path.display())))
}

fn as_index(v: f64, line: usize, name: &str) -> Result<i64> {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Ok(v as i64)
    } else {
        Err(GaborError::Parse {
            line,
            message: format!("column `{name}` must hold integers, found {v}"),
        })
    }
}

/// Parses a `k,n,re,im` CSV. The index ranges come from the rows, which
/// must fill a rectangle; `meta` supplies `α, β` and provenance (1, 1 and
/// `unknown` without it) and must agree with the rows.
pub fn parse_grid(text: &str, meta: Option<&GridMeta>) -> Result<CoefficientGrid> {
    let rows = read_rows(text, &["k", "n", "re", "im"])?;
    if rows.is_empty() {
        return Err(GaborError::Parse {
            line: 2,
            message: "grid CSV has no rows".into(),
        });
    }
    let mut nodes = BTreeMap::new();
    for (line, r) in &rows {
        let key = (as_index(r[0], *line, "k")?, as_index(r[1], *line, "n")?);
        if nodes.insert(key, Complex64::new(r[2], r[3])).is_some() {
            return Err(GaborError::Parse {
                line: *line,
                message: format!("duplicate node (k={}, n={})", key.0, key.1),
            });
        }
    }
    let (mut k, mut n) = (IndexRange::new(i64::MAX, i64::MIN), IndexRange::new(i64::MAX, i64::MIN));
    for &(a, b) in nodes.keys() {
        k = IndexRange::new(k.lo.min(a), k.hi.max(a));
        n = IndexRange::new(n.lo.min(b), n.hi.max(b));
    }
    if nodes.len() != k.len() * n.len() {
        return Err(GaborError::Parse {
            line: rows.last().map_or(0, |r| r.0),
            message: format!(
                "grid rows do not fill the rectangle k∈[{}, {}], n∈[{}, {}]",
                k.lo, k.hi, n.lo, n.hi
            ),
        });
    }
    let (alpha, beta, signal_id, window_id) = match meta {
        Some(m) => {
            if m.k_range != k || m.n_range != n {
                return Err(GaborError::Config(format!(
                    "sidecar ranges {:?}/{:?} disagree with the CSV rows {:?}/{:?}",
                    m.k_range, m.n_range, k, n
                )));
            }
            (m.alpha, m.beta, m.signal_id.clone(), m.window_id.clone())
        }
        None => (1.0, 1.0, "unknown".into(), "unknown".into()),
    };
    let lat = Lattice::new(alpha, beta, k, n)?;
    CoefficientGrid::new(lat, nodes.into_values().collect(), signal_id, window_id)
}

/// Reads a grid CSV together with its sidecar when one exists.
pub fn read_grid(path: &Path) -> Result<CoefficientGrid> {
    let text = read_text(path)?;
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let raw = read_text(&side)?;
        Some(serde_json::from_str::<GridMeta>(&raw).map_err(|e| GaborError::Parse {
            line: e.line(),
            message: format!("{}: {e}", side.display()),
        })?)
    } else {
        None
    };
    parse_grid(&text, meta.as_ref())
}

/// Two-column `t,value` table with a header line.
pub fn parse_signal_table(text: &str, extension: Extension) -> Result<SampledTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.len() != 2 {
        return Err(GaborError::Parse {
            line: 1,
            message: format!("a signal table has two columns (t,value), found {}", headers.len()),
        });
    }
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    let mut last_line = 1;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let parse = |i: usize| {
            record[i].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| GaborError::Parse {
                line,
                message: format!("`{}` is not a finite number", &record[i]),
            })
        };
        let t = parse(0)?;
        if ts.last().is_some_and(|&p| t <= p) {
            return Err(GaborError::Parse {
                line,
                message: "abscissae must be strictly increasing".into(),
            });
        }
        ts.push(t);
        vs.push(Complex64::new(parse(1)?, 0.0));
        last_line = line;
    }
    SampledTable::new(ts, vs, extension).map_err(|e| GaborError::Parse {
        line: last_line,
        message: e.to_string(),
    })
}

pub fn read_signal_table(path: &Path, extension: Extension) -> Result<SampledTable> {
    parse_signal_table(&read_text(path)?, extension)
}

pub fn dual_csv(dual: &DualWindow) -> String {
    let table = dual.table();
    let mut out = String::from("t,gamma_re,gamma_im\n");
    for (i, v) in table.values().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_float(table.abscissa(i)),
            format_float(v.re),
            format_float(v.im)
        );
    }
    out
}

pub fn dual_meta(dual: &DualWindow) -> Value {
    json!({
        "alpha": dual.alpha,
        "beta": dual.beta,
        "residual": dual.residual,
        "iterations": dual.iterations,
        "bounds": serde_json::to_value(dual.bounds).expect("bounds serialize"),
        "base_window": dual.base.name(),
        "contraction": dual.contraction,
        "edge_ratio": dual.edge_ratio,
        "residual_history": dual.residual_history,
    })
}

/// Writes the dual table and its sidecar.
pub fn write_dual(path: &Path, dual: &DualWindow) -> Result<()> {
    write_atomic(path, dual_csv(dual).as_bytes())?;
    write_json(&sidecar_path(path), &dual_meta(dual))
}

/// `x,n,re,im` rows in the given order.
pub fn trajectory_csv(rows: &[(f64, i64, Complex64)]) -> String {
    let mut out = String::from("x,n,re,im\n");
    for (x, n, v) in rows {
        let _ = writeln!(out, "{},{n},{},{}", format_float(*x), format_float(v.re), format_float(v.im));
    }
    out
}
