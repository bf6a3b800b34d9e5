//! File formats and float formatting shared by the commands.
//!
//! Every float written to disk uses 17 significant digits in exponent
//! notation with a dot decimal separator, so output files are
//! byte-reproducible, locale-independent, and round-trip exactly through
//! `f64` parsing.
//!
//! Formats:
//! - dataset CSV: header `x1,..,xN,y1,..,yM`, one exemplar per row;
//! - weights file: a `dims,<n0>,<n1>,...` header line followed by the flat
//!   weight vector, one value per line (layer-ordered, column-major);
//! - manifest: flat `key=value` lines describing a command's resolved
//!   configuration and artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use matbp::{NetworkSpec, TrainingSet, Vector, WeightVector};

/// 17-significant-digit exponent formatting (1 leading + 16 fractional).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_text(path: &Path, content: &str) -> Result<(), String> {
    fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Writes a `key=value` manifest next to a command's outputs.
pub fn write_manifest(path: &Path, entries: &[(&str, String)]) -> Result<(), String> {
    let mut out = String::new();
    for (k, v) in entries {
        writeln!(out, "{k}={v}").unwrap();
    }
    write_text(path, &out)
}

pub fn dims_to_string(dims: &[usize]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

/// Serializes a training set with an `x1..xN,y1..yM` header row.
pub fn dataset_to_csv(set: &TrainingSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=set.input_dim())
        .map(|i| format!("x{i}"))
        .chain((1..=set.target_dim()).map(|i| format!("y{i}")))
        .collect();
    writeln!(out, "{}", header.join(",")).unwrap();
    for (x, y) in set.iter() {
        let row: Vec<String> = x.iter().chain(y.iter()).map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

/// Parses a dataset CSV, checking column counts against the network spec.
/// Errors name the 1-based file line.
pub fn dataset_from_csv(content: &str, spec: &NetworkSpec) -> Result<TrainingSet, String> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or("dataset file is empty")?;
    let columns: Vec<&str> = header.split(',').collect();
    let x_cols = columns.iter().take_while(|c| c.starts_with('x')).count();
    let y_cols = columns.len() - x_cols;
    if columns[x_cols..].iter().any(|c| !c.starts_with('y')) {
        return Err("line 1: header must list x-columns followed by y-columns".into());
    }
    if x_cols != spec.input_dim() || y_cols != spec.output_dim() {
        return Err(format!(
            "line 1: dataset has {x_cols} feature and {y_cols} target columns, network requires {} and {}",
            spec.input_dim(),
            spec.output_dim()
        ));
    }

    let mut exemplars = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != x_cols + y_cols {
            return Err(format!(
                "line {line_no}: expected {} fields, found {}",
                x_cols + y_cols,
                fields.len()
            ));
        }
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| format!("line {line_no}: cannot parse '{f}' as a number"))?;
            values.push(v);
        }
        exemplars.push((
            Vector::from_slice(&values[..x_cols]),
            Vector::from_slice(&values[x_cols..]),
        ));
    }
    TrainingSet::new(exemplars).map_err(|e| e.to_string())
}

/// Serializes a flat weight vector with its dims header.
pub fn weights_to_text(wv: &WeightVector) -> String {
    let mut out = String::new();
    writeln!(out, "dims,{}", dims_to_string(wv.spec().dims())).unwrap();
    for &v in wv.as_slice() {
        writeln!(out, "{}", fmt_f64(v)).unwrap();
    }
    out
}

/// Parses a weights file against the expected spec.
pub fn weights_from_text(content: &str, spec: &NetworkSpec) -> Result<WeightVector, String> {
    let mut lines = content.lines();
    let header = lines.next().ok_or("weights file is empty")?;
    let Some(dims_str) = header.strip_prefix("dims,") else {
        return Err("line 1: weights file must start with a 'dims,...' header".into());
    };
    let dims: Vec<usize> = dims_str
        .split(',')
        .map(|d| d.trim().parse().map_err(|_| format!("line 1: bad dimension '{d}'")))
        .collect::<Result<_, String>>()?;
    if dims != spec.dims() {
        return Err(format!(
            "weights file dims ({}) do not match requested dims ({})",
            dims_to_string(&dims),
            dims_to_string(spec.dims())
        ));
    }

    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|_| format!("line {}: cannot parse '{line}' as a number", idx + 2))?;
        if !v.is_finite() {
            return Err(format!("line {}: non-finite weight value", idx + 2));
        }
        values.push(v);
    }
    if values.len() != spec.param_count() {
        return Err(format!(
            "weights file has {} values, spec requires {}",
            values.len(),
            spec.param_count()
        ));
    }
    WeightVector::new(spec.clone(), Vector::from_vec(values)).map_err(|e| e.to_string())
}
