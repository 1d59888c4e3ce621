//! Prediction-file I/O: strict header-checked CSV with line-numbered
//! diagnostics. Decimal points only, UTF-8, one record per line.

use std::fmt;
use std::path::Path;

use uqcal::{GaussianPredictionSet, IntervalPredictionSet};

use crate::error::{CliError, CliResult};

pub const GAUSSIAN_HEADER: &str = "y,y_hat,sigma";
pub const INTERVAL_HEADER: &str = "y,lower,upper";
pub const TARGETS_HEADER: &str = "y";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Gaussian,
    Interval,
}

impl fmt::Display for FileFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileFormat::Gaussian => f.write_str("gaussian"),
            FileFormat::Interval => f.write_str("interval"),
        }
    }
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

/// Lines with their 1-based numbers; a trailing newline does not produce an
/// empty final record.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.is_empty())
}

fn header_of(text: &str) -> CliResult<&str> {
    let first = text.split('\n').next().unwrap_or("");
    let first = first.strip_suffix('\r').unwrap_or(first);
    let first = first.strip_prefix('\u{feff}').unwrap_or(first);
    if first.is_empty() {
        return Err(CliError::Data("line 1: missing header row".into()));
    }
    Ok(first)
}

/// Identify the format from the header row.
pub fn detect_format(text: &str) -> CliResult<FileFormat> {
    match header_of(text)? {
        GAUSSIAN_HEADER => Ok(FileFormat::Gaussian),
        INTERVAL_HEADER => Ok(FileFormat::Interval),
        other => Err(CliError::Data(format!(
            "line 1: unrecognized header '{other}' (expected '{GAUSSIAN_HEADER}' or '{INTERVAL_HEADER}')"
        ))),
    }
}

fn parse_field(raw: &str, line: usize, column: &str) -> CliResult<f64> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Data(format!("line {line}: cannot parse {column} value '{raw}'")))?;
    if !value.is_finite() {
        return Err(CliError::Data(format!(
            "line {line}: {column} value '{raw}' is not finite"
        )));
    }
    Ok(value)
}

fn split_row(row: &str, line: usize, expected: usize) -> CliResult<Vec<&str>> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != expected {
        return Err(CliError::Data(format!(
            "line {line}: expected {expected} comma-separated fields, found {}",
            fields.len()
        )));
    }
    Ok(fields)
}

/// Parse a `y,y_hat,sigma` file.
pub fn parse_gaussian(text: &str) -> CliResult<GaussianPredictionSet> {
    if header_of(text)? != GAUSSIAN_HEADER {
        return Err(CliError::Data(format!(
            "line 1: expected header '{GAUSSIAN_HEADER}'"
        )));
    }
    let mut y = Vec::new();
    let mut y_hat = Vec::new();
    let mut sigma = Vec::new();
    for (line, row) in lines(text).skip(1) {
        let fields = split_row(row, line, 3)?;
        y.push(parse_field(fields[0], line, "y")?);
        y_hat.push(parse_field(fields[1], line, "y_hat")?);
        let s = parse_field(fields[2], line, "sigma")?;
        if s <= 0.0 {
            return Err(CliError::Data(format!(
                "line {line}: sigma must be strictly positive, got {s}"
            )));
        }
        sigma.push(s);
    }
    if y.is_empty() {
        return Err(CliError::Data(
            "file contains a header but no records".into(),
        ));
    }
    GaussianPredictionSet::new(y, y_hat, sigma)
        .map_err(|e| CliError::Data(format!("invalid prediction set: {e}")))
}

/// Parse a `y,lower,upper` file at the given nominal confidence level.
pub fn parse_interval(text: &str, nominal_level: f64) -> CliResult<IntervalPredictionSet> {
    if header_of(text)? != INTERVAL_HEADER {
        return Err(CliError::Data(format!(
            "line 1: expected header '{INTERVAL_HEADER}'"
        )));
    }
    let mut y = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (line, row) in lines(text).skip(1) {
        let fields = split_row(row, line, 3)?;
        y.push(parse_field(fields[0], line, "y")?);
        let l = parse_field(fields[1], line, "lower")?;
        let u = parse_field(fields[2], line, "upper")?;
        if l > u {
            return Err(CliError::Data(format!(
                "line {line}: lower bound {l} exceeds upper bound {u}"
            )));
        }
        lower.push(l);
        upper.push(u);
    }
    if y.is_empty() {
        return Err(CliError::Data(
            "file contains a header but no records".into(),
        ));
    }
    IntervalPredictionSet::new(y, lower, upper, nominal_level)
        .map_err(|e| CliError::Data(format!("invalid interval set: {e}")))
}

/// Parse a single-column `y` file of regression targets.
pub fn parse_targets(text: &str) -> CliResult<Vec<f64>> {
    if header_of(text)? != TARGETS_HEADER {
        return Err(CliError::Data(format!(
            "line 1: expected header '{TARGETS_HEADER}'"
        )));
    }
    let mut y = Vec::new();
    for (line, row) in lines(text).skip(1) {
        let fields = split_row(row, line, 1)?;
        y.push(parse_field(fields[0], line, "y")?);
    }
    if y.is_empty() {
        return Err(CliError::Data(
            "file contains a header but no records".into(),
        ));
    }
    Ok(y)
}

/// Serialize a gaussian prediction set; numbers use the shortest
/// representation that parses back to the identical double.
pub fn write_gaussian(set: &GaussianPredictionSet) -> String {
    let mut out = String::from(GAUSSIAN_HEADER);
    out.push('\n');
    for ((y, m), s) in set.y().iter().zip(set.y_hat()).zip(set.sigma()) {
        out.push_str(&format!("{y},{m},{s}\n"));
    }
    out
}
