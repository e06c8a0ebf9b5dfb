//! Plain-text field format: a `# R=<R> N=<N>` header followed by `r,phi` rows.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};

pub fn write_field_csv(f: &RadialField) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(48 * g.len());
    let _ = writeln!(out, "# R={} N={}", g.radius(), g.intervals());
    for (r, v) in g.nodes().iter().zip(f.values()) {
        let _ = writeln!(out, "{r:.16e},{v:.16e}");
    }
    out
}

pub fn parse_field_csv(text: &str) -> Result<RadialField> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field file".into()))?;
    let (radius, intervals) = parse_header(header)?;

    let mut rs = Vec::new();
    let mut values = Vec::new();
    for (no, line) in lines {
        let (r, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `r,phi`", no + 1)))?;
        let r = parse_f64(r, no)?;
        let v = parse_f64(v, no)?;
        rs.push(r);
        values.push(v);
        if rs.len() > intervals + 1 {
            return Err(Error::Parse(format!(
                "more than N+1 = {} rows",
                intervals + 1
            )));
        }
    }
    if rs.len() != intervals + 1 {
        return Err(Error::Parse(format!(
            "expected {} rows, found {}",
            intervals + 1,
            rs.len()
        )));
    }
    let grid = RadialGrid::new(radius, intervals)?;
    let tol = 1e-9 * radius.max(1.0);
    for (i, (r, node)) in rs.iter().zip(grid.nodes()).enumerate() {
        if (r - node).abs() > tol {
            return Err(Error::Parse(format!(
                "row {i}: r = {r} does not match grid node {node}"
            )));
        }
    }
    RadialField::new(grid, values)
}

fn parse_header(line: &str) -> Result<(f64, usize)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing `# R=<R> N=<N>` header".into()))?;
    let mut radius = None;
    let mut intervals = None;
    for tok in body.split_whitespace() {
        if let Some(v) = tok.strip_prefix("R=") {
            radius = v.parse::<f64>().ok();
        } else if let Some(v) = tok.strip_prefix("N=") {
            intervals = v.parse::<usize>().ok();
        }
    }
    match (radius, intervals) {
        (Some(r), Some(n)) => Ok((r, n)),
        _ => Err(Error::Parse(format!("malformed header `{line}`"))),
    }
}

fn parse_f64(s: &str, no: usize) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {}: bad number `{}`", no + 1, s.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("line {}: non-finite value", no + 1)))
    }
}

pub fn read_field(path: impl AsRef<Path>) -> Result<RadialField> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_field_csv(&text)
}

pub fn write_field(path: impl AsRef<Path>, f: &RadialField) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_field_csv(f)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Comma-separated reals, e.g. `0.2,1/3,0.5`. Simple fractions `p/q` are accepted.
pub fn parse_value_list(s: &str) -> Result<Vec<f64>> {
    let out: Result<Vec<f64>> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_real)
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err(Error::Parse("empty value list".into()));
    }
    Ok(out)
}

pub fn parse_real(t: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("bad number `{t}`"));
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => t.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}
