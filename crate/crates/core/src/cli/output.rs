use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::RunConfig;
use crate::{Error, Result};

/// One CSV file produced by a command, described by a column pattern.
///
/// Patterns are comma-separated tokens. `name{a..b}` expands to `name<a>`
/// through `name<b>`, where the bounds may use `n` (spins) and `k`
/// (levels), e.g. `P_{0..k-1}`. A trailing `?flag` keeps the token only
/// when `flag` is set.
#[derive(Clone, Copy, Debug)]
pub struct Schema {
    pub file: &'static str,
    pub pattern: &'static str,
}

/// Values that fix the concrete header of a [`Schema`].
#[derive(Clone, Debug, Default)]
pub struct SchemaContext {
    pub n: usize,
    pub k: usize,
    pub flags: BTreeSet<&'static str>,
}

impl SchemaContext {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            flags: BTreeSet::new(),
        }
    }

    pub fn flag(mut self, name: &'static str, on: bool) -> Self {
        if on {
            self.flags.insert(name);
        }
        self
    }
}

fn bound(expr: &str, ctx: &SchemaContext) -> i64 {
    let (base, offset) = match expr.split_once('-') {
        Some((b, o)) => (b, -o.parse::<i64>().expect("schema offset")),
        None => (expr, 0),
    };
    let v = match base {
        "n" => ctx.n as i64,
        "k" => ctx.k as i64,
        lit => lit.parse().expect("schema bound"),
    };
    v + offset
}

impl Schema {
    pub fn header(&self, ctx: &SchemaContext) -> Vec<String> {
        let mut cols = Vec::new();
        for token in self.pattern.split(',') {
            let (body, cond) = match token.split_once('?') {
                Some((b, c)) => (b, Some(c)),
                None => (token, None),
            };
            if cond.is_some_and(|c| !ctx.flags.contains(c)) {
                continue;
            }
            match body.split_once('{') {
                Some((prefix, rest)) => {
                    let (range, _) = rest.split_once('}').expect("schema brace");
                    let (a, b) = range.split_once("..").expect("schema range");
                    for i in bound(a, ctx)..=bound(b, ctx) {
                        cols.push(format!("{prefix}{i}"));
                    }
                }
                None => cols.push(body.to_string()),
            }
        }
        cols
    }
}

/// A CSV cell.
#[derive(Clone, Debug)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

fn format_cell(c: &Cell, out: &mut String) {
    match c {
        // 17 significant digits round-trip every f64
        Cell::F(x) => write!(out, "{x:.16e}").unwrap(),
        Cell::I(x) => write!(out, "{x}").unwrap(),
        Cell::S(s) => out.push_str(s),
    }
}

/// Writes `rows` under the header of `schema`; every row must match its width.
pub fn write_series(dir: &Path, schema: &Schema, ctx: &SchemaContext, rows: &[Vec<Cell>]) -> Result<PathBuf> {
    let header = schema.header(ctx);
    let mut text = header.join(",");
    text.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::Domain(format!(
                "{}: row {i} has {} cells for {} columns",
                schema.file,
                row.len(),
                header.len()
            )));
        }
        for (j, c) in row.iter().enumerate() {
            if j > 0 {
                text.push(',');
            }
            format_cell(c, &mut text);
        }
        text.push('\n');
    }
    fs::create_dir_all(dir)?;
    let path = dir.join(schema.file);
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes `<command>.json` with the resolved config, crate version,
/// wall-clock runtime and command-specific results.
pub fn write_metadata(dir: &Path, cfg: &RunConfig, runtime_seconds: f64, results: Value) -> Result<PathBuf> {
    let config: serde_json::Map<String, Value> = cfg
        .entries()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    let doc = json!({
        "command": cfg.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "runtime_seconds": runtime_seconds,
        "config": config,
        "results": results,
    });
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", cfg.command.name()));
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_expansion() {
        let s = Schema {
            file: "x.csv",
            pattern: "t,mz_site_{1..n},P_{0..k-1}?levels,V?potential",
        };
        let ctx = SchemaContext::new(3, 2).flag("levels", true);
        assert_eq!(s.header(&ctx), ["t", "mz_site_1", "mz_site_2", "mz_site_3", "P_0", "P_1"]);
        assert_eq!(s.header(&SchemaContext::new(1, 0)), ["t", "mz_site_1"]);
    }

    #[test]
    fn floats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = Schema { file: "a.csv", pattern: "x,n" };
        let x = 0.1 + 0.2;
        let p = write_series(dir.path(), &s, &SchemaContext::default(), &[vec![x.into(), 3usize.into()]]).unwrap();
        let text = fs::read_to_string(p).unwrap();
        let line = text.lines().nth(1).unwrap();
        let back: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, x);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let s = Schema { file: "a.csv", pattern: "x,y" };
        assert!(write_series(dir.path(), &s, &SchemaContext::default(), &[vec![1.0.into()]]).is_err());
    }
}
