//! Run configuration (`key=value` lines) and machine-readable reports.
//!
//! Recognized keys and their defaults:
//!
//! | key         | default                    |
//! |-------------|----------------------------|
//! | `field`     | `-1` (comma list allowed)  |
//! | `mode`      | `first` (`ratios`, `logderiv`) |
//! | `alpha`     | `0.25`                     |
//! | `beta`      | `0.3`                      |
//! | `r`         | `0.25`                     |
//! | `X`         | `1000`                     |
//! | `X_grid`    | `250,500,1000,2000,4000`   |
//! | `weight`    | `bump` (`gamma`)           |
//! | `l_eps`     | `1e-10`                    |
//! | `euler_eps` | `1e-10`                    |
//! | `workers`   | `0` (all cores)            |
//! | `out`       | none                       |
//! | `csv`       | none                       |
//!
//! Complex parameters are written `0.6+0.7i`.

use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldId;
use crate::moment::{Budgets, Mode, MomentReport, MomentRequest, SweepRow};
use crate::special::WeightSpec;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    First,
    Ratios,
    Logderiv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub fields: Vec<FieldId>,
    pub mode: ModeKind,
    pub alpha: C,
    pub beta: C,
    pub r: C,
    pub x: f64,
    pub x_grid: Vec<f64>,
    pub weight: WeightSpec,
    pub eps: Budgets,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fields: vec![FieldId::new(-1).expect("valid")],
            mode: ModeKind::First,
            alpha: C::new(0.25, 0.0),
            beta: C::new(0.3, 0.0),
            r: C::new(0.25, 0.0),
            x: 1000.0,
            x_grid: vec![250.0, 500.0, 1000.0, 2000.0, 4000.0],
            weight: WeightSpec::bump(),
            eps: Budgets::default(),
            workers: 0,
            out: None,
            csv: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?}")))
}

fn parse_complex(key: &str, v: &str) -> Result<C> {
    let v = v.trim().replace(' ', "");
    C::from_str(&v).map_err(|_| Error::Parse(format!("{key}: cannot parse {v:?} as a complex number")))
}

impl RunConfig {
    /// Sets one key; used for config lines and command-line overrides alike.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "field" => {
                self.fields = value
                    .split(',')
                    .map(|d| FieldId::new(parse_num("field", d)?))
                    .collect::<Result<_>>()?;
            }
            "mode" => {
                self.mode = match value {
                    "first" | "first_moment" => ModeKind::First,
                    "ratios" => ModeKind::Ratios,
                    "logderiv" => ModeKind::Logderiv,
                    other => return Err(Error::Parse(format!("mode: unknown mode {other:?}"))),
                }
            }
            "alpha" => self.alpha = parse_complex("alpha", value)?,
            "beta" => self.beta = parse_complex("beta", value)?,
            "r" => self.r = parse_complex("r", value)?,
            "X" => self.x = parse_num("X", value)?,
            "X_grid" => {
                self.x_grid = value.split(',').map(|x| parse_num("X_grid", x)).collect::<Result<_>>()?;
            }
            "weight" => {
                self.weight = match value {
                    "bump" => WeightSpec::bump(),
                    "gamma" => WeightSpec::gamma(),
                    other => return Err(Error::Parse(format!("weight: unknown weight {other:?}"))),
                }
            }
            "l_eps" => self.eps.l_eps = parse_num("l_eps", value)?,
            "euler_eps" => self.eps.euler_eps = parse_num("euler_eps", value)?,
            "workers" => self.workers = parse_num("workers", value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            other => return Err(Error::Parse(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeKind::First => Mode::FirstMoment { alpha: self.alpha },
            ModeKind::Ratios => Mode::Ratios { alpha: self.alpha, beta: self.beta },
            ModeKind::Logderiv => Mode::Logderiv { r: self.r },
        }
    }

    /// The request for one field at one `X`.
    pub fn request(&self, field: FieldId, x: f64) -> MomentRequest {
        MomentRequest { field, x, mode: self.mode(), weight: self.weight, eps: self.eps }
    }

    /// Checks every parameter against its theorem range before any compute.
    pub fn validate(&self) -> Result<()> {
        if self.fields.is_empty() {
            return Err(Error::Domain("no field given".into()));
        }
        for &x in std::iter::once(&self.x).chain(&self.x_grid) {
            self.request(self.fields[0], x).validate()?;
        }
        Ok(())
    }
}

/// Parses `key=value` lines; `#` starts a comment. An empty text gives the
/// defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 13] = [
    "X",
    "lhs_re",
    "lhs_im",
    "main1_re",
    "main1_im",
    "main2_re",
    "main2_im",
    "residual_re",
    "residual_im",
    "relative_residual",
    "fitted_exponent_so_far",
    "num_c",
    "skipped_c",
];

// 17 significant digits
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Sweep rows as CSV with the fixed header; one row per `X`.
pub fn emit_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        let mut rec = vec![fmt(r.x)];
        for z in [r.lhs, r.main1, r.main2, r.residual] {
            rec.push(fmt(z.re));
            rec.push(fmt(z.im));
        }
        rec.push(fmt(r.relative_residual));
        rec.push(r.fitted_exponent_so_far.map(fmt).unwrap_or_default());
        rec.push(r.num_c.to_string());
        rec.push(r.skipped_c.to_string());
        w.write_record(&rec).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    let header = rdr.headers().map_err(io)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io)?;
        let num = |i: usize| parse_num::<f64>(CSV_HEADER[i], &rec[i]);
        let cx = |i: usize| -> Result<C> { Ok(C::new(num(i)?, num(i + 1)?)) };
        rows.push(SweepRow {
            x: num(0)?,
            lhs: cx(1)?,
            main1: cx(3)?,
            main2: cx(5)?,
            residual: cx(7)?,
            relative_residual: num(9)?,
            fitted_exponent_so_far: if rec[10].is_empty() { None } else { Some(num(10)?) },
            num_c: parse_num("num_c", &rec[11])?,
            skipped_c: parse_num("skipped_c", &rec[12])?,
        });
    }
    Ok(rows)
}

impl From<&MomentReport> for SweepRow {
    fn from(r: &MomentReport) -> Self {
        SweepRow {
            x: r.request.x,
            lhs: r.lhs,
            main1: r.main1,
            main2: r.main2,
            residual: r.residual,
            relative_residual: r.relative_residual,
            fitted_exponent_so_far: None,
            num_c: r.num_c,
            skipped_c: r.skipped_c,
        }
    }
}

/// Serializes a report. JSON keeps the struct's field order and prints the
/// shortest decimal that round-trips each float.
pub fn emit_report(report: &MomentReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => serde_json::to_vec_pretty(report).map_err(|e| Error::Parse(format!("json: {e}"))),
        Format::Csv => emit_csv(&[SweepRow::from(report)]),
    }
}

pub fn parse_report_json(bytes: &[u8]) -> Result<MomentReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("json: {e}")))
}
