use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::Global;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flat key/value result of a single evaluation, in insertion order.
pub type Report = Map<String, Value>;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => sig12(*v),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => Value::from(*v),
        }
    }
}

/// One row per grid point.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

/// Twelve significant digits, plain notation for moderate exponents.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&e) {
        trim_zeros(format!("{:.*}", (11 - e) as usize, x))
    } else {
        format!("{}e{e}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => sig12(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes results to `--out` or stdout in the requested format.
pub struct Emitter {
    out: Option<PathBuf>,
    format: Format,
}

impl Emitter {
    pub fn new(g: &Global, default: Format) -> Self {
        Self { out: g.out.clone(), format: g.format.unwrap_or(default) }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.out {
            Some(p) => std::fs::write(p, bytes)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    pub fn report(&self, r: Report) -> Result<(), CliError> {
        match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&Value::Object(r))?;
                s.push('\n');
                self.write(s.as_bytes())
            }
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(r.keys())?;
                w.write_record(r.values().map(csv_value))?;
                self.write(&finish(w)?)
            }
        }
    }

    pub fn table(&self, t: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Json => {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            t.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&rows)?;
                s.push('\n');
                self.write(s.as_bytes())
            }
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(&t.columns)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                self.write(&finish(w)?)
            }
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Validation(e.to_string()))
}

/// Bare polyline plot; the x axis is logarithmic when the grid spans two
/// decades or more.
pub fn svg_polyline(xs: &[f64], ys: &[f64], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let log_x = xs.first().is_some_and(|&a| a > 0.0) && xs.last().zip(xs.first()).is_some_and(|(b, a)| b / a >= 100.0);
    let tx: Vec<f64> = xs.iter().map(|&x| if log_x { x.log10() } else { x }).collect();
    let pts: Vec<(f64, f64)> = tx.iter().zip(ys).filter(|(_, y)| y.is_finite()).map(|(&x, &y)| (x, y)).collect();
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| {
            let px = PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
            let py = H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <title>{title}</title>\n\
         <rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n\
         <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n\
         </svg>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD,
        coords.join(" ")
    )
}

/// `1e8`, `2^27`, `4096` or `0.25`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| format!("bad base in '{s}'"))?;
        let e: i32 = e.trim().parse().map_err(|_| format!("bad exponent in '{s}'"))?;
        return Ok(b.powi(e));
    }
    s.parse().map_err(|_| format!("'{s}' is not a number"))
}

/// A nonnegative integer written in any form [`parse_number`] accepts.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let x = parse_number(s)?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("'{s}' is not a nonnegative integer"));
    }
    Ok(x as u64)
}
