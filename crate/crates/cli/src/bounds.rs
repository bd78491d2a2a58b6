use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Subcommand};

use privstate_core::bounds::{curve, sec6_epsilon, sec6_f, z_of_d, BoundName};

use crate::error::CliError;
use crate::output::{parse_count, parse_number, svg_polyline, Cell, Emitter, Format, Report, Table};
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum BoundsVerb {
    /// Distance of key-undistillable states from a pdit.
    Zd {
        #[arg(long, value_parser = parse_number)]
        d: f64,
    },
    /// Tabulate a bound over a grid.
    Curve(CurveArgs),
    /// Block-length dependent error of the bound-key reduction.
    Sec6 {
        #[arg(long, value_parser = parse_count)]
        m: u64,
    },
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long, value_parser = parse_bound)]
    name: BoundName,
    /// `a:b` doubles from a up to b; `a:b:n` takes n evenly spaced points.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Also draw the curve as an SVG polyline.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(Vec<f64>);

fn parse_bound(s: &str) -> Result<BoundName, String> {
    BoundName::from_str(s).map_err(|_| {
        let names: Vec<&str> = BoundName::ALL.iter().map(|b| b.as_str()).collect();
        format!("unknown bound '{s}'; expected one of {}", names.join(", "))
    })
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let (a, b) = match parts.as_slice() {
        [a, b] | [a, b, _] => (parse_number(a)?, parse_number(b)?),
        _ => return Err(format!("grid '{s}' is not a:b or a:b:n")),
    };
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(format!("grid '{s}' needs finite a <= b"));
    }
    let pts = match parts.as_slice() {
        [_, _, n] => {
            let n = parse_count(n)? as usize;
            match n {
                0 => return Err("grid needs at least one point".into()),
                1 => vec![a],
                _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
            }
        }
        _ => {
            if a <= 0.0 {
                return Err(format!("doubling grid '{s}' needs a > 0"));
            }
            std::iter::successors(Some(a), |&x| Some(x * 2.0)).take_while(|&x| x <= b).collect()
        }
    };
    Ok(Grid(pts))
}

pub fn run(verb: BoundsVerb, g: &Global) -> Result<(), CliError> {
    match verb {
        BoundsVerb::Zd { d } => {
            let mut r = Report::new();
            r.insert("d".into(), d.into());
            r.insert("z".into(), z_of_d(d)?.into());
            Emitter::new(g, Format::Json).report(r)
        }
        BoundsVerb::Sec6 { m } => {
            let m = u32::try_from(m).map_err(|_| CliError::Validation(format!("m = {m} too large")))?;
            let eps: f64 = sec6_epsilon(m)?;
            let mut r = Report::new();
            r.insert("m".into(), m.into());
            r.insert("epsilon".into(), eps.into());
            // f is only defined while 2 sqrt(2 eps) <= 1.
            r.insert("f".into(), sec6_f(eps).ok().into());
            Emitter::new(g, Format::Json).report(r)
        }
        BoundsVerb::Curve(a) => {
            let c = curve(a.name, &a.grid.0)?;
            let mut t = Table::new(&[a.name.parameter(), a.name.as_str()]);
            for (&x, &y) in c.grid.iter().zip(&c.values) {
                t.rows.push(vec![Cell::Num(x), Cell::Num(y)]);
            }
            if let Some(path) = &a.svg {
                std::fs::write(path, svg_polyline(&c.grid, &c.values, a.name.as_str()))?;
            }
            Emitter::new(g, Format::Csv).table(&t)
        }
    }
}
