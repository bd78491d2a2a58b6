use clap::{Args, Subcommand};
use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use privstate_core::protocol::{
    build_rho_m_prime_with_budget, cdw_exact, delta_default, lemma1_lower_bound, ProtocolParams, RateReport,
    SubprotocolDims,
};
use privstate_core::random::{random_density, rng_from_seed};
use privstate_core::Density;

use crate::error::CliError;
use crate::output::{parse_count, Cell, Emitter, Format, Report, Table};
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum ProtocolVerb {
    /// Lower bound on the key rate at one block length.
    Rate(RateArgs),
    /// Per-copy rate over a doubling grid of block lengths.
    Sweep(SweepArgs),
    /// Closed-form against dense entropies of the idealized output state.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Distillable key of the shield product, bits.
    #[arg(long, default_value_t = 2.0)]
    kd_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Rate slack of the shield subprotocol.
    #[arg(long)]
    delta_prime: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[command(flatten)]
    common: Common,
    /// Block length; accepts `1e8` or `2^27`.
    #[arg(long, value_parser = parse_count)]
    m: u64,
    /// Overrides the default deviation threshold.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// `A..B` doubling from A up to B, or a comma list.
    #[arg(long, value_parser = parse_m_grid, default_value = "2^10..2^27")]
    m_grid: MGrid,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    m: u32,
    /// Random descriptors to compare.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// `log2 d_t` of the subprotocol output.
    #[arg(long, default_value_t = 1.0)]
    log_dt: f64,
    #[arg(long, default_value_t = 2)]
    eve_dim: usize,
    /// Qubits per party in each random shield state.
    #[arg(long, default_value_t = 1)]
    shield_qubits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MGrid(Vec<u64>);

fn parse_m_grid(s: &str) -> Result<MGrid, String> {
    let grid: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_count(a)?, parse_count(b)?);
        if a < 2 || b < a {
            return Err(format!("grid '{s}' needs 2 <= A <= B"));
        }
        std::iter::successors(Some(a), |&m| m.checked_mul(2)).take_while(|&m| m <= b).collect()
    } else {
        s.split(',').map(parse_count).collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(MGrid(grid))
}

fn params(c: &Common, m: u64, delta: Option<f64>) -> Result<ProtocolParams, CliError> {
    let mut p = ProtocolParams::new(c.d, m, c.kd_sigma, c.eps)?;
    if let Some(dp) = c.delta_prime {
        p = p.with_delta_prime(dp)?;
    }
    if let Some(dl) = delta {
        p = p.with_delta(dl)?;
    }
    Ok(p)
}

fn rate_report(p: &ProtocolParams, r: &RateReport, clipped: Option<bool>) -> Report {
    let mut o = Report::new();
    let mut put = |k: &str, v: Value| {
        o.insert(k.into(), v);
    };
    put("d", p.d.into());
    put("m", p.m.into());
    put("delta", p.delta.into());
    if let Some(c) = clipped {
        put("delta_clipped", c.into());
    }
    put("delta_prime", p.delta_prime.into());
    put("eps", p.eps.into());
    put("kd_sigma", p.kd_sigma.into());
    put("log_dt", p.log_dt.into());
    put("p_b_bound", r.p_b_bound.into());
    put("t_min", r.t_min.into());
    put("type_entropy_term", r.type_entropy_term.into());
    put("g1", r.g1.into());
    put("g2", r.g2.into());
    put("f", r.f.into());
    put("lower_bound_bits", r.lower_bound_bits.into());
    put("per_copy_rate", r.per_copy_rate.into());
    put("asymptote", r.asymptote.into());
    put("below_asymptote", r.below_asymptote.into());
    o
}

pub fn run(verb: ProtocolVerb, g: &Global) -> Result<(), CliError> {
    match verb {
        ProtocolVerb::Rate(a) => {
            let p = params(&a.common, a.m, a.delta)?;
            let clipped = if a.delta.is_none() { Some(delta_default(a.m, a.common.d)?.clipped) } else { None };
            let r = lemma1_lower_bound(&p)?;
            Emitter::new(g, Format::Json).report(rate_report(&p, &r, clipped))
        }
        ProtocolVerb::Sweep(a) => {
            let rows = a
                .m_grid
                .0
                .par_iter()
                .map(|&m| {
                    let p = params(&a.common, m, None)?;
                    let clipped = delta_default(m, p.d)?.clipped;
                    Ok((p, lemma1_lower_bound(&p)?, clipped))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut t = Table::new(&["m", "delta", "delta_clipped", "p_b_bound", "t_min", "per_copy_rate", "asymptote"]);
            for (p, r, clipped) in rows {
                t.rows.push(vec![
                    Cell::Int(p.m),
                    Cell::Num(p.delta),
                    Cell::Int(clipped as u64),
                    Cell::Num(r.p_b_bound),
                    Cell::Int(r.t_min),
                    Cell::Num(r.per_copy_rate),
                    Cell::Num(r.asymptote),
                ]);
            }
            Emitter::new(g, Format::Csv).table(&t)
        }
        ProtocolVerb::Oracle(a) => oracle(a, g),
    }
}

fn oracle(a: OracleArgs, g: &Global) -> Result<(), CliError> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let q = 1usize << a.shield_qubits;
    let sub = SubprotocolDims { log_dt: a.log_dt, eve_dim: a.eve_dim };
    // Descriptors are drawn up front so results do not depend on scheduling.
    let mut rng = rng_from_seed(g.seed);
    let draws: Vec<(Vec<Density>, f64)> = (0..a.samples)
        .map(|_| {
            let shields = (0..a.d).map(|_| random_density(&[q, q], rng.gen_range(1..=q * q), &mut rng)).collect();
            (shields, rng.gen_range(0.0..0.5))
        })
        .collect();
    let results = draws
        .par_iter()
        .map(|(shields, delta)| {
            let desc = build_rho_m_prime_with_budget(a.d, a.m, *delta, shields, sub, g.budget_dim)?;
            let rep = cdw_exact(&desc, true)?;
            Ok((rep.discrepancy().unwrap_or(f64::NAN), rep.closed_form.cdw))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let max = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let mut o = Report::new();
    o.insert("d".into(), a.d.into());
    o.insert("m".into(), a.m.into());
    o.insert("samples".into(), a.samples.into());
    o.insert("log_dt".into(), a.log_dt.into());
    o.insert("eve_dim".into(), a.eve_dim.into());
    o.insert("max_discrepancy".into(), max.into());
    o.insert("min_cdw".into(), results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min).into());
    o.insert("max_cdw".into(), results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max).into());
    Emitter::new(g, Format::Json).report(o)
}
