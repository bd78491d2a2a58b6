use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::Value;

use privstate_core::ccq::{ccq_of, dw_rate, ku_witness};
use privstate_core::measures::{
    is_abs_separable_2q, is_ppt, log_negativity, min_pt_eigenvalue, negativity, relative_entropy, trace_distance,
    vn_entropy,
};
use privstate_core::protocol::multipartite_rate;
use privstate_core::rel_ent::{er_trivial_upper, er_upper_fw, thm2_bound_with_budget, ErEstimator, FwParams};
use privstate_core::{ControlledUnitary, Density, PrivateStateSpec};

use crate::error::{check_budget, CliError};
use crate::output::{Emitter, Report};
use crate::state::{rebuild, StateFile};
use crate::Global;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    Entropy,
    Relent,
    Negativity,
    Lognegativity,
    Ppt,
    Abssep2q,
    Tracedist,
    Dwrate,
    Witness,
    ErFw,
    ErTrivial,
    Thm2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Trivial,
    Fw,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(value_enum)]
    name: MeasureName,
    file: PathBuf,
    /// Second state, for relent and tracedist.
    #[arg(long)]
    other: Option<PathBuf>,
    /// Key subsystems `a,b` in file order; defaults to `0,cut`.
    #[arg(long, value_parser = parse_key)]
    key: Option<(usize, usize)>,
    /// Witness: undo the twisting of the pdit stored in this file instead.
    #[arg(long)]
    twisting_from: Option<PathBuf>,
    /// Single-copy estimate inside thm2.
    #[arg(long, value_enum, default_value = "fw")]
    estimator: Estimator,
    #[arg(long, default_value_t = FwParams::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = FwParams::default().restarts)]
    restarts: usize,
}

fn parse_key(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected 'a,b', got '{s}'"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("'{x}' is not a subsystem index"));
    Ok((parse(a)?, parse(b)?))
}

fn name_of(m: MeasureName) -> String {
    m.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn fw_params(args: &MeasureArgs, g: &Global) -> FwParams {
    let base = FwParams::default();
    FwParams { max_iters: args.max_iters, restarts: args.restarts, tol: g.tol.unwrap_or(base.tol), seed: g.seed, ..base }
}

fn load_other(args: &MeasureArgs) -> Result<Density, CliError> {
    let path = args.other.as_ref().ok_or_else(|| CliError::Usage(format!("{} needs --other", name_of(args.name))))?;
    StateFile::load(path)?.density()
}

/// Bipartite pdit spec recorded in a file, if any.
fn pdit_spec(file: &StateFile, budget: usize) -> Result<Option<PrivateStateSpec<f64>>, CliError> {
    match &file.spec {
        Some(block) if block.role.is_none() => Ok(rebuild(block, budget)?.pdit),
        _ => Ok(None),
    }
}

pub fn run(args: MeasureArgs, g: &Global, out: &Emitter) -> Result<(), CliError> {
    let file = StateFile::load(&args.file)?;
    let rho = file.density()?;
    check_budget(rho.dim(), g.budget_dim)?;
    let cut = file.bipartition()?;
    let cut_text = format!("[0, {}) : [{}, {})", file.cut, file.cut, file.dims.len());

    let mut r = Report::new();
    r.insert("measure".into(), name_of(args.name).into());
    r.insert("dims".into(), serde_json::to_value(&file.dims)?);
    r.insert("cut".into(), file.cut.into());
    let mut put = |k: &str, v: Value| {
        r.insert(k.into(), v);
    };
    match args.name {
        MeasureName::Entropy => {
            put("value", vn_entropy(&rho).into());
            put("convention", "von Neumann entropy, bits".into());
        }
        MeasureName::Relent => {
            let v = relative_entropy(&rho, &load_other(&args)?)?;
            put("value", v.into());
            put("finite", v.is_finite().into());
            put("convention", "D(state || other) in bits; null when the support condition fails".into());
        }
        MeasureName::Negativity => {
            put("value", negativity(&rho, &cut)?.into());
            put("convention", format!("(||rho^Gamma||_1 - 1) / 2, transpose on {cut_text} right side").into());
        }
        MeasureName::Lognegativity => {
            put("value", log_negativity(&rho, &cut)?.into());
            put("convention", format!("log2 ||rho^Gamma||_1 across {cut_text}").into());
        }
        MeasureName::Ppt => {
            let tol = g.tol.unwrap_or(1e-10);
            put("value", is_ppt(&rho, &cut, tol)?.into());
            put("min_pt_eigenvalue", min_pt_eigenvalue(&rho, &cut)?.into());
            put("tol", tol.into());
            put("convention", format!("min eig of rho^Gamma >= -tol across {cut_text}").into());
        }
        MeasureName::Abssep2q => {
            put("value", is_abs_separable_2q(&rho)?.into());
            put("spectrum", serde_json::to_value(rho.spectrum())?);
            put("convention", "l1 <= l3 + 2 sqrt(l2 l4), spectrum in decreasing order".into());
        }
        MeasureName::Tracedist => {
            put("value", trace_distance(&rho, &load_other(&args)?)?.into());
            put("convention", "||state - other||_1 without the factor 1/2".into());
        }
        MeasureName::Dwrate => dwrate(&args, &file, &rho, &mut put)?,
        MeasureName::Witness => witness(&args, &file, &rho, g, &mut put)?,
        MeasureName::ErFw => {
            let res = er_upper_fw(&rho, &cut, &fw_params(&args, g))?;
            put("value", res.value.into());
            put("iterations", res.iterations.into());
            put("gap", res.gap.into());
            put("converged", res.converged.into());
            put("terms", res.witness.weights().len().into());
            put("convention", format!("D(rho || omega) in bits for an explicit separable omega across {cut_text}").into());
        }
        MeasureName::ErTrivial => {
            put("value", er_trivial_upper(&rho).into());
            put("convention", "log2 D - S(rho), bits".into());
        }
        MeasureName::Thm2 => {
            let spec = pdit_spec(&file, g.budget_dim)?
                .ok_or_else(|| CliError::Validation("thm2 needs a file built as a pdit".into()))?;
            let est = match args.estimator {
                Estimator::Trivial => ErEstimator::Trivial,
                Estimator::Fw => ErEstimator::FrankWolfe(fw_params(&args, g)),
            };
            put("value", thm2_bound_with_budget(&spec, &est, g.budget_dim)?.into());
            put("estimator", format!("{:?}", args.estimator).to_lowercase().into());
            put("convention", "log2 d + E_r(sigma_0 (x) ... (x) sigma_{d-1}) / d, single-copy upper estimate".into());
        }
    }
    out.report(r)
}

fn dwrate(args: &MeasureArgs, file: &StateFile, rho: &Density, put: &mut impl FnMut(&str, Value)) -> Result<(), CliError> {
    let holders = file.key_holders();
    let pairs: Vec<(usize, usize)> = match args.key {
        Some(k) => vec![k],
        None => holders[1..].iter().map(|&b| (holders[0], b)).collect(),
    };
    let ccqs = pairs.iter().map(|&k| ccq_of(rho, k)).collect::<Result<Vec<_>, _>>()?;
    let rates: Vec<f64> = ccqs.iter().map(dw_rate).collect();
    put("value", multipartite_rate(&ccqs)?.into());
    put("pairs", serde_json::to_value(&pairs)?);
    put("pair_rates", serde_json::to_value(&rates)?);
    put("convention", "I(A:B) - I(A:E) in bits, Eve holding the purification; minimum over key pairs".into());
    Ok(())
}

fn witness(
    args: &MeasureArgs,
    file: &StateFile,
    rho: &Density,
    g: &Global,
    put: &mut impl FnMut(&str, Value),
) -> Result<(), CliError> {
    if file.dims.len() != 4 || file.cut != 2 {
        return Err(CliError::Validation(format!("witness expects [A, A', B, B'] with cut 2, got {:?}", file.dims)));
    }
    let native = rho.permute_subsystems(&[0, 2, 1, 3])?;
    let source = match &args.twisting_from {
        Some(p) => Some(StateFile::load(p)?),
        None => None,
    };
    let spec = pdit_spec(source.as_ref().unwrap_or(file), g.budget_dim)?;
    let (twisting, from) = match spec {
        Some(s) => (s.untwisting(), "inverse twisting of the recorded pdit"),
        None if args.twisting_from.is_some() => {
            return Err(CliError::Validation("--twisting-from file does not describe a pdit".into()));
        }
        None => {
            let d = native.dims();
            (ControlledUnitary::identity((d[0], d[1]), &[d[2], d[3]]), "identity")
        }
    };
    put("value", ku_witness(&native, None, &twisting)?.into());
    put("twisting", from.into());
    put("convention", "Devetak-Winter rate of the key after untwisting, shield handed to Eve, bits".into());
    Ok(())
}
