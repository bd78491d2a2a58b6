//! State construction and the on-disk state format.
//!
//! Files store subsystems in Alice-first order: every subsystem held by
//! Alice comes before `cut`, Bob's (and any further parties') after it. A
//! pdit on `[A, B, A', B']` is therefore written as `[A, A', B, B']` with
//! `cut = 2`, and the key sits at subsystems `0` and `cut`.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use privstate_core::random::{random_density, rng_from_seed};
use privstate_core::states::{
    abs_sep_sample, flower, key_shield_cut, omega_example, rec_ppt_key_state_with_budget, werner, WernerKind,
};
use privstate_core::{Bipartition, Density, MultipartiteSpec, Operator, PrivateStateSpec};

use crate::error::{check_budget, CliError};
use crate::output::{Emitter, Format, Report};
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum StateVerb {
    /// Build a named state family.
    Build(BuildArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    #[command(flatten)]
    params: StateParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// `P+ (x) sigma` with a seeded random shield.
    BasicPdit,
    /// Seeded random shield and Haar-random twisting.
    Pdit,
    Flower,
    /// The `pdit` state after measuring the key.
    KeyAttack,
    /// Separable two-qubit state with its twisting `V(theta)`.
    Omega,
    Werner,
    RecPpt,
    /// Multipartite pdit with trivial twisting and a maximally mixed shield.
    Mpdit,
    AbsSepSample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WernerArg {
    Symmetric,
    Antisymmetric,
}

/// Family parameters; only those relevant to the kind may be given.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateParams {
    /// Key dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Shield dimension on each side.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shield: Option<usize>,
    /// Rank of the random shield state.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub werner: Option<WernerArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtilde: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Number of copies of the shield block.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
    /// Key holders including Alice.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parties: Option<usize>,
}

impl StateParams {
    fn given(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Fills in defaults for `kind` and rejects parameters it does not use.
    pub fn resolve(&self, kind: StateKind) -> Result<Self, CliError> {
        let p = self;
        let mut r = StateParams::default();
        match kind {
            StateKind::BasicPdit | StateKind::Pdit | StateKind::KeyAttack => {
                r.d = Some(p.d.unwrap_or(2));
                r.shield = Some(p.shield.unwrap_or(2));
                r.rank = Some(p.rank.unwrap_or(2));
            }
            StateKind::Flower => r.d = Some(p.d.unwrap_or(2)),
            StateKind::Omega => r.theta = Some(p.theta.unwrap_or(0.0)),
            StateKind::Werner => {
                r.d = Some(p.d.unwrap_or(2));
                r.werner = Some(p.werner.unwrap_or(WernerArg::Antisymmetric));
            }
            StateKind::RecPpt => {
                r.p = Some(p.p.unwrap_or(0.25));
                r.dtilde = Some(p.dtilde.unwrap_or(2));
                r.k = Some(p.k.unwrap_or(1));
                r.copies = Some(p.copies.unwrap_or(1));
            }
            StateKind::Mpdit => {
                r.d = Some(p.d.unwrap_or(2));
                r.parties = Some(p.parties.unwrap_or(3));
                r.shield = Some(p.shield.unwrap_or(2));
            }
            StateKind::AbsSepSample => {}
        }
        let used = r.given();
        if let Some(extra) = p.given().into_iter().find(|k| !used.contains(k)) {
            return Err(CliError::Usage(format!("--{extra} does not apply to kind {}", kind_name(kind))));
        }
        Ok(r)
    }
}

pub fn kind_name(kind: StateKind) -> String {
    kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// How the state was made; enough to rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecBlock {
    pub kind: StateKind,
    pub params: StateParams,
    pub seed: u64,
    /// `twisting` for the unitary written next to an omega state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub cut: usize,
    /// Row-major `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecBlock>,
}

impl StateFile {
    pub fn from_operator(op: &Operator, cut: usize, spec: Option<SpecBlock>) -> Self {
        let data = op.data().iter().map(|z| [z.re, z.im]).collect();
        Self { dims: op.dims().to_vec(), cut, data, spec }
    }

    pub fn operator(&self) -> Result<Operator, CliError> {
        let n: usize = self.dims.iter().product();
        if self.data.len() != n * n {
            return Err(CliError::Validation(format!(
                "data has {} entries, dims {:?} need {}",
                self.data.len(),
                self.dims,
                n * n
            )));
        }
        if self.cut > self.dims.len() {
            return Err(CliError::Validation(format!("cut {} beyond {} subsystems", self.cut, self.dims.len())));
        }
        let data = self.data.iter().map(|&[re, im]| Complex::new(re, im)).collect();
        Ok(Operator::new(self.dims.clone(), data)?)
    }

    pub fn density(&self) -> Result<Density, CliError> {
        Ok(Density::new(self.operator()?)?)
    }

    pub fn bipartition(&self) -> Result<Bipartition, CliError> {
        Ok(Bipartition::split_at(self.cut, self.dims.len())?)
    }

    /// Key subsystems in file order, Alice first.
    pub fn key_holders(&self) -> Vec<usize> {
        match &self.spec {
            Some(b) if b.kind == StateKind::Mpdit => {
                let parties = b.params.parties.unwrap_or(3);
                [0].into_iter().chain(2..parties + 1).collect()
            }
            _ => vec![0, self.cut],
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A constructed state in Alice-first order.
pub struct Built {
    pub rho: Density,
    pub cut: usize,
    /// Spec of the underlying bipartite pdit, when there is one.
    pub pdit: Option<PrivateStateSpec<f64>>,
    /// `V(theta)` for omega.
    pub twisting: Option<Operator>,
}

/// Reorders `[A, B, A'_1, B'_1, ...]` so that Alice's subsystems come first.
fn alice_first(rho: &Density) -> Result<(Density, usize), CliError> {
    let count = rho.num_subsystems();
    let cut = key_shield_cut(count);
    let perm: Vec<usize> = cut.left().iter().chain(cut.right()).copied().collect();
    Ok((rho.permute_subsystems(&perm)?, cut.left().len()))
}

fn pdit_built(spec: PrivateStateSpec<f64>, attacked: bool) -> Result<Built, CliError> {
    let raw = if attacked { spec.key_attack() } else { spec.pdit() };
    let (rho, cut) = alice_first(&raw)?;
    Ok(Built { rho, cut, pdit: Some(spec), twisting: None })
}

fn two_party(rho: Density) -> Built {
    Built { rho, cut: 1, pdit: None, twisting: None }
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Validation(format!("--{name} must be positive")));
    }
    Ok(v)
}

/// Builds from resolved parameters.
pub fn build(kind: StateKind, p: &StateParams, seed: u64, budget: usize) -> Result<Built, CliError> {
    let get = |v: Option<usize>, name: &str| positive(name, v.expect("resolved"));
    let mut rng = rng_from_seed(seed);
    match kind {
        StateKind::BasicPdit | StateKind::Pdit | StateKind::KeyAttack => {
            let (d, s, rank) = (get(p.d, "d")?, get(p.shield, "shield")?, get(p.rank, "rank")?);
            check_budget(d.saturating_mul(d).saturating_mul(s).saturating_mul(s), budget)?;
            let spec = if kind == StateKind::BasicPdit {
                PrivateStateSpec::basic(d, random_density(&[s, s], rank, &mut rng))?
            } else {
                PrivateStateSpec::random(d, [s, s], rank, &mut rng)
            };
            pdit_built(spec, kind == StateKind::KeyAttack)
        }
        StateKind::Flower => {
            let d = get(p.d, "d")?;
            check_budget(d.saturating_pow(4), budget)?;
            pdit_built(flower(d)?, false)
        }
        StateKind::Omega => {
            let theta = p.theta.expect("resolved");
            if !theta.is_finite() {
                return Err(CliError::Validation("--theta must be finite".into()));
            }
            let (rho, v) = omega_example(theta);
            Ok(Built { twisting: Some(v), ..two_party(rho) })
        }
        StateKind::Werner => {
            let d = get(p.d, "d")?;
            check_budget(d.saturating_mul(d), budget)?;
            let kind = match p.werner.expect("resolved") {
                WernerArg::Symmetric => WernerKind::Symmetric,
                WernerArg::Antisymmetric => WernerKind::Antisymmetric,
            };
            Ok(two_party(werner(d, kind)?))
        }
        StateKind::RecPpt => {
            let raw = rec_ppt_key_state_with_budget(
                p.p.expect("resolved"),
                get(p.dtilde, "dtilde")?,
                get(p.k, "k")?,
                get(p.copies, "copies")?,
                budget,
            )?;
            let (rho, cut) = alice_first(&raw)?;
            Ok(Built { rho, cut, pdit: None, twisting: None })
        }
        StateKind::Mpdit => {
            let (d, parties, s) = (get(p.d, "d")?, get(p.parties, "parties")?, get(p.shield, "shield")?);
            let total = (d as u128).checked_pow(parties as u32).unwrap_or(u128::MAX).saturating_mul((s * s) as u128);
            check_budget(total.min(usize::MAX as u128) as usize, budget)?;
            let spec = MultipartiteSpec::basic(d, parties, Density::maximally_mixed(&[s, s]))?;
            // [A, B_1..B_l, A', B'] -> [A, A', B_1..B_l, B']
            let mut perm = vec![0, parties];
            perm.extend(1..parties);
            perm.push(parties + 1);
            let rho = spec.pdit().permute_subsystems(&perm)?;
            Ok(Built { rho, cut: 2, pdit: None, twisting: None })
        }
        StateKind::AbsSepSample => Ok(two_party(abs_sep_sample(seed))),
    }
}

/// Rebuilds the state a file was made from.
pub fn rebuild(block: &SpecBlock, budget: usize) -> Result<Built, CliError> {
    let resolved = block.params.resolve(block.kind)?;
    build(block.kind, &resolved, block.seed, budget)
}

/// `foo.json` -> `foo.v.json`
fn twisting_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.v.json"))
}

pub fn run(verb: StateVerb, g: &Global) -> Result<(), CliError> {
    let StateVerb::Build(args) = verb;
    let params = args.params.resolve(args.kind)?;
    let built = build(args.kind, &params, g.seed, g.budget_dim)?;
    let spec = SpecBlock { kind: args.kind, params, seed: g.seed, role: None };
    let file = StateFile::from_operator(built.rho.as_op(), built.cut, Some(spec.clone()));
    let Some(out) = &g.out else {
        if built.twisting.is_some() {
            return Err(CliError::Usage("omega writes two files; pass --out".into()));
        }
        print!("{}", file.to_json()?);
        return Ok(());
    };
    std::fs::write(out, file.to_json()?)?;
    let mut summary = Report::new();
    summary.insert("state".into(), out.display().to_string().into());
    summary.insert("dims".into(), serde_json::to_value(&file.dims)?);
    summary.insert("cut".into(), file.cut.into());
    if let Some(v) = &built.twisting {
        let path = twisting_path(out);
        let vspec = SpecBlock { role: Some("twisting".into()), ..spec };
        std::fs::write(&path, StateFile::from_operator(v, 1, Some(vspec)).to_json()?)?;
        summary.insert("twisting".into(), path.display().to_string().into());
    }
    // The summary goes to stdout since --out holds the state.
    let stdout = Global { out: None, ..g.clone() };
    Emitter::new(&stdout, Format::Json).report(summary)
}
