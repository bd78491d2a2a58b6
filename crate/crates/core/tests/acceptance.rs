//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use privstate_core::bounds::{sec6_epsilon, sec6_f, z_of_d};
use privstate_core::ccq::{ccq_of, dw_rate, ku_witness, CcqState};
use privstate_core::measures::{
    is_abs_separable_2q, is_ppt, log_negativity, min_pt_eigenvalue, pbit_log_negativity, relative_entropy,
};
use privstate_core::protocol::{
    build_rho_m_prime_with_budget, cdw_exact, lemma1_lower_bound, multipartite_rate, pb_bound, type_count,
    type_entropy_term, type_enumerate, ProtocolParams, SubprotocolDims,
};
use privstate_core::random::{haar_unitary, random_density, random_separable, rng_from_seed};
use privstate_core::rel_ent::{er_upper_fw, FwParams};
use privstate_core::states::{
    flower, key_shield_cut, omega_example, omega_tilde, rec_ppt_key_state, MultipartiteSpec, PrivateStateSpec,
};
use privstate_core::{Bipartition, ControlledUnitary, Density, Operator};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn two_qubit_cut() -> Bipartition {
    Bipartition::split_at(1, 2).unwrap()
}

fn c1_z_of_d() -> Outcome {
    let z2: f64 = z_of_d(2.0).map_err(|e| e.to_string())?;
    ensure!((z2 - 0.041).abs() <= 1e-3, "z(2) = {z2}");
    let mut prev = z2;
    for k in 2..=60 {
        let z: f64 = z_of_d(2f64.powi(k)).map_err(|e| e.to_string())?;
        ensure!(z >= prev && z < 1.0 / 6.0, "z(2^{k}) = {z} after {prev}");
        prev = z;
    }
    ensure!(prev >= 0.16, "z(2^60) = {prev}");
    Ok(format!("z(2) = {z2:.5}, z(2^60) = {prev:.5}"))
}

fn flower_literal() -> Operator {
    let h = FRAC_1_SQRT_2;
    let mut m = vec![vec![0.0; 16]; 16];
    for r in [0, 3] {
        m[r][r] = 0.25;
        m[12 + r][12 + r] = 0.25;
    }
    // U^T top right, U^* bottom left, U = sum w_ij |ii><jj|
    let w = [[h, h], [h, -h]];
    let corr = [0, 3];
    for i in 0..2 {
        for j in 0..2 {
            m[corr[j]][12 + corr[i]] = 0.25 * w[i][j];
            m[12 + corr[i]][corr[j]] = 0.25 * w[i][j];
        }
    }
    let rows: Vec<&[f64]> = m.iter().map(|r| r.as_slice()).collect();
    Operator::from_real_rows(&[2, 2, 2, 2], &rows).unwrap()
}

fn c2_flower() -> Outcome {
    let spec = flower::<f64>(2).map_err(|e| e.to_string())?;
    let g = spec.pdit();
    let diff = g.max_abs_diff(&flower_literal()).unwrap();
    ensure!(diff <= 1e-12, "entrywise difference {diff:e}");
    let expect = (1.0 + 2f64.sqrt()).log2();
    let dense = log_negativity(&g, &spec.cut()).map_err(|e| e.to_string())?;
    let block = pbit_log_negativity(&spec).map_err(|e| e.to_string())?;
    ensure!((dense - expect).abs() <= 1e-8, "dense log-negativity {dense}");
    ensure!((block - expect).abs() <= 1e-8, "block log-negativity {block}");
    Ok(format!("max diff {diff:.1e}, E_N = {dense:.10}"))
}

fn c3_example_one() -> Outcome {
    let cut = two_qubit_cut();
    let mut worst = f64::INFINITY;
    let mut most_negative = 0.0f64;
    for theta in [0.0, PI / 7.0, 1.3] {
        let (omega, v) = omega_example::<f64>(theta);
        ensure!(!is_abs_separable_2q(&omega).unwrap(), "omega passes the absolute separability test");
        let twisted = omega.as_op().conjugate_by(&v).unwrap();
        let min = min_pt_eigenvalue(&twisted, &cut).unwrap();
        ensure!(min >= -1e-12, "theta = {theta}: min PT eigenvalue {min}");
        worst = worst.min(min);
        // V(0) sends omega~ to a product state, so only the
        // nondegenerate angles can expose nonlocality
        if (theta.sin() * theta.cos()).abs() > 1e-3 {
            let t = omega_tilde::<f64>().as_op().conjugate_by(&v).unwrap();
            let neg = min_pt_eigenvalue(&t, &cut).unwrap();
            ensure!(neg < -1e-6, "theta = {theta}: omega~ stays PPT ({neg})");
            most_negative = most_negative.min(neg);
        }
    }
    Ok(format!("min PT eig of V omega V+ = {worst:.1e}, of V omega~ V+ = {most_negative:.4}"))
}

fn eve_spectrum(c: &CcqState<f64>, i: usize, j: usize) -> Vec<f64> {
    let mut ev = c.eve_op(i, j).eigvalsh();
    ev.sort_by(f64::total_cmp);
    ev
}

fn c4_pdit_key() -> Outcome {
    let mut rng = rng_from_seed(400);
    let mut count = 0;
    let mut worst_rate = 0.0f64;
    let mut worst_prob = 0.0f64;
    let mut worst_spec = 0.0f64;
    for d in [2, 3, 4] {
        for shield in [2, 4] {
            for _ in 0..9 {
                let rank = rng.gen_range(1..=3);
                let spec = PrivateStateSpec::<f64>::random(d, [shield, shield], rank, &mut rng);
                let g = spec.pdit();
                let c = ccq_of(&g, (0, 1)).map_err(|e| e.to_string())?;
                let rate = dw_rate(&c);
                worst_rate = worst_rate.max((rate - (d as f64).log2()).abs());
                let tau = ControlledUnitary::random((d, d), &[shield, shield], &mut rng);
                let moved = Density::new(tau.apply(&g).unwrap()).map_err(|e| e.to_string())?;
                let c2 = ccq_of(&moved, (0, 1)).map_err(|e| e.to_string())?;
                for i in 0..d {
                    for j in 0..d {
                        worst_prob = worst_prob.max((c.prob(i, j) - c2.prob(i, j)).abs());
                        for (a, b) in eve_spectrum(&c, i, j).iter().zip(eve_spectrum(&c2, i, j)) {
                            worst_spec = worst_spec.max((a - b).abs());
                        }
                    }
                }
                count += 1;
            }
        }
    }
    ensure!(count >= 50, "only {count} specs");
    ensure!(worst_rate <= 1e-8, "rate off log2 d by {worst_rate:e}");
    ensure!(worst_prob <= 1e-10, "twisting moved probabilities by {worst_prob:e}");
    ensure!(worst_spec <= 1e-9, "twisting moved Eve spectra by {worst_spec:e}");
    Ok(format!("{count} specs, rate err {worst_rate:.1e}, prob err {worst_prob:.1e}, spectrum err {worst_spec:.1e}"))
}

fn c5_oracle_paths() -> Outcome {
    let mut rng = rng_from_seed(500);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for m in [2u32, 3, 4] {
        for _ in 0..7 {
            let shields: Vec<Density> = (0..2).map(|_| random_density(&[2, 2], rng.gen_range(1..=4), &mut rng)).collect();
            let log_dt = if m == 4 { rng.gen_range(0..=1) } else { rng.gen_range(0..=2) } as f64;
            let sub = SubprotocolDims { log_dt, eve_dim: rng.gen_range(1..=4) };
            let delta = rng.gen_range(0.0..0.5);
            let desc = build_rho_m_prime_with_budget(2, m, delta, &shields, sub, 1 << 12).map_err(|e| e.to_string())?;
            let rep = cdw_exact(&desc, true).map_err(|e| e.to_string())?;
            let gap = rep.discrepancy().ok_or("dense path did not run")?;
            ensure!(gap <= 1e-9, "m = {m}, delta = {delta}: paths differ by {gap:e}");
            worst = worst.max(gap);
            runs += 1;
        }
    }
    Ok(format!("{runs} descriptors, max |closed - dense| = {worst:.1e}"))
}

fn c6_rate_convergence() -> Outcome {
    let rate = |m: u64| -> Result<_, String> {
        let p = ProtocolParams::new(2, m, 2.0, 0.0).map_err(|e| e.to_string())?;
        lemma1_lower_bound(&p).map_err(|e| e.to_string())
    };
    let mut prev = f64::NEG_INFINITY;
    for k in 11..=27 {
        let r = rate(1 << k)?;
        ensure!(r.per_copy_rate >= prev, "rate drops at m = 2^{k}: {} < {prev}", r.per_copy_rate);
        ensure!(r.per_copy_rate <= r.asymptote, "rate {} above the asymptote at 2^{k}", r.per_copy_rate);
        prev = r.per_copy_rate;
    }
    let r = rate(100_000_000)?;
    ensure!(r.per_copy_rate <= 2.0, "rate {} above 2", r.per_copy_rate);
    ensure!(2.0 - r.per_copy_rate <= 0.05, "rate {} at m = 1e8", r.per_copy_rate);
    Ok(format!("rate(2^27) = {prev:.4}, rate(1e8) = {:.4}", r.per_copy_rate))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c7_types() -> Outcome {
    for d in 2..=4usize {
        for m in 1..=50u32 {
            let exact = binomial((m as usize + d - 1) as u128, m as u128);
            let counted = type_count(d, m).ok_or("type count overflow")?;
            let listed = type_enumerate(d, m).map_err(|e| e.to_string())?.len() as u128;
            ensure!(counted == exact && listed == exact, "d = {d}, m = {m}: {counted} / {listed} vs {exact}");
            ensure!(
                (exact as f64).log2() <= type_entropy_term(m as u64, d) + 1e-9,
                "d = {d}, m = {m}: count above the entropy bound"
            );
        }
    }
    let mut checks = 0;
    for m in 2..=20u32 {
        for delta in [0.05, 0.1, 0.2, 0.3, 0.45] {
            let bound = pb_bound(m as u64, 2, delta);
            if bound > 1.0 {
                continue;
            }
            let atypical = (0u32..1 << m)
                .filter(|s| {
                    let ones = s.count_ones() as f64;
                    (2.0 * ones - m as f64).abs() > delta * 2.0 * m as f64
                })
                .count();
            let mass = atypical as f64 / (1u64 << m) as f64;
            ensure!(mass <= bound, "m = {m}, delta = {delta}: mass {mass} above {bound}");
            checks += 1;
        }
    }
    Ok(format!("counts exact for d <= 4, m <= 50; {checks} atypical-mass checks"))
}

fn c8_er_estimator() -> Outcome {
    let params = FwParams::default();
    let cut = two_qubit_cut();
    let mut rng = rng_from_seed(800);
    let mut worst_sep = 0.0f64;
    for _ in 0..200 {
        let terms = rng.gen_range(1..=6);
        let rho = random_separable::<f64, _>(&[2], &[2], terms, &mut rng);
        let v = er_upper_fw(&rho, &cut, &params).map_err(|e| e.to_string())?.value;
        worst_sep = worst_sep.max(v);
    }
    ensure!(worst_sep <= 5e-3, "separable estimate {worst_sep}");

    let s = FRAC_1_SQRT_2;
    let c = privstate_core::C::new;
    let pplus = Density::pure(&[2, 2], &[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
    let bell_er = er_upper_fw(&pplus, &cut, &params).map_err(|e| e.to_string())?.value;
    ensure!((bell_er - 1.0).abs() <= 5e-3, "E_r(P+) estimate {bell_er}");
    let classical = Density::new(Operator::from_diag(&[2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap()).unwrap();
    let cert = relative_entropy(&pplus, &classical).map_err(|e| e.to_string())?;
    ensure!((cert - 1.0).abs() <= 1e-9, "certificate D = {cert}");

    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..20 {
        let rank = rng.gen_range(1..=4);
        let spec = PrivateStateSpec::<f64>::random(2, [2, 2], rank, &mut rng);
        let gamma = er_upper_fw(&spec.pdit(), &spec.cut(), &params).map_err(|e| e.to_string())?.value;
        let product = spec.shield_product();
        let shield = er_upper_fw(&product, &key_shield_cut(product.num_subsystems()), &params)
            .map_err(|e| e.to_string())?
            .value;
        let gap = gamma - (1.0 + shield / 2.0);
        ensure!(gap <= 1e-2, "chain violated by {gap}");
        worst_gap = worst_gap.max(gap);
    }
    Ok(format!("sep max {worst_sep:.1e}, E_r(P+) = {bell_er:.5}, worst chain slack {worst_gap:.4}"))
}

fn c9_rec_ppt() -> Outcome {
    let mut verdicts = Vec::new();
    for (p, dt, k, m) in [(1.0 / 3.0, 4usize, 2usize, 1usize), (0.4, 4, 2, 1), (1.0 / 3.0, 2, 4, 1)] {
        let rho = rec_ppt_key_state::<f64>(p, dt, k, m).map_err(|e| e.to_string())?;
        let cut = key_shield_cut(rho.num_subsystems());
        let got = is_ppt(&rho, &cut, 1e-10).map_err(|e| e.to_string())?;
        let ratio = dt as f64 / (dt as f64 - 1.0);
        let expect = p <= 1.0 / 3.0 + 1e-12 && (1.0 - p) / p >= ratio.powi(k as i32);
        ensure!(got == expect, "(p, d~, k, m) = ({p:.4}, {dt}, {k}, {m}): is_ppt = {got}, condition says {expect}");
        verdicts.push(got);
    }
    Ok(format!("PPT verdicts {verdicts:?}"))
}

fn c10_witness() -> Outcome {
    let mut rng = rng_from_seed(1000);
    let mut worst_sep = f64::NEG_INFINITY;
    for n in 0..10 {
        let rho = random_separable::<f64, _>(&[2, 2], &[2, 2], rng.gen_range(1..=5), &mut rng);
        let rho = rho.permute_subsystems(&[0, 2, 1, 3]).unwrap();
        for t in 0..20 {
            let tau = ControlledUnitary::random((2, 2), &[2, 2], &mut rng);
            let locals = (haar_unitary::<f64, _>(&[2, 2], &mut rng), haar_unitary::<f64, _>(&[2, 2], &mut rng));
            let local_us = if t % 2 == 0 { Some(&locals) } else { None };
            let w = ku_witness(&rho, local_us, &tau).map_err(|e| e.to_string())?;
            ensure!(w <= 1e-9, "input {n}, twisting {t}: witness {w}");
            worst_sep = worst_sep.max(w);
        }
    }
    let mut worst_pdit = 0.0f64;
    for d in [2, 3] {
        for _ in 0..5 {
            let spec = PrivateStateSpec::<f64>::random(d, [2, 2], rng.gen_range(1..=4), &mut rng);
            let w = ku_witness(&spec.pdit(), None, &spec.untwisting()).map_err(|e| e.to_string())?;
            let err = (w - (d as f64).log2()).abs();
            ensure!(err <= 1e-8, "pdit d = {d}: witness {w}");
            worst_pdit = worst_pdit.max(err);
        }
    }
    Ok(format!("max on separable inputs {worst_sep:.1e}, pdit err {worst_pdit:.1e}"))
}

fn c11_sec6() -> Outcome {
    let e2: f64 = sec6_epsilon(2).map_err(|e| e.to_string())?;
    ensure!((e2 - 0.3667).abs() <= 1e-4, "eps(2) = {e2}");
    let mut prev = e2;
    for m in 3..=60 {
        let e: f64 = sec6_epsilon(m).map_err(|e| e.to_string())?;
        ensure!(e < prev, "eps({m}) = {e} not below {prev}");
        prev = e;
    }
    let f0: f64 = sec6_f(0.0).map_err(|e| e.to_string())?;
    ensure!(f0 == 0.0, "f(0) = {f0}");
    let spec = MultipartiteSpec::basic(2, 3, Density::maximally_mixed(&[2, 2])).map_err(|e| e.to_string())?;
    let rho = spec.pdit();
    let pairs: Vec<CcqState<f64>> = (1..spec.parties())
        .map(|j| ccq_of(&rho, (0, j)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let rate = multipartite_rate(&pairs).map_err(|e| e.to_string())?;
    ensure!((rate - 1.0).abs() <= 1e-8, "GHZ rate {rate}");
    Ok(format!("eps(2) = {e2:.5}, eps(60) = {prev:.3e}, GHZ rate = {rate:.10}"))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 11] = [
        ("z(d) threshold", c1_z_of_d, secs(1)),
        ("flower state", c2_flower, secs(1)),
        ("twisted omega certificate", c3_example_one, secs(1)),
        ("pdit key and twisting invariance", c4_pdit_key, None),
        ("protocol oracle paths", c5_oracle_paths, secs(60)),
        ("protocol rate convergence", c6_rate_convergence, secs(1)),
        ("type machinery", c7_types, None),
        ("relative entropy estimator", c8_er_estimator, secs(300)),
        ("PPT key family boundary", c9_rec_ppt, secs(60)),
        ("witness soundness", c10_witness, None),
        ("block-length error and GHZ rate", c11_sec6, None),
    ];
    let mut failed = 0;
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{elapsed:.2?}]", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
