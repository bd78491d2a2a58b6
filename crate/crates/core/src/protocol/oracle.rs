use std::collections::HashMap;

use num_rational::Ratio;

use super::types::{good_set, total_prob, type_enumerate_with_budget, TypeHistogram};
use crate::error::{Error, Result};
use crate::measures::{shannon, vn_entropy};
use crate::op::{DensityOperator, TensorOperator};
use crate::scalar::cr;
use crate::states::DEFAULT_DIM_BUDGET;

/// Output size of the shield subprotocol and Eve's register size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubprotocolDims {
    /// `log2 d_t`; the dense model rounds `2^log_dt` to an integer.
    pub log_dt: f64,
    pub eve_dim: usize,
}

/// Block description of the idealized protocol output: for each good type,
/// Alice and Bob hold a uniformly random string of that type plus a perfect
/// `d_t`-dimensional key, while Eve holds a fixed state and the type label.
/// Bad types collapse into one error flag on every party.
#[derive(Clone, Debug)]
pub struct RhoMPrime {
    d: usize,
    m: u32,
    delta: f64,
    good: Vec<TypeHistogram>,
    p_bad: Ratio<u128>,
    dt: usize,
    quantization_gap: f64,
    rho_e: DensityOperator<f64>,
    max_dim: usize,
}

/// Builds the descriptor. Eve's state is the normalized compression of
/// `shield_states[0] (x) ... (x) shield_states[d-1]` onto its first `eve_dim`
/// basis vectors (maximally mixed if that block vanishes).
pub fn build_rho_m_prime(
    d: usize,
    m: u32,
    delta: f64,
    shield_states: &[DensityOperator<f64>],
    sub: SubprotocolDims,
) -> Result<RhoMPrime> {
    build_rho_m_prime_with_budget(d, m, delta, shield_states, sub, DEFAULT_DIM_BUDGET)
}

pub fn build_rho_m_prime_with_budget(
    d: usize,
    m: u32,
    delta: f64,
    shield_states: &[DensityOperator<f64>],
    sub: SubprotocolDims,
    max_dim: usize,
) -> Result<RhoMPrime> {
    if shield_states.len() != d {
        return Err(Error::dims(format!("{} shield states for d = {d}", shield_states.len())));
    }
    if sub.eve_dim == 0 || !(sub.log_dt >= 0.0) {
        return Err(Error::domain("eve_dim must be positive and log_dt nonnegative"));
    }
    let dt = (sub.log_dt.exp2().round() as usize).max(1);
    let strings = (d as u128).checked_pow(m).unwrap_or(u128::MAX);
    let needed = strings.saturating_mul(dt as u128).saturating_add(1);
    if needed > max_dim as u128 {
        return Err(Error::Budget { needed, limit: max_dim as u128 });
    }
    let types = type_enumerate_with_budget(d, m, max_dim)?;
    let (good, bad) = good_set(&types, delta);
    let product = TensorOperator::kron_all(shield_states.iter().map(|s| s.as_op())).expect("d >= 1");
    if sub.eve_dim > product.dim() {
        return Err(Error::dims(format!(
            "eve_dim {} exceeds the shield product dimension {}",
            sub.eve_dim,
            product.dim()
        )));
    }
    let idx: Vec<usize> = (0..sub.eve_dim).collect();
    let block = product.block(&idx, &idx, &[sub.eve_dim])?;
    let tr = block.trace().re;
    let rho_e = if tr > 1e-12 {
        DensityOperator::trusted(block.scale(1.0 / tr).hermitian_part())
    } else {
        DensityOperator::maximally_mixed(&[sub.eve_dim])
    };
    Ok(RhoMPrime {
        d,
        m,
        delta,
        good,
        p_bad: total_prob(&bad),
        dt,
        quantization_gap: (dt as f64).log2() - sub.log_dt,
        rho_e,
        max_dim,
    })
}

impl RhoMPrime {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn good_types(&self) -> &[TypeHistogram] {
        &self.good
    }

    /// Exact weight of the error block.
    pub fn error_weight(&self) -> Ratio<u128> {
        self.p_bad
    }

    pub fn error_weight_f64(&self) -> f64 {
        *self.p_bad.numer() as f64 / *self.p_bad.denom() as f64
    }

    pub fn dt(&self) -> usize {
        self.dt
    }

    /// `log2 d_t` (quantized) minus the requested value.
    pub fn quantization_gap(&self) -> f64 {
        self.quantization_gap
    }

    pub fn rho_e(&self) -> &DensityOperator<f64> {
        &self.rho_e
    }

    fn strings(&self) -> usize {
        self.d.pow(self.m)
    }

    /// `d^m d_t + 1`: key string, subprotocol key, error flag.
    pub fn alice_dim(&self) -> usize {
        self.strings() * self.dt + 1
    }

    /// `eve_dim * |G| + 1`: Eve's state tagged by type, error flag.
    pub fn eve_dim(&self) -> usize {
        self.rho_e.dim() * self.good.len() + 1
    }

    /// Good-type index and block weight `p(t) / (|Q_t| d_t)` of each
    /// `(string, subkey)` level of Alice; `None` for strings of bad type.
    fn alice_levels(&self) -> Vec<Option<(usize, f64)>> {
        let lookup: HashMap<&[u32], usize> =
            self.good.iter().enumerate().map(|(k, t)| (t.counts(), k)).collect();
        let mut out = Vec::with_capacity(self.alice_dim() - 1);
        let mut digits = vec![0usize; self.m as usize];
        for s in 0..self.strings() {
            let mut x = s;
            for slot in digits.iter_mut().rev() {
                *slot = x % self.d;
                x /= self.d;
            }
            let t = TypeHistogram::of_string(&digits, self.d).expect("digits below d");
            let level = lookup.get(t.counts()).map(|&k| {
                let g = &self.good[k];
                (k, g.prob_f64() / (g.multiplicity() as f64 * self.dt as f64))
            });
            out.extend(std::iter::repeat(level).take(self.dt));
        }
        out
    }

    fn check_budget(&self, needed: usize) -> Result<()> {
        if needed > self.max_dim {
            return Err(Error::Budget { needed: needed as u128, limit: self.max_dim as u128 });
        }
        Ok(())
    }

    /// `rho_{AA'BB'}` on `[alice, bob]`.
    pub fn marginal_ab(&self) -> Result<DensityOperator<f64>> {
        let na = self.alice_dim();
        self.check_budget(na * na)?;
        let mut diag = vec![0.0; na * na];
        for (a, level) in self.alice_levels().into_iter().enumerate() {
            if let Some((_, w)) = level {
                diag[a * na + a] = w;
            }
        }
        diag[na * na - 1] = self.error_weight_f64();
        let op = TensorOperator::from_diag(&[na, na], &diag)?;
        Ok(DensityOperator::trusted(op))
    }

    /// `rho_{AA'E''}` on `[alice, eve]`.
    pub fn marginal_ae(&self) -> Result<DensityOperator<f64>> {
        let (na, ne) = (self.alice_dim(), self.eve_dim());
        self.check_budget(na * ne)?;
        let n = na * ne;
        let de = self.rho_e.dim();
        let mut op = TensorOperator::zeros(&[na, ne]);
        let data = op.data_mut();
        for (a, level) in self.alice_levels().into_iter().enumerate() {
            if let Some((t, w)) = level {
                for r in 0..de {
                    for c in 0..de {
                        let (er, ec) = (t * de + r, t * de + c);
                        data[(a * ne + er) * n + a * ne + ec] = self.rho_e.get(r, c) * cr(w);
                    }
                }
            }
        }
        data[n * n - 1] = cr(self.error_weight_f64());
        Ok(DensityOperator::trusted(op))
    }

    /// The whole state on `[alice, bob, eve]`.
    pub fn assemble(&self) -> Result<DensityOperator<f64>> {
        let (na, ne) = (self.alice_dim(), self.eve_dim());
        self.check_budget(na * na * ne)?;
        let n = na * na * ne;
        let de = self.rho_e.dim();
        let mut op = TensorOperator::zeros(&[na, na, ne]);
        let data = op.data_mut();
        for (a, level) in self.alice_levels().into_iter().enumerate() {
            if let Some((t, w)) = level {
                let base = (a * na + a) * ne;
                for r in 0..de {
                    for c in 0..de {
                        data[(base + t * de + r) * n + base + t * de + c] = self.rho_e.get(r, c) * cr(w);
                    }
                }
            }
        }
        data[n * n - 1] = cr(self.error_weight_f64());
        Ok(DensityOperator::trusted(op))
    }
}

/// Entropies behind `C_DW = I(AA':BB') - I(AA':E'')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdwTerms {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub s_e: f64,
    pub s_ae: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub cdw: f64,
}

impl CdwTerms {
    fn from_entropies(s_a: f64, s_b: f64, s_ab: f64, s_e: f64, s_ae: f64) -> Self {
        let i_ab = s_a + s_b - s_ab;
        let i_ae = s_a + s_e - s_ae;
        Self { s_a, s_b, s_ab, s_e, s_ae, i_ab, i_ae, cdw: i_ab - i_ae }
    }
}

/// Closed-form and (when within budget) dense evaluations of `C_DW`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdwReport {
    pub closed_form: CdwTerms,
    pub dense: Option<CdwTerms>,
    /// `H({p(T)})`, the entropy of the type label including the error symbol.
    pub type_label_entropy: f64,
}

impl CdwReport {
    /// `|closed - dense|` on `C_DW`, if the dense path ran.
    pub fn discrepancy(&self) -> Option<f64> {
        self.dense.map(|d| (d.cdw - self.closed_form.cdw).abs())
    }
}

/// Evaluates `C_DW` of the descriptor from the block formulas and, if
/// `dense` is set, from the assembled marginals.
pub fn cdw_exact(desc: &RhoMPrime, dense: bool) -> Result<CdwReport> {
    let p_b = desc.error_weight_f64();
    let mut labels: Vec<f64> = desc.good.iter().map(|t| t.prob_f64()).collect();
    labels.push(p_b);
    let h_t = shannon(&labels);
    let log_q: f64 = desc.good.iter().map(|t| t.prob_f64() * (t.multiplicity() as f64).log2()).sum();
    let log_dt = (desc.dt as f64).log2();
    let s_rho_e = vn_entropy(&desc.rho_e);
    let s_a = h_t + log_q + (1.0 - p_b) * log_dt;
    let s_e = h_t + (1.0 - p_b) * s_rho_e;
    let s_ae = h_t + (1.0 - p_b) * (log_dt + s_rho_e) + log_q;
    let closed_form = CdwTerms::from_entropies(s_a, s_a, s_a, s_e, s_ae);
    let dense = if dense {
        let ab = desc.marginal_ab()?;
        let ae = desc.marginal_ae()?;
        Some(CdwTerms::from_entropies(
            vn_entropy(&ab.reduced(&[0])?),
            vn_entropy(&ab.reduced(&[1])?),
            vn_entropy(&ab),
            vn_entropy(&ae.reduced(&[1])?),
            vn_entropy(&ae),
        ))
    } else {
        None
    };
    Ok(CdwReport { closed_form, dense, type_label_entropy: h_t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, rng_from_seed};

    fn qubit_shields(seed: u64) -> Vec<DensityOperator<f64>> {
        let mut rng = rng_from_seed(seed);
        (0..2).map(|_| random_density(&[2, 2], 2, &mut rng)).collect()
    }

    #[test]
    fn error_weights() {
        let sub = SubprotocolDims { log_dt: 1.0, eve_dim: 2 };
        let all = build_rho_m_prime(2, 2, 1.0, &qubit_shields(1), sub).unwrap();
        assert_eq!(all.error_weight(), Ratio::from_integer(0));
        let tight = build_rho_m_prime(2, 4, 0.01, &qubit_shields(1), sub).unwrap();
        assert_eq!(tight.error_weight(), Ratio::new(10, 16));
    }

    #[test]
    fn paths_agree_and_match_full_state() {
        let sub = SubprotocolDims { log_dt: 1.0, eve_dim: 2 };
        let desc = build_rho_m_prime(2, 2, 0.2, &qubit_shields(2), sub).unwrap();
        let rep = cdw_exact(&desc, true).unwrap();
        assert!(rep.discrepancy().unwrap() < 1e-9);
        let full = desc.assemble().unwrap();
        DensityOperator::new(full.as_op().clone()).unwrap();
        let ab = full.reduced(&[0, 1]).unwrap();
        let ae = full.reduced(&[0, 2]).unwrap();
        assert!(ab.max_abs_diff(&desc.marginal_ab().unwrap()).unwrap() < 1e-15);
        assert!(ae.max_abs_diff(&desc.marginal_ae().unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn ideal_block_is_decoupled() {
        let sub = SubprotocolDims { log_dt: 1.0, eve_dim: 2 };
        let desc = build_rho_m_prime(2, 2, 1.0, &qubit_shields(3), sub).unwrap();
        let rep = cdw_exact(&desc, true).unwrap();
        // Eve learns only the type label
        assert!((rep.closed_form.i_ae - rep.type_label_entropy).abs() < 1e-12);
        let dense = rep.dense.unwrap();
        assert!((dense.i_ae - rep.type_label_entropy).abs() < 1e-9);
    }

    #[test]
    fn trivial_alphabet_gives_subprotocol_key() {
        let shield = vec![DensityOperator::maximally_mixed(&[2, 2])];
        let sub = SubprotocolDims { log_dt: 2.0, eve_dim: 1 };
        let desc = build_rho_m_prime(1, 3, 0.0, &shield, sub).unwrap();
        let rep = cdw_exact(&desc, true).unwrap();
        assert!((rep.closed_form.cdw - 2.0).abs() < 1e-12);
        assert!((rep.dense.unwrap().cdw - 2.0).abs() < 1e-9);
    }
}
