//! Standard purification, ccq states, the Devetak-Winter rate and the
//! key-undistillability witness.

use crate::error::{Error, Result};
use crate::measures::{entropy_unnormalized, shannon};
use crate::op::{strides, subset_offsets, DensityOperator, TensorOperator};
use crate::scalar::{cr, czero, Real, C};
use crate::states::ControlledUnitary;

/// `sum_k sqrt(p_k) |psi_k> (x) |k>` over the support of a state.
#[derive(Clone, Debug)]
pub struct Purification<T: Real> {
    system_dims: Vec<usize>,
    rank: usize,
    /// Row-major over `(system index, purifier index)`.
    amplitudes: Vec<C<T>>,
}

impl<T: Real> Purification<T> {
    pub fn purifier_dim(&self) -> usize {
        self.rank
    }

    /// `[system dims..., purifier]`
    pub fn dims(&self) -> Vec<usize> {
        let mut d = self.system_dims.clone();
        d.push(self.rank);
        d
    }

    pub fn vector(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn state(&self) -> DensityOperator<T> {
        DensityOperator::trusted(
            TensorOperator::projector(&self.dims(), &self.amplitudes).expect("length matches dims"),
        )
    }
}

/// Purification from the eigendecomposition; eigenvalues at or below the
/// support cutoff are dropped (at least one vector is always kept).
pub fn standard_purification<T: Real>(rho: &DensityOperator<T>) -> Result<Purification<T>> {
    let eig = rho.herm_eig_with_tol(rho.tol())?;
    let cutoff = T::lit(T::SUPPORT_CUTOFF);
    let rank = eig.values.iter().filter(|&&v| v > cutoff).count().max(1);
    let n = rho.dim();
    let mut amplitudes = vec![czero(); n * rank];
    for k in 0..rank {
        let w = eig.values[k].max(T::zero()).sqrt();
        for (i, z) in eig.vector(k).into_iter().enumerate() {
            amplitudes[i * rank + k] = z * w;
        }
    }
    Ok(Purification { system_dims: rho.dims().to_vec(), rank, amplitudes })
}

/// Classical key outcomes of Alice and Bob with Eve's subnormalized states.
#[derive(Clone, Debug)]
pub struct CcqState<T: Real> {
    key_dims: (usize, usize),
    probs: Vec<T>,
    eve_ops: Vec<TensorOperator<T>>,
}

impl<T: Real> CcqState<T> {
    /// Validates normalization, positivity and `Tr E_ij = p_ij`.
    pub fn new(key_dims: (usize, usize), eve_ops: Vec<TensorOperator<T>>) -> Result<Self> {
        if eve_ops.len() != key_dims.0 * key_dims.1 || eve_ops.is_empty() {
            return Err(Error::dims(format!("{} Eve operators for key dims {key_dims:?}", eve_ops.len())));
        }
        let e = eve_ops[0].dim();
        let tol = T::lit(1e-10);
        for op in &eve_ops {
            if op.dim() != e {
                return Err(Error::dims("Eve operators differ in dimension"));
            }
            let h = op.hermiticity_defect();
            if h > tol {
                return Err(Error::NotHermitian(h.to_f64_lossy()));
            }
            if let Some(&min) = op.eigvalsh().last() {
                if min < -tol {
                    return Err(Error::NotPositive(min.to_f64_lossy()));
                }
            }
        }
        let probs: Vec<T> = eve_ops.iter().map(|op| op.trace().re).collect();
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return Err(Error::NotUnitTrace(total.to_f64_lossy()));
        }
        Ok(Self { key_dims, probs, eve_ops })
    }

    pub fn key_dims(&self) -> (usize, usize) {
        self.key_dims
    }

    pub fn eve_dim(&self) -> usize {
        self.eve_ops[0].dim()
    }

    pub fn prob(&self, i: usize, j: usize) -> T {
        self.probs[i * self.key_dims.1 + j]
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn eve_op(&self, i: usize, j: usize) -> &TensorOperator<T> {
        &self.eve_ops[i * self.key_dims.1 + j]
    }

    /// Classical `I(A:B)` of the key distribution.
    pub fn mutual_information_ab(&self) -> T {
        let (da, db) = self.key_dims;
        let pa: Vec<T> = (0..da).map(|i| (0..db).map(|j| self.prob(i, j)).sum()).collect();
        let pb: Vec<T> = (0..db).map(|j| (0..da).map(|i| self.prob(i, j)).sum()).collect();
        shannon(&pa) + shannon(&pb) - shannon(&self.probs)
    }

    /// Holevo quantity `I(A:E) = H(A) + S(E) - S(AE)`.
    pub fn mutual_information_ae(&self) -> T {
        let (da, db) = self.key_dims;
        let mut pa = Vec::with_capacity(da);
        let mut total = TensorOperator::zeros(self.eve_ops[0].dims());
        let mut s_ae = T::zero();
        for i in 0..da {
            let mut ei = TensorOperator::zeros(self.eve_ops[0].dims());
            for j in 0..db {
                ei.add_scaled_assign(cr(T::one()), self.eve_op(i, j)).expect("same dims");
            }
            pa.push(ei.trace().re);
            s_ae = s_ae + entropy_unnormalized(&ei);
            total.add_scaled_assign(cr(T::one()), &ei).expect("same dims");
        }
        (shannon(&pa) + entropy_unnormalized(&total) - s_ae).max(T::zero())
    }

    /// Same state with key symbol `i` renamed `perm_a[i]` (and likewise for Bob).
    pub fn relabel_keys(&self, perm_a: &[usize], perm_b: &[usize]) -> Result<Self> {
        let (da, db) = self.key_dims;
        if perm_a.len() != da || perm_b.len() != db {
            return Err(Error::InvalidPermutation("key relabeling of wrong length".into()));
        }
        let mut ops = vec![TensorOperator::zeros(&[1]); da * db];
        for i in 0..da {
            for j in 0..db {
                ops[perm_a[i] * db + perm_b[j]] = self.eve_op(i, j).clone();
            }
        }
        Ok(Self { key_dims: self.key_dims, probs: ops.iter().map(|o| o.trace().re).collect(), eve_ops: ops })
    }
}

/// Measures subsystems `key.0` (Alice) and `key.1` (Bob) in the computational
/// basis of the standard purification; every other subsystem is traced out
/// and Eve keeps the purifier.
pub fn ccq_of<T: Real>(rho: &DensityOperator<T>, key: (usize, usize)) -> Result<CcqState<T>> {
    let dims = rho.dims();
    let count = dims.len();
    if key.0 >= count || key.1 >= count || key.0 == key.1 {
        return Err(Error::InvalidSubsystem { index: key.0.max(key.1), count });
    }
    let pur = standard_purification(rho)?;
    let r = pur.rank;
    let st = strides(dims);
    let rest: Vec<usize> = (0..count).filter(|&k| k != key.0 && k != key.1).collect();
    let rest_off = subset_offsets(dims, &rest);
    let (da, db) = (dims[key.0], dims[key.1]);
    let amp = &pur.amplitudes;
    let mut ops = Vec::with_capacity(da * db);
    for i in 0..da {
        for j in 0..db {
            let base = i * st[key.0] + j * st[key.1];
            let mut e = vec![czero(); r * r];
            for &o in &rest_off {
                let row = &amp[(base + o) * r..(base + o + 1) * r];
                for k in 0..r {
                    let a = row[k];
                    if a == czero() {
                        continue;
                    }
                    for l in 0..r {
                        e[k * r + l] = e[k * r + l] + a * row[l].conj();
                    }
                }
            }
            ops.push(TensorOperator::new(vec![r], e)?.hermitian_part());
        }
    }
    CcqState::new((da, db), ops)
}

/// `I(A:B) - I(A:E)`; may be negative.
pub fn dw_rate<T: Real>(ccq: &CcqState<T>) -> T {
    ccq.mutual_information_ab() - ccq.mutual_information_ae()
}

/// Local unitaries `(U_A on AA', U_B on BB')` applied before the twisting.
pub type LocalUnitaries<T> = (TensorOperator<T>, TensorOperator<T>);

/// Devetak-Winter rate of the key part after local unitaries and an inverse
/// twisting on `[A, B, A', B']`, with the shield handed to Eve. A positive
/// value certifies that the input has distillable key.
pub fn ku_witness<T: Real>(
    rho: &DensityOperator<T>,
    local_us: Option<&LocalUnitaries<T>>,
    twisting: &ControlledUnitary<T>,
) -> Result<T> {
    let dims = rho.dims();
    if dims.len() != 4 {
        return Err(Error::dims(format!("witness expects [A, B, A', B'], got {dims:?}")));
    }
    let (ka, kb) = twisting.key_dims();
    if ka != dims[0] || kb != dims[1] || twisting.shield_dims().iter().product::<usize>() != dims[2] * dims[3] {
        return Err(Error::dims(format!(
            "twisting on key {:?} and shield {:?} does not fit {dims:?}",
            twisting.key_dims(),
            twisting.shield_dims()
        )));
    }
    let mut op = rho.as_op().clone();
    if let Some((ua, ub)) = local_us {
        let alice_first = op.permute_subsystems(&[0, 2, 1, 3])?;
        let rotated = alice_first.conjugate_by(&ua.kron(ub))?.reshaped(alice_first.dims())?;
        op = rotated.permute_subsystems(&[0, 2, 1, 3])?;
    }
    let twisted = twisting.apply(&op)?.hermitian_part();
    let key = DensityOperator::trusted(twisted.partial_trace(&[2, 3])?);
    Ok(dw_rate(&ccq_of(&key, (0, 1))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;
    use crate::states::PrivateStateSpec;
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityOperator<f64> {
        let s = 0.5f64.sqrt();
        DensityOperator::pure(&[2, 2], &[cr(s), cr(0.0), cr(0.0), cr(s)]).unwrap()
    }

    fn diag(values: &[f64]) -> DensityOperator<f64> {
        DensityOperator::new(TensorOperator::from_diag(&[2, 2], values).unwrap()).unwrap()
    }

    #[test]
    fn purification_marginal() {
        let mixed = DensityOperator::<f64>::maximally_mixed(&[2]);
        let p = standard_purification(&mixed).unwrap();
        assert_eq!(p.purifier_dim(), 2);
        let back = p.state().partial_trace(&[1]).unwrap();
        assert!(back.max_abs_diff(&mixed).unwrap() < 1e-12);
        assert_eq!(standard_purification(&bell()).unwrap().purifier_dim(), 1);
    }

    #[test]
    fn bell_has_one_bit() {
        let c = ccq_of(&bell(), (0, 1)).unwrap();
        assert_abs_diff_eq!(c.prob(0, 0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.prob(0, 1), 0.0, epsilon = 1e-12);
        assert!(c.eve_op(0, 0).max_abs_diff(c.eve_op(1, 1)).unwrap() < 1e-12);
        assert_abs_diff_eq!(dw_rate(&c), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn classical_correlation_has_no_key() {
        let c = ccq_of(&diag(&[0.5, 0.0, 0.0, 0.5]), (0, 1)).unwrap();
        assert!(c.eve_op(0, 0).trace_product_re(c.eve_op(1, 1)).unwrap().abs() < 1e-12);
        assert_abs_diff_eq!(dw_rate(&c), 0.0, epsilon = 1e-10);
        let c = ccq_of(&diag(&[1.0, 0.0, 0.0, 0.0]), (0, 1)).unwrap();
        assert_abs_diff_eq!(dw_rate(&c), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn pdit_witness_with_untwisting() {
        let mut rng = rng_from_seed(21);
        let spec = PrivateStateSpec::<f64>::random(3, [2, 2], 2, &mut rng);
        let g = spec.pdit();
        assert_abs_diff_eq!(dw_rate(&ccq_of(&g, (0, 1)).unwrap()), 3f64.log2(), epsilon = 1e-8);
        let w = ku_witness(&g, None, &spec.untwisting()).unwrap();
        assert_abs_diff_eq!(w, 3f64.log2(), epsilon = 1e-8);
    }

    #[test]
    fn relabeling_keeps_rate() {
        let mut rng = rng_from_seed(22);
        let rho = crate::random::random_density::<f64, _>(&[3, 2, 2], 4, &mut rng);
        let c = ccq_of(&rho, (0, 1)).unwrap();
        let r = c.relabel_keys(&[2, 0, 1], &[1, 0]).unwrap();
        assert_abs_diff_eq!(dw_rate(&c), dw_rate(&r), epsilon = 1e-12);
    }
}
