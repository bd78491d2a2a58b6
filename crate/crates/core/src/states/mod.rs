//! Constructors for private states and the other named state families.

mod families;
mod multipartite;
mod twisting;

use rand::Rng;

pub use families::{
    abs_sep_sample, omega_example, omega_tilde, rec_ppt_key_state, rec_ppt_key_state_with_budget,
    werner, WernerKind, DEFAULT_DIM_BUDGET,
};
pub use multipartite::{multipartite_pdit, MultipartiteSpec};
pub use twisting::ControlledUnitary;

use crate::error::{Error, Result};
use crate::op::{Bipartition, DensityOperator, TensorOperator};
use crate::random::{haar_unitary, random_density};
use crate::scalar::{cr, Real};

/// Cut with Alice holding subsystem 0 and every even index from 2 on; Bob
/// holds the rest. For `[A, B, A', B']` this is `AA' : BB'`.
pub fn key_shield_cut(count: usize) -> Bipartition {
    let left = (0..count).filter(|&k| k == 0 || (k >= 2 && k % 2 == 0)).collect();
    Bipartition::new(left, count).expect("indices in range")
}

/// Key dimension, shield state and twisting unitaries of a pdit.
///
/// The key basis is the computational one. The shield has two subsystems,
/// `A'` and `B'`.
#[derive(Clone, Debug)]
pub struct PrivateStateSpec<T: Real> {
    d: usize,
    sigma: DensityOperator<T>,
    unitaries: Vec<TensorOperator<T>>,
}

impl<T: Real> PrivateStateSpec<T> {
    pub fn new(d: usize, sigma: DensityOperator<T>, unitaries: Vec<TensorOperator<T>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("key dimension must be positive"));
        }
        if sigma.num_subsystems() != 2 {
            return Err(Error::dims(format!(
                "shield must have two subsystems, got dims {:?}",
                sigma.dims()
            )));
        }
        if unitaries.len() != d {
            return Err(Error::dims(format!("{} unitaries for d = {d}", unitaries.len())));
        }
        let mut checked = Vec::with_capacity(d);
        for u in unitaries {
            if u.dim() != sigma.dim() {
                return Err(Error::dims(format!(
                    "unitary of dimension {} on shield of dimension {}",
                    u.dim(),
                    sigma.dim()
                )));
            }
            let defect = u.unitarity_defect();
            if defect > T::default_tol() {
                return Err(Error::NotUnitary(defect.to_f64_lossy()));
            }
            checked.push(u.reshaped(sigma.dims())?);
        }
        Ok(Self { d, sigma, unitaries: checked })
    }

    /// Trivial twisting: the pdit is `P+ (x) sigma`.
    pub fn basic(d: usize, sigma: DensityOperator<T>) -> Result<Self> {
        let id = TensorOperator::identity(sigma.dims());
        Self::new(d, sigma, vec![id; d])
    }

    /// Random shield state of the given rank and Haar-random twisting.
    pub fn random<R: Rng + ?Sized>(d: usize, shield_dims: [usize; 2], rank: usize, rng: &mut R) -> Self {
        let sigma = random_density(&shield_dims, rank, rng);
        let unitaries = (0..d).map(|_| haar_unitary(&shield_dims, rng)).collect();
        Self { d, sigma, unitaries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shield_dims(&self) -> &[usize] {
        self.sigma.dims()
    }

    pub fn sigma(&self) -> &DensityOperator<T> {
        &self.sigma
    }

    pub fn unitaries(&self) -> &[TensorOperator<T>] {
        &self.unitaries
    }

    /// `[d, d, dA', dB']`
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.d, self.d];
        dims.extend_from_slice(self.shield_dims());
        dims
    }

    /// `AA' : BB'`
    pub fn cut(&self) -> Bipartition {
        key_shield_cut(4)
    }

    /// `U_i sigma U_i†`
    pub fn conditional_state(&self, i: usize) -> DensityOperator<T> {
        let op = self.sigma.as_op().conjugate_by(&self.unitaries[i]).expect("shield dims agree");
        DensityOperator::trusted(op.hermitian_part())
    }

    pub fn conditional_states(&self) -> Vec<DensityOperator<T>> {
        (0..self.d).map(|i| self.conditional_state(i)).collect()
    }

    /// `sigma_0 (x) ... (x) sigma_{d-1}` on `[dA', dB', dA', dB', ...]`.
    pub fn shield_product(&self) -> DensityOperator<T> {
        let states = self.conditional_states();
        let op = TensorOperator::kron_all(states.iter().map(|s| s.as_op())).expect("d >= 1");
        DensityOperator::trusted(op)
    }

    pub fn twisting(&self) -> ControlledUnitary<T> {
        ControlledUnitary::from_key_unitaries(self.d, &self.unitaries).expect("validated spec")
    }

    pub fn untwisting(&self) -> ControlledUnitary<T> {
        self.twisting().inverse()
    }

    /// `(1/d) sum_ij |ii><jj| (x) U_i sigma U_j†`
    pub fn pdit(&self) -> DensityOperator<T> {
        let d = self.d;
        let left: Vec<TensorOperator<T>> = self
            .unitaries
            .iter()
            .map(|u| u.matmul(&self.sigma).expect("shield dims agree"))
            .collect();
        let mut out = TensorOperator::zeros(&self.dims());
        let weight = T::one() / T::from_usize_lossy(d);
        for i in 0..d {
            for j in 0..d {
                let blk = left[i].matmul(&self.unitaries[j].adjoint()).expect("shield dims agree");
                write_key_block(&mut out, i * d + i, j * d + j, &blk, weight);
            }
        }
        DensityOperator::trusted(out.hermitian_part())
    }

    /// `(1/d) sum_i |ii><ii| (x) U_i sigma U_i†`
    pub fn key_attack(&self) -> DensityOperator<T> {
        let d = self.d;
        let mut out = TensorOperator::zeros(&self.dims());
        let weight = T::one() / T::from_usize_lossy(d);
        for (i, s) in self.conditional_states().iter().enumerate() {
            write_key_block(&mut out, i * d + i, i * d + i, s, weight);
        }
        DensityOperator::trusted(out)
    }
}

/// Writes `weight * blk` into key block `(a, b)` of `out`.
fn write_key_block<T: Real>(
    out: &mut TensorOperator<T>,
    a: usize,
    b: usize,
    blk: &TensorOperator<T>,
    weight: T,
) {
    let s = blk.dim();
    let n = out.dim();
    let data = out.data_mut();
    for r in 0..s {
        for c in 0..s {
            data[(a * s + r) * n + b * s + c] = blk.get(r, c) * cr(weight);
        }
    }
}

pub fn pdit<T: Real>(spec: &PrivateStateSpec<T>) -> DensityOperator<T> {
    spec.pdit()
}

pub fn key_attack<T: Real>(spec: &PrivateStateSpec<T>) -> DensityOperator<T> {
    spec.key_attack()
}

/// Hadamard word `H^{(x) log2 d}` as a `d x d` matrix.
pub fn hadamard_word<T: Real>(d: usize) -> Result<TensorOperator<T>> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::domain(format!("d = {d} is not a power of two")));
    }
    let scale = T::one() / T::from_usize_lossy(d).sqrt();
    Ok(TensorOperator::from_fn(&[d], |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 { T::one() } else { -T::one() };
        cr(sign * scale)
    }))
}

/// Flower pbit: shield `C^d (x) C^d` holding the maximally correlated state,
/// `U_0 = I` and `U_1` the Hadamard word acting on `span{|ii>}` (identity on
/// the complement).
pub fn flower<T: Real>(d: usize) -> Result<PrivateStateSpec<T>> {
    let w = hadamard_word::<T>(d)?;
    let shield = [d, d];
    let diag = |i: usize| i * d + i;
    let mut sigma = TensorOperator::zeros(&shield);
    let mut u1 = TensorOperator::identity(&shield);
    let inv = T::one() / T::from_usize_lossy(d);
    for i in 0..d {
        sigma.set(diag(i), diag(i), cr(inv));
        for j in 0..d {
            u1.set(diag(i), diag(j), w.get(i, j));
        }
    }
    let sigma = DensityOperator::trusted(sigma);
    PrivateStateSpec::new(2, sigma, vec![TensorOperator::identity(&shield), u1])
}
