use std::ops::Deref;

use super::tensor::TensorOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A two-sided split of the subsystem index range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// `left` plus its complement in `0..count`.
    pub fn new(left: Vec<usize>, count: usize) -> Result<Self> {
        let mut seen = vec![false; count];
        for &k in &left {
            if k >= count {
                return Err(Error::InvalidSubsystem { index: k, count });
            }
            if seen[k] {
                return Err(Error::dims(format!("subsystem {k} listed twice in cut")));
            }
            seen[k] = true;
        }
        let right = (0..count).filter(|&k| !seen[k]).collect();
        let mut left = left;
        left.sort_unstable();
        Ok(Self { left, right })
    }

    /// Subsystems `0..k` against `k..count`.
    pub fn split_at(k: usize, count: usize) -> Result<Self> {
        Self::new((0..k.min(count)).collect(), count)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn count(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub(crate) fn check(&self, count: usize) -> Result<()> {
        if self.count() != count {
            return Err(Error::dims(format!(
                "cut covers {} subsystems, operator has {count}",
                self.count()
            )));
        }
        Ok(())
    }

    /// Permutation placing the left side first (for `permute_subsystems`).
    pub fn left_first_permutation(&self) -> Vec<usize> {
        self.left.iter().chain(&self.right).copied().collect()
    }
}

/// A validated quantum state: Hermitian, positive semidefinite and of unit
/// trace, each within `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Real> {
    op: TensorOperator<T>,
    tol: T,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(op: TensorOperator<T>) -> Result<Self> {
        Self::with_tol(op, T::default_tol())
    }

    pub fn with_tol(op: TensorOperator<T>, tol: T) -> Result<Self> {
        let h = op.hermiticity_defect();
        if h > tol {
            return Err(Error::NotHermitian(h.to_f64_lossy()));
        }
        let tr = op.trace().re;
        if (tr - T::one()).abs() > tol {
            return Err(Error::NotUnitTrace(tr.to_f64_lossy()));
        }
        let min = op.eigvalsh().last().copied().unwrap_or(T::zero());
        if min < -tol {
            return Err(Error::NotPositive(min.to_f64_lossy()));
        }
        Ok(Self { op, tol })
    }

    /// Wraps an operator that is a state by construction, skipping the
    /// eigenvalue check. Hermiticity and trace are still debug-asserted.
    pub(crate) fn trusted(op: TensorOperator<T>) -> Self {
        debug_assert!(op.hermiticity_defect() <= T::lit(1e-6));
        debug_assert!((op.trace().re - T::one()).abs() <= T::lit(1e-6));
        Self { op, tol: T::default_tol() }
    }

    /// `|psi><psi| / <psi|psi>`
    pub fn pure(dims: &[usize], psi: &[crate::scalar::C<T>]) -> Result<Self> {
        let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= T::zero() {
            return Err(Error::domain("zero vector"));
        }
        let op = TensorOperator::projector(dims, psi)?.scale(T::one() / norm);
        Ok(Self::trusted(op))
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        Self::trusted(TensorOperator::identity(dims).scale(T::one() / T::from_usize_lossy(n)))
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn as_op(&self) -> &TensorOperator<T> {
        &self.op
    }

    pub fn into_op(self) -> TensorOperator<T> {
        self.op
    }

    /// Eigenvalues with values in `[-tol, 0)` clamped to zero.
    pub fn spectrum(&self) -> Vec<T> {
        self.op
            .eigvalsh()
            .into_iter()
            .map(|x| if x < T::zero() && x >= -self.tol { T::zero() } else { x })
            .collect()
    }

    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        Ok(Self { op: self.op.partial_trace(traced)?, tol: self.tol })
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self { op: self.op.reduced(keep)?, tol: self.tol })
    }

    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self { op: self.op.permute_subsystems(perm)?, tol: self.tol })
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { op: self.op.kron(&other.op), tol: self.tol.max(other.tol) }
    }

    /// `U rho U†` for a unitary `U` (checked to `tol`).
    pub fn conjugate_by(&self, u: &TensorOperator<T>) -> Result<Self> {
        let defect = u.unitarity_defect();
        if defect > self.tol {
            return Err(Error::NotUnitary(defect.to_f64_lossy()));
        }
        let out = self.op.conjugate_by(u)?.reshaped(self.op.dims())?;
        Ok(Self { op: out.hermitian_part(), tol: self.tol })
    }

    /// Convex combination `(1-w) self + w other`.
    pub fn mix(&self, other: &Self, w: T) -> Result<Self> {
        let mut op = self.op.scale(T::one() - w);
        op.add_scaled_assign(crate::scalar::cr(w), &other.op)?;
        Ok(Self { op, tol: self.tol })
    }

    pub fn cast<U: Real>(&self) -> DensityOperator<U> {
        DensityOperator { op: self.op.cast(), tol: U::default_tol() }
    }
}

impl<T: Real> Deref for DensityOperator<T> {
    type Target = TensorOperator<T>;

    fn deref(&self) -> &TensorOperator<T> {
        &self.op
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;

    #[test]
    fn bipartition_complements() {
        let b = Bipartition::new(vec![2, 0], 4).unwrap();
        assert_eq!(b.left(), &[0, 2]);
        assert_eq!(b.right(), &[1, 3]);
        assert!(Bipartition::new(vec![4], 4).is_err());
        assert!(Bipartition::new(vec![1, 1], 4).is_err());
    }

    #[test]
    fn validation_rejects_bad_states() {
        let bad_trace = TensorOperator::<f64>::identity(&[2]);
        assert!(matches!(DensityOperator::new(bad_trace), Err(Error::NotUnitTrace(_))));
        let neg = TensorOperator::<f64>::from_diag(&[2], &[1.5, -0.5]).unwrap();
        assert!(matches!(DensityOperator::new(neg), Err(Error::NotPositive(_))));
        let mut nh = TensorOperator::<f64>::from_diag(&[2], &[0.5, 0.5]).unwrap();
        nh.set(0, 1, cr(0.1));
        assert!(matches!(DensityOperator::new(nh), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clamped() {
        let op = TensorOperator::<f64>::from_diag(&[2], &[1.0 + 1e-11, -1e-11]).unwrap();
        let rho = DensityOperator::new(op).unwrap();
        assert_eq!(rho.spectrum()[1], 0.0);
    }
}
