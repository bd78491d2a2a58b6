//! Entropies, entanglement quantities and separability tests. Logarithms are base 2.

use crate::error::{Error, Result};
use crate::op::{Bipartition, DensityOperator, TensorOperator};
use crate::scalar::Real;
use crate::states::PrivateStateSpec;

/// Eigenvalues in non-increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedSpectrum<T: Real> {
    values: Vec<T>,
}

impl<T: Real> SortedSpectrum<T> {
    pub fn of(rho: &DensityOperator<T>) -> Self {
        Self { values: rho.spectrum() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Shannon entropy of the (clamped) spectrum.
    pub fn entropy(&self) -> T {
        shannon(&self.values)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`; negative entries are ignored.
pub fn shannon<T: Real>(p: &[T]) -> T {
    p.iter().map(|&x| eta(x.max(T::zero())).unwrap_or(T::zero())).sum()
}

pub fn vn_entropy<T: Real>(rho: &DensityOperator<T>) -> T {
    shannon(&rho.spectrum())
}

/// Entropy of a PSD operator that need not have unit trace: `-Tr X log2 X`.
pub(crate) fn entropy_unnormalized<T: Real>(x: &TensorOperator<T>) -> T {
    x.eigvalsh().into_iter().filter(|&v| v > T::zero()).map(|v| -v * v.log2()).sum()
}

/// `D(rho || sigma)`; `+inf` when `rho` is not supported inside `sigma`.
pub fn relative_entropy<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    if rho.dims().iter().product::<usize>() != sigma.dims().iter().product::<usize>() {
        return Err(Error::dims(format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
    }
    let cutoff = T::lit(T::SUPPORT_CUTOFF);
    let es = sigma.herm_eig_with_tol(sigma.tol())?;
    let n = rho.dim();
    // Tr rho log sigma = sum_k <s_k|rho|s_k> log l_k
    let mut cross = T::zero();
    for k in 0..n {
        let v = es.vector(k);
        let w = rho.apply(&v)?;
        let weight = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<T>();
        let lk = es.values[k];
        if lk <= cutoff {
            if weight > cutoff {
                return Ok(T::infinity());
            }
            continue;
        }
        cross = cross + weight * lk.log2();
    }
    let neg_s: T = rho.spectrum().iter().filter(|&&v| v > T::zero()).map(|&v| v * v.log2()).sum();
    Ok((neg_s - cross).max(T::zero()))
}

pub fn mutual_information<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    cut.check(rho.num_subsystems())?;
    let sl = vn_entropy(&rho.reduced(cut.left())?);
    let sr = vn_entropy(&rho.reduced(cut.right())?);
    Ok(sl + sr - vn_entropy(rho))
}

/// `S(L|R) = S(LR) - S(R)` for the cut `L : R`.
pub fn conditional_entropy<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    cut.check(rho.num_subsystems())?;
    Ok(vn_entropy(rho) - vn_entropy(&rho.reduced(cut.right())?))
}

fn check_unit<T: Real>(x: T, name: &str) -> Result<()> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::domain(format!("{name} argument {x} outside [0, 1]")));
    }
    Ok(())
}

pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    check_unit(x, "binary entropy")?;
    Ok(eta(x)? + eta(T::one() - x)?)
}

/// `-x log2 x`, with `eta(0) = 0`.
pub fn eta<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("eta argument {x} is negative")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    Ok(-x * x.log2())
}

/// `eps log2 dim + eta(eps)`
pub fn fannes_bound<T: Real>(eps: T, dim: usize) -> Result<T> {
    Ok(eps * T::from_usize_lossy(dim).log2() + eta(eps)?)
}

/// `4 eps log2 dim_x + h(eps)`
pub fn alicki_fannes_bound<T: Real>(eps: T, dim_x: usize) -> Result<T> {
    Ok(T::lit(4.0) * eps * T::from_usize_lossy(dim_x).log2() + binary_entropy(eps)?)
}

/// `||rho^Gamma||_1`
pub fn negativity_norm<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    Ok(rho.partial_transpose(cut)?.trace_norm())
}

/// `(||rho^Gamma||_1 - 1) / 2`
pub fn negativity<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    Ok(((negativity_norm(rho, cut)? - T::one()) / T::lit(2.0)).max(T::zero()))
}

pub fn log_negativity<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition) -> Result<T> {
    Ok(negativity_norm(rho, cut)?.log2().max(T::zero()))
}

/// `log2(1 + ||X^Gamma||_1)` with `X = U_0 sigma U_1†`, the pbit block formula.
pub fn pbit_log_negativity<T: Real>(spec: &PrivateStateSpec<T>) -> Result<T> {
    if spec.d() != 2 {
        return Err(Error::domain(format!("block formula needs d = 2, got {}", spec.d())));
    }
    let u = spec.unitaries();
    let x = u[0].matmul(spec.sigma())?.matmul(&u[1].adjoint())?;
    let xg = x.partial_transpose_subsystems(&[1])?;
    Ok((T::one() + xg.trace_norm()).log2())
}

/// Minimum eigenvalue of `rho^Gamma` is at least `-tol`.
pub fn is_ppt<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition, tol: T) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho, cut)? >= -tol)
}

pub fn min_pt_eigenvalue<T: Real>(rho: &TensorOperator<T>, cut: &Bipartition) -> Result<T> {
    let pt = rho.partial_transpose(cut)?;
    Ok(pt.eigvalsh().last().copied().unwrap_or(T::zero()))
}

/// Two-qubit absolute separability: `l1 <= l3 + 2 sqrt(l2 l4)`.
pub fn is_abs_separable_2q<T: Real>(rho: &DensityOperator<T>) -> Result<bool> {
    if rho.dims() != [2, 2] {
        return Err(Error::dims(format!("expected two qubits, got {:?}", rho.dims())));
    }
    let l = rho.spectrum();
    let rhs = l[2] + T::lit(2.0) * (l[1].max(T::zero()) * l[3].max(T::zero())).sqrt();
    Ok(l[0] <= rhs + T::lit(1e-12))
}

/// `||a - b||_1`, without the factor one half.
pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    if a.dims() != b.dims() {
        return Err(Error::dims(format!("{:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(a.sub(b)?.trace_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;
    use crate::states::{flower, key_shield_cut, omega_example};
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityOperator<f64> {
        let s = 0.5f64.sqrt();
        DensityOperator::pure(&[2, 2], &[cr(s), cr(0.0), cr(0.0), cr(s)]).unwrap()
    }

    fn classical() -> DensityOperator<f64> {
        DensityOperator::new(TensorOperator::from_diag(&[2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap()).unwrap()
    }

    #[test]
    fn entropies_of_standard_states() {
        assert_abs_diff_eq!(vn_entropy(&bell()), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vn_entropy(&DensityOperator::<f64>::maximally_mixed(&[3])), 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(vn_entropy(&omega_example::<f64>(0.0).0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn relative_entropy_identities() {
        let b = bell();
        assert_abs_diff_eq!(relative_entropy(&b, &b).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(relative_entropy(&b, &classical()).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(&[2, 2]);
        let w = omega_example::<f64>(0.0).0;
        assert_abs_diff_eq!(relative_entropy(&w, &mixed).unwrap(), 2.0 - vn_entropy(&w), epsilon = 1e-12);
        assert!(relative_entropy(&classical(), &b).unwrap().is_infinite());
    }

    #[test]
    fn informations() {
        let cut = Bipartition::split_at(1, 2).unwrap();
        assert_abs_diff_eq!(mutual_information(&bell(), &cut).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(conditional_entropy(&bell(), &cut).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&classical(), &cut).unwrap(), 1.0, epsilon = 1e-12);
        let prod = DensityOperator::<f64>::maximally_mixed(&[2]).kron(&DensityOperator::maximally_mixed(&[3]));
        assert_abs_diff_eq!(mutual_information(&prod, &cut).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn scalar_functions() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(eta(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(eta(0.5).unwrap(), 0.5);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(eta(-0.1).is_err());
        let e = (-1.0f64).exp();
        let grid: Vec<f64> = (0..=100).map(|k| e * k as f64 / 100.0).collect();
        assert!(grid.windows(2).all(|w| eta(w[0]).unwrap() < eta(w[1]).unwrap()));
        assert_abs_diff_eq!(fannes_bound(0.1, 4).unwrap(), 0.2 + eta(0.1).unwrap());
        assert_abs_diff_eq!(alicki_fannes_bound(0.1, 2).unwrap(), 0.4 + binary_entropy(0.1).unwrap());
    }

    #[test]
    fn negativities() {
        let cut = Bipartition::split_at(1, 2).unwrap();
        assert_abs_diff_eq!(log_negativity(&bell(), &cut).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(negativity(&bell(), &cut).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(log_negativity(&classical(), &cut).unwrap(), 0.0, epsilon = 1e-12);
        assert!(!is_ppt(&bell(), &cut, 1e-12).unwrap());
        assert!(is_ppt(&classical(), &cut, 1e-12).unwrap());

        let spec = flower::<f64>(2).unwrap();
        let target = (1.0 + 2f64.sqrt()).log2();
        let dense = log_negativity(&spec.pdit(), &key_shield_cut(4)).unwrap();
        assert_abs_diff_eq!(dense, target, epsilon = 1e-10);
        assert_abs_diff_eq!(pbit_log_negativity(&spec).unwrap(), target, epsilon = 1e-10);

        let basic = PrivateStateSpec::<f64>::basic(2, DensityOperator::maximally_mixed(&[2, 2])).unwrap();
        assert_abs_diff_eq!(pbit_log_negativity(&basic).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn absolute_separability() {
        assert!(is_abs_separable_2q(&DensityOperator::<f64>::maximally_mixed(&[2, 2])).unwrap());
        assert!(!is_abs_separable_2q(&bell()).unwrap());
        assert!(!is_abs_separable_2q(&omega_example::<f64>(0.0).0).unwrap());
    }

    #[test]
    fn distances() {
        let b = bell();
        assert_abs_diff_eq!(trace_distance(&b, &b).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&b, &DensityOperator::maximally_mixed(&[2, 2])).unwrap(), 1.5, epsilon = 1e-12);
        let z = DensityOperator::<f64>::pure(&[2], &[cr(1.0), cr(0.0)]).unwrap();
        let o = DensityOperator::<f64>::pure(&[2], &[cr(0.0), cr(1.0)]).unwrap();
        assert_abs_diff_eq!(trace_distance(&z, &o).unwrap(), 2.0, epsilon = 1e-12);
    }
}
