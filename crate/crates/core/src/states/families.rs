use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::op::{DensityOperator, TensorOperator};
use crate::random::{haar_unitary, rng_from_seed};
use crate::scalar::{cr, Real};

/// Default cap on the total dimension of densely built states.
pub const DEFAULT_DIM_BUDGET: usize = 2048;

/// The separable but not absolutely separable two-qubit state omega,
/// together with the twisting `V(theta)` that keeps it PPT.
pub fn omega_example<T: Real>(theta: T) -> (DensityOperator<T>, TensorOperator<T>) {
    let q = 0.25;
    let omega = TensorOperator::from_real_rows(
        &[2, 2],
        &[&[q, 0.0, 0.0, q], &[0.0, q, q, 0.0], &[0.0, q, q, 0.0], &[q, 0.0, 0.0, q]],
    )
    .expect("4x4 literal");
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    let rows = [
        [z, z, T::one(), z],
        [s, -c, z, z],
        [c, s, z, z],
        [z, z, z, -T::one()],
    ];
    let v = TensorOperator::from_fn(&[2, 2], |i, j| cr(rows[i][j]));
    (DensityOperator::trusted(omega), v)
}

/// `diag(1, 0, 0, 1) / 2`, which `V(theta)` maps out of the PPT set.
pub fn omega_tilde<T: Real>() -> DensityOperator<T> {
    let h = T::lit(0.5);
    let z = T::zero();
    DensityOperator::trusted(TensorOperator::from_diag(&[2, 2], &[h, z, z, h]).expect("4 entries"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WernerKind {
    Symmetric,
    Antisymmetric,
}

/// Normalized projector onto the (anti)symmetric subspace of `C^d (x) C^d`.
pub fn werner<T: Real>(d: usize, kind: WernerKind) -> Result<DensityOperator<T>> {
    if d < 2 {
        return Err(Error::domain(format!("Werner state needs d >= 2, got {d}")));
    }
    let (sign, norm) = match kind {
        WernerKind::Symmetric => (T::one(), d * (d + 1)),
        WernerKind::Antisymmetric => (-T::one(), d * (d - 1)),
    };
    let inv = T::one() / T::from_usize_lossy(norm);
    let op = TensorOperator::from_fn(&[d, d], |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        let id = if r == c { T::one() } else { T::zero() };
        let swap = if i == l && j == k { sign } else { T::zero() };
        cr((id + swap) * inv)
    });
    Ok(DensityOperator::trusted(op))
}

/// The PPT key family on `C^2 (x) C^2 (x) (C^{d^k} (x) C^{d^k})^{(x) m}`.
///
/// Subsystems are `[A, B, A'_1, B'_1, ..., A'_{km}, B'_{km}]`, each shield
/// factor of dimension `dtilde`; use [`super::key_shield_cut`] for `AA':BB'`.
pub fn rec_ppt_key_state<T: Real>(p: T, dtilde: usize, k: usize, m: usize) -> Result<DensityOperator<T>> {
    rec_ppt_key_state_with_budget(p, dtilde, k, m, DEFAULT_DIM_BUDGET)
}

pub fn rec_ppt_key_state_with_budget<T: Real>(
    p: T,
    dtilde: usize,
    k: usize,
    m: usize,
    max_dim: usize,
) -> Result<DensityOperator<T>> {
    if !(p > T::zero() && p < T::lit(0.5)) {
        return Err(Error::domain(format!("p = {p} outside (0, 1/2)")));
    }
    if k == 0 || m == 0 {
        return Err(Error::domain("k and m must be positive"));
    }
    let pairs = k
        .checked_mul(m)
        .and_then(|km| km.checked_mul(2))
        .ok_or(Error::Budget { needed: u128::MAX, limit: max_dim as u128 })?;
    let needed = (dtilde as u128)
        .checked_pow(pairs as u32)
        .and_then(|s| s.checked_mul(4))
        .unwrap_or(u128::MAX);
    if needed > max_dim as u128 {
        return Err(Error::Budget { needed, limit: max_dim as u128 });
    }
    let rs = werner::<T>(dtilde, WernerKind::Symmetric)?.into_op();
    let ra = werner::<T>(dtilde, WernerKind::Antisymmetric)?.into_op();
    let half = T::lit(0.5);
    let mix = rs.add(&ra)?.scale(half);
    let tau1 = power(&mix, k);
    let tau2 = power(&rs, k);
    let corner = power(&tau1.add(&tau2)?.scale(p * half), m);
    let coherence = power(&tau1.sub(&tau2)?.scale(p * half), m);
    let flip = power(&tau2.scale(half - p), m);
    let norm = T::lit(2.0) * (p.powi(m as i32) + (half - p).powi(m as i32));

    let mut dims = vec![2, 2];
    dims.extend(std::iter::repeat(dtilde).take(pairs));
    let s = corner.dim();
    let n = 4 * s;
    let mut out = TensorOperator::zeros(&dims);
    let inv = cr(T::one() / norm);
    let data = out.data_mut();
    for (a, b, blk) in [
        (0, 0, &corner),
        (3, 3, &corner),
        (0, 3, &coherence),
        (3, 0, &coherence),
        (1, 1, &flip),
        (2, 2, &flip),
    ] {
        for r in 0..s {
            for c in 0..s {
                data[(a * s + r) * n + b * s + c] = blk.get(r, c) * inv;
            }
        }
    }
    Ok(DensityOperator::trusted(out))
}

fn power<T: Real>(op: &TensorOperator<T>, n: usize) -> TensorOperator<T> {
    TensorOperator::kron_all(std::iter::repeat(op).take(n)).expect("n >= 1")
}

/// Random two-qubit absolutely separable state: a Dirichlet(1,1,1,1)
/// spectrum accepted only when `l1 <= l3 + 2 sqrt(l2 l4)`, then rotated by a
/// Haar-random unitary.
pub fn abs_sep_sample<T: Real>(seed: u64) -> DensityOperator<T> {
    let mut rng = rng_from_seed(seed);
    let spectrum = loop {
        let mut x: [f64; 4] = std::array::from_fn(|_| rng.sample(Exp1));
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        let mut sorted = x;
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted[0] <= sorted[2] + 2.0 * (sorted[1] * sorted[3]).sqrt() {
            break x;
        }
    };
    let diag: Vec<T> = spectrum.iter().map(|&v| T::lit(v)).collect();
    let d = TensorOperator::from_diag(&[2, 2], &diag).expect("4 entries");
    let u = haar_unitary::<T, _>(&[2, 2], &mut rng);
    let op = d.conjugate_by(&u).expect("same dims").hermitian_part();
    DensityOperator::trusted(op)
}
