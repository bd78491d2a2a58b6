//! Seeded random unitaries and states for sampling and test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::op::{DensityOperator, TensorOperator};
use crate::scalar::{c, czero, Real, C};

/// Deterministic generator used across the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(T::lit(re), T::lit(im))
}

/// Uniformly random unit vector in `C^n`.
pub fn random_pure<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    let mut v: Vec<C<T>> = (0..n).map(|_| gaussian(rng)).collect();
    normalize(&mut v);
    v
}

pub(crate) fn normalize<T: Real>(v: &mut [C<T>]) -> T {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() {
        for z in v.iter_mut() {
            *z = *z / norm;
        }
    }
    norm
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> TensorOperator<T> {
    let n: usize = dims.iter().product();
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C<T>> = (0..n).map(|_| gaussian(rng)).collect();
        // two passes keep the basis orthonormal to working precision
        for _ in 0..2 {
            for q in &cols {
                let proj: C<T> = q.iter().zip(&v).fold(czero(), |acc, (a, b)| acc + a.conj() * b);
                for (x, a) in v.iter_mut().zip(q) {
                    *x = *x - proj * a;
                }
            }
        }
        if normalize(&mut v) > T::lit(1e-6) {
            cols.push(v);
        }
    }
    TensorOperator::from_fn(dims, |i, j| cols[j][i])
}

/// Random mixed state `G G† / Tr(G G†)` with a Ginibre `G` of the given rank.
pub fn random_density<T: Real, R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> DensityOperator<T> {
    let n: usize = dims.iter().product();
    let rank = rank.clamp(1, n);
    let g: Vec<C<T>> = (0..n * rank).map(|_| gaussian(rng)).collect();
    let mut op = TensorOperator::from_fn(dims, |i, j| {
        (0..rank).fold(czero(), |acc, k| acc + g[i * rank + k] * g[j * rank + k].conj())
    });
    let tr = op.trace().re;
    op = op.scale(T::one() / tr).hermitian_part();
    DensityOperator::trusted(op)
}

/// Product of independent random states on each listed factor.
pub fn random_product_state<T: Real, R: Rng + ?Sized>(
    factors: &[&[usize]],
    rng: &mut R,
) -> DensityOperator<T> {
    let mut out: Option<TensorOperator<T>> = None;
    for dims in factors {
        let n: usize = dims.iter().product();
        let f = random_density::<T, R>(dims, rng.gen_range(1..=n), rng).into_op();
        out = Some(match out {
            None => f,
            Some(acc) => acc.kron(&f),
        });
    }
    DensityOperator::trusted(out.unwrap_or_else(|| TensorOperator::identity(&[1])))
}

/// Explicit convex mix of `terms` product states across `left_dims : right_dims`.
pub fn random_separable<T: Real, R: Rng + ?Sized>(
    left_dims: &[usize],
    right_dims: &[usize],
    terms: usize,
    rng: &mut R,
) -> DensityOperator<T> {
    let mut dims = left_dims.to_vec();
    dims.extend_from_slice(right_dims);
    let mut acc = TensorOperator::zeros(&dims);
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let term = random_product_state::<T, R>(&[left_dims, right_dims], rng);
        acc.add_scaled_assign(crate::scalar::cr(T::lit(w / total)), &term)
            .expect("matching dims");
    }
    DensityOperator::trusted(acc.hermitian_part())
}
