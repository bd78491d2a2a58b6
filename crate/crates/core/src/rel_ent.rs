//! Upper estimates of the relative entropy of entanglement.
//!
//! [`er_upper_fw`] runs pairwise Frank-Wolfe over convex combinations of
//! product pure states. Every returned value is `D(rho || omega)` for an
//! explicit separable `omega`, hence a valid upper bound whether or not the
//! run converged.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measures::{relative_entropy, vn_entropy};
use crate::op::{Bipartition, DensityOperator, TensorOperator};
use crate::random::{normalize, random_pure, rng_from_seed};
use crate::scalar::{cr, czero, Real, C};
use crate::states::{key_shield_cut, PrivateStateSpec, DEFAULT_DIM_BUDGET};

/// Solver settings for [`er_upper_fw`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FwParams {
    pub max_iters: usize,
    /// Independent runs; run 0 starts from `(I/D + diag(rho))/2`, the rest
    /// from random product mixtures. The best run wins.
    pub restarts: usize,
    /// Alternating passes per linear subproblem.
    pub oracle_sweeps: usize,
    /// Stop once the Frank-Wolfe gap falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for FwParams {
    fn default() -> Self {
        Self { max_iters: 400, restarts: 2, oracle_sweeps: 12, tol: 1e-7, seed: 0 }
    }
}

impl FwParams {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 || self.oracle_sweeps == 0 || !(self.tol > 0.0) {
            return Err(Error::domain("Frank-Wolfe parameters must be positive"));
        }
        Ok(())
    }
}

/// Convex combination of product pure states across a cut.
#[derive(Clone, Debug)]
pub struct SeparableCandidate<T: Real> {
    dims: Vec<usize>,
    cut: Bipartition,
    weights: Vec<T>,
    factors: Vec<(Vec<C<T>>, Vec<C<T>>)>,
}

impl<T: Real> SeparableCandidate<T> {
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `(left vector, right vector)` per term; left indexes the cut's left
    /// subsystems in increasing order.
    pub fn factors(&self) -> &[(Vec<C<T>>, Vec<C<T>>)] {
        &self.factors
    }

    /// The mixture in the original subsystem order.
    pub fn assemble(&self) -> DensityOperator<T> {
        let perm = self.cut.left_first_permutation();
        let grouped: Vec<usize> = perm.iter().map(|&k| self.dims[k]).collect();
        let mut op = TensorOperator::zeros(&grouped);
        for (w, (a, b)) in self.weights.iter().zip(&self.factors) {
            add_product_projector(&mut op, a, b, *w);
        }
        let mut inverse = vec![0; perm.len()];
        for (pos, &k) in perm.iter().enumerate() {
            inverse[k] = pos;
        }
        let op = op.permute_subsystems(&inverse).expect("valid permutation");
        DensityOperator::trusted(op.hermitian_part())
    }
}

fn add_product_projector<T: Real>(op: &mut TensorOperator<T>, a: &[C<T>], b: &[C<T>], w: T) {
    let n = op.dim();
    let v: Vec<C<T>> = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
    let data = op.data_mut();
    for i in 0..n {
        if v[i] == czero() {
            continue;
        }
        let vi = v[i] * w;
        for j in 0..n {
            data[i * n + j] = data[i * n + j] + vi * v[j].conj();
        }
    }
}

/// Outcome of [`er_upper_fw`].
#[derive(Clone, Debug)]
pub struct FwResult<T: Real> {
    /// `D(rho || witness)` in bits (single copy).
    pub value: T,
    pub witness: SeparableCandidate<T>,
    /// Iterations of the winning run.
    pub iterations: usize,
    /// Last Frank-Wolfe gap of the winning run.
    pub gap: T,
    pub converged: bool,
}

/// `log2 D - S(rho)`, the bound from the maximally mixed separable state.
pub fn er_trivial_upper<T: Real>(rho: &DensityOperator<T>) -> T {
    (T::from_usize_lossy(rho.dim()).log2() - vn_entropy(rho)).max(T::zero())
}

struct Problem<T: Real> {
    rho: TensorOperator<T>,
    neg_entropy: T,
    dl: usize,
    dr: usize,
}

struct Run<T: Real> {
    weights: Vec<T>,
    atoms: Vec<(Vec<C<T>>, Vec<C<T>>)>,
    value: T,
    gap: T,
    iterations: usize,
    converged: bool,
}

/// Frank-Wolfe upper estimate of `E_r(rho)` across `cut`.
pub fn er_upper_fw<T: Real>(rho: &DensityOperator<T>, cut: &Bipartition, params: &FwParams) -> Result<FwResult<T>> {
    params.validate()?;
    cut.check(rho.num_subsystems())?;
    let perm = cut.left_first_permutation();
    let grouped = rho.as_op().permute_subsystems(&perm)?;
    let dl: usize = cut.left().iter().map(|&k| rho.dims()[k]).product();
    let dr: usize = cut.right().iter().map(|&k| rho.dims()[k]).product();
    let grouped = grouped.reshaped(&[dl * dr])?;
    let problem = Problem { neg_entropy: -vn_entropy(rho), rho: grouped, dl, dr };

    let mut best: Option<Run<T>> = None;
    for r in 0..params.restarts {
        let mut rng = rng_from_seed(params.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64));
        let run = problem.run(r, params, &mut rng);
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    let run = best.expect("at least one restart");
    let witness = SeparableCandidate {
        dims: rho.dims().to_vec(),
        cut: cut.clone(),
        weights: run.weights,
        factors: run.atoms,
    };
    let value = relative_entropy(rho, &witness.assemble())?;
    Ok(FwResult { value, witness, iterations: run.iterations, gap: run.gap, converged: run.converged })
}

impl<T: Real> Problem<T> {
    fn dim(&self) -> usize {
        self.dl * self.dr
    }

    fn basis(n: usize, i: usize) -> Vec<C<T>> {
        let mut v = vec![czero(); n];
        v[i] = cr(T::one());
        v
    }

    fn initial<R: Rng + ?Sized>(&self, restart: usize, rng: &mut R) -> (Vec<T>, Vec<(Vec<C<T>>, Vec<C<T>>)>) {
        let d = self.dim();
        let half = T::lit(0.5);
        let mut weights = Vec::new();
        let mut atoms = Vec::new();
        for i in 0..self.dl {
            for j in 0..self.dr {
                let k = i * self.dr + j;
                let w = if restart == 0 {
                    half / T::from_usize_lossy(d) + half * self.rho.get(k, k).re.max(T::zero())
                } else {
                    half / T::from_usize_lossy(d)
                };
                weights.push(w);
                atoms.push((Self::basis(self.dl, i), Self::basis(self.dr, j)));
            }
        }
        if restart > 0 {
            let extra = d;
            for _ in 0..extra {
                weights.push(half / T::from_usize_lossy(extra));
                atoms.push((random_pure(self.dl, rng), random_pure(self.dr, rng)));
            }
        }
        let total: T = weights.iter().copied().sum();
        weights.iter_mut().for_each(|w| *w = *w / total);
        (weights, atoms)
    }

    fn assemble(&self, weights: &[T], atoms: &[(Vec<C<T>>, Vec<C<T>>)]) -> TensorOperator<T> {
        let mut op = TensorOperator::zeros(&[self.dim()]);
        for (w, (a, b)) in weights.iter().zip(atoms) {
            if *w > T::zero() {
                add_product_projector(&mut op, a, b, *w);
            }
        }
        op
    }

    /// `D(rho || omega)` in bits, `+inf` off support.
    fn objective(&self, omega: &TensorOperator<T>) -> T {
        let eig = match omega.hermitian_part().herm_eig_with_tol(T::infinity()) {
            Ok(e) => e,
            Err(_) => return T::infinity(),
        };
        let cutoff = T::lit(T::SUPPORT_CUTOFF);
        let mut cross = T::zero();
        for (k, &mu) in eig.values.iter().enumerate() {
            let v = eig.vector(k);
            let w = self.rho.apply(&v).expect("same dim");
            let weight: T = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            if mu <= cutoff {
                if weight > cutoff {
                    return T::infinity();
                }
                continue;
            }
            cross = cross - weight * mu.log2();
        }
        self.neg_entropy + cross
    }

    /// Gradient of `omega -> D(rho || omega)`: `-(1/ln 2) W (rho~ o L) W†`.
    fn gradient(&self, omega: &TensorOperator<T>) -> TensorOperator<T> {
        let n = self.dim();
        let eig = omega.hermitian_part().herm_eig_with_tol(T::infinity()).expect("hermitian");
        let floor = T::lit(1e-12);
        let mu: Vec<T> = eig.values.iter().map(|&v| v.max(floor)).collect();
        let w = &eig.vectors;
        let rt = w.adjoint().matmul(&self.rho).and_then(|x| x.matmul(w)).expect("same dim");
        let scale = -T::one() / T::LN_2();
        let inner = TensorOperator::from_fn(&[n], |i, j| {
            let (a, b) = (mu[i], mu[j]);
            let l = if (a - b).abs() <= T::lit(1e-14) * a.max(b) {
                T::one() / a
            } else {
                (a.ln() - b.ln()) / (a - b)
            };
            rt.get(i, j) * cr(l * scale)
        });
        w.matmul(&inner).and_then(|x| x.matmul(&w.adjoint())).expect("same dim").hermitian_part()
    }

    /// `<ab|G|ab>`
    fn atom_value(&self, g: &TensorOperator<T>, a: &[C<T>], b: &[C<T>]) -> T {
        let (dl, dr) = (self.dl, self.dr);
        let (n, data) = (dl * dr, g.data());
        let mut acc = czero::<T>();
        for i in 0..dl {
            for j in 0..dr {
                let row = &data[(i * dr + j) * n..][..n];
                let mut inner = czero::<T>();
                for k in 0..dl {
                    let part = row[k * dr..][..dr].iter().zip(b).fold(czero::<T>(), |s, (x, y)| s + x * y);
                    inner = inner + a[k] * part;
                }
                acc = acc + (a[i] * b[j]).conj() * inner;
            }
        }
        acc.re
    }

    /// `(I (x) <b|) G (I (x) |b>)`
    fn contract_right(&self, g: &TensorOperator<T>, b: &[C<T>]) -> TensorOperator<T> {
        let (dl, dr) = (self.dl, self.dr);
        let (n, data) = (dl * dr, g.data());
        TensorOperator::from_fn(&[dl], |i, k| {
            let mut acc = czero();
            for j in 0..dr {
                let row = &data[(i * dr + j) * n + k * dr..][..dr];
                let inner = row.iter().zip(b).fold(czero::<T>(), |s, (x, y)| s + x * y);
                acc = acc + b[j].conj() * inner;
            }
            acc
        })
    }

    /// `(<a| (x) I) G (|a> (x) I)`
    fn contract_left(&self, g: &TensorOperator<T>, a: &[C<T>]) -> TensorOperator<T> {
        let (dl, dr) = (self.dl, self.dr);
        let (n, data) = (dl * dr, g.data());
        TensorOperator::from_fn(&[dr], |j, l| {
            let mut acc = czero();
            for i in 0..dl {
                let row = (i * dr + j) * n + l;
                for k in 0..dl {
                    acc = acc + a[i].conj() * data[row + k * dr] * a[k];
                }
            }
            acc
        })
    }

    fn min_vector(m: &TensorOperator<T>) -> Vec<C<T>> {
        if m.dim() == 2 {
            return min_vector_2x2(m);
        }
        let eig = m.hermitian_part().herm_eig_with_tol(T::infinity()).expect("hermitian");
        let mut v = eig.vector(m.dim() - 1);
        normalize(&mut v);
        v
    }

    /// Approximate `argmin <ab|G|ab>` over product pure states.
    fn linear_oracle<R: Rng + ?Sized>(
        &self,
        g: &TensorOperator<T>,
        warm: &[(Vec<C<T>>, Vec<C<T>>)],
        sweeps: usize,
        rng: &mut R,
    ) -> (Vec<C<T>>, Vec<C<T>>, T) {
        let mut starts: Vec<Vec<C<T>>> = warm.iter().map(|(_, b)| b.clone()).collect();
        starts.push(random_pure(self.dr, rng));
        let mut best: Option<(Vec<C<T>>, Vec<C<T>>, T)> = None;
        for mut b in starts {
            let mut a = Self::min_vector(&self.contract_right(g, &b));
            let mut val = self.atom_value(g, &a, &b);
            for _ in 0..sweeps {
                b = Self::min_vector(&self.contract_left(g, &a));
                a = Self::min_vector(&self.contract_right(g, &b));
                let next = self.atom_value(g, &a, &b);
                let stalled = val - next <= T::lit(1e-13) * next.abs().max(T::one());
                val = next;
                if stalled {
                    break;
                }
            }
            if best.as_ref().map_or(true, |x| val < x.2) {
                best = Some((a, b, val));
            }
        }
        best.expect("at least one start")
    }

    fn run<R: Rng + ?Sized>(&self, restart: usize, params: &FwParams, rng: &mut R) -> Run<T> {
        let (mut weights, mut atoms) = self.initial(restart, rng);
        let mut omega = self.assemble(&weights, &atoms);
        let mut value = self.objective(&omega);
        let mut gap = T::infinity();
        let mut last_atom: Vec<(Vec<C<T>>, Vec<C<T>>)> = Vec::new();
        let tol = T::lit(params.tol);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < params.max_iters {
            iterations += 1;
            let g = self.gradient(&omega);
            // away atom has the largest gradient value; the oracle also
            // starts from the smallest, which keeps the gap nonnegative
            let (mut away, mut away_val) = (usize::MAX, T::neg_infinity());
            let (mut toward, mut toward_val) = (usize::MAX, T::infinity());
            for (k, (a, b)) in atoms.iter().enumerate() {
                if weights[k] > T::zero() {
                    let v = self.atom_value(&g, a, b);
                    if v > away_val {
                        away = k;
                        away_val = v;
                    }
                    if v < toward_val {
                        toward = k;
                        toward_val = v;
                    }
                }
            }
            let mut warm = last_atom.clone();
            if toward != usize::MAX {
                warm.push(atoms[toward].clone());
            }
            let (sa, sb, s_val) = self.linear_oracle(&g, &warm, params.oracle_sweeps, rng);
            let omega_val = g.trace_product_re(&omega).expect("same dim");
            gap = omega_val - s_val;
            if gap <= tol {
                converged = true;
                break;
            }
            let s_idx = match atoms.iter().position(|(a, b)| overlap(a, &sa) * overlap(b, &sb) > T::one() - T::lit(1e-12)) {
                Some(k) => k,
                None => {
                    atoms.push((sa.clone(), sb.clone()));
                    weights.push(T::zero());
                    atoms.len() - 1
                }
            };
            last_atom = vec![(sa, sb)];
            if s_idx == away {
                continue;
            }
            let gmax = weights[away];
            let mut dir = TensorOperator::zeros(&[self.dim()]);
            add_product_projector(&mut dir, &atoms[s_idx].0, &atoms[s_idx].1, T::one());
            add_product_projector(&mut dir, &atoms[away].0, &atoms[away].1, -T::one());
            let phi = |gamma: T| {
                let mut trial = omega.clone();
                trial.add_scaled_assign(cr(gamma), &dir).expect("same dim");
                self.objective(&trial)
            };
            let (gamma, new_val) = golden_section(phi, gmax, value);
            if gamma > T::zero() && new_val < value {
                weights[s_idx] = weights[s_idx] + gamma;
                weights[away] = weights[away] - gamma;
                if weights[away] <= T::lit(1e-15) {
                    weights[away] = T::zero();
                }
                omega.add_scaled_assign(cr(gamma), &dir).expect("same dim");
                value = new_val;
            }
            if iterations % 50 == 0 {
                prune(&mut weights, &mut atoms);
                omega = self.assemble(&weights, &atoms);
                value = value.min(self.objective(&omega));
            }
        }
        prune(&mut weights, &mut atoms);
        Run { weights, atoms, value, gap, iterations, converged }
    }
}

/// Lower eigenvector of a 2x2 Hermitian matrix in closed form.
fn min_vector_2x2<T: Real>(m: &TensorOperator<T>) -> Vec<C<T>> {
    let (a, d, b) = (m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1));
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let lambda = mean - ((a - d) * half).hypot(b.norm());
    // (a - lambda) x + b y = 0 and b* x + (d - lambda) y = 0
    let first = [b, cr(lambda - a)];
    let second = [cr(lambda - d), b.conj()];
    let norm_sq = |v: &[C<T>; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let mut v = if norm_sq(&first) >= norm_sq(&second) { first } else { second };
    if norm_sq(&v) <= T::min_positive_value() {
        v = if a <= d { [cr(T::one()), czero()] } else { [czero(), cr(T::one())] };
    }
    let mut v = v.to_vec();
    normalize(&mut v);
    v
}

fn overlap<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter().zip(b).fold(czero::<T>(), |acc, (x, y)| acc + x.conj() * y).norm_sqr()
}

fn prune<T: Real>(weights: &mut Vec<T>, atoms: &mut Vec<(Vec<C<T>>, Vec<C<T>>)>) {
    let mut k = 0;
    while k < weights.len() {
        if weights[k] <= T::zero() {
            weights.swap_remove(k);
            atoms.swap_remove(k);
        } else {
            k += 1;
        }
    }
    let total: T = weights.iter().copied().sum();
    weights.iter_mut().for_each(|w| *w = *w / total);
}

/// Minimizes a convex `phi` on `[0, hi]` to `1e-10`; returns `(0, at_zero)`
/// unless something strictly better is found.
fn golden_section<T: Real>(phi: impl Fn(T) -> T, hi: T, at_zero: T) -> (T, T) {
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut lo, mut up) = (T::zero(), hi);
    let mut x1 = up - ratio * (up - lo);
    let mut x2 = lo + ratio * (up - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    let tol = T::lit(1e-10);
    while up - lo > tol {
        if f1 <= f2 {
            up = x2;
            x2 = x1;
            f2 = f1;
            x1 = up - ratio * (up - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (up - lo);
            f2 = phi(x2);
        }
    }
    let mut best = (T::zero(), at_zero);
    for (x, f) in [(x1, f1), (x2, f2), (hi, phi(hi))] {
        if f < best.1 {
            best = (x, f);
        }
    }
    best
}

/// How the single-copy `E_r(sigma~)` term of [`thm2_bound`] is estimated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErEstimator {
    /// `log2 D - S`
    Trivial,
    FrankWolfe(FwParams),
}

/// `log2 d + E_r(sigma_0 (x) ... (x) sigma_{d-1}) / d` with a single-copy
/// upper estimate in place of the regularized quantity. The product is cut
/// into all `A'` factors against all `B'` factors.
pub fn thm2_bound<T: Real>(spec: &PrivateStateSpec<T>, estimator: &ErEstimator) -> Result<T> {
    thm2_bound_with_budget(spec, estimator, DEFAULT_DIM_BUDGET)
}

pub fn thm2_bound_with_budget<T: Real>(
    spec: &PrivateStateSpec<T>,
    estimator: &ErEstimator,
    max_dim: usize,
) -> Result<T> {
    let d = spec.d();
    let s = spec.sigma().dim() as u128;
    let needed = s.checked_pow(d as u32).unwrap_or(u128::MAX);
    if needed > max_dim as u128 {
        return Err(Error::Budget { needed, limit: max_dim as u128 });
    }
    let product = spec.shield_product();
    let er = match estimator {
        ErEstimator::Trivial => er_trivial_upper(&product),
        ErEstimator::FrankWolfe(p) => er_upper_fw(&product, &key_shield_cut(product.num_subsystems()), p)?.value,
    };
    Ok(T::from_usize_lossy(d).log2() + er / T::from_usize_lossy(d))
}
