//! Hermitian eigendecomposition: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iterations.

use super::tensor::TensorOperator;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real, C};

/// Eigenvalues in non-increasing order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermEig<T: Real> {
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`; dims `[n]`.
    pub vectors: TensorOperator<T>,
}

impl<T: Real> HermEig<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        let n = self.values.len();
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// `V f(Λ) V†` on the supplied dims.
    pub fn apply_fn(&self, dims: &[usize], f: impl Fn(T) -> T) -> TensorOperator<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let v = self.vectors.data();
        let mut out = TensorOperator::zeros(dims);
        for i in 0..n {
            for j in 0..n {
                let mut acc = czero();
                for k in 0..n {
                    if fv[k] != T::zero() {
                        acc = acc + v[i * n + k] * v[j * n + k].conj() * fv[k];
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn reconstruct(&self, dims: &[usize]) -> TensorOperator<T> {
        self.apply_fn(dims, |x| x)
    }
}

impl<T: Real> TensorOperator<T> {
    /// Full eigendecomposition; fails on non-Hermitian input beyond `T::DEFAULT_TOL`.
    pub fn herm_eig(&self) -> Result<HermEig<T>> {
        self.herm_eig_with_tol(T::default_tol())
    }

    pub fn herm_eig_with_tol(&self, tol: T) -> Result<HermEig<T>> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect.to_f64_lossy()));
        }
        let n = self.dim();
        let (values, vectors) = hermitian_eigen(n, self.hermitian_part().data(), true);
        let vectors = TensorOperator::new(vec![n], vectors.expect("requested")).expect("square");
        Ok(HermEig { values, vectors })
    }

    /// Eigenvalues of the Hermitian part, non-increasing. No validation.
    pub fn eigvalsh(&self) -> Vec<T> {
        let n = self.dim();
        hermitian_eigen(n, self.hermitian_part().data(), false).0
    }
}

/// Returns eigenvalues (descending) and optionally eigenvectors as row-major
/// columns. `a` must be Hermitian.
fn hermitian_eigen<T: Real>(n: usize, a: &[C<T>], want_vectors: bool) -> (Vec<T>, Option<Vec<C<T>>>) {
    if n == 0 {
        return (Vec::new(), want_vectors.then(Vec::new));
    }
    let mut a = a.to_vec();
    let mut q: Vec<C<T>> = if want_vectors {
        let mut q = vec![czero(); n * n];
        for i in 0..n {
            q[i * n + i] = cone();
        }
        q
    } else {
        Vec::new()
    };

    let two = T::lit(2.0);
    let mut v = vec![czero::<T>(); n];
    let mut p = vec![czero::<T>(); n];
    for k in 0..n.saturating_sub(2) {
        let r = n - k - 1;
        let off = k + 1;
        let mut tail = T::zero();
        for i in 1..r {
            tail = tail + a[(off + i) * n + k].norm_sqr();
        }
        if tail == T::zero() {
            continue;
        }
        let x0 = a[off * n + k];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let ax0 = x0.norm();
        let phase = if ax0 > T::zero() { x0 / ax0 } else { cone() };
        let alpha = -phase * xnorm;
        for i in 0..r {
            v[i] = a[(off + i) * n + k];
        }
        v[0] = x0 - alpha;
        let vnorm = v[..r].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in &mut v[..r] {
            *z = *z / vnorm;
        }
        // p = B v
        for i in 0..r {
            let row = &a[(off + i) * n + off..(off + i) * n + off + r];
            p[i] = row.iter().zip(&v[..r]).fold(czero(), |acc, (b, x)| acc + b * x);
        }
        let kk: T = (0..r).map(|i| (v[i].conj() * p[i]).re).sum();
        for i in 0..r {
            p[i] = p[i] - v[i] * kk;
        }
        // B -= 2 (v w† + w v†)
        for i in 0..r {
            let vi = v[i] * two;
            let wi = p[i] * two;
            let row = &mut a[(off + i) * n + off..(off + i) * n + off + r];
            for j in 0..r {
                row[j] = row[j] - vi * p[j].conj() - wi * v[j].conj();
            }
        }
        a[off * n + k] = alpha;
        a[k * n + off] = alpha.conj();
        for i in off + 1..n {
            a[i * n + k] = czero();
            a[k * n + i] = czero();
        }
        if want_vectors {
            for row in 0..n {
                let qr = &mut q[row * n + off..row * n + off + r];
                let s = qr.iter().zip(&v[..r]).fold(czero(), |acc, (x, y)| acc + x * y);
                let s2 = s * two;
                for j in 0..r {
                    qr[j] = qr[j] - s2 * v[j].conj();
                }
            }
        }
    }

    // Hermitian tridiagonal -> real symmetric tridiagonal via diagonal phases.
    let mut d: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e = vec![T::zero(); n];
    let mut phases = vec![cone::<T>(); n];
    for i in 0..n - 1 {
        let sub = a[(i + 1) * n + i];
        let m = sub.norm();
        e[i] = m;
        phases[i + 1] = if m > T::zero() { phases[i] * (sub / m) } else { phases[i] };
    }

    // zt row i = column i of Z
    let mut zt: Vec<T> = if want_vectors {
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        z
    } else {
        Vec::new()
    };
    tql2(&mut d, &mut e, want_vectors.then_some(&mut zt[..]), n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&k| d[k]).collect();

    let vectors = want_vectors.then(|| {
        for row in 0..n {
            for i in 0..n {
                q[row * n + i] = q[row * n + i] * phases[i];
            }
        }
        let mut out = vec![czero(); n * n];
        for (col, &k) in order.iter().enumerate() {
            let z = &zt[k * n..(k + 1) * n];
            for row in 0..n {
                let qr = &q[row * n..(row + 1) * n];
                out[row * n + col] = qr.iter().zip(z).fold(czero(), |acc, (x, &y)| acc + x * y);
            }
        }
        out
    });
    (values, vectors)
}

/// Implicit QL on a symmetric tridiagonal matrix (`e[i]` couples `i` and `i+1`).
/// Rotations are accumulated into the rows of `zt` when supplied.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], mut zt: Option<&mut [T]>, n: usize) {
    if n == 0 {
        return;
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..(i + 1) * n];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let hk = zi1[k];
                            zi1[k] = s * zi[k] + c * hk;
                            zi[k] = c * zi[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter > 64 * n {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
}
