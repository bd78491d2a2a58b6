use num_complex::Complex;

use super::density::Bipartition;
use super::{strides, subset_offsets};
use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Real, C};

/// Dense complex square operator on a tensor product of subsystems.
///
/// Entries are stored row-major over the product index; the left tensor
/// factor is the most significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<T: Real> {
    dims: Vec<usize>,
    data: Vec<C<T>>,
}

impl<T: Real> TensorOperator<T> {
    pub fn new(dims: Vec<usize>, data: Vec<C<T>>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::dims("subsystem dimensions must be positive"));
        }
        let n: usize = dims.iter().product();
        if data.len() != n * n {
            return Err(Error::dims(format!(
                "expected {} entries for total dimension {n}, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        Self { dims: dims.to_vec(), data: vec![czero(); n * n] }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let mut out = Self::zeros(dims);
        let n = out.dim();
        for i in 0..n {
            out.data[i * n + i] = cone();
        }
        out
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut out = Self::zeros(dims);
        let n = out.dim();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = f(i, j);
            }
        }
        out
    }

    pub fn from_real_rows(dims: &[usize], rows: &[&[f64]]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::dims(format!("expected {n}x{n} rows")));
        }
        Ok(Self::from_fn(dims, |i, j| cr(T::lit(rows[i][j]))))
    }

    pub fn from_diag(dims: &[usize], diag: &[T]) -> Result<Self> {
        let mut out = Self::zeros(dims);
        let n = out.dim();
        if diag.len() != n {
            return Err(Error::dims(format!("diagonal has {} entries, need {n}", diag.len())));
        }
        for (i, &v) in diag.iter().enumerate() {
            out.data[i * n + i] = cr(v);
        }
        Ok(out)
    }

    /// `|psi><psi|` for an (unnormalized) vector.
    pub fn projector(dims: &[usize], psi: &[C<T>]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if psi.len() != n {
            return Err(Error::dims(format!("vector of length {} on dimension {n}", psi.len())));
        }
        Ok(Self::from_fn(dims, |i, j| psi[i] * psi[j].conj()))
    }

    /// `|i><j|` on the given dims.
    pub fn unit(dims: &[usize], i: usize, j: usize) -> Self {
        let mut out = Self::zeros(dims);
        let n = out.dim();
        out.data[i * n + j] = cone();
        out
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension (product of the local dimensions).
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C<T>> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        let n = self.dim();
        self.data[i * n + j] = v;
    }

    /// Same entries, new subsystem split of the same total dimension.
    pub fn reshaped(mut self, dims: &[usize]) -> Result<Self> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(Error::dims(format!("cannot reshape {:?} into {:?}", self.dims, dims)));
        }
        self.dims = dims.to_vec();
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        Self::from_fn(&self.dims, |i, j| self.data[j * n + i].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self::from_fn(&self.dims, |i, j| self.data[j * n + i])
    }

    pub fn conj(&self) -> Self {
        Self { dims: self.dims.clone(), data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C<T> {
        let n = self.dim();
        (0..n).fold(czero(), |acc, i| acc + self.data[i * n + i])
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dims: self.dims.clone(), data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C<T>) -> Self {
        Self { dims: self.dims.clone(), data: self.data.iter().map(|z| z * s).collect() }
    }

    fn check_same_dim(&self, other: &Self, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dims(format!(
                "{what}: dimensions {:?} and {:?} differ",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        Ok(Self {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        Ok(Self {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self += s * other`
    pub fn add_scaled_assign(&mut self, s: C<T>, other: &Self) -> Result<()> {
        self.check_same_dim(other, "add_scaled")?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matmul")?;
        let n = self.dim();
        let mut out = vec![czero(); n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self { dims: self.dims.clone(), data: out })
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn apply(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::dims(format!("vector length {} vs dimension {n}", v.len())));
        }
        Ok((0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other, "max_abs_diff")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise modulus of `U U† - I`.
    pub fn unitarity_defect(&self) -> T {
        let prod = self.matmul(&self.adjoint()).expect("square");
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { cone() } else { czero() };
                worst = worst.max((prod.data[i * n + j] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Tensor product; `dims` of the result is the concatenation.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let nm = n * m;
        let mut data = vec![czero(); nm * nm];
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for k in 0..m {
                    let dst = (i * m + k) * nm + j * m;
                    let src = &other.data[k * m..(k + 1) * m];
                    for (o, b) in data[dst..dst + m].iter_mut().zip(src) {
                        *o = a * b;
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, data }
    }

    /// Tensor product of a list of operators, left to right.
    pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a Self>) -> Option<Self> {
        let mut it = ops.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, op| acc.kron(op)))
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        let count = self.dims.len();
        let mut seen = vec![false; count];
        for &k in idx {
            if k >= count {
                return Err(Error::InvalidSubsystem { index: k, count });
            }
            if seen[k] {
                return Err(Error::dims(format!("subsystem {k} listed twice")));
            }
            seen[k] = true;
        }
        Ok(())
    }

    /// Partial trace over the listed subsystems; kept subsystems stay in order.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        self.check_indices(traced)?;
        let kept: Vec<usize> = (0..self.dims.len()).filter(|k| !traced.contains(k)).collect();
        let mut traced_sorted = traced.to_vec();
        traced_sorted.sort_unstable();
        let keep_off = subset_offsets(&self.dims, &kept);
        let tr_off = subset_offsets(&self.dims, &traced_sorted);
        let n = self.dim();
        let nk = keep_off.len();
        let mut data = vec![czero(); nk * nk];
        for (r, &ro) in keep_off.iter().enumerate() {
            for (c, &co) in keep_off.iter().enumerate() {
                let mut acc = czero();
                for &t in &tr_off {
                    acc = acc + self.data[(ro + t) * n + co + t];
                }
                data[r * nk + c] = acc;
            }
        }
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { dims, data })
    }

    /// Partial trace keeping only the listed subsystems (in the listed order).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        self.check_indices(keep)?;
        let traced: Vec<usize> = (0..self.dims.len()).filter(|k| !keep.contains(k)).collect();
        let out = self.partial_trace(&traced)?;
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        if sorted == keep {
            return Ok(out);
        }
        let perm: Vec<usize> = keep.iter().map(|k| sorted.iter().position(|s| s == k).unwrap()).collect();
        out.permute_subsystems(&perm)
    }

    /// Transpose of the listed subsystems only.
    pub fn partial_transpose_subsystems(&self, subs: &[usize]) -> Result<Self> {
        self.check_indices(subs)?;
        let rest: Vec<usize> = (0..self.dims.len()).filter(|k| !subs.contains(k)).collect();
        let s_off = subset_offsets(&self.dims, subs);
        let r_off = subset_offsets(&self.dims, &rest);
        let n = self.dim();
        let mut data = vec![czero(); n * n];
        for &ir in &r_off {
            for &is in &s_off {
                let i = ir + is;
                for &jr in &r_off {
                    for &js in &s_off {
                        let j = jr + js;
                        data[(ir + js) * n + jr + is] = self.data[i * n + j];
                    }
                }
            }
        }
        Ok(Self { dims: self.dims.clone(), data })
    }

    /// Partial transpose of the right-hand side of the cut.
    pub fn partial_transpose(&self, side: &Bipartition) -> Result<Self> {
        side.check(self.dims.len())?;
        self.partial_transpose_subsystems(side.right())
    }

    /// Reorders subsystems: new position `k` holds old subsystem `perm[k]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_index_map(&self.dims, perm)?;
        let n = self.dim();
        let mut data = vec![czero(); n * n];
        for i in 0..n {
            let ni = map[i];
            for j in 0..n {
                data[ni * n + map[j]] = self.data[i * n + j];
            }
        }
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self { dims, data })
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> T {
        let tol = T::lit(1e-12) * (T::one() + self.max_entry());
        if self.hermiticity_defect() <= tol {
            let h = self.hermitian_part();
            return h.eigvalsh().into_iter().map(|x| x.abs()).sum();
        }
        // Singular values of A are the positive eigenvalues of [[0, A], [A†, 0]].
        let n = self.dim();
        let big = Self::from_fn(&[2 * n], |i, j| match (i < n, j < n) {
            (true, false) => self.data[i * n + (j - n)],
            (false, true) => self.data[j * n + (i - n)].conj(),
            _ => czero(),
        });
        let s: T = big.eigvalsh().into_iter().map(|x| x.abs()).sum();
        s / T::lit(2.0)
    }

    pub(crate) fn max_entry(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim();
        let half = T::lit(0.5);
        Self::from_fn(&self.dims, |i, j| (self.data[i * n + j] + self.data[j * n + i].conj()) * half)
    }

    /// Real part of the trace of `self * other`.
    pub fn trace_product_re(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other, "trace_product")?;
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for k in 0..n {
                let p = self.data[i * n + k] * other.data[k * n + i];
                acc = acc + p.re;
            }
        }
        Ok(acc)
    }

    /// Principal block `(rows, cols)` given as index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize], dims: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() || rows.len() != dims.iter().product::<usize>() {
            return Err(Error::dims("block index lists do not match the block dims"));
        }
        let n = self.dim();
        let m = rows.len();
        let mut data = vec![czero(); m * m];
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                data[a * m + b] = self.data[r * n + c];
            }
        }
        Ok(Self { dims: dims.to_vec(), data })
    }

    pub fn map_entries(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { dims: self.dims.clone(), data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Converts the scalar type through `f64`.
    pub fn cast<U: Real>(&self) -> TensorOperator<U> {
        TensorOperator {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

/// For every old product index, its position after `permute_subsystems(perm)`.
pub(crate) fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let count = dims.len();
    if perm.len() != count {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {count} subsystems",
            perm.len()
        )));
    }
    let mut seen = vec![false; count];
    for &p in perm {
        if p >= count || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    // old subsystem perm[k] lands at new position k
    let mut stride_of_old = vec![0usize; count];
    for (k, &p) in perm.iter().enumerate() {
        stride_of_old[p] = new_strides[k];
    }
    let n: usize = dims.iter().product();
    let old_strides = strides(dims);
    Ok((0..n)
        .map(|i| {
            (0..count)
                .map(|k| ((i / old_strides[k]) % dims[k]) * stride_of_old[k])
                .sum()
        })
        .collect())
}
