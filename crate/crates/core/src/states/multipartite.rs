use crate::error::{Error, Result};
use crate::op::{DensityOperator, TensorOperator};
use crate::scalar::{cr, Real};

/// Pdit shared by `parties` key holders `A, B_1, ..., B_l` with a common
/// shield state and twisting.
#[derive(Clone, Debug)]
pub struct MultipartiteSpec<T: Real> {
    d: usize,
    parties: usize,
    sigma: DensityOperator<T>,
    unitaries: Vec<TensorOperator<T>>,
}

impl<T: Real> MultipartiteSpec<T> {
    pub fn new(
        d: usize,
        parties: usize,
        sigma: DensityOperator<T>,
        unitaries: Vec<TensorOperator<T>>,
    ) -> Result<Self> {
        if d == 0 || parties < 2 {
            return Err(Error::domain(format!("need d >= 1 and at least two parties, got d = {d}, parties = {parties}")));
        }
        if unitaries.len() != d {
            return Err(Error::dims(format!("{} unitaries for d = {d}", unitaries.len())));
        }
        for u in &unitaries {
            if u.dim() != sigma.dim() {
                return Err(Error::dims("unitary does not act on the shield"));
            }
            let defect = u.unitarity_defect();
            if defect > T::default_tol() {
                return Err(Error::NotUnitary(defect.to_f64_lossy()));
            }
        }
        Ok(Self { d, parties, sigma, unitaries })
    }

    pub fn basic(d: usize, parties: usize, sigma: DensityOperator<T>) -> Result<Self> {
        let id = TensorOperator::identity(sigma.dims());
        Self::new(d, parties, sigma, vec![id; d])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn sigma(&self) -> &DensityOperator<T> {
        &self.sigma
    }

    /// `[d; parties]` followed by the shield dims.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.d; self.parties];
        dims.extend_from_slice(self.sigma.dims());
        dims
    }

    pub fn pdit(&self) -> DensityOperator<T> {
        multipartite_pdit(self)
    }
}

/// `(1/d) sum_ij |i...i><j...j| (x) U_i sigma U_j†`
pub fn multipartite_pdit<T: Real>(spec: &MultipartiteSpec<T>) -> DensityOperator<T> {
    let d = spec.d;
    let repeat: usize = (0..spec.parties).map(|k| d.pow(k as u32)).sum();
    let s = spec.sigma.dim();
    let dims = spec.dims();
    let n: usize = dims.iter().product();
    let mut out = TensorOperator::zeros(&dims);
    let w = cr(T::one() / T::from_usize_lossy(d));
    let left: Vec<_> = spec
        .unitaries
        .iter()
        .map(|u| u.matmul(&spec.sigma).expect("shield dims agree"))
        .collect();
    for i in 0..d {
        for j in 0..d {
            let blk = left[i].matmul(&spec.unitaries[j].adjoint()).expect("shield dims agree");
            let (a, b) = (i * repeat, j * repeat);
            let data = out.data_mut();
            for r in 0..s {
                for c in 0..s {
                    data[(a * s + r) * n + b * s + c] = blk.get(r, c) * w;
                }
            }
        }
    }
    DensityOperator::trusted(out.hermitian_part())
}
