use rand::Rng;

use crate::error::{Error, Result};
use crate::op::TensorOperator;
use crate::random::haar_unitary;
use crate::scalar::Real;

/// Controlled unitary `sum_ij |ij><ij| (x) U^(ij)` in the computational key basis.
///
/// Blocks are indexed `i * key_dims.1 + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlledUnitary<T: Real> {
    key_dims: (usize, usize),
    shield_dims: Vec<usize>,
    blocks: Vec<TensorOperator<T>>,
}

impl<T: Real> ControlledUnitary<T> {
    pub fn new(
        key_dims: (usize, usize),
        shield_dims: Vec<usize>,
        blocks: Vec<TensorOperator<T>>,
    ) -> Result<Self> {
        if blocks.len() != key_dims.0 * key_dims.1 {
            return Err(Error::dims(format!(
                "{} blocks for key dims {key_dims:?}",
                blocks.len()
            )));
        }
        let s: usize = shield_dims.iter().product();
        for b in &blocks {
            if b.dim() != s {
                return Err(Error::dims(format!("block of dimension {} on shield {s}", b.dim())));
            }
            let defect = b.unitarity_defect();
            if defect > T::default_tol() {
                return Err(Error::NotUnitary(defect.to_f64_lossy()));
            }
        }
        let blocks = blocks.into_iter().map(|b| b.reshaped(&shield_dims)).collect::<Result<_>>()?;
        Ok(Self { key_dims, shield_dims, blocks })
    }

    /// Twisting of a pdit: `U^(ij) = U_i`.
    pub fn from_key_unitaries(d: usize, unitaries: &[TensorOperator<T>]) -> Result<Self> {
        if unitaries.len() != d {
            return Err(Error::dims(format!("{} unitaries for d = {d}", unitaries.len())));
        }
        let shield = unitaries[0].dims().to_vec();
        let blocks = (0..d * d).map(|ij| unitaries[ij / d].clone()).collect();
        Self::new((d, d), shield, blocks)
    }

    pub fn identity(key_dims: (usize, usize), shield_dims: &[usize]) -> Self {
        let blocks = vec![TensorOperator::identity(shield_dims); key_dims.0 * key_dims.1];
        Self { key_dims, shield_dims: shield_dims.to_vec(), blocks }
    }

    /// Independent Haar-random block for every key pair.
    pub fn random<R: Rng + ?Sized>(key_dims: (usize, usize), shield_dims: &[usize], rng: &mut R) -> Self {
        let blocks = (0..key_dims.0 * key_dims.1).map(|_| haar_unitary(shield_dims, rng)).collect();
        Self { key_dims, shield_dims: shield_dims.to_vec(), blocks }
    }

    /// Reads the blocks off a full operator on `[dA, dB, shield...]`, failing
    /// if any off-diagonal key block is nonzero.
    pub fn from_operator(op: &TensorOperator<T>, key_dims: (usize, usize), tol: T) -> Result<Self> {
        let dims = op.dims();
        if dims.len() < 2 || dims[0] != key_dims.0 || dims[1] != key_dims.1 {
            return Err(Error::dims(format!("operator dims {dims:?} lack key dims {key_dims:?}")));
        }
        let shield_dims = dims[2..].to_vec();
        let s: usize = shield_dims.iter().product();
        let nk = key_dims.0 * key_dims.1;
        let mut blocks = Vec::with_capacity(nk);
        for a in 0..nk {
            for b in 0..nk {
                let block = op.block(
                    &(a * s..(a + 1) * s).collect::<Vec<_>>(),
                    &(b * s..(b + 1) * s).collect::<Vec<_>>(),
                    &shield_dims,
                )?;
                if a == b {
                    blocks.push(block);
                } else if block.max_entry() > tol {
                    return Err(Error::NotControlled(format!(
                        "key block ({a}, {b}) has entry of size {}",
                        block.max_entry()
                    )));
                }
            }
        }
        Self::new(key_dims, shield_dims, blocks)
    }

    pub fn key_dims(&self) -> (usize, usize) {
        self.key_dims
    }

    pub fn shield_dims(&self) -> &[usize] {
        &self.shield_dims
    }

    pub fn block(&self, i: usize, j: usize) -> &TensorOperator<T> {
        &self.blocks[i * self.key_dims.1 + j]
    }

    pub fn inverse(&self) -> Self {
        Self {
            key_dims: self.key_dims,
            shield_dims: self.shield_dims.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// The full unitary on `[dA, dB, shield...]`.
    pub fn to_operator(&self) -> TensorOperator<T> {
        let s: usize = self.shield_dims.iter().product();
        let dims = self.full_dims();
        let n = dims.iter().product::<usize>();
        let mut out = TensorOperator::zeros(&dims);
        for (a, b) in self.blocks.iter().enumerate() {
            for r in 0..s {
                for c in 0..s {
                    out.data_mut()[(a * s + r) * n + a * s + c] = b.get(r, c);
                }
            }
        }
        out
    }

    fn full_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.key_dims.0, self.key_dims.1];
        dims.extend_from_slice(&self.shield_dims);
        dims
    }

    /// `U rho U†`, computed blockwise.
    pub fn apply(&self, rho: &TensorOperator<T>) -> Result<TensorOperator<T>> {
        let s: usize = self.shield_dims.iter().product();
        let nk = self.key_dims.0 * self.key_dims.1;
        if rho.dim() != nk * s || rho.dims().len() < 2 || rho.dims()[0] != self.key_dims.0 {
            return Err(Error::dims(format!(
                "twisting on key {:?} x shield {s} applied to dims {:?}",
                self.key_dims,
                rho.dims()
            )));
        }
        let n = nk * s;
        let mut out = TensorOperator::zeros(rho.dims());
        let sd = &self.shield_dims;
        for a in 0..nk {
            for b in 0..nk {
                let rows: Vec<usize> = (a * s..(a + 1) * s).collect();
                let cols: Vec<usize> = (b * s..(b + 1) * s).collect();
                let blk = rho.block(&rows, &cols, sd)?;
                if blk.max_entry() == T::zero() {
                    continue;
                }
                let t = self.blocks[a].matmul(&blk)?.matmul(&self.blocks[b].adjoint())?;
                let data = out.data_mut();
                for r in 0..s {
                    for c in 0..s {
                        data[(a * s + r) * n + b * s + c] = t.get(r, c);
                    }
                }
            }
        }
        Ok(out)
    }
}
