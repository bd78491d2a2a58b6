//! Dense multi-subsystem operator algebra.

mod density;
mod eig;
mod tensor;

pub use density::{Bipartition, DensityOperator};
pub use eig::HermEig;
pub use tensor::TensorOperator;

/// Row-major strides for a list of local dimensions (left factor most significant).
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Full-index offsets of every multi-index over `subset`, enumerated row-major
/// with the first listed subsystem most significant.
pub(crate) fn subset_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in subset {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &base in &out {
            for x in 0..dims[k] {
                next.push(base + x * st[k]);
            }
        }
        out = next;
    }
    out
}
