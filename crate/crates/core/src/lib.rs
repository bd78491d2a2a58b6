//! Private-state construction, entanglement measures and key-rate bounds.

pub mod error;
pub mod bounds;
pub mod ccq;
pub mod measures;
pub mod op;
pub mod protocol;
pub mod random;
pub mod rel_ent;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use op::{Bipartition, DensityOperator, HermEig, TensorOperator};
pub use scalar::{Real, C};
pub use states::{ControlledUnitary, MultipartiteSpec, PrivateStateSpec};

/// Double-precision operator.
pub type Operator = TensorOperator<f64>;
/// Double-precision state.
pub type Density = DensityOperator<f64>;
