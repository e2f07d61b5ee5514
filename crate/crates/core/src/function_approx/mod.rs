//! Frozen random feature maps, trainable linear readouts and fully trainable
//! dense networks, together with exact parameter accounting.

mod activation;
mod basis;
mod counts;
mod dense;
mod readout;

pub use activation::{elu, elu_derivative, Activation};
pub use basis::{FrozenLayer, RandomBasis, FROZEN_DISTRIBUTION};
pub use counts::{basis_param_count, dense_param_count, readout_param_count, ParamCount};
pub use dense::{DenseLayer, DenseNet, DenseTape};
pub use readout::LinearReadout;

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::scalar::Real;

/// Flat view of a model's trainable parameters.
///
/// The order produced by [`Parameterized::append_params`] is the canonical
/// order used by gradients, optimizers and checkpoints.
pub trait Parameterized<T> {
    fn num_params(&self) -> usize;
    fn append_params(&self, out: &mut Vec<T>);
    /// Overwrites every parameter from `src`, which must hold exactly
    /// `num_params()` values.
    fn load_params(&mut self, src: &[T]) -> Result<()>;

    fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        self.append_params(&mut out);
        out
    }
}

/// 64-bit digest of a parameter stream, computed over little-endian `f64`
/// encodings so it is independent of the in-memory scalar type.
pub fn checksum<T: Real>(values: impl IntoIterator<Item = T>) -> u64 {
    let mut hasher = Sha256::new();
    for v in values {
        hasher.update(v.as_f64().to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}
