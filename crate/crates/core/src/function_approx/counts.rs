use super::{DenseNet, LinearReadout, Parameterized, RandomBasis};
use crate::scalar::Real;

/// Trainable versus stored parameter counts.
pub trait ParamCount {
    fn count_trainable(&self) -> usize;
    /// Trainable plus frozen parameters.
    fn count_total(&self) -> usize;

    fn count_frozen(&self) -> usize {
        self.count_total() - self.count_trainable()
    }
}

impl<T: Real> ParamCount for RandomBasis<T> {
    fn count_trainable(&self) -> usize {
        0
    }

    fn count_total(&self) -> usize {
        self.num_frozen()
    }
}

impl<T: Real> ParamCount for LinearReadout<T> {
    fn count_trainable(&self) -> usize {
        self.num_params()
    }

    fn count_total(&self) -> usize {
        self.num_params()
    }
}

impl<T: Real> ParamCount for DenseNet<T> {
    fn count_trainable(&self) -> usize {
        self.num_params()
    }

    fn count_total(&self) -> usize {
        self.num_params()
    }
}

/// `output_dim * (feature_dim + 1)`.
pub fn readout_param_count(output_dim: usize, feature_dim: usize) -> usize {
    output_dim * (feature_dim + 1)
}

/// Sum over layers of `(fan_in + 1) * fan_out`.
pub fn dense_param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

/// Frozen scalars of a basis `input -> hidden... -> features`.
pub fn basis_param_count(input_dim: usize, hidden_widths: &[usize], feature_dim: usize) -> usize {
    let mut dims = vec![input_dim];
    dims.extend_from_slice(hidden_widths);
    dims.push(feature_dim);
    dense_param_count(&dims)
}
