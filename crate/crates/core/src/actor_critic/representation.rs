use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis, CowArray, Ix2};

use crate::error::{Error, Result};
use crate::function_approx::{DenseNet, DenseTape, LinearReadout, ParamCount, Parameterized, RandomBasis};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Randomized,
    Dense,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Randomized => "randomized",
            Variant::Dense => "dense",
        })
    }
}

/// The function class behind a head.
///
/// The frozen basis sits behind an `Arc` so parameter snapshots share it.
#[derive(Clone, Debug)]
pub enum Representation<T> {
    Randomized {
        basis: Arc<RandomBasis<T>>,
        readout: LinearReadout<T>,
    },
    Dense(DenseNet<T>),
}

/// Batched input: raw (normalized) observations, or features already
/// computed by the frozen basis.
#[derive(Clone, Copy, Debug)]
pub enum BatchInput<'a, T> {
    Observations(ArrayView2<'a, T>),
    Features(ArrayView2<'a, T>),
}

/// What a forward pass keeps for the matching backward pass.
#[derive(Debug)]
pub enum ForwardCache<'a, T> {
    Features(CowArray<'a, T, Ix2>),
    Dense(DenseTape<T>),
}

impl<T: Real> Representation<T> {
    /// Randomized representation with a zero-initialized readout.
    pub fn randomized(basis: Arc<RandomBasis<T>>, output_dim: usize) -> Self {
        let readout = LinearReadout::zeros(output_dim, basis.feature_dim());
        Representation::Randomized { basis, readout }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Representation::Randomized { .. } => Variant::Randomized,
            Representation::Dense(_) => Variant::Dense,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Representation::Randomized { basis, .. } => basis.input_dim(),
            Representation::Dense(net) => net.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Representation::Randomized { readout, .. } => readout.output_dim(),
            Representation::Dense(net) => net.output_dim(),
        }
    }

    pub fn basis(&self) -> Option<&Arc<RandomBasis<T>>> {
        match self {
            Representation::Randomized { basis, .. } => Some(basis),
            Representation::Dense(_) => None,
        }
    }

    /// Frozen features of a batch of observations, for randomized heads.
    pub fn features_batch(&self, x: ArrayView2<T>) -> Option<Result<Array2<T>>> {
        self.basis().map(|b| b.features_batch(x))
    }

    pub fn output(&self, x: &[T]) -> Result<ndarray::Array1<T>> {
        let xb = ArrayView1::from(x).insert_axis(Axis(0));
        Ok(self.output_batch(BatchInput::Observations(xb))?.index_axis_move(Axis(0), 0))
    }

    /// Forward pass without retaining anything for backward.
    pub fn output_batch(&self, input: BatchInput<T>) -> Result<Array2<T>> {
        match (self, input) {
            (Representation::Randomized { basis, readout }, BatchInput::Observations(x)) => {
                readout.apply_batch(basis.features_batch(x)?.view())
            }
            (Representation::Randomized { readout, .. }, BatchInput::Features(f)) => {
                readout.apply_batch(f)
            }
            (Representation::Dense(net), BatchInput::Observations(x)) => net.predict_batch(x),
            (Representation::Dense(_), BatchInput::Features(_)) => {
                Err(Error::Unsupported("observations for a dense representation"))
            }
        }
    }

    pub fn forward<'a>(&self, input: BatchInput<'a, T>) -> Result<(Array2<T>, ForwardCache<'a, T>)> {
        match (self, input) {
            (Representation::Randomized { basis, readout }, BatchInput::Observations(x)) => {
                let f = basis.features_batch(x)?;
                let out = readout.apply_batch(f.view())?;
                Ok((out, ForwardCache::Features(CowArray::from(f))))
            }
            (Representation::Randomized { readout, .. }, BatchInput::Features(f)) => {
                let out = readout.apply_batch(f)?;
                Ok((out, ForwardCache::Features(CowArray::from(f))))
            }
            (Representation::Dense(net), BatchInput::Observations(x)) => {
                let (out, tape) = net.forward_batch(x)?;
                Ok((out, ForwardCache::Dense(tape)))
            }
            (Representation::Dense(_), BatchInput::Features(_)) => {
                Err(Error::Unsupported("observations for a dense representation"))
            }
        }
    }

    /// Gradient of `sum_n <g_n, output_n>` with respect to the trainable
    /// parameters only, in parameter order.
    pub fn backward(&self, cache: &ForwardCache<T>, g: ArrayView2<T>) -> Result<Vec<T>> {
        match (self, cache) {
            (Representation::Randomized { readout, .. }, ForwardCache::Features(f)) => {
                readout.backward_batch(f.view(), g)
            }
            (Representation::Dense(net), ForwardCache::Dense(tape)) => net.backward_batch(tape, g),
            _ => Err(Error::StaleTape),
        }
    }
}

impl<T: Real> Parameterized<T> for Representation<T> {
    fn num_params(&self) -> usize {
        match self {
            Representation::Randomized { readout, .. } => readout.num_params(),
            Representation::Dense(net) => net.num_params(),
        }
    }

    fn append_params(&self, out: &mut Vec<T>) {
        match self {
            Representation::Randomized { readout, .. } => readout.append_params(out),
            Representation::Dense(net) => net.append_params(out),
        }
    }

    fn load_params(&mut self, src: &[T]) -> Result<()> {
        match self {
            Representation::Randomized { readout, .. } => readout.load_params(src),
            Representation::Dense(net) => net.load_params(src),
        }
    }
}

impl<T: Real> ParamCount for Representation<T> {
    fn count_trainable(&self) -> usize {
        self.num_params()
    }

    fn count_total(&self) -> usize {
        self.num_params() + self.basis().map_or(0, |b| b.num_frozen())
    }
}
