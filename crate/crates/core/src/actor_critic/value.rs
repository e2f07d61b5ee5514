use std::sync::Arc;

use ndarray::{Array1, Axis};

use super::{BatchInput, Representation, Variant};
use crate::error::{check_dim, Result};
use crate::function_approx::{DenseNet, ParamCount, Parameterized, RandomBasis};
use crate::scalar::Real;

/// Scalar state-value estimate `V(x)`.
#[derive(Clone, Debug)]
pub struct ValueHead<T> {
    repr: Representation<T>,
}

impl<T: Real> ValueHead<T> {
    pub fn randomized(basis: Arc<RandomBasis<T>>) -> Self {
        Self {
            repr: Representation::randomized(basis, 1),
        }
    }

    pub fn dense(net: DenseNet<T>) -> Result<Self> {
        check_dim("value head output", 1, net.output_dim())?;
        Ok(Self {
            repr: Representation::Dense(net),
        })
    }

    pub fn new(repr: Representation<T>) -> Result<Self> {
        check_dim("value head output", 1, repr.output_dim())?;
        Ok(Self { repr })
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.repr
    }

    pub fn variant(&self) -> Variant {
        self.repr.variant()
    }

    pub fn obs_dim(&self) -> usize {
        self.repr.input_dim()
    }

    pub fn value_of(&self, x: &[T]) -> Result<T> {
        check_dim("critic observation", self.obs_dim(), x.len())?;
        Ok(self.repr.output(x)?[0])
    }

    pub fn value_batch(&self, input: BatchInput<T>) -> Result<Array1<T>> {
        Ok(self.repr.output_batch(input)?.index_axis_move(Axis(1), 0))
    }

    pub(crate) fn forward<'a>(
        &self,
        input: BatchInput<'a, T>,
    ) -> Result<(Array1<T>, super::ForwardCache<'a, T>)> {
        let (out, cache) = self.repr.forward(input)?;
        Ok((out.index_axis_move(Axis(1), 0), cache))
    }

    pub(crate) fn backward(
        &self,
        cache: &super::ForwardCache<T>,
        d_value: &Array1<T>,
    ) -> Result<Vec<T>> {
        let g = d_value.view().insert_axis(Axis(1));
        self.repr.backward(cache, g)
    }
}

impl<T: Real> Parameterized<T> for ValueHead<T> {
    fn num_params(&self) -> usize {
        self.repr.num_params()
    }

    fn append_params(&self, out: &mut Vec<T>) {
        self.repr.append_params(out)
    }

    fn load_params(&mut self, src: &[T]) -> Result<()> {
        self.repr.load_params(src)
    }
}

impl<T: Real> ParamCount for ValueHead<T> {
    fn count_trainable(&self) -> usize {
        self.repr.count_trainable()
    }

    fn count_total(&self) -> usize {
        self.repr.count_total()
    }
}
