use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::Parameterized;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Trainable affine map `f -> W f + b` on top of a feature vector.
///
/// `weight` is `(output_dim, feature_dim)`; shapes never change after
/// construction. Parameters are ordered as the weight matrix row-major
/// followed by the bias.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearReadout<T> {
    weight: Array2<T>,
    bias: Array1<T>,
}

impl<T: Real> LinearReadout<T> {
    pub fn zeros(output_dim: usize, feature_dim: usize) -> Self {
        Self {
            weight: Array2::zeros((output_dim, feature_dim)),
            bias: Array1::zeros(output_dim),
        }
    }

    pub fn from_parts(weight: Array2<T>, bias: Array1<T>) -> Result<Self> {
        check_dim("readout bias", weight.nrows(), bias.len())?;
        Ok(Self { weight, bias })
    }

    pub fn output_dim(&self) -> usize {
        self.weight.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.weight.ncols()
    }

    pub fn weight(&self) -> &Array2<T> {
        &self.weight
    }

    pub fn bias(&self) -> &Array1<T> {
        &self.bias
    }

    pub fn apply(&self, f: &[T]) -> Result<Array1<T>> {
        check_dim("readout input", self.feature_dim(), f.len())?;
        Ok(self.weight.dot(&ArrayView1::from(f)) + &self.bias)
    }

    /// Row-wise `F W^T + b` for a `(batch, feature_dim)` matrix.
    pub fn apply_batch(&self, f: ArrayView2<T>) -> Result<Array2<T>> {
        check_dim("readout input", self.feature_dim(), f.ncols())?;
        Ok(f.dot(&self.weight.t()) + &self.bias)
    }

    /// Gradient of `sum_n <g_n, W f_n + b>` in parameter order, where `g`
    /// is `(batch, output_dim)` and `f` is `(batch, feature_dim)`.
    pub fn backward_batch(&self, f: ArrayView2<T>, g: ArrayView2<T>) -> Result<Vec<T>> {
        check_dim("readout features", self.feature_dim(), f.ncols())?;
        check_dim("readout upstream", self.output_dim(), g.ncols())?;
        check_dim("readout batch", f.nrows(), g.nrows())?;
        let dw = g.t().dot(&f);
        let db = g.sum_axis(Axis(0));
        let mut out = Vec::with_capacity(self.num_params());
        out.extend(dw.iter().copied());
        out.extend(db.iter().copied());
        Ok(out)
    }
}

impl<T: Real> Parameterized<T> for LinearReadout<T> {
    fn num_params(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    fn append_params(&self, out: &mut Vec<T>) {
        out.extend(self.weight.iter().copied());
        out.extend(self.bias.iter().copied());
    }

    fn load_params(&mut self, src: &[T]) -> Result<()> {
        check_dim("readout parameters", self.num_params(), src.len())?;
        let nw = self.weight.len();
        if src.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("readout parameters".into()));
        }
        for (w, &s) in self.weight.iter_mut().zip(&src[..nw]) {
            *w = s;
        }
        for (b, &s) in self.bias.iter_mut().zip(&src[nw..]) {
            *b = s;
        }
        Ok(())
    }
}
