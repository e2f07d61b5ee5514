use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use super::{Activation, Parameterized};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

static NEXT_NET_ID: AtomicU64 = AtomicU64::new(1);

/// Fully trainable affine layer; `weight` is `(fan_out, fan_in)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer<T> {
    pub weight: Array2<T>,
    pub bias: Array1<T>,
}

/// Multilayer perceptron with ELU on hidden layers and an identity output.
///
/// Parameters are ordered layer by layer, weight row-major then bias.
#[derive(Clone, Debug)]
pub struct DenseNet<T> {
    dims: Vec<usize>,
    layers: Vec<DenseLayer<T>>,
    activation: Activation,
    id: u64,
    version: u64,
}

/// Intermediate values recorded by a forward pass.
#[derive(Clone, Debug)]
pub struct DenseTape<T> {
    net_id: u64,
    version: u64,
    /// Input to every layer; `inputs[0]` is the network input.
    inputs: Vec<Array2<T>>,
    /// Pre-activations of every hidden layer.
    pre: Vec<Array2<T>>,
}

impl<T> DenseTape<T> {
    pub fn batch_size(&self) -> usize {
        self.inputs[0].nrows()
    }
}

impl<T: Real> DenseNet<T> {
    /// Draws every weight and bias from `U[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        Self::validate_dims(dims)?;
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let mut draw = || T::lit(bound * (2.0 * rng.random::<f64>() - 1.0));
                let weight = Array2::from_shape_simple_fn((fan_out, fan_in), &mut draw);
                let bias = Array1::from_shape_simple_fn(fan_out, &mut draw);
                DenseLayer { weight, bias }
            })
            .collect();
        Ok(Self::assemble(dims.to_vec(), layers))
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::validate_dims(dims)?;
        let layers = dims
            .windows(2)
            .map(|w| DenseLayer {
                weight: Array2::zeros((w[1], w[0])),
                bias: Array1::zeros(w[1]),
            })
            .collect();
        Ok(Self::assemble(dims.to_vec(), layers))
    }

    pub fn from_layers(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidDimension("dense net needs a layer".into()))?;
        let mut dims = vec![first.weight.ncols()];
        for l in &layers {
            check_dim("dense layer fan-in", *dims.last().unwrap(), l.weight.ncols())?;
            check_dim("dense layer bias", l.weight.nrows(), l.bias.len())?;
            dims.push(l.weight.nrows());
        }
        Self::validate_dims(&dims)?;
        Ok(Self::assemble(dims, layers))
    }

    fn validate_dims(dims: &[usize]) -> Result<()> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::InvalidDimension(format!(
                "dense layer dims must have >= 2 entries, all >= 1: {dims:?}"
            )));
        }
        Ok(())
    }

    fn assemble(dims: Vec<usize>, layers: Vec<DenseLayer<T>>) -> Self {
        Self {
            dims,
            layers,
            activation: Activation::Elu,
            id: NEXT_NET_ID.fetch_add(1, Ordering::Relaxed),
            version: 0,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn forward(&self, x: &[T]) -> Result<(Array1<T>, DenseTape<T>)> {
        check_dim("dense input", self.input_dim(), x.len())?;
        let xb = ArrayView1::from(x).insert_axis(Axis(0));
        let (out, tape) = self.forward_batch(xb)?;
        Ok((out.index_axis_move(Axis(0), 0), tape))
    }

    /// Forward pass over the rows of a `(batch, input_dim)` matrix.
    pub fn forward_batch(&self, x: ArrayView2<T>) -> Result<(Array2<T>, DenseTape<T>)> {
        check_dim("dense input", self.input_dim(), x.ncols())?;
        let act = self.activation;
        let last = self.layers.len() - 1;
        let mut pre = Vec::with_capacity(last);
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut h = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = h.dot(&layer.weight.t()) + &layer.bias;
            inputs.push(h);
            if i == last {
                h = z;
            } else {
                h = z.mapv(|v| act.apply(v));
                pre.push(z);
            }
        }
        let tape = DenseTape {
            net_id: self.id,
            version: self.version,
            inputs,
            pre,
        };
        Ok((h, tape))
    }

    /// Output without keeping a tape.
    pub fn predict_batch(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        check_dim("dense input", self.input_dim(), x.ncols())?;
        let act = self.activation;
        let last = self.layers.len() - 1;
        let mut h = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            h = h.dot(&layer.weight.t()) + &layer.bias;
            if i != last {
                h.mapv_inplace(|v| act.apply(v));
            }
        }
        Ok(h)
    }

    pub fn backward(&self, tape: &DenseTape<T>, output_grad: &[T]) -> Result<Vec<T>> {
        check_dim("dense output gradient", self.output_dim(), output_grad.len())?;
        let g = ArrayView1::from(output_grad).insert_axis(Axis(0));
        self.backward_batch(tape, g)
    }

    /// Gradient of `sum_n <g_n, output_n>` with respect to every parameter,
    /// in parameter order.
    pub fn backward_batch(&self, tape: &DenseTape<T>, output_grad: ArrayView2<T>) -> Result<Vec<T>> {
        if tape.net_id != self.id
            || tape.version != self.version
            || tape.inputs.len() != self.layers.len()
        {
            return Err(Error::StaleTape);
        }
        check_dim("dense output gradient", self.output_dim(), output_grad.ncols())?;
        check_dim("dense gradient batch", tape.batch_size(), output_grad.nrows())?;

        let act = self.activation;
        let n = self.layers.len();
        let mut per_layer: Vec<(Array2<T>, Array1<T>)> = Vec::with_capacity(n);
        let mut delta = output_grad.to_owned();
        for i in (0..n).rev() {
            let dw = delta.t().dot(&tape.inputs[i]);
            let db = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut upstream = delta.dot(&self.layers[i].weight);
                upstream.zip_mut_with(&tape.pre[i - 1], |u, &z| *u = *u * act.derivative(z));
                delta = upstream;
            }
            per_layer.push((dw, db));
        }
        let mut out = Vec::with_capacity(self.num_params());
        for (dw, db) in per_layer.into_iter().rev() {
            out.extend(dw.iter().copied());
            out.extend(db.iter().copied());
        }
        Ok(out)
    }
}

impl<T: Real> Parameterized<T> for DenseNet<T> {
    fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    fn append_params(&self, out: &mut Vec<T>) {
        for l in &self.layers {
            out.extend(l.weight.iter().copied());
            out.extend(l.bias.iter().copied());
        }
    }

    fn load_params(&mut self, src: &[T]) -> Result<()> {
        check_dim("dense parameters", self.num_params(), src.len())?;
        if src.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense parameters".into()));
        }
        let mut it = src.iter().copied();
        for l in &mut self.layers {
            l.weight.iter_mut().for_each(|w| *w = it.next().unwrap());
            l.bias.iter_mut().for_each(|b| *b = it.next().unwrap());
        }
        self.version += 1;
        Ok(())
    }
}
