use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{checksum, Activation};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Tag recorded in checkpoints describing how frozen parameters are drawn.
pub const FROZEN_DISTRIBUTION: &str = "uniform_fan_in";

/// One frozen affine layer; `weight` is `(fan_out, fan_in)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenLayer<T> {
    pub weight: Array2<T>,
    pub bias: Array1<T>,
}

/// Frozen random feature map `x -> [phi_1(x), ..., phi_J(x)]`.
///
/// Every layer is affine followed by ELU. Weights and biases of a layer with
/// fan-in `n` are drawn from `U[-1/sqrt(n), 1/sqrt(n)]` by a ChaCha8 stream
/// seeded with `seed`, layer by layer, weights (row-major) before biases.
/// Nothing here is mutable after construction.
#[derive(Clone, Debug)]
pub struct RandomBasis<T> {
    seed: u64,
    input_dim: usize,
    hidden_widths: Vec<usize>,
    feature_dim: usize,
    activation: Activation,
    layers: Vec<FrozenLayer<T>>,
}

impl<T: Real> RandomBasis<T> {
    /// Builds the frozen layers `input_dim -> hidden_widths... -> feature_dim`.
    pub fn build(
        seed: u64,
        input_dim: usize,
        hidden_widths: &[usize],
        feature_dim: usize,
    ) -> Result<Self> {
        if input_dim == 0 || feature_dim == 0 || hidden_widths.contains(&0) {
            return Err(Error::InvalidDimension(format!(
                "random basis dims must be >= 1 (input {input_dim}, hidden {hidden_widths:?}, features {feature_dim})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = Vec::with_capacity(hidden_widths.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden_widths);
        dims.push(feature_dim);

        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let mut draw = || T::lit(bound * (2.0 * rng.random::<f64>() - 1.0));
                let weight = Array2::from_shape_simple_fn((fan_out, fan_in), &mut draw);
                let bias = Array1::from_shape_simple_fn(fan_out, &mut draw);
                FrozenLayer { weight, bias }
            })
            .collect();

        Ok(Self {
            seed,
            input_dim,
            hidden_widths: hidden_widths.to_vec(),
            feature_dim,
            activation: Activation::Elu,
            layers,
        })
    }

    /// Assembles a basis from explicit layers. The seed is kept only as a
    /// label; such a basis cannot be regenerated from it.
    pub fn from_layers(seed: u64, layers: Vec<FrozenLayer<T>>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidDimension("basis needs at least one layer".into()))?;
        let input_dim = first.weight.ncols();
        let mut prev = input_dim;
        for layer in &layers {
            check_dim("frozen layer fan-in", prev, layer.weight.ncols())?;
            check_dim("frozen layer bias", layer.weight.nrows(), layer.bias.len())?;
            if layer.weight.nrows() == 0 || layer.weight.ncols() == 0 {
                return Err(Error::InvalidDimension("empty frozen layer".into()));
            }
            prev = layer.weight.nrows();
        }
        let hidden_widths = layers[..layers.len() - 1]
            .iter()
            .map(|l| l.weight.nrows())
            .collect();
        Ok(Self {
            seed,
            input_dim,
            hidden_widths,
            feature_dim: prev,
            activation: Activation::Elu,
            layers,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_widths(&self) -> &[usize] {
        &self.hidden_widths
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[FrozenLayer<T>] {
        &self.layers
    }

    /// Number of frozen scalars (weights and biases).
    pub fn num_frozen(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    /// All frozen scalars in generation order.
    pub fn frozen_params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_frozen());
        for l in &self.layers {
            out.extend(l.weight.iter().copied());
            out.extend(l.bias.iter().copied());
        }
        out
    }

    pub fn checksum(&self) -> u64 {
        checksum(
            self.layers
                .iter()
                .flat_map(|l| l.weight.iter().chain(l.bias.iter()).copied()),
        )
    }

    pub fn features(&self, x: &[T]) -> Result<Array1<T>> {
        check_dim("basis input", self.input_dim, x.len())?;
        let x = ArrayView1::from(x).insert_axis(Axis(0));
        Ok(self.features_batch(x)?.index_axis_move(Axis(0), 0))
    }

    /// Row-wise features of a `(batch, input_dim)` matrix.
    pub fn features_batch(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        check_dim("basis input", self.input_dim, x.ncols())?;
        let act = self.activation;
        let mut h = x.to_owned();
        for layer in &self.layers {
            h = h.dot(&layer.weight.t()) + &layer.bias;
            h.mapv_inplace(|z| act.apply(z));
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn default_shape() {
        let b = RandomBasis::<f64>::build(7, 8, &[500], 400).unwrap();
        assert_eq!(b.layers().len(), 2);
        assert_eq!(b.layers()[0].weight.dim(), (500, 8));
        assert_eq!(b.layers()[1].weight.dim(), (400, 500));
        assert_eq!(b.feature_dim(), 400);
        assert_eq!(b.num_frozen(), 9 * 500 + 501 * 400);
    }

    #[test]
    fn seed_determinism() {
        let a = RandomBasis::<f64>::build(7, 8, &[500], 400).unwrap();
        let b = RandomBasis::<f64>::build(7, 8, &[500], 400).unwrap();
        let c = RandomBasis::<f64>::build(8, 8, &[500], 400).unwrap();
        let (pa, pb, pc) = (a.frozen_params(), b.frozen_params(), c.frozen_params());
        assert!(pa.iter().zip(&pb).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(pa.iter().zip(&pc).any(|(x, y)| x != y));
        assert_eq!(a.checksum(), b.checksum());
        assert_ne!(a.checksum(), c.checksum());
    }

    #[test]
    fn draws_respect_fan_in_bounds() {
        let b = RandomBasis::<f64>::build(3, 9, &[16], 4).unwrap();
        for l in b.layers() {
            let bound = 1.0 / (l.weight.ncols() as f64).sqrt();
            assert!(l.weight.iter().chain(l.bias.iter()).all(|w| w.abs() <= bound));
        }
    }

    #[test]
    fn rejects_zero_dims() {
        assert!(RandomBasis::<f64>::build(1, 0, &[4], 4).is_err());
        assert!(RandomBasis::<f64>::build(1, 3, &[0], 4).is_err());
        assert!(RandomBasis::<f64>::build(1, 3, &[4], 0).is_err());
    }

    #[test]
    fn zero_input_zero_bias_gives_zero_features() {
        let mut b = RandomBasis::<f64>::build(11, 5, &[7], 3).unwrap();
        for l in &mut b.layers {
            l.bias.fill(0.0);
        }
        let f = b.features(&[0.0; 5]).unwrap();
        assert!(f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_computed_two_one_one() {
        // 2 -> 1 -> 1, computed by hand.
        let layers = vec![
            FrozenLayer {
                weight: array![[0.5, -1.0]],
                bias: array![0.1],
            },
            FrozenLayer {
                weight: array![[2.0]],
                bias: array![-0.3],
            },
        ];
        let b = RandomBasis::from_layers(0, layers).unwrap();
        let x = [0.4, 0.9];
        let z1: f64 = 0.5 * 0.4 - 0.9 + 0.1; // -0.6
        let h1 = z1.exp() - 1.0;
        let z2 = 2.0 * h1 - 0.3;
        let expect = if z2 >= 0.0 { z2 } else { z2.exp() - 1.0 };
        let f = b.features(&x).unwrap();
        assert!((f[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let b = RandomBasis::<f64>::build(1, 3, &[4], 2).unwrap();
        assert!(matches!(
            b.features(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn batch_matches_rows() {
        let b = RandomBasis::<f64>::build(5, 3, &[6], 4).unwrap();
        let x = array![[0.1, -0.2, 0.3], [1.0, 2.0, -3.0]];
        let fb = b.features_batch(x.view()).unwrap();
        for (i, row) in x.rows().into_iter().enumerate() {
            let f = b.features(row.as_slice().unwrap()).unwrap();
            for j in 0..4 {
                assert!((f[j] - fb[[i, j]]).abs() < 1e-14);
            }
        }
    }
}
