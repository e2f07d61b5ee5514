use std::sync::Arc;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use super::{BatchInput, Representation, Variant};
use crate::error::{check_dim, Result};
use crate::function_approx::{DenseNet, ParamCount, Parameterized, RandomBasis};
use crate::scalar::Real;

/// Inclusive clamp range for the policy's log standard deviations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogStdBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for LogStdBounds {
    fn default() -> Self {
        Self { min: -5.0, max: 2.0 }
    }
}

/// `N(mu(x), diag(exp(2 log_std)))` with a state-independent, trainable
/// `log_std`.
///
/// Trainable parameters are ordered as the representation's parameters
/// followed by `log_std`.
#[derive(Clone, Debug)]
pub struct GaussianPolicy<T> {
    repr: Representation<T>,
    log_std: Array1<T>,
    bounds: LogStdBounds,
}

/// `sum_i [-0.5 ((u_i - mu_i) / sigma_i)^2 - log sigma_i - 0.5 log 2 pi]`.
pub fn gaussian_log_prob<T: Real>(mean: ArrayView1<T>, log_std: ArrayView1<T>, u: ArrayView1<T>) -> T {
    let half_log_2pi = T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for ((&m, &ls), &ui) in mean.iter().zip(log_std.iter()).zip(u.iter()) {
        let z = (ui - m) / ls.exp();
        acc += -half * z * z - ls - half_log_2pi;
    }
    acc
}

/// `sum_i [0.5 log(2 pi e) + log sigma_i]`.
pub fn gaussian_entropy<T: Real>(log_std: ArrayView1<T>) -> T {
    let c = T::lit(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln());
    log_std.iter().fold(T::zero(), |acc, &ls| acc + c + ls)
}

impl<T: Real> GaussianPolicy<T> {
    /// Policy over a frozen basis; readout starts at zero, `log_std` at
    /// `log_std_init`.
    pub fn randomized(basis: Arc<RandomBasis<T>>, action_dim: usize, log_std_init: f64) -> Self {
        Self::new(Representation::randomized(basis, action_dim), log_std_init)
    }

    pub fn dense(net: DenseNet<T>, log_std_init: f64) -> Self {
        Self::new(Representation::Dense(net), log_std_init)
    }

    pub fn new(repr: Representation<T>, log_std_init: f64) -> Self {
        let m = repr.output_dim();
        Self {
            repr,
            log_std: Array1::from_elem(m, T::lit(log_std_init)),
            bounds: LogStdBounds::default(),
        }
    }

    pub fn with_log_std_bounds(mut self, bounds: LogStdBounds) -> Self {
        self.bounds = bounds;
        self.clamp_log_std();
        self
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.repr
    }

    pub fn representation_mut(&mut self) -> &mut Representation<T> {
        &mut self.repr
    }

    pub fn variant(&self) -> Variant {
        self.repr.variant()
    }

    pub fn obs_dim(&self) -> usize {
        self.repr.input_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.repr.output_dim()
    }

    pub fn log_std(&self) -> &Array1<T> {
        &self.log_std
    }

    pub fn log_std_bounds(&self) -> LogStdBounds {
        self.bounds
    }

    pub fn set_log_std(&mut self, log_std: &[T]) -> Result<()> {
        check_dim("log_std", self.action_dim(), log_std.len())?;
        self.log_std = Array1::from(log_std.to_vec());
        Ok(())
    }

    pub fn std(&self) -> Array1<T> {
        self.log_std.mapv(|v| v.exp())
    }

    /// Applies the `[min, max]` clamp to every `log_std` entry.
    pub fn clamp_log_std(&mut self) {
        let (lo, hi) = (T::lit(self.bounds.min), T::lit(self.bounds.max));
        self.log_std.mapv_inplace(|v| v.max(lo).min(hi));
    }

    pub fn mean(&self, x: &[T]) -> Result<Array1<T>> {
        check_dim("policy observation", self.obs_dim(), x.len())?;
        self.repr.output(x)
    }

    pub fn mean_batch(&self, input: BatchInput<T>) -> Result<ndarray::Array2<T>> {
        self.repr.output_batch(input)
    }

    pub fn entropy(&self) -> T {
        gaussian_entropy(self.log_std.view())
    }

    pub fn log_prob_of(&self, x: &[T], u: &[T]) -> Result<T> {
        check_dim("policy action", self.action_dim(), u.len())?;
        let mu = self.mean(x)?;
        Ok(gaussian_log_prob(mu.view(), self.log_std.view(), ArrayView1::from(u)))
    }

    /// `mu + sigma * z` with `z ~ N(0, I)`, and its log-density.
    pub fn sample_action<R: Rng + ?Sized>(&self, x: &[T], rng: &mut R) -> Result<(Array1<T>, T)> {
        let mu = self.mean(x)?;
        Ok(self.sample_around(mu.view(), rng))
    }

    /// Samples around a precomputed mean (used by batched collection).
    pub fn sample_around<R: Rng + ?Sized>(&self, mu: ArrayView1<T>, rng: &mut R) -> (Array1<T>, T) {
        let u: Array1<T> = mu
            .iter()
            .zip(self.log_std.iter())
            .map(|(&m, &ls)| m + ls.exp() * T::sample_standard_normal(rng))
            .collect();
        let lp = gaussian_log_prob(mu, self.log_std.view(), u.view());
        (u, lp)
    }

    /// Gradient of `log pi(u | x)` with respect to the trainable parameters.
    ///
    /// For a randomized policy the result has exactly `count_trainable()`
    /// entries; frozen basis parameters never receive a gradient.
    pub fn grad_log_prob(&self, x: &[T], u: &[T]) -> Result<Vec<T>> {
        check_dim("policy observation", self.obs_dim(), x.len())?;
        check_dim("policy action", self.action_dim(), u.len())?;
        let xb = ArrayView1::from(x).insert_axis(Axis(0));
        let (mu, cache) = self.repr.forward(BatchInput::Observations(xb))?;
        let m = self.action_dim();
        let mut d_mean = ndarray::Array2::zeros((1, m));
        let mut d_log_std = Vec::with_capacity(m);
        for i in 0..m {
            let sigma = self.log_std[i].exp();
            let z = (u[i] - mu[[0, i]]) / sigma;
            d_mean[[0, i]] = z / sigma;
            d_log_std.push(z * z - T::one());
        }
        let mut grad = self.repr.backward(&cache, d_mean.view())?;
        grad.extend(d_log_std);
        Ok(grad)
    }

    /// Means for a batch along with what backward needs.
    pub(crate) fn forward<'a>(
        &self,
        input: BatchInput<'a, T>,
    ) -> Result<(ndarray::Array2<T>, super::ForwardCache<'a, T>)> {
        self.repr.forward(input)
    }

    pub(crate) fn backward_mean(
        &self,
        cache: &super::ForwardCache<T>,
        d_mean: ArrayView2<T>,
    ) -> Result<Vec<T>> {
        self.repr.backward(cache, d_mean)
    }
}

impl<T: Real> Parameterized<T> for GaussianPolicy<T> {
    fn num_params(&self) -> usize {
        self.repr.num_params() + self.log_std.len()
    }

    fn append_params(&self, out: &mut Vec<T>) {
        self.repr.append_params(out);
        out.extend(self.log_std.iter().copied());
    }

    fn load_params(&mut self, src: &[T]) -> Result<()> {
        check_dim("policy parameters", self.num_params(), src.len())?;
        let n = self.repr.num_params();
        self.repr.load_params(&src[..n])?;
        self.set_log_std(&src[n..])
    }
}

impl<T: Real> ParamCount for GaussianPolicy<T> {
    fn count_trainable(&self) -> usize {
        self.num_params()
    }

    fn count_total(&self) -> usize {
        self.repr.count_total() + self.log_std.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::function_approx::LinearReadout;

    fn small_randomized(seed: u64) -> GaussianPolicy<f64> {
        let basis = Arc::new(RandomBasis::build(seed, 3, &[16], 10).unwrap());
        let mut p = GaussianPolicy::randomized(basis, 2, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let params: Vec<f64> = (0..p.num_params())
            .map(|_| rng.random::<f64>() - 0.5)
            .collect();
        p.load_params(&params).unwrap();
        p
    }

    #[test]
    fn zero_readout_mean_is_bias() {
        let basis = Arc::new(RandomBasis::<f64>::build(1, 3, &[8], 6).unwrap());
        let readout = LinearReadout::from_parts(Array2::zeros((2, 6)), array![0.3, -0.7]).unwrap();
        let p = GaussianPolicy::new(Representation::Randomized { basis, readout }, 0.0);
        for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.0]] {
            assert_eq!(p.mean(&x).unwrap(), array![0.3, -0.7]);
        }
    }

    #[test]
    fn mean_is_linear_in_readout() {
        let a = small_randomized(1);
        let mut b = a.clone();
        let pb: Vec<f64> = a.params().iter().map(|v| v * -0.3 + 0.1).collect();
        b.load_params(&pb).unwrap();
        let mut sum = a.clone();
        let ps: Vec<f64> = a.params().iter().zip(&pb).map(|(x, y)| x + y).collect();
        sum.load_params(&ps).unwrap();
        let x = [0.2, -0.4, 0.9];
        let lhs = sum.mean(&x).unwrap();
        let rhs = a.mean(&x).unwrap() + b.mean(&x).unwrap();
        for i in 0..2 {
            assert!((lhs[i] - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_matches_feature_pipeline() {
        let p = small_randomized(2);
        let x = [0.5, 0.1, -0.3];
        let Representation::Randomized { basis, readout } = p.representation() else {
            unreachable!()
        };
        let f = basis.features(&x).unwrap();
        let m = p.mean(&x).unwrap();
        for i in 0..2 {
            let mut acc = readout.bias()[i];
            for j in 0..f.len() {
                acc += readout.weight()[[i, j]] * f[j];
            }
            assert!((m[i] - acc).abs() < 1e-13);
        }
    }

    #[test]
    fn standard_normal_mode() {
        let lp = gaussian_log_prob(array![0.0].view(), array![0.0].view(), array![0.0].view());
        assert!((lp + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
        assert!((lp + 0.9189).abs() < 1e-4);
    }

    #[test]
    fn diagonal_factorization() {
        let mu = array![0.2, -1.0];
        let ls = array![0.1, -0.5];
        let u = array![0.7, -0.2];
        let joint = gaussian_log_prob(mu.view(), ls.view(), u.view());
        let sum: f64 = (0..2)
            .map(|i| {
                gaussian_log_prob(
                    mu.slice(ndarray::s![i..i + 1]),
                    ls.slice(ndarray::s![i..i + 1]),
                    u.slice(ndarray::s![i..i + 1]),
                )
            })
            .sum();
        assert!((joint - sum).abs() < 1e-14);
    }

    #[test]
    fn entropy_closed_forms() {
        let h: f64 = gaussian_entropy(array![0.0].view());
        assert!((h - 1.4189).abs() < 1e-4);
        let ls = array![0.1, -0.3, 0.5];
        let doubled = ls.mapv(|v: f64| v + 2f64.ln());
        let diff = gaussian_entropy(doubled.view()) - gaussian_entropy(ls.view());
        assert!((diff - 3.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn tiny_variance_samples_hug_the_mean() {
        let mut p = small_randomized(3);
        p.set_log_std(&[-5.0, -5.0]).unwrap();
        let x = [0.1, 0.2, 0.3];
        let mu = p.mean(&x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bound = 6.0 * (-5.0f64).exp();
        let inside = (0..1000)
            .filter(|_| {
                let (u, _) = p.sample_action(&x, &mut rng).unwrap();
                (0..2).all(|i| (u[i] - mu[i]).abs() <= bound)
            })
            .count();
        assert!(inside >= 999);
    }

    #[test]
    fn sampling_is_seeded_and_log_prob_consistent() {
        let p = small_randomized(4);
        let x = [0.3, 0.3, -0.1];
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let (u1, lp1) = p.sample_action(&x, &mut r1).unwrap();
        let (u2, lp2) = p.sample_action(&x, &mut r2).unwrap();
        assert_eq!(u1, u2);
        assert_eq!(lp1, lp2);
        let again = p.log_prob_of(&x, u1.as_slice().unwrap()).unwrap();
        assert!((again - lp1).abs() < 1e-12);
    }

    #[test]
    fn grad_at_mean_is_score_free() {
        let p = small_randomized(5);
        let x = [0.4, -0.6, 0.2];
        let mu = p.mean(&x).unwrap();
        let g = p.grad_log_prob(&x, mu.as_slice().unwrap()).unwrap();
        assert_eq!(g.len(), p.count_trainable());
        let n = g.len();
        assert!(g[..n - 2].iter().all(|&v| v.abs() < 1e-15));
        assert!(g[n - 2..].iter().all(|&v| (v + 1.0).abs() < 1e-12));
    }

    #[test]
    fn grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for seed in 0..4 {
            let p = small_randomized(seed + 10);
            let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let u: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let analytic = p.grad_log_prob(&x, &u).unwrap();
            let base = p.params();
            let h = 1e-6;
            for k in 0..base.len() {
                let mut q = p.clone();
                let mut pp = base.clone();
                pp[k] += h;
                q.load_params(&pp).unwrap();
                let up = q.log_prob_of(&x, &u).unwrap();
                pp[k] -= 2.0 * h;
                q.load_params(&pp).unwrap();
                let down = q.log_prob_of(&x, &u).unwrap();
                let fd = (up - down) / (2.0 * h);
                let rel = (analytic[k] - fd).abs() / analytic[k].abs().max(fd.abs()).max(1e-4);
                assert!(rel < 1e-5, "param {k}: {} vs {fd}", analytic[k]);
            }
        }
    }

    #[test]
    fn dense_grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = DenseNet::new(&[3, 6, 2], &mut rng).unwrap();
        let p = GaussianPolicy::dense(net, -0.2);
        let x = [0.3, -0.2, 0.8];
        let u = [0.5, -0.1];
        let analytic: Vec<f64> = p.grad_log_prob(&x, &u).unwrap();
        let base = p.params();
        let h = 1e-6;
        for k in 0..base.len() {
            let mut q = p.clone();
            let mut pp = base.clone();
            pp[k] += h;
            q.load_params(&pp).unwrap();
            let up = q.log_prob_of(&x, &u).unwrap();
            pp[k] -= 2.0 * h;
            q.load_params(&pp).unwrap();
            let down = q.log_prob_of(&x, &u).unwrap();
            let fd = (up - down) / (2.0 * h);
            let rel = (analytic[k] - fd).abs() / analytic[k].abs().max(fd.abs()).max(1e-4);
            assert!(rel < 1e-5);
        }
    }

    #[test]
    fn clamp_respects_bounds() {
        let mut p = small_randomized(7);
        p.set_log_std(&[-9.0, 4.0]).unwrap();
        p.clamp_log_std();
        assert_eq!(p.log_std().to_vec(), vec![-5.0, 2.0]);
    }
}
