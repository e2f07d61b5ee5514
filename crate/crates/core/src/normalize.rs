//! Running observation and reward normalization.

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};

use crate::error::{check_dim, Result};
use crate::scalar::Real;

/// Default variance guard.
pub const NORM_EPSILON: f64 = 1e-8;
/// Default clip bound for normalized observations.
pub const OBS_CLIP: f64 = 10.0;

/// Streaming per-dimension mean and population variance (Chan et al.
/// parallel merge of Welford accumulators).
///
/// With no samples the variance reads as 1 so normalization is the
/// identity up to epsilon.
#[derive(Clone, Debug, PartialEq)]
pub struct RunningMeanStd<T> {
    count: T,
    mean: Array1<T>,
    m2: Array1<T>,
    frozen: bool,
}

impl<T: Real> RunningMeanStd<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            count: T::zero(),
            mean: Array1::zeros(dim),
            m2: Array1::zeros(dim),
            frozen: false,
        }
    }

    pub fn from_parts(count: T, mean: Array1<T>, m2: Array1<T>) -> Result<Self> {
        check_dim("running stats m2", mean.len(), m2.len())?;
        Ok(Self {
            count,
            mean,
            m2,
            frozen: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> T {
        self.count
    }

    pub fn mean(&self) -> &Array1<T> {
        &self.mean
    }

    pub fn m2(&self) -> &Array1<T> {
        &self.m2
    }

    pub fn variance(&self) -> Array1<T> {
        if self.count > T::zero() {
            self.m2.mapv(|v| v / self.count)
        } else {
            Array1::ones(self.dim())
        }
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Frozen statistics ignore updates.
    pub fn set_frozen(&mut self, frozen: bool) {
        self.frozen = frozen;
    }

    pub fn update_one(&mut self, x: &[T]) -> Result<()> {
        self.update(ArrayView1::from(x).insert_axis(Axis(0)))
    }

    /// Folds a `(batch, dim)` block of samples into the statistics.
    pub fn update(&mut self, batch: ArrayView2<T>) -> Result<()> {
        check_dim("running stats sample", self.dim(), batch.ncols())?;
        if self.frozen || batch.nrows() == 0 {
            return Ok(());
        }
        let n = T::from_usize(batch.nrows()).unwrap();
        let mean = batch.sum_axis(Axis(0)) / n;
        let mut m2 = Array1::zeros(self.dim());
        for row in batch.rows() {
            m2.zip_mut_with(&(&row - &mean), |acc, &d| *acc += d * d);
        }
        self.merge_moments(n, &mean, &m2);
        Ok(())
    }

    /// Merges another accumulator as if its samples had been streamed here.
    pub fn merge(&mut self, other: &RunningMeanStd<T>) -> Result<()> {
        check_dim("running stats merge", self.dim(), other.dim())?;
        if self.frozen || other.count == T::zero() {
            return Ok(());
        }
        self.merge_moments(other.count, &other.mean, &other.m2);
        Ok(())
    }

    fn merge_moments(&mut self, n_b: T, mean_b: &Array1<T>, m2_b: &Array1<T>) {
        let n_a = self.count;
        let total = n_a + n_b;
        for i in 0..self.dim() {
            let delta = mean_b[i] - self.mean[i];
            self.mean[i] += delta * n_b / total;
            self.m2[i] += m2_b[i] + delta * delta * n_a * n_b / total;
        }
        self.count = total;
    }

    /// `clip((x - mean) / sqrt(var + eps), -clip, clip)`.
    pub fn normalize(&self, x: &[T], clip: T) -> Result<Array1<T>> {
        check_dim("normalize input", self.dim(), x.len())?;
        let mut out = Array1::from(x.to_vec());
        self.normalize_in_place(out.view_mut().insert_axis(Axis(0)), clip);
        Ok(out)
    }

    pub fn normalize_batch(&self, x: ArrayView2<T>, clip: T) -> Result<ndarray::Array2<T>> {
        check_dim("normalize input", self.dim(), x.ncols())?;
        let mut out = x.to_owned();
        self.normalize_in_place(out.view_mut(), clip);
        Ok(out)
    }

    fn normalize_in_place(&self, mut x: ndarray::ArrayViewMut2<T>, clip: T) {
        let eps = T::lit(NORM_EPSILON);
        let scale: Array1<T> = self.variance().mapv(|v| T::one() / (v + eps).sqrt());
        for mut row in x.rows_mut() {
            for ((v, &m), &s) in row.iter_mut().zip(self.mean.iter()).zip(scale.iter()) {
                *v = ((*v - m) * s).max(-clip).min(clip);
            }
        }
    }
}

/// Scale-only reward normalization by the running standard deviation of a
/// per-environment discounted return.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardNormalizer<T> {
    gamma: T,
    returns: Vec<T>,
    stats: RunningMeanStd<T>,
}

impl<T: Real> RewardNormalizer<T> {
    pub fn new(num_envs: usize, gamma: T) -> Self {
        Self {
            gamma,
            returns: vec![T::zero(); num_envs],
            stats: RunningMeanStd::new(1),
        }
    }

    pub fn stats(&self) -> &RunningMeanStd<T> {
        &self.stats
    }

    pub fn set_stats(&mut self, stats: RunningMeanStd<T>) -> Result<()> {
        check_dim("reward stats", 1, stats.dim())?;
        self.stats = stats;
        Ok(())
    }

    pub fn set_frozen(&mut self, frozen: bool) {
        self.stats.set_frozen(frozen);
    }

    /// `r / sqrt(var(discounted return) + eps)` with the return statistic
    /// updated first; accumulators of finished episodes restart at zero.
    pub fn normalize(&mut self, rewards: &[T], dones: &[bool]) -> Result<Vec<T>> {
        check_dim("reward batch", self.returns.len(), rewards.len())?;
        check_dim("reward done flags", self.returns.len(), dones.len())?;
        for (ret, &r) in self.returns.iter_mut().zip(rewards) {
            *ret = *ret * self.gamma + r;
        }
        let block = ArrayView2::from_shape((self.returns.len(), 1), &self.returns).unwrap();
        self.stats.update(block)?;
        let out = self.scale(rewards);
        for (ret, &d) in self.returns.iter_mut().zip(dones) {
            if d {
                *ret = T::zero();
            }
        }
        Ok(out)
    }

    /// Applies the current scale without touching any statistic.
    pub fn scale(&self, rewards: &[T]) -> Vec<T> {
        let s = T::one() / (self.stats.variance()[0] + T::lit(NORM_EPSILON)).sqrt();
        rewards.iter().map(|&r| r * s).collect()
    }
}
