use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Mean with a two-sided Student-t confidence interval over per-seed values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
    pub half_width: f64,
}

impl Interval {
    pub fn lo(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.mean + self.half_width
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// `mean +- t_{(1+level)/2, n-1} * s / sqrt(n)`.
pub fn t_interval(xs: &[f64], level: f64) -> Result<Interval> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a confidence interval needs at least 2 values, got {}",
            xs.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let n = xs.len();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.5 + level / 2.0);
    let std = sample_std(xs);
    Ok(Interval {
        n,
        mean: mean(xs),
        std,
        half_width: t * std / (n as f64).sqrt(),
    })
}

/// Standard deviation over mean, as a fraction.
pub fn relative_std(xs: &[f64]) -> f64 {
    sample_std(xs) / mean(xs).abs()
}
