use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Index batches for `num_epochs` passes over `n` transitions.
///
/// Each epoch is a fresh uniform shuffle split into `num_minibatches`
/// contiguous chunks whose sizes differ by at most one.
pub fn minibatch_iter<R: Rng + ?Sized>(
    n: usize,
    num_epochs: usize,
    num_minibatches: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if num_minibatches == 0 || num_minibatches > n {
        return Err(Error::InvalidArgument(format!(
            "{num_minibatches} minibatches over {n} transitions"
        )));
    }
    let mut out = Vec::with_capacity(num_epochs * num_minibatches);
    let (base, extra) = (n / num_minibatches, n % num_minibatches);
    for _ in 0..num_epochs {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let mut start = 0;
        for b in 0..num_minibatches {
            let len = base + usize::from(b < extra);
            out.push(idx[start..start + len].to_vec());
            start += len;
        }
    }
    Ok(out)
}
