use ndarray::Array2;

use crate::actor_critic::{GaussianPolicy, ValueHead};
use crate::error::{check_dim, Error, Result};
use crate::rollout::Minibatch;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurrogateStats {
    pub entropy: f64,
    /// `mean(log pi_old - log pi_new)`.
    pub kl: f64,
    /// Fraction of samples with `|r - 1| > epsilon`.
    pub clip_fraction: f64,
}

/// `min(r A, clip(r, 1 - eps, 1 + eps) A)`, and whether the unclipped
/// branch is the one selected (so the sample carries ratio gradient).
pub fn clipped_term<T: Real>(ratio: T, advantage: T, epsilon: T) -> (T, bool) {
    let unclipped = ratio * advantage;
    let clipped = ratio.max(T::one() - epsilon).min(T::one() + epsilon) * advantage;
    if clipped < unclipped {
        (clipped, false)
    } else {
        (unclipped, true)
    }
}

/// Mean squared error of the critic against the value targets, and its
/// gradient with respect to the trainable critic parameters.
pub fn value_loss_and_grad<T: Real>(critic: &ValueHead<T>, batch: &Minibatch<T>) -> Result<(T, Vec<T>)> {
    let n = batch.len();
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    check_dim("value targets", n, batch.value_targets.len())?;
    let (v, cache) = critic.forward(batch.critic_input())?;
    let diff = &v - &batch.value_targets;
    let nt = T::from_usize(n).unwrap();
    let loss = diff.iter().map(|&d| d * d).sum::<T>() / nt;
    let d_value = diff * (T::lit(2.0) / nt);
    let grad = critic.backward(&cache, &d_value)?;
    Ok((loss, grad))
}

/// Clipped surrogate loss `-mean(term) - c H` and its gradient with respect
/// to the trainable actor parameters (representation, then `log_std`).
pub fn surrogate_loss_and_grad<T: Real>(
    policy: &GaussianPolicy<T>,
    batch: &Minibatch<T>,
    epsilon: T,
    entropy_coef: T,
) -> Result<(T, Vec<T>, SurrogateStats)> {
    let n = batch.len();
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument(format!("clip epsilon {epsilon} must be positive")));
    }
    let m = policy.action_dim();
    check_dim("batch actions", m, batch.actions.ncols())?;
    check_dim("old log-probs", n, batch.old_log_probs.len())?;
    check_dim("advantages", n, batch.advantages.len())?;

    let (mu, cache) = policy.forward(batch.actor_input())?;
    let log_std = policy.log_std();
    let sigma = log_std.mapv(|l| l.exp());
    let half_log_2pi = T::lit(0.5 * (2.0 * std::f64::consts::PI).ln());
    let log_std_sum = log_std.sum();
    let nt = T::from_usize(n).unwrap();

    let mut z = Array2::<T>::zeros((n, m));
    let mut term_sum = T::zero();
    let mut kl_sum = T::zero();
    let mut clipped = 0usize;
    let mut coef = vec![T::zero(); n];
    for k in 0..n {
        let mut sq = T::zero();
        for i in 0..m {
            let zi = (batch.actions[[k, i]] - mu[[k, i]]) / sigma[i];
            z[[k, i]] = zi;
            sq += zi * zi;
        }
        let log_p = -T::lit(0.5) * sq - log_std_sum - T::from_usize(m).unwrap() * half_log_2pi;
        let diff = log_p - batch.old_log_probs[k];
        let ratio = diff.exp();
        if !ratio.is_finite() {
            return Err(Error::NonFinite(format!("probability ratio at sample {k}")));
        }
        let a = batch.advantages[k];
        let (term, active) = clipped_term(ratio, a, epsilon);
        term_sum += term;
        kl_sum -= diff;
        if (ratio - T::one()).abs() > epsilon {
            clipped += 1;
        }
        if active {
            coef[k] = -ratio * a / nt;
        }
    }

    let entropy = policy.entropy();
    let loss = -term_sum / nt - entropy_coef * entropy;
    if !loss.is_finite() {
        return Err(Error::NonFinite("surrogate loss".into()));
    }

    let mut d_mean = Array2::<T>::zeros((n, m));
    let mut d_log_std = vec![-entropy_coef; m];
    for k in 0..n {
        let c = coef[k];
        if c == T::zero() {
            continue;
        }
        for i in 0..m {
            let zi = z[[k, i]];
            d_mean[[k, i]] = c * zi / sigma[i];
            d_log_std[i] += c * (zi * zi - T::one());
        }
    }
    let mut grad = policy.backward_mean(&cache, d_mean.view())?;
    grad.extend(d_log_std);
    Ok((
        loss,
        grad,
        SurrogateStats {
            entropy: entropy.as_f64(),
            kl: (kl_sum / nt).as_f64(),
            clip_fraction: clipped as f64 / n as f64,
        },
    ))
}
