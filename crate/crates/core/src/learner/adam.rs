use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Learning-rate clamp of the KL-adaptive schedule.
pub const LR_MIN: f64 = 1e-6;
pub const LR_MAX: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Real> AdamState<T> {
    /// `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
    pub fn new(num_params: usize) -> Self {
        Self {
            m: vec![T::zero(); num_params],
            v: vec![T::zero(); num_params],
            step: 0,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &[T] {
        &self.m
    }

    pub fn second_moment(&self) -> &[T] {
        &self.v
    }
}

/// One bias-corrected Adam step, in place.
pub fn adam_apply<T: Real>(params: &mut [T], grads: &[T], state: &mut AdamState<T>, lr: T) -> Result<()> {
    check_dim("adam parameters", state.len(), params.len())?;
    check_dim("adam gradients", state.len(), grads.len())?;
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut state.m).zip(&mut state.v) {
        *m = b1 * *m + (T::one() - b1) * g;
        *v = b2 * *v + (T::one() - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

/// Rescales `grads` so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_grad_norm<T: Real>(grads: &mut [T], max_norm: T) -> Result<T> {
    if !(max_norm > T::zero()) {
        return Err(Error::InvalidArgument(format!("max_norm {max_norm} must be positive")));
    }
    let norm = grads.iter().map(|&g| g * g).sum::<T>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            *g *= s;
        }
    }
    Ok(norm)
}

/// Divides by 1.5 above twice the target, multiplies by 1.5 below half of
/// it, then clamps to `[LR_MIN, LR_MAX]`.
pub fn kl_adaptive_lr(lr: f64, mean_kl: f64, target_kl: f64) -> f64 {
    let next = if mean_kl > 2.0 * target_kl {
        lr / 1.5
    } else if mean_kl < 0.5 * target_kl {
        lr * 1.5
    } else {
        lr
    };
    next.clamp(LR_MIN, LR_MAX)
}
