use std::time::Instant;

use rand::Rng;

use super::adam::{adam_apply, clip_grad_norm, kl_adaptive_lr, AdamState};
use super::losses::{surrogate_loss_and_grad, value_loss_and_grad};
use crate::actor_critic::{GaussianPolicy, ValueHead};
use crate::error::{Error, Result};
use crate::function_approx::Parameterized;
use crate::rollout::{minibatch_iter, RolloutBuffer, RolloutCollector};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerConfig {
    pub horizon: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub minibatches: usize,
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub grad_clip: f64,
    /// Enables the KL-adaptive learning rate with this target.
    pub kl_target: Option<f64>,
    pub advantage_norm: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            horizon: 50,
            gamma: 0.99,
            lambda: 0.95,
            epochs: 5,
            minibatches: 4,
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            grad_clip: 0.5,
            kl_target: None,
            advantage_norm: true,
        }
    }
}

/// Policy and critic with their optimizer state.
#[derive(Clone, Debug)]
pub struct Agent<T> {
    pub policy: GaussianPolicy<T>,
    pub critic: ValueHead<T>,
    pub actor_opt: AdamState<T>,
    pub critic_opt: AdamState<T>,
    pub lr: f64,
}

impl<T: Real> Agent<T> {
    pub fn new(policy: GaussianPolicy<T>, critic: ValueHead<T>, lr: f64) -> Self {
        Self {
            actor_opt: AdamState::new(policy.num_params()),
            critic_opt: AdamState::new(critic.num_params()),
            policy,
            critic,
            lr,
        }
    }
}

/// Per-iteration summary. Loss, entropy, KL, clip fraction and gradient
/// norms are means over the minibatch steps taken.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UpdateReport {
    pub value_loss: f64,
    pub surrogate_loss: f64,
    pub entropy: f64,
    pub kl: f64,
    pub clip_fraction: f64,
    /// Pre-clip L2 norm of the actor gradient.
    pub actor_grad_norm: f64,
    /// Pre-clip L2 norm of the critic gradient.
    pub critic_grad_norm: f64,
    /// Learning rate in effect at the end of the iteration.
    pub lr: f64,
    /// Optimizer steps taken.
    pub steps: usize,
    /// Loss turned non-finite; parameters were rolled back.
    pub diverged: bool,
    pub collect_time_s: f64,
    /// Everything after collection returns: advantages, minibatching and
    /// optimization.
    pub learn_time_s: f64,
}

fn update_epochs<T: Real, R: Rng + ?Sized>(
    agent: &mut Agent<T>,
    buf: &RolloutBuffer<T>,
    cfg: &LearnerConfig,
    rng: &mut R,
    report: &mut UpdateReport,
) -> Result<()> {
    let eps = T::lit(cfg.clip_epsilon);
    let ent = T::lit(cfg.entropy_coef);
    let max_norm = T::lit(cfg.grad_clip);
    for idx in minibatch_iter(buf.len(), cfg.epochs, cfg.minibatches, rng)? {
        let mb = buf.gather(&idx)?;
        let (v_loss, mut v_grad) = value_loss_and_grad(&agent.critic, &mb)?;
        if !v_loss.is_finite() {
            return Err(Error::NonFinite("value loss".into()));
        }
        let (s_loss, mut s_grad, stats) = surrogate_loss_and_grad(&agent.policy, &mb, eps, ent)?;
        if let Some(target) = cfg.kl_target {
            agent.lr = kl_adaptive_lr(agent.lr, stats.kl, target);
        }
        let lr = T::lit(agent.lr);

        let c_norm = clip_grad_norm(&mut v_grad, max_norm)?;
        let mut p = agent.critic.params();
        adam_apply(&mut p, &v_grad, &mut agent.critic_opt, lr)?;
        agent.critic.load_params(&p)?;

        let a_norm = clip_grad_norm(&mut s_grad, max_norm)?;
        let mut p = agent.policy.params();
        adam_apply(&mut p, &s_grad, &mut agent.actor_opt, lr)?;
        agent.policy.load_params(&p)?;
        agent.policy.clamp_log_std();

        report.value_loss += v_loss.as_f64();
        report.surrogate_loss += s_loss.as_f64();
        report.entropy += stats.entropy;
        report.kl += stats.kl;
        report.clip_fraction += stats.clip_fraction;
        report.actor_grad_norm += a_norm.as_f64();
        report.critic_grad_norm += c_norm.as_f64();
        report.steps += 1;
    }
    Ok(())
}

/// Collect, estimate advantages, then run the epoch/minibatch schedule
/// (critic step, then actor step) with separate Adam states.
///
/// A non-finite loss or ratio rolls the agent back to its state before the
/// iteration and sets `diverged`. The rollout is returned alongside the
/// report.
pub fn train_iteration<T: Real, R: Rng + ?Sized>(
    agent: &mut Agent<T>,
    collector: &mut RolloutCollector<T>,
    cfg: &LearnerConfig,
    rng: &mut R,
) -> Result<(UpdateReport, RolloutBuffer<T>)> {
    let t0 = Instant::now();
    let mut buf = collector.collect(&agent.policy, &agent.critic, cfg.horizon)?;
    let collect_time_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    buf.compute_gae(T::lit(cfg.gamma), T::lit(cfg.lambda))?;
    if cfg.advantage_norm {
        buf.normalize_advantages()?;
    }
    let snapshot = agent.clone();
    let mut report = UpdateReport::default();
    match update_epochs(agent, &buf, cfg, rng, &mut report) {
        Ok(()) => {}
        Err(Error::NonFinite(_)) => {
            *agent = snapshot;
            report.diverged = true;
        }
        Err(e) => return Err(e),
    }
    if report.steps > 0 {
        let k = report.steps as f64;
        report.value_loss /= k;
        report.surrogate_loss /= k;
        report.entropy /= k;
        report.kl /= k;
        report.clip_fraction /= k;
        report.actor_grad_norm /= k;
        report.critic_grad_norm /= k;
    }
    report.lr = agent.lr;
    report.collect_time_s = collect_time_s;
    report.learn_time_s = t1.elapsed().as_secs_f64();
    Ok((report, buf))
}
