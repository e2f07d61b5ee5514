use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1, Axis};

use super::gae::{gae_stream, normalize_in_place, GaeStream};
use crate::actor_critic::BatchInput;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Shape of a rollout: `num_envs` streams of `horizon` steps each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BufferLayout {
    pub num_envs: usize,
    pub horizon: usize,
    pub obs_dim: usize,
    pub privileged_dim: usize,
    pub action_dim: usize,
    /// Width of cached actor features, for randomized policies.
    pub actor_features: Option<usize>,
    /// Width of cached critic features, for randomized critics.
    pub critic_features: Option<usize>,
}

impl BufferLayout {
    pub fn len(&self) -> usize {
        self.num_envs * self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One step as seen by the learner. Observations are already normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<T> {
    pub obs: Vec<T>,
    pub privileged_obs: Vec<T>,
    pub action: Vec<T>,
    pub reward: T,
    pub done: bool,
    pub truncated: bool,
    pub value: T,
    /// Behaviour-policy log-density, fixed at collection time.
    pub log_prob: T,
}

/// Rollout storage. Row `env * horizon + t` holds step `t` of environment
/// `env`, so every environment's stream is contiguous and time ordered.
#[derive(Clone, Debug)]
pub struct RolloutBuffer<T> {
    layout: BufferLayout,
    obs: Array2<T>,
    privileged_obs: Array2<T>,
    actor_features: Option<Array2<T>>,
    critic_features: Option<Array2<T>>,
    actions: Array2<T>,
    rewards: Vec<T>,
    dones: Vec<bool>,
    truncated: Vec<bool>,
    values: Vec<T>,
    log_probs: Vec<T>,
    truncation_values: Vec<T>,
    bootstrap_values: Vec<T>,
    written: Vec<bool>,
    collected: bool,
    advantages: Option<Vec<T>>,
    value_targets: Option<Vec<T>>,
}

/// Owned rows gathered for one optimization step.
#[derive(Clone, Debug)]
pub struct Minibatch<T> {
    pub obs: Array2<T>,
    pub privileged_obs: Array2<T>,
    pub actor_features: Option<Array2<T>>,
    pub critic_features: Option<Array2<T>>,
    pub actions: Array2<T>,
    pub old_log_probs: Array1<T>,
    pub advantages: Array1<T>,
    pub value_targets: Array1<T>,
}

impl<T: Real> Minibatch<T> {
    pub fn len(&self) -> usize {
        self.actions.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn actor_input(&self) -> BatchInput<'_, T> {
        match &self.actor_features {
            Some(f) => BatchInput::Features(f.view()),
            None => BatchInput::Observations(self.obs.view()),
        }
    }

    pub fn critic_input(&self) -> BatchInput<'_, T> {
        match &self.critic_features {
            Some(f) => BatchInput::Features(f.view()),
            None => BatchInput::Observations(self.privileged_obs.view()),
        }
    }
}

impl<T: Real> RolloutBuffer<T> {
    pub fn new(layout: BufferLayout) -> Result<Self> {
        if layout.num_envs == 0 || layout.horizon == 0 {
            return Err(Error::InvalidArgument(
                "rollout needs at least one environment and one step".into(),
            ));
        }
        let n = layout.len();
        Ok(Self {
            obs: Array2::zeros((n, layout.obs_dim)),
            privileged_obs: Array2::zeros((n, layout.privileged_dim)),
            actor_features: layout.actor_features.map(|j| Array2::zeros((n, j))),
            critic_features: layout.critic_features.map(|j| Array2::zeros((n, j))),
            actions: Array2::zeros((n, layout.action_dim)),
            rewards: vec![T::zero(); n],
            dones: vec![false; n],
            truncated: vec![false; n],
            values: vec![T::zero(); n],
            log_probs: vec![T::zero(); n],
            truncation_values: vec![T::zero(); n],
            bootstrap_values: vec![T::zero(); layout.num_envs],
            written: vec![false; n],
            collected: false,
            advantages: None,
            value_targets: None,
            layout,
        })
    }

    pub fn layout(&self) -> &BufferLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    pub fn row(&self, env: usize, t: usize) -> usize {
        env * self.layout.horizon + t
    }

    fn invalidate(&mut self) {
        self.collected = false;
        self.advantages = None;
        self.value_targets = None;
    }

    pub fn write(&mut self, env: usize, t: usize, tr: &Transition<T>) -> Result<()> {
        if env >= self.layout.num_envs || t >= self.layout.horizon {
            return Err(Error::InvalidArgument(format!("slot ({env}, {t}) out of range")));
        }
        check_dim("transition obs", self.layout.obs_dim, tr.obs.len())?;
        check_dim("transition privileged obs", self.layout.privileged_dim, tr.privileged_obs.len())?;
        check_dim("transition action", self.layout.action_dim, tr.action.len())?;
        if !tr.log_prob.is_finite() || !tr.value.is_finite() {
            return Err(Error::NonFinite(format!("transition ({env}, {t})")));
        }
        self.invalidate();
        let i = self.row(env, t);
        self.obs.row_mut(i).assign(&ArrayView1::from(&tr.obs[..]));
        self.privileged_obs
            .row_mut(i)
            .assign(&ArrayView1::from(&tr.privileged_obs[..]));
        self.actions.row_mut(i).assign(&ArrayView1::from(&tr.action[..]));
        self.rewards[i] = tr.reward;
        self.dones[i] = tr.done;
        self.truncated[i] = tr.truncated;
        self.values[i] = tr.value;
        self.log_probs[i] = tr.log_prob;
        self.truncation_values[i] = T::zero();
        self.written[i] = true;
        Ok(())
    }

    pub fn write_features(
        &mut self,
        env: usize,
        t: usize,
        actor: Option<ArrayView1<T>>,
        critic: Option<ArrayView1<T>>,
    ) -> Result<()> {
        let i = self.row(env, t);
        if let (Some(dst), Some(src)) = (self.actor_features.as_mut(), actor) {
            check_dim("actor features", dst.ncols(), src.len())?;
            dst.row_mut(i).assign(&src);
        }
        if let (Some(dst), Some(src)) = (self.critic_features.as_mut(), critic) {
            check_dim("critic features", dst.ncols(), src.len())?;
            dst.row_mut(i).assign(&src);
        }
        Ok(())
    }

    /// Value of the final observation of a time-limited episode ending at
    /// `(env, t)`.
    pub fn set_truncation_value(&mut self, env: usize, t: usize, value: T) {
        let i = self.row(env, t);
        self.truncation_values[i] = value;
    }

    pub fn set_bootstrap_value(&mut self, env: usize, value: T) {
        self.bootstrap_values[env] = value;
    }

    /// Seals the buffer; every slot must have been written.
    pub fn finish_collection(&mut self) -> Result<()> {
        if self.written.iter().any(|w| !w) {
            return Err(Error::NotReady("fully written"));
        }
        self.collected = true;
        Ok(())
    }

    pub fn is_collected(&self) -> bool {
        self.collected
    }

    pub fn rewards(&self) -> &[T] {
        &self.rewards
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn log_probs(&self) -> &[T] {
        &self.log_probs
    }

    pub fn dones(&self) -> &[bool] {
        &self.dones
    }

    pub fn truncated(&self) -> &[bool] {
        &self.truncated
    }

    pub fn actions(&self) -> &Array2<T> {
        &self.actions
    }

    pub fn observations(&self) -> &Array2<T> {
        &self.obs
    }

    pub fn privileged_observations(&self) -> &Array2<T> {
        &self.privileged_obs
    }

    pub fn bootstrap_values(&self) -> &[T] {
        &self.bootstrap_values
    }

    pub fn advantages(&self) -> Option<&[T]> {
        self.advantages.as_deref()
    }

    pub fn value_targets(&self) -> Option<&[T]> {
        self.value_targets.as_deref()
    }

    /// Fills advantages and value targets (`A + V`) for every stream.
    pub fn compute_gae(&mut self, gamma: T, lambda: T) -> Result<()> {
        if !self.collected {
            return Err(Error::NotReady("collected"));
        }
        if !(gamma > T::zero() && gamma <= T::one()) || !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "gamma {gamma} must lie in (0, 1], lambda {lambda} in [0, 1]"
            )));
        }
        let h = self.layout.horizon;
        let mut adv = Vec::with_capacity(self.len());
        for env in 0..self.layout.num_envs {
            let r = env * h..(env + 1) * h;
            adv.extend(gae_stream(
                GaeStream {
                    rewards: &self.rewards[r.clone()],
                    values: &self.values[r.clone()],
                    dones: &self.dones[r.clone()],
                    truncated: &self.truncated[r.clone()],
                    truncation_values: &self.truncation_values[r],
                    bootstrap: self.bootstrap_values[env],
                },
                gamma,
                lambda,
            ));
        }
        self.value_targets = Some(adv.iter().zip(&self.values).map(|(&a, &v)| a + v).collect());
        self.advantages = Some(adv);
        Ok(())
    }

    /// Standardizes advantages over the whole buffer; targets are untouched.
    pub fn normalize_advantages(&mut self) -> Result<()> {
        let adv = self
            .advantages
            .as_mut()
            .ok_or(Error::NotReady("through advantage estimation"))?;
        normalize_in_place(adv);
        Ok(())
    }

    pub fn gather(&self, idx: &[usize]) -> Result<Minibatch<T>> {
        let (adv, targets) = match (&self.advantages, &self.value_targets) {
            (Some(a), Some(v)) => (a, v),
            _ => return Err(Error::NotReady("through advantage estimation")),
        };
        if idx.is_empty() {
            return Err(Error::EmptyBatch);
        }
        Ok(Minibatch {
            obs: self.obs.select(Axis(0), idx),
            privileged_obs: self.privileged_obs.select(Axis(0), idx),
            actor_features: self.actor_features.as_ref().map(|f| f.select(Axis(0), idx)),
            critic_features: self.critic_features.as_ref().map(|f| f.select(Axis(0), idx)),
            actions: self.actions.select(Axis(0), idx),
            old_log_probs: idx.iter().map(|&i| self.log_probs[i]).collect(),
            advantages: idx.iter().map(|&i| adv[i]).collect(),
            value_targets: idx.iter().map(|&i| targets[i]).collect(),
        })
    }

    /// Debug dump, one row per transition. Columns: `env, step, reward,
    /// done, truncated, value, log_prob, advantage, value_target,
    /// action_0.., obs_0..`. Missing advantages are written empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = [
            "env", "step", "reward", "done", "truncated", "value", "log_prob", "advantage",
            "value_target",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..self.layout.action_dim).map(|i| format!("action_{i}")));
        header.extend((0..self.layout.obs_dim).map(|i| format!("obs_{i}")));
        w.write_record(&header)?;
        let opt = |v: Option<&Vec<T>>, i: usize| v.map_or(String::new(), |a| a[i].to_string());
        for env in 0..self.layout.num_envs {
            for t in 0..self.layout.horizon {
                let i = self.row(env, t);
                let mut rec = vec![
                    env.to_string(),
                    t.to_string(),
                    self.rewards[i].to_string(),
                    u8::from(self.dones[i]).to_string(),
                    u8::from(self.truncated[i]).to_string(),
                    self.values[i].to_string(),
                    self.log_probs[i].to_string(),
                    opt(self.advantages.as_ref(), i),
                    opt(self.value_targets.as_ref(), i),
                ];
                rec.extend(self.actions.row(i).iter().map(|v| v.to_string()));
                rec.extend(self.obs.row(i).iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
