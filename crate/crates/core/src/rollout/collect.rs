use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::buffer::{BufferLayout, RolloutBuffer, Transition};
use crate::actor_critic::{BatchInput, GaussianPolicy, ValueHead};
use crate::envs::{CurriculumState, EpisodeSummary, Environment, Observation};
use crate::error::{Error, Result};
use crate::normalize::{RewardNormalizer, RunningMeanStd, OBS_CLIP};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectorConfig {
    pub obs_norm: bool,
    pub reward_norm: bool,
    pub obs_clip: f64,
    /// Discount of the return accumulator behind reward scaling.
    pub gamma: f64,
}

impl Default for CollectorConfig {
    fn default() -> Self {
        Self {
            obs_norm: true,
            reward_norm: true,
            obs_clip: OBS_CLIP,
            gamma: 0.99,
        }
    }
}

/// Steps a batch of environments with a policy and fills rollout buffers.
///
/// Environments reset themselves here when an episode ends, so the
/// collector carries the live observation of every environment between
/// calls. Each environment has its own action-sampling stream.
pub struct RolloutCollector<T> {
    envs: Vec<Box<dyn Environment>>,
    rngs: Vec<ChaCha8Rng>,
    current: Vec<Observation>,
    obs_stats: RunningMeanStd<T>,
    privileged_stats: RunningMeanStd<T>,
    reward_norm: RewardNormalizer<T>,
    config: CollectorConfig,
    episodes: Vec<EpisodeSummary>,
}

fn stack<T: Real>(rows: impl ExactSizeIterator<Item = impl AsRef<[f64]>>, dim: usize) -> Result<Array2<T>> {
    let n = rows.len();
    let mut out = Array2::zeros((n, dim));
    for (i, r) in rows.enumerate() {
        let r = r.as_ref();
        crate::error::check_dim("observation", dim, r.len())?;
        for (o, &v) in out.row_mut(i).iter_mut().zip(r) {
            *o = T::lit(v);
        }
    }
    Ok(out)
}

impl<T: Real> RolloutCollector<T> {
    /// Resets every environment. `action_seeds[i]` seeds the sampling
    /// stream of environment `i`.
    pub fn new(mut envs: Vec<Box<dyn Environment>>, action_seeds: &[u64], config: CollectorConfig) -> Result<Self> {
        let first = envs
            .first()
            .ok_or_else(|| Error::InvalidArgument("no environments".into()))?;
        let (od, pd, ad) = (first.obs_dim(), first.privileged_dim(), first.action_dim());
        if envs
            .iter()
            .any(|e| e.obs_dim() != od || e.privileged_dim() != pd || e.action_dim() != ad)
        {
            return Err(Error::InvalidArgument("environments disagree on dimensions".into()));
        }
        crate::error::check_dim("action seeds", envs.len(), action_seeds.len())?;
        if !(config.obs_clip > 0.0) {
            return Err(Error::InvalidArgument(format!("obs_clip {} must be positive", config.obs_clip)));
        }
        let current = envs.iter_mut().map(|e| e.reset()).collect();
        Ok(Self {
            rngs: action_seeds.iter().map(|&s| ChaCha8Rng::seed_from_u64(s)).collect(),
            current,
            obs_stats: RunningMeanStd::new(od),
            privileged_stats: RunningMeanStd::new(pd),
            reward_norm: RewardNormalizer::new(envs.len(), T::lit(config.gamma)),
            envs,
            config,
            episodes: Vec::new(),
        })
    }

    pub fn num_envs(&self) -> usize {
        self.envs.len()
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_stats.dim()
    }

    pub fn privileged_dim(&self) -> usize {
        self.privileged_stats.dim()
    }

    pub fn action_dim(&self) -> usize {
        self.envs[0].action_dim()
    }

    pub fn config(&self) -> &CollectorConfig {
        &self.config
    }

    pub fn obs_stats(&self) -> &RunningMeanStd<T> {
        &self.obs_stats
    }

    pub fn privileged_stats(&self) -> &RunningMeanStd<T> {
        &self.privileged_stats
    }

    pub fn reward_normalizer(&self) -> &RewardNormalizer<T> {
        &self.reward_norm
    }

    /// Replaces normalizer statistics, e.g. from a checkpoint.
    pub fn set_stats(
        &mut self,
        obs: RunningMeanStd<T>,
        privileged: RunningMeanStd<T>,
        reward: RunningMeanStd<T>,
    ) -> Result<()> {
        crate::error::check_dim("observation stats", self.obs_dim(), obs.dim())?;
        crate::error::check_dim("privileged stats", self.privileged_dim(), privileged.dim())?;
        self.reward_norm.set_stats(reward)?;
        self.obs_stats = obs;
        self.privileged_stats = privileged;
        Ok(())
    }

    /// Freezes every normalizer, as evaluation requires.
    pub fn set_frozen(&mut self, frozen: bool) {
        self.obs_stats.set_frozen(frozen);
        self.privileged_stats.set_frozen(frozen);
        self.reward_norm.set_frozen(frozen);
    }

    pub fn apply_curriculum(&mut self, state: &CurriculumState) {
        for e in &mut self.envs {
            e.apply_curriculum(state);
        }
    }

    /// Episodes finished since the last drain, in completion order.
    pub fn drain_episodes(&mut self) -> Vec<EpisodeSummary> {
        std::mem::take(&mut self.episodes)
    }

    fn normalize_obs(&self, stats: &RunningMeanStd<T>, raw: ArrayView2<T>) -> Result<Array2<T>> {
        if self.config.obs_norm {
            stats.normalize_batch(raw, T::lit(self.config.obs_clip))
        } else {
            Ok(raw.to_owned())
        }
    }

    /// Normalized actor and privileged observations of the live states.
    /// With `update`, statistics absorb the raw batch first.
    fn observe(&mut self, update: bool) -> Result<(Array2<T>, Array2<T>)> {
        let obs = stack::<T>(self.current.iter().map(|o| &o.actor), self.obs_dim())?;
        let priv_obs = stack::<T>(self.current.iter().map(|o| &o.privileged), self.privileged_dim())?;
        if update && self.config.obs_norm {
            self.obs_stats.update(obs.view())?;
            self.privileged_stats.update(priv_obs.view())?;
        }
        Ok((
            self.normalize_obs(&self.obs_stats, obs.view())?,
            self.normalize_obs(&self.privileged_stats, priv_obs.view())?,
        ))
    }

    /// Runs `horizon` steps in every environment with actions sampled from
    /// `policy`, returning a sealed buffer with values, behaviour
    /// log-probabilities, truncation values and bootstrap values.
    pub fn collect(
        &mut self,
        policy: &GaussianPolicy<T>,
        critic: &ValueHead<T>,
        horizon: usize,
    ) -> Result<RolloutBuffer<T>> {
        crate::error::check_dim("policy input", self.obs_dim(), policy.obs_dim())?;
        crate::error::check_dim("critic input", self.privileged_dim(), critic.obs_dim())?;
        crate::error::check_dim("policy action", self.action_dim(), policy.action_dim())?;
        let actor_basis = policy.representation().basis().cloned();
        let critic_basis = critic.representation().basis().cloned();
        let n = self.num_envs();
        let mut buf = RolloutBuffer::new(BufferLayout {
            num_envs: n,
            horizon,
            obs_dim: self.obs_dim(),
            privileged_dim: self.privileged_dim(),
            action_dim: self.action_dim(),
            actor_features: actor_basis.as_ref().map(|b| b.feature_dim()),
            critic_features: critic_basis.as_ref().map(|b| b.feature_dim()),
        })?;

        for t in 0..horizon {
            let (obs, priv_obs) = self.observe(true)?;
            let actor_f = actor_basis.as_ref().map(|b| b.features_batch(obs.view())).transpose()?;
            let critic_f = critic_basis
                .as_ref()
                .map(|b| b.features_batch(priv_obs.view()))
                .transpose()?;
            let means = policy.mean_batch(match &actor_f {
                Some(f) => BatchInput::Features(f.view()),
                None => BatchInput::Observations(obs.view()),
            })?;
            let values = critic.value_batch(match &critic_f {
                Some(f) => BatchInput::Features(f.view()),
                None => BatchInput::Observations(priv_obs.view()),
            })?;

            let mut raw_rewards = Vec::with_capacity(n);
            let mut pending = Vec::with_capacity(n);
            for e in 0..n {
                let (u, log_prob) = policy.sample_around(means.row(e), &mut self.rngs[e]);
                let action: Vec<f64> = u.iter().map(|v| v.as_f64()).collect();
                let out = self.envs[e]
                    .step(&action)
                    .map_err(|source| Error::EnvStep { env: e, source })?;
                raw_rewards.push(T::lit(out.reward));
                pending.push((u, log_prob, out));
            }
            let dones: Vec<bool> = pending.iter().map(|p| p.2.done).collect();
            let rewards = if self.config.reward_norm {
                self.reward_norm.normalize(&raw_rewards, &dones)?
            } else {
                raw_rewards
            };

            for (e, (u, log_prob, out)) in pending.into_iter().enumerate() {
                buf.write(
                    e,
                    t,
                    &Transition {
                        obs: obs.row(e).to_vec(),
                        privileged_obs: priv_obs.row(e).to_vec(),
                        action: u.to_vec(),
                        reward: rewards[e],
                        done: out.done,
                        truncated: out.truncated,
                        value: values[e],
                        log_prob,
                    },
                )?;
                buf.write_features(
                    e,
                    t,
                    actor_f.as_ref().map(|f| f.row(e)),
                    critic_f.as_ref().map(|f| f.row(e)),
                )?;
                if out.truncated {
                    // Value of the state the time limit cut off; the
                    // statistics see this sample only through this lookup.
                    let raw = stack::<T>(std::iter::once(&out.obs.privileged), self.privileged_dim())?;
                    let x = self.normalize_obs(&self.privileged_stats, raw.view())?;
                    buf.set_truncation_value(e, t, critic.value_batch(BatchInput::Observations(x.view()))?[0]);
                }
                if let Some(ep) = out.episode {
                    self.episodes.push(ep);
                }
                self.current[e] = if out.done { self.envs[e].reset() } else { out.obs };
            }
        }

        let (_, priv_obs) = self.observe(false)?;
        let boot = critic.value_batch(BatchInput::Observations(priv_obs.view()))?;
        for (e, &v) in boot.iter().enumerate() {
            buf.set_bootstrap_value(e, v);
        }
        buf.finish_collection()?;
        Ok(buf)
    }
}
