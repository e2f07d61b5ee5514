//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Defaults depend on
//! `algorithm`, which is therefore applied before every other key no matter
//! where it appears. Unknown keys and invalid values are collected and
//! reported together.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::envs::{CurriculumConfig, PendulumConfig, VelocityTaskConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Randpol,
    DenseBaseline,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Randpol => "randpol",
            Algorithm::DenseBaseline => "dense_baseline",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "randpol" => Ok(Algorithm::Randpol),
            "dense_baseline" => Ok(Algorithm::DenseBaseline),
            _ => Err(format!("expected randpol or dense_baseline, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvKind {
    VelocityTrack,
    Pendulum,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::VelocityTrack => "velocity_track",
            EnvKind::Pendulum => "pendulum",
        }
    }
}

impl FromStr for EnvKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "velocity_track" => Ok(EnvKind::VelocityTrack),
            "pendulum" => Ok(EnvKind::Pendulum),
            _ => Err(format!("expected velocity_track or pendulum, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F64,
    F32,
}

impl FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "f64" => Ok(Precision::F64),
            "f32" => Ok(Precision::F32),
            _ => Err(format!("expected f64 or f32, got {s:?}")),
        }
    }
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F64 => "f64",
            Precision::F32 => "f32",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub env: EnvKind,
    pub precision: Precision,
    pub master_seed: u64,
    pub iterations: usize,
    pub num_envs: usize,
    /// Environment steps per iteration, per environment.
    pub horizon: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub minibatches: usize,
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub lr: f64,
    pub grad_clip: f64,
    /// KL-adaptive learning rate; honoured for the dense baseline only.
    pub adaptive_lr: bool,
    pub kl_target: f64,
    pub basis_hidden: Vec<usize>,
    pub feature_dim: usize,
    pub dense_hidden: Vec<usize>,
    pub log_std_init: f64,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub obs_norm: bool,
    pub reward_norm: bool,
    pub adv_norm: bool,
    pub obs_clip: f64,
    /// Iterations between periodic checkpoints; 0 keeps only the final one.
    pub checkpoint_every: usize,
    /// Iterations between rollout CSV dumps; 0 disables them.
    pub rollout_dump_every: usize,
    pub eval_episodes: usize,
    pub velocity: VelocityTaskConfig,
    pub curriculum: CurriculumConfig,
    pub pendulum: PendulumConfig,
}

impl TrainConfig {
    pub fn defaults(algorithm: Algorithm) -> Self {
        let randpol = algorithm == Algorithm::Randpol;
        Self {
            algorithm,
            env: EnvKind::VelocityTrack,
            precision: Precision::F64,
            master_seed: 0,
            iterations: 1000,
            num_envs: 64,
            horizon: if randpol { 50 } else { 24 },
            gamma: 0.99,
            lambda: 0.95,
            epochs: 5,
            minibatches: 4,
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            lr: if randpol { 3e-4 } else { 1e-3 },
            grad_clip: 0.5,
            adaptive_lr: !randpol,
            kl_target: 0.01,
            basis_hidden: vec![500],
            feature_dim: 400,
            dense_hidden: vec![512, 256, 128],
            log_std_init: 0.0,
            log_std_min: -5.0,
            log_std_max: 2.0,
            obs_norm: true,
            reward_norm: true,
            adv_norm: true,
            obs_clip: 10.0,
            checkpoint_every: 0,
            rollout_dump_every: 0,
            eval_episodes: 64,
            velocity: VelocityTaskConfig::default(),
            curriculum: CurriculumConfig::default(),
            pendulum: PendulumConfig::default(),
        }
    }

    /// Parses `text`, then applies `overrides` (each `key=value`) on top.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut errors = Vec::new();
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => entries.push((format!("line {}", n + 1), k.trim().to_string(), v.trim().to_string())),
                None => errors.push(format!("line {}: expected `key = value`, got {line:?}", n + 1)),
            }
        }
        for o in overrides {
            match o.split_once('=') {
                Some((k, v)) => entries.push((format!("--set {o}"), k.trim().to_string(), v.trim().to_string())),
                None => errors.push(format!("--set {o:?}: expected key=value")),
            }
        }

        let mut algorithm = Algorithm::Randpol;
        for (at, k, v) in &entries {
            if k == "algorithm" {
                match v.parse() {
                    Ok(a) => algorithm = a,
                    Err(e) => errors.push(format!("{at}: algorithm: {e}")),
                }
            }
        }
        let mut cfg = Self::defaults(algorithm);
        for (at, k, v) in &entries {
            if k == "algorithm" {
                continue;
            }
            if let Err(e) = cfg.set(k, v) {
                errors.push(format!("{at}: {k}: {e}"));
            }
        }
        errors.extend(cfg.problems());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, overrides)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn p<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("cannot parse {v:?}: {e}"))
        }
        fn list(v: &str) -> Result<Vec<usize>, String> {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(|s| p::<usize>(s.trim())).collect()
        }
        let (vel, cur, pen) = (&mut self.velocity, &mut self.curriculum, &mut self.pendulum);
        match key {
            "algorithm" => self.algorithm = p(value)?,
            "env" => self.env = p(value)?,
            "precision" => self.precision = p(value)?,
            "master_seed" => self.master_seed = p(value)?,
            "iterations" => self.iterations = p(value)?,
            "num_envs" => self.num_envs = p(value)?,
            "horizon" => self.horizon = p(value)?,
            "gamma" => self.gamma = p(value)?,
            "lambda" => self.lambda = p(value)?,
            "epochs" => self.epochs = p(value)?,
            "minibatches" => self.minibatches = p(value)?,
            "clip_epsilon" => self.clip_epsilon = p(value)?,
            "entropy_coef" => self.entropy_coef = p(value)?,
            "lr" => self.lr = p(value)?,
            "grad_clip" => self.grad_clip = p(value)?,
            "adaptive_lr" => self.adaptive_lr = p(value)?,
            "kl_target" => self.kl_target = p(value)?,
            "basis_hidden" => self.basis_hidden = list(value)?,
            "feature_dim" => self.feature_dim = p(value)?,
            "dense_hidden" => self.dense_hidden = list(value)?,
            "log_std_init" => self.log_std_init = p(value)?,
            "log_std_min" => self.log_std_min = p(value)?,
            "log_std_max" => self.log_std_max = p(value)?,
            "obs_norm" => self.obs_norm = p(value)?,
            "reward_norm" => self.reward_norm = p(value)?,
            "adv_norm" => self.adv_norm = p(value)?,
            "obs_clip" => self.obs_clip = p(value)?,
            "checkpoint_every" => self.checkpoint_every = p(value)?,
            "rollout_dump_every" => self.rollout_dump_every = p(value)?,
            "eval_episodes" => self.eval_episodes = p(value)?,
            "velocity.dt" => vel.dt = p(value)?,
            "velocity.episode_len" => vel.episode_len = p(value)?,
            "velocity.resample_period" => vel.resample_period = p(value)?,
            "velocity.k_v" => vel.k_v = p(value)?,
            "velocity.d_v" => vel.d_v = p(value)?,
            "velocity.k_w" => vel.k_w = p(value)?,
            "velocity.d_w" => vel.d_w = p(value)?,
            "velocity.domain_randomization" => vel.domain_randomization = p(value)?,
            "velocity.dynamics_scale_min" => vel.dynamics_scale[0] = p(value)?,
            "velocity.dynamics_scale_max" => vel.dynamics_scale[1] = p(value)?,
            "velocity.push_prob" => vel.push_prob = p(value)?,
            "velocity.push_max" => vel.push_max = p(value)?,
            "velocity.v_max_phys" => vel.v_max_phys = p(value)?,
            "velocity.w_max_phys" => vel.w_max_phys = p(value)?,
            "velocity.reset_noise" => vel.reset_noise = p(value)?,
            "reward.w_lin" => vel.reward.w_lin = p(value)?,
            "reward.w_yaw" => vel.reward.w_yaw = p(value)?,
            "reward.sigma_v" => vel.reward.sigma_v = p(value)?,
            "reward.sigma_w" => vel.reward.sigma_w = p(value)?,
            "reward.w_act" => vel.reward.w_act = p(value)?,
            "reward.w_rate" => vel.reward.w_rate = p(value)?,
            "curriculum.enabled" => cur.enabled = p(value)?,
            "curriculum.v_init_min" => cur.v_init[0] = p(value)?,
            "curriculum.v_init_max" => cur.v_init[1] = p(value)?,
            "curriculum.w_init" => cur.w_init = p(value)?,
            "curriculum.v_final" => cur.v_final = p(value)?,
            "curriculum.w_final" => cur.w_final = p(value)?,
            "curriculum.promotion_threshold" => cur.promotion_threshold = p(value)?,
            "curriculum.expansion_step" => cur.expansion_step = p(value)?,
            "pendulum.dt" => pen.dt = p(value)?,
            "pendulum.gravity" => pen.gravity = p(value)?,
            "pendulum.mass" => pen.mass = p(value)?,
            "pendulum.length" => pen.length = p(value)?,
            "pendulum.max_torque" => pen.max_torque = p(value)?,
            "pendulum.max_speed" => pen.max_speed = p(value)?,
            "pendulum.episode_len" => pen.episode_len = p(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Every key with its current value, in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        fn list(v: &[usize]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let (vel, cur, pen) = (&self.velocity, &self.curriculum, &self.pendulum);
        vec![
            ("algorithm", self.algorithm.name().into()),
            ("env", self.env.name().into()),
            ("precision", self.precision.name().into()),
            ("master_seed", self.master_seed.to_string()),
            ("iterations", self.iterations.to_string()),
            ("num_envs", self.num_envs.to_string()),
            ("horizon", self.horizon.to_string()),
            ("gamma", self.gamma.to_string()),
            ("lambda", self.lambda.to_string()),
            ("epochs", self.epochs.to_string()),
            ("minibatches", self.minibatches.to_string()),
            ("clip_epsilon", self.clip_epsilon.to_string()),
            ("entropy_coef", self.entropy_coef.to_string()),
            ("lr", self.lr.to_string()),
            ("grad_clip", self.grad_clip.to_string()),
            ("adaptive_lr", self.adaptive_lr.to_string()),
            ("kl_target", self.kl_target.to_string()),
            ("basis_hidden", list(&self.basis_hidden)),
            ("feature_dim", self.feature_dim.to_string()),
            ("dense_hidden", list(&self.dense_hidden)),
            ("log_std_init", self.log_std_init.to_string()),
            ("log_std_min", self.log_std_min.to_string()),
            ("log_std_max", self.log_std_max.to_string()),
            ("obs_norm", self.obs_norm.to_string()),
            ("reward_norm", self.reward_norm.to_string()),
            ("adv_norm", self.adv_norm.to_string()),
            ("obs_clip", self.obs_clip.to_string()),
            ("checkpoint_every", self.checkpoint_every.to_string()),
            ("rollout_dump_every", self.rollout_dump_every.to_string()),
            ("eval_episodes", self.eval_episodes.to_string()),
            ("velocity.dt", vel.dt.to_string()),
            ("velocity.episode_len", vel.episode_len.to_string()),
            ("velocity.resample_period", vel.resample_period.to_string()),
            ("velocity.k_v", vel.k_v.to_string()),
            ("velocity.d_v", vel.d_v.to_string()),
            ("velocity.k_w", vel.k_w.to_string()),
            ("velocity.d_w", vel.d_w.to_string()),
            ("velocity.domain_randomization", vel.domain_randomization.to_string()),
            ("velocity.dynamics_scale_min", vel.dynamics_scale[0].to_string()),
            ("velocity.dynamics_scale_max", vel.dynamics_scale[1].to_string()),
            ("velocity.push_prob", vel.push_prob.to_string()),
            ("velocity.push_max", vel.push_max.to_string()),
            ("velocity.v_max_phys", vel.v_max_phys.to_string()),
            ("velocity.w_max_phys", vel.w_max_phys.to_string()),
            ("velocity.reset_noise", vel.reset_noise.to_string()),
            ("reward.w_lin", vel.reward.w_lin.to_string()),
            ("reward.w_yaw", vel.reward.w_yaw.to_string()),
            ("reward.sigma_v", vel.reward.sigma_v.to_string()),
            ("reward.sigma_w", vel.reward.sigma_w.to_string()),
            ("reward.w_act", vel.reward.w_act.to_string()),
            ("reward.w_rate", vel.reward.w_rate.to_string()),
            ("curriculum.enabled", cur.enabled.to_string()),
            ("curriculum.v_init_min", cur.v_init[0].to_string()),
            ("curriculum.v_init_max", cur.v_init[1].to_string()),
            ("curriculum.w_init", cur.w_init.to_string()),
            ("curriculum.v_final", cur.v_final.to_string()),
            ("curriculum.w_final", cur.w_final.to_string()),
            ("curriculum.promotion_threshold", cur.promotion_threshold.to_string()),
            ("curriculum.expansion_step", cur.expansion_step.to_string()),
            ("pendulum.dt", pen.dt.to_string()),
            ("pendulum.gravity", pen.gravity.to_string()),
            ("pendulum.mass", pen.mass.to_string()),
            ("pendulum.length", pen.length.to_string()),
            ("pendulum.max_torque", pen.max_torque.to_string()),
            ("pendulum.max_speed", pen.max_speed.to_string()),
            ("pendulum.episode_len", pen.episode_len.to_string()),
        ]
    }

    /// Canonical text form; parsing it reproduces `self` exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Hex sha256 of the canonical text.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Whether the KL-adaptive schedule is active for this run.
    pub fn kl_schedule(&self) -> Option<f64> {
        (self.adaptive_lr && self.algorithm == Algorithm::DenseBaseline).then_some(self.kl_target)
    }

    /// Range and consistency violations, one message per field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, key: &str, what: &str| {
            if !ok {
                out.push(format!("{key}: {what}"));
            }
        };
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        need(self.iterations >= 1, "iterations", "must be at least 1");
        need(self.num_envs >= 1, "num_envs", "must be at least 1");
        need(self.horizon >= 1, "horizon", "must be at least 1");
        need(self.gamma > 0.0 && self.gamma <= 1.0, "gamma", "must lie in (0, 1]");
        need((0.0..=1.0).contains(&self.lambda), "lambda", "must lie in [0, 1]");
        need(self.epochs >= 1, "epochs", "must be at least 1");
        need(self.minibatches >= 1, "minibatches", "must be at least 1");
        need(
            self.minibatches <= self.num_envs * self.horizon,
            "minibatches",
            "must not exceed num_envs * horizon",
        );
        need(pos(self.clip_epsilon), "clip_epsilon", "must be positive");
        need(nonneg(self.entropy_coef), "entropy_coef", "must be non-negative");
        need(pos(self.lr), "lr", "must be positive");
        need(pos(self.grad_clip), "grad_clip", "must be positive");
        need(pos(self.kl_target), "kl_target", "must be positive");
        need(
            !self.basis_hidden.is_empty() && self.basis_hidden.iter().all(|&w| w >= 1),
            "basis_hidden",
            "needs at least one width, all at least 1",
        );
        need(self.feature_dim >= 1, "feature_dim", "must be at least 1");
        need(self.dense_hidden.iter().all(|&w| w >= 1), "dense_hidden", "widths must be at least 1");
        need(
            self.log_std_min.is_finite() && self.log_std_max.is_finite() && self.log_std_min < self.log_std_max,
            "log_std_min",
            "must be below log_std_max",
        );
        need(
            self.log_std_init >= self.log_std_min && self.log_std_init <= self.log_std_max,
            "log_std_init",
            "must lie within [log_std_min, log_std_max]",
        );
        need(pos(self.obs_clip), "obs_clip", "must be positive");
        need(self.eval_episodes >= 1, "eval_episodes", "must be at least 1");

        let v = &self.velocity;
        need(pos(v.dt), "velocity.dt", "must be positive");
        need(v.episode_len >= 1, "velocity.episode_len", "must be at least 1");
        need(v.resample_period >= 1, "velocity.resample_period", "must be at least 1");
        for (k, x) in [
            ("velocity.k_v", v.k_v),
            ("velocity.d_v", v.d_v),
            ("velocity.k_w", v.k_w),
            ("velocity.d_w", v.d_w),
            ("velocity.v_max_phys", v.v_max_phys),
            ("velocity.w_max_phys", v.w_max_phys),
            ("reward.sigma_v", v.reward.sigma_v),
            ("reward.sigma_w", v.reward.sigma_w),
        ] {
            need(pos(x), k, "must be positive");
        }
        need(
            pos(v.dynamics_scale[0]) && v.dynamics_scale[0] <= v.dynamics_scale[1],
            "velocity.dynamics_scale_min",
            "must be positive and not above velocity.dynamics_scale_max",
        );
        need((0.0..=1.0).contains(&v.push_prob), "velocity.push_prob", "must lie in [0, 1]");
        need(nonneg(v.push_max), "velocity.push_max", "must be non-negative");
        need(nonneg(v.reset_noise), "velocity.reset_noise", "must be non-negative");
        for (k, x) in [
            ("reward.w_lin", v.reward.w_lin),
            ("reward.w_yaw", v.reward.w_yaw),
            ("reward.w_act", v.reward.w_act),
            ("reward.w_rate", v.reward.w_rate),
        ] {
            need(x.is_finite(), k, "must be finite");
        }

        let c = &self.curriculum;
        need(
            nonneg(c.v_init[0]) && c.v_init[0] <= c.v_init[1],
            "curriculum.v_init_min",
            "must be non-negative and not above curriculum.v_init_max",
        );
        need(c.v_init[1] <= c.v_final, "curriculum.v_final", "must not be below curriculum.v_init_max");
        need(nonneg(c.w_init), "curriculum.w_init", "must be non-negative");
        need(c.w_init <= c.w_final, "curriculum.w_final", "must not be below curriculum.w_init");
        need(pos(c.expansion_step), "curriculum.expansion_step", "must be positive");
        need(c.promotion_threshold.is_finite(), "curriculum.promotion_threshold", "must be finite");

        let p = &self.pendulum;
        for (k, x) in [
            ("pendulum.dt", p.dt),
            ("pendulum.gravity", p.gravity),
            ("pendulum.mass", p.mass),
            ("pendulum.length", p.length),
            ("pendulum.max_torque", p.max_torque),
            ("pendulum.max_speed", p.max_speed),
        ] {
            need(pos(x), k, "must be positive");
        }
        need(p.episode_len >= 1, "pendulum.episode_len", "must be at least 1");
        out
    }
}
