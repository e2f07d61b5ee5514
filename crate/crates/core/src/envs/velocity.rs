use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    validate_action, wrap_angle, Command, CurriculumConfig, CurriculumState, EnvError, Environment,
    EpisodeSummary, Observation, StepOutcome, TrackingStats,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardWeights {
    pub w_lin: f64,
    pub w_yaw: f64,
    /// Linear tracking kernel width, m/s.
    pub sigma_v: f64,
    /// Yaw tracking kernel width, rad/s.
    pub sigma_w: f64,
    pub w_act: f64,
    pub w_rate: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            w_lin: 1.0,
            w_yaw: 0.5,
            sigma_v: 0.25,
            sigma_w: 0.25,
            w_act: 0.01,
            w_rate: 0.01,
        }
    }
}

/// Planar body-velocity tracking task.
///
/// `v <- v + dt (k_v a_1 - d_v v + push_v)`, `w <- w + dt (k_w a_2 - d_w w + push_w)`,
/// with actions clamped to `[-1, 1]` and velocities clamped to the physical
/// limits.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityTaskConfig {
    /// Control period, s.
    pub dt: f64,
    /// Steps per episode.
    pub episode_len: usize,
    /// Steps between command resamples.
    pub resample_period: usize,
    /// Nominal forward gain, m/s^2 per unit action.
    pub k_v: f64,
    /// Nominal forward damping, 1/s.
    pub d_v: f64,
    /// Nominal yaw gain, rad/s^2 per unit action.
    pub k_w: f64,
    /// Nominal yaw damping, 1/s.
    pub d_w: f64,
    pub domain_randomization: bool,
    /// Multiplicative range applied to each nominal gain and damping.
    pub dynamics_scale: [f64; 2],
    /// Per-step probability of a push.
    pub push_prob: f64,
    /// Largest velocity change of a push, m/s (rad/s for yaw).
    pub push_max: f64,
    /// Physical clamp on |v|, m/s.
    pub v_max_phys: f64,
    /// Physical clamp on |w|, rad/s.
    pub w_max_phys: f64,
    /// Half-width of the reset neighbourhood for v and w.
    pub reset_noise: f64,
    pub reward: RewardWeights,
}

impl Default for VelocityTaskConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            episode_len: 400,
            resample_period: 200,
            k_v: 2.0,
            d_v: 2.0,
            k_w: 2.0,
            d_w: 2.0,
            domain_randomization: true,
            dynamics_scale: [0.8, 1.2],
            push_prob: 0.005,
            push_max: 0.3,
            v_max_phys: 1.5,
            w_max_phys: 1.5,
            reset_noise: 0.05,
            reward: RewardWeights::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodyState {
    pub v: f64,
    pub w: f64,
    pub heading: f64,
    pub prev_action: [f64; 2],
    pub k_v: f64,
    pub d_v: f64,
    pub k_w: f64,
    pub d_w: f64,
    pub step_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardBreakdown {
    pub lin_track: f64,
    pub yaw_track: f64,
    pub action_penalty: f64,
    pub rate_penalty: f64,
    pub total: f64,
}

/// Tracking reward with action magnitude and action-rate penalties.
pub fn reward_of(
    weights: &RewardWeights,
    v: f64,
    w: f64,
    command: Command,
    action: [f64; 2],
    prev_action: [f64; 2],
) -> RewardBreakdown {
    let ev = v - command.v_cmd;
    let ew = w - command.w_cmd;
    let lin_track = weights.w_lin * (-(ev * ev) / (weights.sigma_v * weights.sigma_v)).exp();
    let yaw_track = weights.w_yaw * (-(ew * ew) / (weights.sigma_w * weights.sigma_w)).exp();
    let a2 = action[0] * action[0] + action[1] * action[1];
    let (d0, d1) = (action[0] - prev_action[0], action[1] - prev_action[1]);
    let action_penalty = -weights.w_act * a2;
    let rate_penalty = -weights.w_rate * (d0 * d0 + d1 * d1);
    RewardBreakdown {
        lin_track,
        yaw_track,
        action_penalty,
        rate_penalty,
        total: lin_track + yaw_track + action_penalty + rate_penalty,
    }
}

#[derive(Clone, Debug, Default)]
struct EpisodeAccum {
    total_reward: f64,
    lin: f64,
    yaw: f64,
    vel_err: f64,
    yaw_err: f64,
    kernel: f64,
}

#[derive(Clone, Debug)]
pub struct VelocityEnv {
    cfg: VelocityTaskConfig,
    rng: ChaCha8Rng,
    state: BodyState,
    command: Command,
    curriculum: CurriculumState,
    accum: EpisodeAccum,
}

impl VelocityEnv {
    pub fn new(cfg: VelocityTaskConfig, curriculum: CurriculumState, seed: u64) -> Self {
        let mut env = Self {
            state: BodyState {
                v: 0.0,
                w: 0.0,
                heading: 0.0,
                prev_action: [0.0; 2],
                k_v: cfg.k_v,
                d_v: cfg.d_v,
                k_w: cfg.k_w,
                d_w: cfg.d_w,
                step_count: 0,
            },
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            command: Command::default(),
            curriculum,
            accum: EpisodeAccum::default(),
        };
        env.reset();
        env
    }

    pub fn with_default_curriculum(cfg: VelocityTaskConfig, seed: u64) -> Self {
        Self::new(cfg, CurriculumState::new(CurriculumConfig::default()), seed)
    }

    pub fn config(&self) -> &VelocityTaskConfig {
        &self.cfg
    }

    pub fn state(&self) -> &BodyState {
        &self.state
    }

    pub fn command(&self) -> Command {
        self.command
    }

    /// Overrides the body state (tests and scripted probes).
    pub fn set_state(&mut self, state: BodyState) {
        self.state = state;
    }

    pub fn set_command(&mut self, command: Command) {
        self.command = command;
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    fn sample_command(&mut self) -> Command {
        let [vlo, vhi] = self.curriculum.v_range;
        let [wlo, whi] = self.curriculum.w_range;
        Command {
            v_cmd: self.uniform(vlo, vhi),
            w_cmd: self.uniform(wlo, whi),
        }
    }
}

impl Environment for VelocityEnv {
    fn obs_dim(&self) -> usize {
        8
    }

    fn privileged_dim(&self) -> usize {
        12
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn reset(&mut self) -> Observation {
        let n = self.cfg.reset_noise;
        let v = self.uniform(-n, n);
        let w = self.uniform(-n, n);
        let heading = self.uniform(-PI, PI);
        let [lo, hi] = if self.cfg.domain_randomization {
            self.cfg.dynamics_scale
        } else {
            [1.0, 1.0]
        };
        let k_v = self.cfg.k_v * self.uniform(lo, hi);
        let d_v = self.cfg.d_v * self.uniform(lo, hi);
        let k_w = self.cfg.k_w * self.uniform(lo, hi);
        let d_w = self.cfg.d_w * self.uniform(lo, hi);
        self.state = BodyState {
            v,
            w,
            heading,
            prev_action: [0.0; 2],
            k_v,
            d_v,
            k_w,
            d_w,
            step_count: 0,
        };
        self.command = self.sample_command();
        self.accum = EpisodeAccum::default();
        self.observe()
    }

    fn observe(&self) -> Observation {
        let s = &self.state;
        let actor = vec![
            s.v,
            s.w,
            s.heading.sin(),
            s.heading.cos(),
            self.command.v_cmd,
            self.command.w_cmd,
            s.prev_action[0],
            s.prev_action[1],
        ];
        let mut privileged = actor.clone();
        privileged.extend_from_slice(&[s.k_v, s.d_v, s.k_w, s.d_w]);
        Observation { actor, privileged }
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, EnvError> {
        validate_action(action, 2)?;
        let a = [action[0].clamp(-1.0, 1.0), action[1].clamp(-1.0, 1.0)];
        let dt = self.cfg.dt;

        let (mut push_v, mut push_w) = (0.0, 0.0);
        let roll = self.rng.random::<f64>();
        if roll < self.cfg.push_prob {
            let m = self.cfg.push_max;
            push_v = self.uniform(-m, m) / dt;
            push_w = self.uniform(-m, m) / dt;
        }

        let s = &mut self.state;
        s.v = (s.v + dt * (s.k_v * a[0] - s.d_v * s.v + push_v))
            .clamp(-self.cfg.v_max_phys, self.cfg.v_max_phys);
        s.w = (s.w + dt * (s.k_w * a[1] - s.d_w * s.w + push_w))
            .clamp(-self.cfg.w_max_phys, self.cfg.w_max_phys);
        s.heading = wrap_angle(s.heading + dt * s.w);
        s.step_count += 1;

        let r = reward_of(&self.cfg.reward, s.v, s.w, self.command, a, s.prev_action);
        s.prev_action = a;

        let acc = &mut self.accum;
        acc.total_reward += r.total;
        acc.lin += r.lin_track;
        acc.yaw += r.yaw_track;
        acc.vel_err += (s.v - self.command.v_cmd).abs();
        acc.yaw_err += (s.w - self.command.w_cmd).abs();
        acc.kernel += r.lin_track / self.cfg.reward.w_lin;

        let steps = s.step_count;
        let done = steps >= self.cfg.episode_len;
        let episode = done.then(|| {
            let n = steps as f64;
            EpisodeSummary {
                total_reward: acc.total_reward,
                length: steps,
                tracking: Some(TrackingStats {
                    lin_track_reward: acc.lin / n,
                    yaw_track_reward: acc.yaw / n,
                    vel_error: acc.vel_err / n,
                    yaw_error: acc.yaw_err / n,
                    score: acc.kernel / n,
                }),
            }
        });
        if !done && self.cfg.resample_period > 0 && steps % self.cfg.resample_period == 0 {
            self.command = self.sample_command();
        }
        Ok(StepOutcome {
            obs: self.observe(),
            reward: r.total,
            done,
            truncated: done,
            episode,
        })
    }

    fn apply_curriculum(&mut self, state: &CurriculumState) {
        self.curriculum = state.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_cfg() -> VelocityTaskConfig {
        VelocityTaskConfig {
            push_prob: 0.0,
            domain_randomization: false,
            ..Default::default()
        }
    }

    #[test]
    fn reset_commands_within_initial_ranges() {
        let mut env = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 3);
        for _ in 0..500 {
            env.reset();
            let c = env.command();
            assert!((0.0..=0.2).contains(&c.v_cmd));
            assert!((-0.2..=0.2).contains(&c.w_cmd));
        }
    }

    #[test]
    fn reset_is_seeded() {
        let mut a = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 9);
        let mut b = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 9);
        assert_eq!(a.reset(), b.reset());
        assert_eq!(a.state(), b.state());
    }

    #[test]
    fn commands_uniform_over_ranges() {
        // Histogram check on 10^4 resets: each of 10 bins within 5 sigma of n/10.
        let mut env = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 21);
        let n = 10_000;
        let mut vb = [0usize; 10];
        let mut wb = [0usize; 10];
        for _ in 0..n {
            env.reset();
            let c = env.command();
            vb[((c.v_cmd / 0.2 * 10.0) as usize).min(9)] += 1;
            wb[(((c.w_cmd + 0.2) / 0.4 * 10.0) as usize).min(9)] += 1;
        }
        let expect = n as f64 / 10.0;
        let sd = (n as f64 * 0.1 * 0.9).sqrt();
        for b in vb.iter().chain(&wb) {
            assert!((*b as f64 - expect).abs() < 5.0 * sd, "{vb:?} {wb:?}");
        }
    }

    #[test]
    fn zero_action_keeps_rest() {
        let mut env = VelocityEnv::with_default_curriculum(quiet_cfg(), 1);
        let mut s = env.state().clone();
        s.v = 0.0;
        s.w = 0.0;
        env.set_state(s);
        for _ in 0..50 {
            env.step(&[0.0, 0.0]).unwrap();
            assert_eq!(env.state().v, 0.0);
            assert_eq!(env.state().w, 0.0);
        }
    }

    #[test]
    fn constant_action_converges_geometrically() {
        let mut env = VelocityEnv::with_default_curriculum(quiet_cfg(), 2);
        let mut s = env.state().clone();
        s.v = 0.0;
        env.set_state(s);
        let (k, d, dt, a) = (2.0, 2.0, 0.05, 0.4);
        let target = k * a / d;
        let mut err = target;
        for _ in 0..100 {
            env.step(&[a, 0.0]).unwrap();
            err *= 1.0 - dt * d;
            assert!(((target - env.state().v) - err).abs() < 1e-12);
        }
        assert!((env.state().v - target).abs() < 1e-4);
    }

    #[test]
    fn truncates_at_episode_len() {
        let cfg = VelocityTaskConfig {
            episode_len: 5,
            ..quiet_cfg()
        };
        let mut env = VelocityEnv::with_default_curriculum(cfg, 4);
        for i in 1..=5 {
            let out = env.step(&[0.1, 0.1]).unwrap();
            assert_eq!(out.done, i == 5);
            assert_eq!(out.truncated, i == 5);
            assert_eq!(out.episode.is_some(), i == 5);
        }
    }

    #[test]
    fn reward_kernels() {
        let w = RewardWeights::default();
        let cmd = Command { v_cmd: 0.5, w_cmd: -0.3 };
        let perfect = reward_of(&w, 0.5, -0.3, cmd, [0.0; 2], [0.0; 2]);
        assert!((perfect.total - (w.w_lin + w.w_yaw)).abs() < 1e-15);
        let off = reward_of(&w, 0.5 + w.sigma_v, -0.3, cmd, [0.0; 2], [0.0; 2]);
        assert!((off.total - (w.w_lin * (-1.0f64).exp() + w.w_yaw)).abs() < 1e-15);
        let mixed = reward_of(&w, 0.1, 0.2, cmd, [0.3, -0.8], [0.5, 0.1]);
        let recomposed = mixed.lin_track + mixed.yaw_track + mixed.action_penalty + mixed.rate_penalty;
        assert!((recomposed - mixed.total).abs() < 1e-12);
    }

    #[test]
    fn physical_clamps_hold() {
        let cfg = VelocityTaskConfig {
            push_prob: 0.3,
            push_max: 2.0,
            ..Default::default()
        };
        let mut env = VelocityEnv::with_default_curriculum(cfg, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5000 {
            let a = [rng.random::<f64>() * 20.0 - 10.0, rng.random::<f64>() * 20.0 - 10.0];
            let out = env.step(&a).unwrap();
            assert!(env.state().v.abs() <= 1.5 && env.state().w.abs() <= 1.5);
            if out.done {
                env.reset();
            }
        }
    }

    #[test]
    fn privileged_extends_actor() {
        let env = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 6);
        let o = env.observe();
        assert_eq!(o.actor.len(), 8);
        assert_eq!(o.privileged.len(), 12);
        assert_eq!(&o.privileged[..8], &o.actor[..]);
    }

    #[test]
    fn non_finite_action_rejected() {
        let mut env = VelocityEnv::with_default_curriculum(VelocityTaskConfig::default(), 7);
        assert!(matches!(
            env.step(&[f64::NAN, 0.0]),
            Err(EnvError::NonFiniteAction { index: 0, .. })
        ));
    }

    #[test]
    fn resamples_commands_on_period() {
        let cfg = VelocityTaskConfig {
            resample_period: 3,
            ..quiet_cfg()
        };
        let mut env = VelocityEnv::with_default_curriculum(cfg, 8);
        let c0 = env.command();
        env.step(&[0.0, 0.0]).unwrap();
        env.step(&[0.0, 0.0]).unwrap();
        assert_eq!(env.command(), c0);
        env.step(&[0.0, 0.0]).unwrap();
        assert_ne!(env.command(), c0);
    }
}
