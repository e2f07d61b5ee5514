use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{validate_action, wrap_angle, EnvError, Environment, EpisodeSummary, Observation, StepOutcome};

/// Torque-limited pendulum swing-up. The angle is measured from upright.
#[derive(Clone, Debug, PartialEq)]
pub struct PendulumConfig {
    /// Integration step, s.
    pub dt: f64,
    /// Gravity, m/s^2.
    pub gravity: f64,
    /// Mass, kg.
    pub mass: f64,
    /// Length, m.
    pub length: f64,
    /// Torque applied for a unit action, N m.
    pub max_torque: f64,
    /// Angular speed clamp, rad/s.
    pub max_speed: f64,
    pub episode_len: usize,
}

impl Default for PendulumConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            gravity: 10.0,
            mass: 1.0,
            length: 1.0,
            max_torque: 2.0,
            max_speed: 8.0,
            episode_len: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PendulumEnv {
    cfg: PendulumConfig,
    rng: ChaCha8Rng,
    theta: f64,
    omega: f64,
    step_count: usize,
    total_reward: f64,
}

impl PendulumEnv {
    pub fn new(cfg: PendulumConfig, seed: u64) -> Self {
        let mut env = Self {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            theta: 0.0,
            omega: 0.0,
            step_count: 0,
            total_reward: 0.0,
        };
        env.reset();
        env
    }

    pub fn config(&self) -> &PendulumConfig {
        &self.cfg
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn angular_velocity(&self) -> f64 {
        self.omega
    }

    pub fn set_state(&mut self, theta: f64, omega: f64) {
        self.theta = theta;
        self.omega = omega;
    }

    /// `0.5 w^2 + (3 g / 2 l) cos(theta)`, conserved by the unactuated
    /// continuous-time dynamics.
    pub fn energy(&self) -> f64 {
        0.5 * self.omega * self.omega + 1.5 * self.cfg.gravity / self.cfg.length * self.theta.cos()
    }

    /// `-(theta^2 + 0.1 w^2 + 0.001 torque^2)` with `theta` wrapped.
    pub fn reward(theta: f64, omega: f64, torque: f64) -> f64 {
        let th = wrap_angle(theta);
        -(th * th + 0.1 * omega * omega + 0.001 * torque * torque)
    }
}

impl Environment for PendulumEnv {
    fn obs_dim(&self) -> usize {
        3
    }

    fn privileged_dim(&self) -> usize {
        3
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn reset(&mut self) -> Observation {
        self.theta = -PI + 2.0 * PI * self.rng.random::<f64>();
        self.omega = -1.0 + 2.0 * self.rng.random::<f64>();
        self.step_count = 0;
        self.total_reward = 0.0;
        self.observe()
    }

    fn observe(&self) -> Observation {
        let actor = vec![self.theta.cos(), self.theta.sin(), self.omega];
        Observation {
            privileged: actor.clone(),
            actor,
        }
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome, EnvError> {
        validate_action(action, 1)?;
        let c = &self.cfg;
        let torque = action[0].clamp(-1.0, 1.0) * c.max_torque;
        let reward = Self::reward(self.theta, self.omega, torque);

        let accel = 1.5 * c.gravity / c.length * self.theta.sin()
            + 3.0 / (c.mass * c.length * c.length) * torque;
        self.omega = (self.omega + accel * c.dt).clamp(-c.max_speed, c.max_speed);
        self.theta += self.omega * c.dt;

        self.step_count += 1;
        self.total_reward += reward;
        let done = self.step_count >= c.episode_len;
        Ok(StepOutcome {
            obs: self.observe(),
            reward,
            done,
            truncated: done,
            episode: done.then_some(EpisodeSummary {
                total_reward: self.total_reward,
                length: self.step_count,
                tracking: None,
            }),
        })
    }
}
