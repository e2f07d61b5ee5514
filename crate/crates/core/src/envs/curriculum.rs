/// Commanded forward velocity (m/s) and yaw rate (rad/s).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Command {
    pub v_cmd: f64,
    pub w_cmd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurriculumConfig {
    pub enabled: bool,
    /// Initial `[lo, hi]` forward-velocity command range, m/s.
    pub v_init: [f64; 2],
    /// Initial symmetric yaw-rate bound, rad/s.
    pub w_init: f64,
    /// Final forward-velocity upper bound, m/s.
    pub v_final: f64,
    /// Final symmetric yaw-rate bound, rad/s.
    pub w_final: f64,
    /// Episode-mean linear tracking kernel needed for a promotion.
    pub promotion_threshold: f64,
    pub expansion_step: f64,
}

impl Default for CurriculumConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            v_init: [0.0, 0.2],
            w_init: 0.2,
            v_final: 1.0,
            w_final: 1.0,
            promotion_threshold: 0.8,
            expansion_step: 0.1,
        }
    }
}

/// Promotion-based command range schedule.
///
/// Bounds are recomputed from the number of promotions rather than
/// accumulated, so they land exactly on the final ranges.
#[derive(Clone, Debug, PartialEq)]
pub struct CurriculumState {
    pub v_range: [f64; 2],
    pub w_range: [f64; 2],
    pub promotion_threshold: f64,
    pub expansion_step: f64,
    pub at_max: bool,
    promotions: u32,
    config: CurriculumConfig,
}

impl CurriculumState {
    pub fn new(config: CurriculumConfig) -> Self {
        let mut s = Self {
            v_range: config.v_init,
            w_range: [-config.w_init, config.w_init],
            promotion_threshold: config.promotion_threshold,
            expansion_step: config.expansion_step,
            at_max: false,
            promotions: 0,
            config,
        };
        s.recompute();
        s
    }

    /// A state pinned at the final ranges (used for evaluation).
    pub fn at_final(config: CurriculumConfig) -> Self {
        let mut s = Self::new(config);
        s.v_range = [s.config.v_init[0], s.config.v_final];
        s.w_range = [-s.config.w_final, s.config.w_final];
        s.at_max = true;
        s
    }

    pub fn promotions(&self) -> u32 {
        self.promotions
    }

    pub fn config(&self) -> &CurriculumConfig {
        &self.config
    }

    fn recompute(&mut self) {
        let c = &self.config;
        let grow = self.promotions as f64 * c.expansion_step;
        let snap = |x: f64, limit: f64| if x >= limit - 1e-12 { limit } else { x };
        let v_hi = snap(c.v_init[1] + grow, c.v_final);
        let w_hi = snap(c.w_init + grow, c.w_final);
        self.v_range = [c.v_init[0], v_hi];
        self.w_range = [-w_hi, w_hi];
        self.at_max = v_hi >= c.v_final && w_hi >= c.w_final;
    }

    /// Expands the ranges by one step when `score` reaches the threshold.
    pub fn update(&self, score: f64) -> CurriculumState {
        let mut next = self.clone();
        if self.config.enabled && score.is_finite() && score >= self.promotion_threshold && !self.at_max {
            next.promotions += 1;
            next.recompute();
        }
        next
    }

    pub fn contains(&self, cmd: Command) -> bool {
        cmd.v_cmd >= self.v_range[0]
            && cmd.v_cmd <= self.v_range[1]
            && cmd.w_cmd >= self.w_range[0]
            && cmd.w_cmd <= self.w_range[1]
    }
}
