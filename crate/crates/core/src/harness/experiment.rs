//! Training runs, evaluation, multi-seed comparison and benchmarking.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::checkpoint::{Checkpoint, CheckpointHeader, FORMAT_VERSION};
use super::config::{Algorithm, EnvKind, Precision, TrainConfig};
use super::metrics::{episode_means, read_metrics, EpisodeWindow, IterationRecord, MetricsWriter};
use super::seeds::{derive_seed, Stream};
use super::stats::{mean, relative_std, t_interval, Interval};
use super::timing::Profiler;
use crate::actor_critic::{BatchInput, GaussianPolicy, LogStdBounds, Representation, ValueHead};
use crate::envs::{CurriculumState, Environment, EpisodeSummary, PendulumEnv, VelocityEnv};
use crate::error::{check_dim, Error, Result};
use crate::function_approx::{DenseNet, ParamCount, Parameterized, RandomBasis, FROZEN_DISTRIBUTION};
use crate::learner::{train_iteration, Agent, LearnerConfig};
use crate::normalize::RunningMeanStd;
use crate::rollout::{CollectorConfig, RolloutBuffer, RolloutCollector};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnvDims {
    pub obs: usize,
    pub privileged: usize,
    pub action: usize,
}

pub fn make_env(cfg: &TrainConfig, seed: u64, curriculum: &CurriculumState) -> Box<dyn Environment> {
    match cfg.env {
        EnvKind::VelocityTrack => Box::new(VelocityEnv::new(cfg.velocity.clone(), curriculum.clone(), seed)),
        EnvKind::Pendulum => Box::new(PendulumEnv::new(cfg.pendulum.clone(), seed)),
    }
}

pub fn env_dims(cfg: &TrainConfig) -> EnvDims {
    let e = make_env(cfg, 0, &CurriculumState::new(cfg.curriculum.clone()));
    EnvDims {
        obs: e.obs_dim(),
        privileged: e.privileged_dim(),
        action: e.action_dim(),
    }
}

/// Command ranges used for evaluation: the final ones when the curriculum
/// is enabled, the fixed initial ones otherwise.
pub fn eval_curriculum(cfg: &TrainConfig) -> CurriculumState {
    if cfg.curriculum.enabled {
        CurriculumState::at_final(cfg.curriculum.clone())
    } else {
        CurriculumState::new(cfg.curriculum.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSeeds {
    pub actor_basis: u64,
    pub critic_basis: u64,
    pub actor_init: u64,
    pub critic_init: u64,
}

impl ModelSeeds {
    pub fn derive(master: u64) -> Self {
        Self {
            actor_basis: derive_seed(master, Stream::ActorBasis, 0),
            critic_basis: derive_seed(master, Stream::CriticBasis, 0),
            actor_init: derive_seed(master, Stream::ActorInit, 0),
            critic_init: derive_seed(master, Stream::CriticInit, 0),
        }
    }
}

pub fn build_agent<T: Real>(cfg: &TrainConfig, dims: EnvDims, seeds: ModelSeeds) -> Result<Agent<T>> {
    let bounds = LogStdBounds {
        min: cfg.log_std_min,
        max: cfg.log_std_max,
    };
    let (policy, critic) = match cfg.algorithm {
        Algorithm::Randpol => {
            let a = Arc::new(RandomBasis::build(seeds.actor_basis, dims.obs, &cfg.basis_hidden, cfg.feature_dim)?);
            let c = Arc::new(RandomBasis::build(
                seeds.critic_basis,
                dims.privileged,
                &cfg.basis_hidden,
                cfg.feature_dim,
            )?);
            (
                GaussianPolicy::randomized(a, dims.action, cfg.log_std_init),
                ValueHead::randomized(c),
            )
        }
        Algorithm::DenseBaseline => {
            let stack = |input: usize, output: usize| {
                let mut d = vec![input];
                d.extend_from_slice(&cfg.dense_hidden);
                d.push(output);
                d
            };
            let mut ra = ChaCha8Rng::seed_from_u64(seeds.actor_init);
            let mut rc = ChaCha8Rng::seed_from_u64(seeds.critic_init);
            (
                GaussianPolicy::dense(DenseNet::new(&stack(dims.obs, dims.action), &mut ra)?, cfg.log_std_init),
                ValueHead::dense(DenseNet::new(&stack(dims.privileged, 1), &mut rc)?)?,
            )
        }
    };
    Ok(Agent::new(policy.with_log_std_bounds(bounds), critic, cfg.lr))
}

/// Parameter accounting of an actor-critic pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelCounts {
    pub actor_trainable: usize,
    pub critic_trainable: usize,
    pub trainable: usize,
    pub frozen: usize,
    pub total: usize,
}

pub fn counts_of<T: Real>(agent: &Agent<T>) -> ModelCounts {
    let (pa, pc) = (&agent.policy, &agent.critic);
    ModelCounts {
        actor_trainable: pa.count_trainable(),
        critic_trainable: pc.count_trainable(),
        trainable: pa.count_trainable() + pc.count_trainable(),
        frozen: pa.count_frozen() + pc.count_frozen(),
        total: pa.count_total() + pc.count_total(),
    }
}

/// Counts for the model `cfg` describes on the given dimensions.
pub fn model_counts(cfg: &TrainConfig, dims: EnvDims) -> Result<ModelCounts> {
    Ok(counts_of(&build_agent::<f64>(cfg, dims, ModelSeeds::derive(cfg.master_seed))?))
}

fn head_dims<T: Real>(repr: &Representation<T>) -> Vec<usize> {
    match repr {
        Representation::Randomized { basis, readout } => {
            let mut d = vec![basis.input_dim()];
            d.extend_from_slice(basis.hidden_widths());
            d.push(basis.feature_dim());
            d.push(readout.output_dim());
            d
        }
        Representation::Dense(net) => net.dims().to_vec(),
    }
}

fn stats_to_vec<T: Real>(s: &RunningMeanStd<T>) -> Vec<f64> {
    let mut v = vec![s.count().as_f64()];
    v.extend(s.mean().iter().map(|x| x.as_f64()));
    v.extend(s.m2().iter().map(|x| x.as_f64()));
    v
}

fn stats_from_vec<T: Real>(v: &[f64], dim: usize) -> Result<RunningMeanStd<T>> {
    if v.len() != 1 + 2 * dim {
        return Err(Error::Checkpoint(format!(
            "normalizer section has {} values, expected {}",
            v.len(),
            1 + 2 * dim
        )));
    }
    let lit = |s: &[f64]| s.iter().map(|&x| T::lit(x)).collect::<Array1<T>>();
    RunningMeanStd::from_parts(T::lit(v[0]), lit(&v[1..1 + dim]), lit(&v[1 + dim..]))
}

/// Table-I style evaluation summary. Tracking fields are `NaN` for tasks
/// without commands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub episodes: usize,
    pub mean_reward: f64,
    pub lin_track_reward: f64,
    pub yaw_track_reward: f64,
    /// m/s
    pub vel_error: f64,
    /// rad/s
    pub yaw_error: f64,
}

impl EvalReport {
    pub fn from_episodes(eps: &[EpisodeSummary]) -> Self {
        let m = episode_means(eps);
        Self {
            episodes: eps.len(),
            mean_reward: m.reward,
            lin_track_reward: m.lin_track_reward,
            yaw_track_reward: m.yaw_track_reward,
            vel_error: m.vel_error,
            yaw_error: m.yaw_error,
        }
    }
}

/// Runs `episodes` full episodes with the deterministic policy mean and
/// frozen observation statistics. Environment `i` is seeded from
/// `derive_seed(seed, Eval, i)`, batched `num_envs` at a time.
pub fn evaluate<T: Real>(
    cfg: &TrainConfig,
    policy: &GaussianPolicy<T>,
    obs_stats: &RunningMeanStd<T>,
    episodes: usize,
    seed: u64,
) -> Result<EvalReport> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("evaluation needs at least one episode".into()));
    }
    let curriculum = eval_curriculum(cfg);
    let clip = T::lit(cfg.obs_clip);
    let mut done_eps = Vec::with_capacity(episodes);
    let mut next = 0;
    while next < episodes {
        let k = cfg.num_envs.min(episodes - next);
        let mut envs: Vec<Box<dyn Environment>> = (next..next + k)
            .map(|i| make_env(cfg, derive_seed(seed, Stream::Eval, i as u64), &curriculum))
            .collect();
        let dim = envs[0].obs_dim();
        check_dim("policy input", dim, policy.obs_dim())?;
        let mut obs: Vec<Vec<f64>> = envs.iter_mut().map(|e| e.reset().actor).collect();
        let mut active = vec![true; k];
        while active.iter().any(|&a| a) {
            let x = Array2::from_shape_fn((k, dim), |(i, j)| T::lit(obs[i][j]));
            let x = if cfg.obs_norm { obs_stats.normalize_batch(x.view(), clip)? } else { x };
            let mu = policy.mean_batch(BatchInput::Observations(x.view()))?;
            for e in 0..k {
                if !active[e] {
                    continue;
                }
                let a: Vec<f64> = mu.row(e).iter().map(|v| v.as_f64()).collect();
                let out = envs[e].step(&a).map_err(|source| Error::EnvStep { env: next + e, source })?;
                if out.done {
                    active[e] = false;
                    done_eps.push(
                        out.episode
                            .ok_or_else(|| Error::InvalidArgument("episode ended without a summary".into()))?,
                    );
                } else {
                    obs[e] = out.obs.actor;
                }
            }
        }
        next += k;
    }
    Ok(EvalReport::from_episodes(&done_eps))
}

/// One training run: agent, environments, curriculum and all random
/// streams, derived from the configuration's master seed.
pub struct Run<T> {
    cfg: TrainConfig,
    seeds: ModelSeeds,
    agent: Agent<T>,
    collector: RolloutCollector<T>,
    curriculum: CurriculumState,
    rng: ChaCha8Rng,
    window: EpisodeWindow,
    iteration: usize,
}

impl<T: Real> Run<T> {
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        let seeds = ModelSeeds::derive(cfg.master_seed);
        Self::with_seeds(cfg, seeds)
    }

    fn with_seeds(cfg: TrainConfig, seeds: ModelSeeds) -> Result<Self> {
        let problems = cfg.problems();
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        let dims = env_dims(&cfg);
        let agent = build_agent(&cfg, dims, seeds)?;
        let curriculum = CurriculumState::new(cfg.curriculum.clone());
        let m = cfg.master_seed;
        let envs = (0..cfg.num_envs)
            .map(|i| make_env(&cfg, derive_seed(m, Stream::EnvDynamics, i as u64), &curriculum))
            .collect();
        let action_seeds: Vec<u64> = (0..cfg.num_envs)
            .map(|i| derive_seed(m, Stream::ActionSampling, i as u64))
            .collect();
        let collector = RolloutCollector::new(
            envs,
            &action_seeds,
            CollectorConfig {
                obs_norm: cfg.obs_norm,
                reward_norm: cfg.reward_norm,
                obs_clip: cfg.obs_clip,
                gamma: cfg.gamma,
            },
        )?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(derive_seed(m, Stream::Minibatch, 0)),
            cfg,
            seeds,
            agent,
            collector,
            curriculum,
            window: EpisodeWindow::default(),
            iteration: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn seeds(&self) -> ModelSeeds {
        self.seeds
    }

    pub fn agent(&self) -> &Agent<T> {
        &self.agent
    }

    pub fn collector(&self) -> &RolloutCollector<T> {
        &self.collector
    }

    pub fn curriculum(&self) -> &CurriculumState {
        &self.curriculum
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn counts(&self) -> ModelCounts {
        counts_of(&self.agent)
    }

    pub fn learner_config(&self) -> LearnerConfig {
        let c = &self.cfg;
        LearnerConfig {
            horizon: c.horizon,
            gamma: c.gamma,
            lambda: c.lambda,
            epochs: c.epochs,
            minibatches: c.minibatches,
            clip_epsilon: c.clip_epsilon,
            entropy_coef: c.entropy_coef,
            grad_clip: c.grad_clip,
            kl_target: c.kl_schedule(),
            advantage_norm: c.adv_norm,
        }
    }

    /// Checksums of the actor and critic bases, if randomized.
    pub fn frozen_checksums(&self) -> (Option<u64>, Option<u64>) {
        (
            self.agent.policy.representation().basis().map(|b| b.checksum()),
            self.agent.critic.representation().basis().map(|b| b.checksum()),
        )
    }

    /// One training iteration. The curriculum is promoted from the mean
    /// score of the episodes that finished during it.
    pub fn step(&mut self) -> Result<(IterationRecord, RolloutBuffer<T>)> {
        let lcfg = self.learner_config();
        let (report, buf) = train_iteration(&mut self.agent, &mut self.collector, &lcfg, &mut self.rng)?;
        let eps = self.collector.drain_episodes();
        if self.cfg.env == EnvKind::VelocityTrack && !eps.is_empty() {
            self.curriculum = self.curriculum.update(episode_means(&eps).score);
            self.collector.apply_curriculum(&self.curriculum);
        }
        let finished = eps.len();
        for e in eps {
            self.window.push(e);
        }
        self.iteration += 1;
        let m = self.window.means();
        let velocity = self.cfg.env == EnvKind::VelocityTrack;
        let record = IterationRecord {
            iteration: self.iteration,
            mean_episode_reward: m.reward,
            episodes: finished,
            lin_track_reward: m.lin_track_reward,
            yaw_track_reward: m.yaw_track_reward,
            vel_error: m.vel_error,
            yaw_error: m.yaw_error,
            value_loss: report.value_loss,
            surrogate_loss: report.surrogate_loss,
            entropy: report.entropy,
            kl: report.kl,
            clip_fraction: report.clip_fraction,
            actor_grad_norm: report.actor_grad_norm,
            critic_grad_norm: report.critic_grad_norm,
            lr: report.lr,
            v_cmd_max: if velocity { self.curriculum.v_range[1] } else { f64::NAN },
            w_cmd_max: if velocity { self.curriculum.w_range[1] } else { f64::NAN },
            diverged: report.diverged,
            collect_time_s: report.collect_time_s,
            learn_time_s: report.learn_time_s,
        };
        Ok((record, buf))
    }

    pub fn evaluate(&self, episodes: usize, seed: u64) -> Result<EvalReport> {
        evaluate(&self.cfg, &self.agent.policy, self.collector.obs_stats(), episodes, seed)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let (ca, cc) = self.frozen_checksums();
        let (pa, pc) = (&self.agent.policy, &self.agent.critic);
        let randomized = self.cfg.algorithm == Algorithm::Randpol;
        let f = |v: Vec<T>| v.into_iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        Checkpoint {
            header: CheckpointHeader {
                format_version: FORMAT_VERSION,
                algorithm: self.cfg.algorithm.name().into(),
                env: self.cfg.env.name().into(),
                config_hash: self.cfg.hash(),
                config_text: self.cfg.to_text(),
                iteration: self.iteration,
                lr: self.agent.lr,
                actor_basis_seed: randomized.then_some(self.seeds.actor_basis),
                critic_basis_seed: randomized.then_some(self.seeds.critic_basis),
                actor_dims: head_dims(pa.representation()),
                critic_dims: head_dims(pc.representation()),
                frozen_distribution: FROZEN_DISTRIBUTION.into(),
                actor_basis_checksum: ca,
                critic_basis_checksum: cc,
                actor_trainable: pa.count_trainable(),
                critic_trainable: pc.count_trainable(),
            },
            actor: f(pa.params()),
            critic: f(pc.params()),
            obs_stats: stats_to_vec(self.collector.obs_stats()),
            privileged_stats: stats_to_vec(self.collector.privileged_stats()),
            reward_stats: stats_to_vec(self.collector.reward_normalizer().stats()),
        }
    }

    /// Rebuilds a run from a checkpoint. With `expected`, the checkpoint's
    /// configuration hash must match it.
    pub fn from_checkpoint(ck: &Checkpoint, expected: Option<&TrainConfig>) -> Result<Self> {
        let h = &ck.header;
        let cfg = TrainConfig::parse(&h.config_text, &[])?;
        if cfg.hash() != h.config_hash {
            return Err(Error::Checkpoint("embedded configuration does not match its hash".into()));
        }
        if let Some(exp) = expected {
            if exp.hash() != h.config_hash {
                return Err(Error::Checkpoint(format!(
                    "configuration hash mismatch: checkpoint was written by a {} run with a different configuration",
                    h.algorithm
                )));
            }
        }
        if h.frozen_distribution != FROZEN_DISTRIBUTION {
            return Err(Error::Checkpoint(format!(
                "frozen distribution {:?} not supported",
                h.frozen_distribution
            )));
        }
        let mut seeds = ModelSeeds::derive(cfg.master_seed);
        if let Some(s) = h.actor_basis_seed {
            seeds.actor_basis = s;
        }
        if let Some(s) = h.critic_basis_seed {
            seeds.critic_basis = s;
        }
        let mut run = Self::with_seeds(cfg, seeds)?;
        let (ca, cc) = run.frozen_checksums();
        if ca != h.actor_basis_checksum || cc != h.critic_basis_checksum {
            return Err(Error::Checkpoint(
                "regenerated frozen basis does not match the stored checksum".into(),
            ));
        }
        let (pa, pc) = (&run.agent.policy, &run.agent.critic);
        if head_dims(pa.representation()) != h.actor_dims || head_dims(pc.representation()) != h.critic_dims {
            return Err(Error::Checkpoint("layer dimensions differ from the configuration".into()));
        }
        let lit = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        run.agent.policy.load_params(&lit(&ck.actor)).map_err(|e| Error::Checkpoint(format!("actor: {e}")))?;
        run.agent.critic.load_params(&lit(&ck.critic)).map_err(|e| Error::Checkpoint(format!("critic: {e}")))?;
        run.agent.lr = h.lr;
        let od = run.collector.obs_dim();
        let pd = run.collector.privileged_dim();
        run.collector.set_stats(
            stats_from_vec(&ck.obs_stats, od)?,
            stats_from_vec(&ck.privileged_stats, pd)?,
            stats_from_vec(&ck.reward_stats, 1)?,
        )?;
        run.iteration = h.iteration;
        Ok(run)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSummary {
    pub out_dir: PathBuf,
    pub iterations: usize,
    pub diverged: bool,
    pub last: Option<IterationRecord>,
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
    pub counts: ModelCounts,
}

/// Trains for `cfg.iterations`, writing into `out_dir`:
/// `config.txt`, `metrics.csv`, `final.ckpt`, periodic
/// `checkpoints/iter_NNNNNN.ckpt` and `rollouts/iter_NNNNNN.csv` dumps.
/// A diverged iteration stops the run after its record and a checkpoint
/// are written.
pub fn train(cfg: &TrainConfig, out_dir: &Path) -> Result<TrainSummary> {
    match cfg.precision {
        Precision::F64 => train_with::<f64>(cfg, out_dir),
        Precision::F32 => train_with::<f32>(cfg, out_dir),
    }
}

fn train_with<T: Real>(cfg: &TrainConfig, out_dir: &Path) -> Result<TrainSummary> {
    let mut run = Run::<T>::new(cfg.clone())?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("config.txt"), cfg.to_text())?;
    let metrics = out_dir.join("metrics.csv");
    let mut writer = MetricsWriter::create(&metrics)?;
    let mut last = None;
    let mut diverged = false;
    for _ in 0..cfg.iterations {
        let (rec, buf) = run.step()?;
        writer.write(&rec)?;
        let it = rec.iteration;
        if cfg.rollout_dump_every > 0 && it % cfg.rollout_dump_every == 0 {
            let dir = out_dir.join("rollouts");
            fs::create_dir_all(&dir)?;
            buf.write_csv(fs::File::create(dir.join(format!("iter_{it:06}.csv")))?)?;
        }
        if cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0 {
            let dir = out_dir.join("checkpoints");
            fs::create_dir_all(&dir)?;
            run.checkpoint().save(&dir.join(format!("iter_{it:06}.ckpt")))?;
        }
        diverged = rec.diverged;
        last = Some(rec);
        if diverged {
            break;
        }
    }
    let checkpoint = out_dir.join("final.ckpt");
    run.checkpoint().save(&checkpoint)?;
    Ok(TrainSummary {
        out_dir: out_dir.to_path_buf(),
        iterations: run.iteration(),
        diverged,
        last,
        checkpoint,
        metrics,
        counts: run.counts(),
    })
}

/// Loads a checkpoint and evaluates it. `episodes` and `seed` default to
/// the stored configuration's `eval_episodes` and `master_seed`.
pub fn evaluate_checkpoint(
    path: &Path,
    expected: Option<&TrainConfig>,
    episodes: Option<usize>,
    seed: Option<u64>,
) -> Result<EvalReport> {
    let ck = Checkpoint::load(path)?;
    let cfg = TrainConfig::parse(&ck.header.config_text, &[])?;
    let episodes = episodes.unwrap_or(cfg.eval_episodes);
    let seed = seed.unwrap_or(cfg.master_seed);
    match cfg.precision {
        Precision::F64 => Run::<f64>::from_checkpoint(&ck, expected)?.evaluate(episodes, seed),
        Precision::F32 => Run::<f32>::from_checkpoint(&ck, expected)?.evaluate(episodes, seed),
    }
}

/// Evaluation of the untrained model `cfg` describes.
pub fn evaluate_untrained(cfg: &TrainConfig, episodes: usize, seed: u64) -> Result<EvalReport> {
    match cfg.precision {
        Precision::F64 => Run::<f64>::new(cfg.clone())?.evaluate(episodes, seed),
        Precision::F32 => Run::<f32>::new(cfg.clone())?.evaluate(episodes, seed),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub label: String,
    pub iterations: usize,
    pub learn_mean_s: f64,
    /// Relative standard deviation of the per-iteration learning time.
    pub learn_rel_std: f64,
    pub collect_mean_s: f64,
    pub iteration_mean_s: f64,
    pub counts: ModelCounts,
}

/// Trains for `iterations` iterations without writing files and reports
/// per-iteration timings.
pub fn bench(cfg: &TrainConfig, iterations: usize) -> Result<BenchReport> {
    match cfg.precision {
        Precision::F64 => bench_with::<f64>(cfg, iterations),
        Precision::F32 => bench_with::<f32>(cfg, iterations),
    }
}

fn bench_with<T: Real>(cfg: &TrainConfig, iterations: usize) -> Result<BenchReport> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("bench needs at least one iteration".into()));
    }
    let mut run = Run::<T>::new(cfg.clone())?;
    let mut prof = Profiler::new();
    let (mut learn, mut collect) = (Vec::new(), Vec::new());
    for _ in 0..iterations {
        let (rec, _) = prof.time("iteration", |_| run.step())??;
        learn.push(rec.learn_time_s);
        collect.push(rec.collect_time_s);
    }
    prof.finish()?;
    Ok(BenchReport {
        label: cfg.algorithm.name().into(),
        iterations,
        learn_mean_s: mean(&learn),
        learn_rel_std: relative_std(&learn),
        collect_mean_s: mean(&collect),
        iteration_mean_s: prof.total("iteration").as_secs_f64() / iterations as f64,
        counts: run.counts(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedOutcome {
    pub label: String,
    pub seed: u64,
    pub eval: EvalReport,
    pub learn_time_s: f64,
    pub collect_time_s: f64,
    pub iterations: usize,
    pub diverged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSummary {
    pub label: String,
    pub metric: &'static str,
    pub interval: Interval,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub outcomes: Vec<SeedOutcome>,
    pub metrics: Vec<MetricSummary>,
    pub counts: Vec<(String, ModelCounts)>,
}

impl CompareReport {
    pub fn metric(&self, label: &str, metric: &str) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.label == label && m.metric == metric)
    }
}

/// Metrics aggregated per label; `learn_time_s` and `collect_time_s` are
/// per-iteration means of each run.
pub const COMPARE_METRICS: [&str; 7] = [
    "mean_reward",
    "lin_track_reward",
    "yaw_track_reward",
    "vel_error",
    "yaw_error",
    "learn_time_s",
    "collect_time_s",
];

fn metric_value(o: &SeedOutcome, metric: &str) -> f64 {
    match metric {
        "mean_reward" => o.eval.mean_reward,
        "lin_track_reward" => o.eval.lin_track_reward,
        "yaw_track_reward" => o.eval.yaw_track_reward,
        "vel_error" => o.eval.vel_error,
        "yaw_error" => o.eval.yaw_error,
        "learn_time_s" => o.learn_time_s,
        "collect_time_s" => o.collect_time_s,
        _ => f64::NAN,
    }
}

/// Trains and evaluates every `(label, config)` pair under every seed
/// (the seed replaces `master_seed`), then writes `compare.csv`,
/// `compare.txt` and `curves.csv` into `out_dir`.
pub fn compare(entries: &[(String, TrainConfig)], seeds: &[u64], out_dir: &Path) -> Result<CompareReport> {
    if seeds.len() < 2 {
        return Err(Error::InvalidArgument("compare needs at least 2 seeds".into()));
    }
    if entries.is_empty() {
        return Err(Error::InvalidArgument("compare needs at least one configuration".into()));
    }
    fs::create_dir_all(out_dir)?;
    let mut outcomes = Vec::new();
    let mut counts = Vec::new();
    let mut curves = csv::Writer::from_path(out_dir.join("curves.csv"))?;
    curves.write_record([
        "label",
        "seed",
        "iteration",
        "mean_episode_reward",
        "lin_track_reward",
        "yaw_track_reward",
        "vel_error",
        "yaw_error",
        "learn_time_s",
    ])?;
    for (label, base) in entries {
        for &seed in seeds {
            let mut cfg = base.clone();
            cfg.master_seed = seed;
            let dir = out_dir.join(label).join(format!("seed_{seed}"));
            let s = train(&cfg, &dir)?;
            let eval = evaluate_checkpoint(&s.checkpoint, Some(&cfg), None, None)?;
            let recs = read_metrics(&s.metrics)?;
            for r in &recs {
                curves.write_record([
                    label.clone(),
                    seed.to_string(),
                    r.iteration.to_string(),
                    r.mean_episode_reward.to_string(),
                    r.lin_track_reward.to_string(),
                    r.yaw_track_reward.to_string(),
                    r.vel_error.to_string(),
                    r.yaw_error.to_string(),
                    r.learn_time_s.to_string(),
                ])?;
            }
            let learn: Vec<f64> = recs.iter().map(|r| r.learn_time_s).collect();
            let collect: Vec<f64> = recs.iter().map(|r| r.collect_time_s).collect();
            outcomes.push(SeedOutcome {
                label: label.clone(),
                seed,
                eval,
                learn_time_s: mean(&learn),
                collect_time_s: mean(&collect),
                iterations: s.iterations,
                diverged: s.diverged,
            });
            if !counts.iter().any(|(l, _): &(String, ModelCounts)| l == label) {
                counts.push((label.clone(), s.counts));
            }
        }
    }
    curves.flush()?;

    let mut metrics = Vec::new();
    for (label, _) in entries {
        let mine: Vec<&SeedOutcome> = outcomes.iter().filter(|o| &o.label == label).collect();
        for metric in COMPARE_METRICS {
            let values: Vec<f64> = mine.iter().map(|o| metric_value(o, metric)).collect();
            if values.iter().any(|v| v.is_nan()) {
                continue;
            }
            metrics.push(MetricSummary {
                label: label.clone(),
                metric,
                interval: t_interval(&values, 0.95)?,
                values,
            });
        }
    }
    let report = CompareReport {
        outcomes,
        metrics,
        counts,
    };
    write_compare(&report, out_dir)?;
    Ok(report)
}

fn write_compare(report: &CompareReport, out_dir: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out_dir.join("compare.csv"))?;
    w.write_record(["label", "metric", "n", "mean", "ci95_lo", "ci95_hi", "std", "values"])?;
    for m in &report.metrics {
        let i = &m.interval;
        w.write_record([
            m.label.clone(),
            m.metric.to_string(),
            i.n.to_string(),
            i.mean.to_string(),
            i.lo().to_string(),
            i.hi().to_string(),
            i.std.to_string(),
            m.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
        ])?;
    }
    for (label, c) in &report.counts {
        for (metric, v) in [("trainable_params", c.trainable), ("total_params", c.total)] {
            let v = v.to_string();
            w.write_record([label.as_str(), metric, "1", &v, &v, &v, "0", &v])?;
        }
    }
    w.flush()?;

    let mut t = String::new();
    let _ = writeln!(t, "{:<16} {:<18} {:>14} {:>14}", "label", "metric", "mean", "95% CI +-");
    for m in &report.metrics {
        let _ = writeln!(
            t,
            "{:<16} {:<18} {:>14.6} {:>14.6}",
            m.label, m.metric, m.interval.mean, m.interval.half_width
        );
    }
    let _ = writeln!(t);
    let _ = writeln!(t, "{:<16} {:>12} {:>12} {:>12}", "label", "trainable", "frozen", "total");
    for (label, c) in &report.counts {
        let _ = writeln!(t, "{:<16} {:>12} {:>12} {:>12}", label, c.trainable, c.frozen, c.total);
    }
    if report.counts.len() >= 2 {
        let (a, b) = (&report.counts[0], &report.counts[1]);
        let _ = writeln!(
            t,
            "trainable ratio {}/{}: {:.5}",
            a.0,
            b.0,
            a.1.trainable as f64 / b.1.trainable as f64
        );
    }
    let diverged: Vec<String> = report
        .outcomes
        .iter()
        .filter(|o| o.diverged)
        .map(|o| format!("{} seed {}", o.label, o.seed))
        .collect();
    let _ = writeln!(
        t,
        "diverged runs: {}",
        if diverged.is_empty() { "none".to_string() } else { diverged.join(", ") }
    );
    fs::write(out_dir.join("compare.txt"), t)?;
    Ok(())
}
