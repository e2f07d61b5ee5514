//! The eleven acceptance criteria. Runs as a plain binary and prints one
//! `PASS` / `FAIL` line per criterion; a name filter may be passed as an
//! argument (`cargo test --test acceptance -- pendulum`).

use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use randpol::actor_critic::{gaussian_entropy, gaussian_log_prob, GaussianPolicy, ValueHead};
use randpol::envs::{CurriculumConfig, CurriculumState, Environment, VelocityEnv, VelocityTaskConfig};
use randpol::function_approx::{DenseNet, Parameterized, RandomBasis};
use randpol::harness::{self, EnvDims, Run, TrainConfig};
use randpol::learner::{clipped_term, surrogate_loss_and_grad, value_loss_and_grad};
use randpol::normalize::RunningMeanStd;
use randpol::rollout::{gae_stream, GaeStream, Minibatch};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cfg(overrides: &[&str]) -> TrainConfig {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    TrainConfig::parse("", &o).expect("test config")
}

fn full_scale_dims() -> EnvDims {
    EnvDims {
        obs: 45,
        privileged: 60,
        action: 12,
    }
}

// 1 ------------------------------------------------------------------------

fn trainable_count() -> Outcome {
    let c = harness::model_counts(&cfg(&[]), full_scale_dims()).map_err(|e| e.to_string())?;
    ensure(c.trainable == 5_225, format!("trainable = {}, expected 5225", c.trainable))?;
    ensure(c.actor_trainable == 12 * 401 + 12, "actor readout + log_std")?;
    ensure(c.critic_trainable == 401, "critic readout")?;
    Ok(format!("trainable {} (total {})", c.trainable, c.total))
}

// 2 ------------------------------------------------------------------------

struct Traj {
    rewards: Vec<f64>,
    values: Vec<f64>,
    dones: Vec<bool>,
    truncated: Vec<bool>,
    trunc_values: Vec<f64>,
    bootstrap: f64,
}

impl Traj {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(1..=10);
        let mut t = Traj {
            rewards: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            values: (0..n).map(|_| rng.random_range(-5.0..5.0)).collect(),
            dones: (0..n).map(|_| rng.random_bool(0.25)).collect(),
            truncated: vec![false; n],
            trunc_values: (0..n).map(|_| rng.random_range(-5.0..5.0)).collect(),
            bootstrap: rng.random_range(-5.0..5.0),
        };
        for i in 0..n {
            t.truncated[i] = t.dones[i] && rng.random_bool(0.5);
        }
        t
    }

    fn stream(&self) -> GaeStream<'_, f64> {
        GaeStream {
            rewards: &self.rewards,
            values: &self.values,
            dones: &self.dones,
            truncated: &self.truncated,
            truncation_values: &self.trunc_values,
            bootstrap: self.bootstrap,
        }
    }

    fn next_value(&self, t: usize) -> f64 {
        if self.truncated[t] {
            self.trunc_values[t]
        } else if t + 1 < self.rewards.len() {
            self.values[t + 1]
        } else {
            self.bootstrap
        }
    }

    fn delta(&self, t: usize, gamma: f64) -> f64 {
        let cont = if self.dones[t] && !self.truncated[t] { 0.0 } else { 1.0 };
        self.rewards[t] + gamma * self.next_value(t) * cont - self.values[t]
    }

    /// `sum_l (gamma lambda)^l delta_{t+l}` up to the episode end.
    fn double_sum(&self, t: usize, gamma: f64, lambda: f64) -> f64 {
        let mut acc = 0.0;
        for l in t..self.rewards.len() {
            acc += (gamma * lambda).powi((l - t) as i32) * self.delta(l, gamma);
            if self.dones[l] {
                break;
            }
        }
        acc
    }

    /// Discounted return with bootstrap, minus `V(x_t)`.
    fn mc_advantage(&self, t: usize, gamma: f64) -> f64 {
        let mut g = 0.0;
        let mut disc = 1.0;
        for l in t..self.rewards.len() {
            g += disc * self.rewards[l];
            disc *= gamma;
            if self.dones[l] {
                if self.truncated[l] {
                    g += disc * self.trunc_values[l];
                }
                return g - self.values[t];
            }
        }
        g + disc * self.bootstrap - self.values[t]
    }
}

fn gae_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let tr = Traj::random(&mut rng);
        let gamma = rng.random_range(0.8..1.0);
        let lambda = rng.random_range(0.0..1.0);
        let n = tr.rewards.len();

        let a = gae_stream(tr.stream(), gamma, lambda);
        for t in 0..n {
            let err = (a[t] - tr.double_sum(t, gamma, lambda)).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, format!("double sum off by {err:e}"))?;
        }
        let a1 = gae_stream(tr.stream(), gamma, 1.0);
        for t in 0..n {
            let err = (a1[t] - tr.mc_advantage(t, gamma)).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, format!("lambda = 1 off by {err:e}"))?;
        }
        let a0 = gae_stream(tr.stream(), gamma, 0.0);
        for t in 0..n {
            ensure(a0[t] == tr.delta(t, gamma), "lambda = 0 differs from the TD residual")?;
        }
    }
    Ok(format!("1000 trajectories, max error {worst:.1e}"))
}

// 3 ------------------------------------------------------------------------

const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-5;

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

fn random_params(n: usize, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

fn random_batch(rng: &mut ChaCha8Rng, n: usize, obs_dim: usize, act_dim: usize) -> Minibatch<f64> {
    let obs = Array2::from_shape_fn((n, obs_dim), |_| rng.random_range(-2.0..2.0));
    Minibatch {
        privileged_obs: obs.clone(),
        obs,
        actor_features: None,
        critic_features: None,
        actions: Array2::from_shape_fn((n, act_dim), |_| rng.random_range(-2.0..2.0)),
        old_log_probs: Array1::zeros(n),
        advantages: Array1::from_shape_fn(n, |_| rng.random_range(-2.0..2.0)),
        value_targets: Array1::from_shape_fn(n, |_| rng.random_range(-3.0..3.0)),
    }
}

fn make_policy(rng: &mut ChaCha8Rng, obs_dim: usize, act_dim: usize, dense: bool) -> GaussianPolicy<f64> {
    let mut p = if dense {
        GaussianPolicy::dense(DenseNet::new(&[obs_dim, 7, 5, act_dim], rng).unwrap(), 0.0)
    } else {
        let basis = RandomBasis::build(rng.random(), obs_dim, &[9], 6).unwrap();
        GaussianPolicy::randomized(basis.into(), act_dim, 0.0)
    };
    let n = p.num_params();
    p.load_params(&random_params(n, rng, 0.5)).unwrap();
    p
}

fn make_critic(rng: &mut ChaCha8Rng, obs_dim: usize, dense: bool) -> ValueHead<f64> {
    let mut v = if dense {
        ValueHead::dense(DenseNet::new(&[obs_dim, 7, 5, 1], rng).unwrap()).unwrap()
    } else {
        ValueHead::randomized(RandomBasis::build(rng.random(), obs_dim, &[9], 6).unwrap().into())
    };
    let n = v.num_params();
    v.load_params(&random_params(n, rng, 0.5)).unwrap();
    v
}

fn central_difference<M: Parameterized<f64> + Clone>(model: &M, f: impl Fn(&M) -> f64) -> Vec<f64> {
    let base = model.params();
    (0..base.len())
        .map(|i| {
            let mut m = model.clone();
            let mut p = base.clone();
            p[i] = base[i] + FD_STEP;
            m.load_params(&p).unwrap();
            let up = f(&m);
            p[i] = base[i] - FD_STEP;
            m.load_params(&p).unwrap();
            let down = f(&m);
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

fn gradient_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = 0.2;
    let ent = 0.01;
    let (mut surrogate_cases, mut value_cases, mut skipped) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    while surrogate_cases < 200 {
        let (obs_dim, act_dim, n) = (rng.random_range(1..5), rng.random_range(1..4), rng.random_range(1..9));
        let dense = rng.random_bool(0.5);
        let policy = make_policy(&mut rng, obs_dim, act_dim, dense);
        let mut batch = random_batch(&mut rng, n, obs_dim, act_dim);
        // Old log-probs spread the ratios over both sides of the clip band.
        for k in 0..n {
            let x: Vec<f64> = batch.obs.row(k).to_vec();
            let u: Vec<f64> = batch.actions.row(k).to_vec();
            batch.old_log_probs[k] = policy.log_prob_of(&x, &u).unwrap() + rng.random_range(-0.4..0.4);
        }
        let near_boundary = (0..n).any(|k| {
            let x: Vec<f64> = batch.obs.row(k).to_vec();
            let u: Vec<f64> = batch.actions.row(k).to_vec();
            let r = (policy.log_prob_of(&x, &u).unwrap() - batch.old_log_probs[k]).exp();
            (r - (1.0 - eps)).abs() < 1e-3 || (r - (1.0 + eps)).abs() < 1e-3
        });
        if near_boundary {
            skipped += 1;
            continue;
        }
        let (_, grad, _) = surrogate_loss_and_grad(&policy, &batch, eps, ent).unwrap();
        let fd = central_difference(&policy, |p| surrogate_loss_and_grad(p, &batch, eps, ent).unwrap().0);
        let e = rel_err(&grad, &fd);
        worst = worst.max(e);
        ensure(e <= FD_TOL, format!("surrogate relative error {e:e} (dense {dense})"))?;
        surrogate_cases += 1;
    }
    while value_cases < 200 {
        let (obs_dim, n) = (rng.random_range(1..5), rng.random_range(1..9));
        let dense = rng.random_bool(0.5);
        let critic = make_critic(&mut rng, obs_dim, dense);
        let batch = random_batch(&mut rng, n, obs_dim, 1);
        let (_, grad) = value_loss_and_grad(&critic, &batch).unwrap();
        let fd = central_difference(&critic, |c| value_loss_and_grad(c, &batch).unwrap().0);
        let e = rel_err(&grad, &fd);
        worst = worst.max(e);
        ensure(e <= FD_TOL, format!("value relative error {e:e} (dense {dense})"))?;
        value_cases += 1;
    }
    // Sanity on the clip band itself.
    ensure(clipped_term(1.5, 1.0, eps) == (1.2, false), "clip arithmetic")?;
    Ok(format!(
        "{surrogate_cases} surrogate + {value_cases} value configs, max rel error {worst:.1e}, {skipped} boundary draws skipped"
    ))
}

// 4 ------------------------------------------------------------------------

fn frozen_invariant() -> Outcome {
    let mut run = Run::<f64>::new(cfg(&["master_seed=4"])).map_err(|e| e.to_string())?;
    let frozen = |r: &Run<f64>| {
        let mut v = r.agent().policy.representation().basis().unwrap().frozen_params();
        v.extend(r.agent().critic.representation().basis().unwrap().frozen_params());
        v
    };
    let trainable = |r: &Run<f64>| {
        let mut v = r.agent().policy.params();
        v.extend(r.agent().critic.params());
        v
    };
    let sums0 = run.frozen_checksums();
    let (f0, t0) = (frozen(&run), trainable(&run));
    for _ in 0..100 {
        run.step().map_err(|e| e.to_string())?;
    }
    let sums1 = run.frozen_checksums();
    let (f1, t1) = (frozen(&run), trainable(&run));
    ensure(sums0 == sums1, "frozen checksum changed")?;
    let frozen_changed = f0.iter().zip(&f1).filter(|(a, b)| a.to_bits() != b.to_bits()).count();
    let trainable_unchanged = t0.iter().zip(&t1).filter(|(a, b)| a.to_bits() == b.to_bits()).count();
    ensure(frozen_changed == 0, format!("{frozen_changed} frozen parameters changed"))?;
    ensure(
        trainable_unchanged == 0,
        format!("{trainable_unchanged} of {} trainable parameters never moved", t0.len()),
    )?;
    Ok(format!("{} frozen unchanged, {} trainable all changed", f0.len(), t0.len()))
}

// 5 ------------------------------------------------------------------------

const EVAL_EPISODES: usize = 64;

fn velocity_learning() -> Outcome {
    let mut passed = 0;
    let mut notes = Vec::new();
    for seed in 0..5u64 {
        let mut run = Run::<f64>::new(cfg(&[&format!("master_seed={seed}")])).map_err(|e| e.to_string())?;
        let eval_seed = 1_000 + seed;
        let untrained = run.evaluate(EVAL_EPISODES, eval_seed).map_err(|e| e.to_string())?.vel_error;
        let mut reached = None;
        while run.iteration() < 500 {
            for _ in 0..50 {
                run.step().map_err(|e| e.to_string())?;
            }
            let err = run.evaluate(EVAL_EPISODES, eval_seed).map_err(|e| e.to_string())?.vel_error;
            if err < 0.3 * untrained {
                reached = Some((run.iteration(), err));
                break;
            }
        }
        match reached {
            Some((it, err)) => {
                passed += 1;
                notes.push(format!("s{seed}: {:.3}->{err:.3}@{it}", untrained));
            }
            None => notes.push(format!("s{seed}: not reached from {untrained:.3}")),
        }
    }
    ensure(passed >= 4, format!("{passed}/5 seeds [{}]", notes.join(", ")))?;
    Ok(format!("{passed}/5 seeds [{}]", notes.join(", ")))
}

// 6 ------------------------------------------------------------------------

/// Deterministic-mean evaluation reward of the untrained pendulum policy,
/// 64 episodes of 200 steps: -1179, -1208, -1226 (randpol seeds 0..3) and
/// -1229, -1218, -1302 (dense). The threshold sits 280 above the best of
/// them; each run also checks its own untrained score is below it.
const PENDULUM_UNTRAINED: f64 = -1180.0;
const PENDULUM_MARGIN: f64 = 280.0;
const PENDULUM_THRESHOLD: f64 = PENDULUM_UNTRAINED + PENDULUM_MARGIN;

fn pendulum_learning() -> Outcome {
    let mut notes = Vec::new();
    for alg in ["randpol", "dense_baseline"] {
        for seed in 0..3u64 {
            let c = cfg(&["env=pendulum", &format!("algorithm={alg}"), &format!("master_seed={seed}")]);
            let mut run = Run::<f64>::new(c).map_err(|e| e.to_string())?;
            let eval_seed = 2_000 + seed;
            let untrained = run.evaluate(EVAL_EPISODES, eval_seed).map_err(|e| e.to_string())?.mean_reward;
            ensure(
                untrained < PENDULUM_THRESHOLD,
                format!("{alg} s{seed}: untrained {untrained:.0} already above threshold"),
            )?;
            let mut reached = None;
            while run.iteration() < 300 {
                for _ in 0..25 {
                    run.step().map_err(|e| e.to_string())?;
                }
                let r = run.evaluate(EVAL_EPISODES, eval_seed).map_err(|e| e.to_string())?.mean_reward;
                if r > PENDULUM_THRESHOLD {
                    reached = Some((run.iteration(), r));
                    break;
                }
            }
            match reached {
                Some((it, r)) => notes.push(format!("{alg} s{seed}: {untrained:.0}->{r:.0}@{it}")),
                None => return Err(format!("{alg} seed {seed} stayed below {PENDULUM_THRESHOLD}")),
            }
        }
    }
    Ok(format!("threshold {PENDULUM_THRESHOLD} [{}]", notes.join(", ")))
}

// 7 ------------------------------------------------------------------------

fn complexity_ratio() -> Outcome {
    let randpol = harness::model_counts(&cfg(&[]), full_scale_dims()).map_err(|e| e.to_string())?;
    let dense = harness::model_counts(&cfg(&["algorithm=dense_baseline"]), full_scale_dims()).map_err(|e| e.to_string())?;
    let ratio = randpol.trainable as f64 / dense.trainable as f64;
    ensure(ratio < 0.02, format!("ratio {ratio}"))?;
    let desk = harness::env_dims(&cfg(&[]));
    let r2 = harness::model_counts(&cfg(&[]), desk).unwrap().trainable as f64
        / harness::model_counts(&cfg(&["algorithm=dense_baseline"]), desk).unwrap().trainable as f64;
    ensure(r2 < 0.02, format!("desk-scale ratio {r2}"))?;
    Ok(format!(
        "{} / {} = {ratio:.5} (desk dims {r2:.5})",
        randpol.trainable, dense.trainable
    ))
}

// 8 ------------------------------------------------------------------------

fn timing_direction() -> Outcome {
    let dense_cfg = cfg(&["algorithm=dense_baseline"]);
    let mut randpol_cfg = cfg(&[]);
    randpol_cfg.horizon = dense_cfg.horizon;
    randpol_cfg.num_envs = dense_cfg.num_envs;
    randpol_cfg.epochs = dense_cfg.epochs;
    randpol_cfg.minibatches = dense_cfg.minibatches;
    let r = harness::bench(&randpol_cfg, 100).map_err(|e| e.to_string())?;
    let d = harness::bench(&dense_cfg, 100).map_err(|e| e.to_string())?;
    let line = format!(
        "learn s/iter randpol {:.4} (±{:.0}%) vs dense {:.4} (±{:.0}%) over 100 iterations",
        r.learn_mean_s,
        100.0 * r.learn_rel_std,
        d.learn_mean_s,
        100.0 * d.learn_rel_std
    );
    ensure(r.learn_mean_s <= d.learn_mean_s, line.clone())?;
    Ok(line)
}

// 9 ------------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let c = cfg(&["iterations=50", "master_seed=9"]);
    let mut texts = Vec::new();
    for name in ["a", "b"] {
        let s = harness::train(&c, &dir.path().join(name)).map_err(|e| e.to_string())?;
        let raw = std::fs::read_to_string(&s.metrics).map_err(|e| e.to_string())?;
        texts.push(harness::strip_timing(&raw).map_err(|e| e.to_string())?);
    }
    ensure(texts[0].lines().count() == 51, "expected header plus 50 records")?;
    ensure(texts[0] == texts[1], "metrics differ between identical runs")?;
    Ok(format!("{} bytes identical", texts[0].len()))
}

// 10 -----------------------------------------------------------------------

fn distribution_math() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_mass: f64 = 0.0;
    for _ in 0..50 {
        let mu = rng.random_range(-3.0..3.0);
        let ls = rng.random_range(-5.0..2.0);
        let s: f64 = f64::exp(ls);
        // Composite Simpson over mu +- 12 sigma.
        let (a, b, n) = (mu - 12.0 * s, mu + 12.0 * s, 4_000);
        let h = (b - a) / n as f64;
        let p = |u: f64| gaussian_log_prob(Array1::from(vec![mu]).view(), Array1::from(vec![ls]).view(), Array1::from(vec![u]).view()).exp();
        let mut sum = p(a) + p(b);
        for i in 1..n {
            sum += p(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let mass = sum * h / 3.0;
        worst_mass = worst_mass.max((mass - 1.0).abs());
        ensure((mass - 1.0).abs() <= 1e-3, format!("density mass {mass}"))?;
    }

    let mut worst_h: f64 = 0.0;
    for _ in 0..5 {
        let m = rng.random_range(1..6);
        let mu = Array1::from_shape_fn(m, |_| rng.random_range(-1.0..1.0));
        let ls: Array1<f64> = Array1::from_shape_fn(m, |_| rng.random_range(-2.0..1.0));
        let h = gaussian_entropy(ls.view());
        let draws = 200_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let u = Array1::from_shape_fn(m, |i| mu[i] + ls[i].exp() * rng.sample::<f64, _>(rand_distr::StandardNormal));
            acc -= gaussian_log_prob(mu.view(), ls.view(), u.view());
        }
        let mc = acc / draws as f64;
        worst_h = worst_h.max((mc - h).abs());
        ensure((mc - h).abs() <= 1e-2, format!("entropy {h} vs Monte Carlo {mc}"))?;
    }

    let dim = 3;
    let data = Array2::from_shape_fn((5_000, dim), |(_, j)| 10.0 * j as f64 + rng.random_range(-4.0..4.0));
    let mut rms = RunningMeanStd::<f64>::new(dim);
    let mut start = 0;
    while start < data.nrows() {
        let len = rng.random_range(1..300).min(data.nrows() - start);
        rms.update(data.slice(ndarray::s![start..start + len, ..])).unwrap();
        start += len;
    }
    let n = data.nrows() as f64;
    let mut worst_moment: f64 = 0.0;
    for j in 0..dim {
        let col = data.column(j);
        let mean = col.sum() / n;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let e = (rms.mean()[j] - mean).abs().max((rms.variance()[j] - var).abs());
        worst_moment = worst_moment.max(e);
        ensure(e <= 1e-10, format!("streaming moments off by {e:e}"))?;
    }
    Ok(format!(
        "mass err {worst_mass:.1e}, entropy err {worst_h:.1e}, moment err {worst_moment:.1e}"
    ))
}

// 11 -----------------------------------------------------------------------

fn curriculum_contract() -> Outcome {
    let config = CurriculumConfig::default();
    let mut s = CurriculumState::new(config.clone());
    ensure(s.v_range == [0.0, 0.2] && s.w_range == [-0.2, 0.2], "initial ranges")?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let low = rng.random_range(-1.0..config.promotion_threshold);
        ensure(s.update(low) == s, "sub-threshold score expanded the ranges")?;
    }
    let mut promotions = 0;
    for _ in 0..100 {
        let next = s.update(rng.random_range(config.promotion_threshold..1.0));
        ensure(next.v_range[1] >= s.v_range[1] && next.w_range[1] >= s.w_range[1], "ranges shrank")?;
        ensure(next.v_range[1] <= 1.0 && next.w_range[1] <= 1.0 && next.w_range[0] >= -1.0, "ranges exceed the final bounds")?;
        if next != s {
            promotions += 1;
        }
        for _ in 0..5 {
            ensure(next.update(rng.random_range(-1.0..config.promotion_threshold)) == next, "sub-threshold expansion")?;
        }
        s = next;
    }
    ensure(s.v_range == [0.0, 1.0] && s.w_range == [-1.0, 1.0] && s.at_max, format!("final ranges {:?} {:?}", s.v_range, s.w_range))?;

    // Commands drawn by the environment respect the ranges in force.
    let mut env = VelocityEnv::new(VelocityTaskConfig::default(), CurriculumState::new(config.clone()), 11);
    let mut state = CurriculumState::new(config);
    for _ in 0..10 {
        for _ in 0..50 {
            env.reset();
            ensure(state.contains(env.command()), "sampled command outside the ranges")?;
        }
        state = state.update(1.0);
        env.apply_curriculum(&state);
    }
    Ok(format!("{promotions} promotions to v [0, 1], w [-1, 1]"))
}

// --------------------------------------------------------------------------

const CRITERIA: [(&str, fn() -> Outcome); 11] = [
    ("trainable_count", trainable_count),
    ("gae_oracle", gae_oracle),
    ("gradient_exactness", gradient_exactness),
    ("frozen_invariant", frozen_invariant),
    ("velocity_learning", velocity_learning),
    ("pendulum_learning", pendulum_learning),
    ("complexity_ratio", complexity_ratio),
    ("timing_direction", timing_direction),
    ("determinism", determinism),
    ("distribution_math", distribution_math),
    ("curriculum_contract", curriculum_contract),
];

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let listing = std::env::args().any(|a| a == "--list");
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        if listing {
            println!("{name}: test");
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} {name:<20} PASS  {secs:>7.1}s  {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name:<20} FAIL  {secs:>7.1}s  {msg}", i + 1);
            }
        }
    }
    if !listing {
        println!("acceptance: {} passed, {failed} failed", ran - failed);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
