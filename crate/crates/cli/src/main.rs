use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use randpol::harness::{
    self, Algorithm, EnvDims, EvalReport, TrainConfig, OUT_DIR_ENV,
};

#[derive(Parser)]
#[command(name = "randpol", version, about = "Frozen random-feature actor-critic training and comparison")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. --set iterations=10. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train one run and write metrics and checkpoints.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Master seed (overrides master_seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Output root when --out-dir is absent.
        #[arg(long, env = OUT_DIR_ENV, default_value = "runs")]
        out_root: PathBuf,
    },
    /// Evaluate a checkpoint with the deterministic policy mean.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// When given, must match the configuration stored in the checkpoint.
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        episodes: Option<usize>,
        /// Evaluation seed (defaults to the run's master seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train both algorithms over several seeds and aggregate.
    Compare {
        /// Configuration of the randomized-feature run.
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Configuration of the dense baseline run.
        #[arg(long)]
        baseline_config: Option<PathBuf>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        seeds: Vec<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "runs")]
        out_root: PathBuf,
    },
    /// Print trainable, frozen and total parameter counts for both algorithms.
    CountParams {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Actor input width (defaults to the configured environment's).
        #[arg(long)]
        obs_dim: Option<usize>,
        /// Critic input width.
        #[arg(long)]
        privileged_dim: Option<usize>,
        #[arg(long)]
        action_dim: Option<usize>,
    },
    /// Time both algorithms under one shared rollout and minibatch schedule.
    Bench {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
    },
}

fn load(args: &ConfigArgs, extra: &[String]) -> Result<TrainConfig> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => String::new(),
    };
    let mut overrides = args.set.clone();
    overrides.extend_from_slice(extra);
    Ok(TrainConfig::parse(&text, &overrides)?)
}

fn seed_override(seed: Option<u64>) -> Vec<String> {
    seed.map(|s| vec![format!("master_seed={s}")]).unwrap_or_default()
}

fn print_eval(r: &EvalReport) {
    println!("episodes          {}", r.episodes);
    println!("mean_reward       {:.6}", r.mean_reward);
    println!("lin_track_reward  {:.6}", r.lin_track_reward);
    println!("yaw_track_reward  {:.6}", r.yaw_track_reward);
    println!("vel_error_m_s     {:.6}", r.vel_error);
    println!("yaw_error_rad_s   {:.6}", r.yaw_error);
}

fn run_dir(out_dir: Option<PathBuf>, root: &Path, name: String) -> PathBuf {
    out_dir.unwrap_or_else(|| root.join(name))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Train {
            cfg,
            seed,
            out_dir,
            out_root,
        } => {
            let c = load(&cfg, &seed_override(seed))?;
            let dir = run_dir(
                out_dir,
                &out_root,
                format!("{}_{}_seed{}", c.algorithm.name(), c.env.name(), c.master_seed),
            );
            let s = harness::train(&c, &dir)?;
            println!("run directory     {}", s.out_dir.display());
            println!("iterations        {}", s.iterations);
            println!("trainable params  {}", s.counts.trainable);
            println!("total params      {}", s.counts.total);
            if let Some(r) = &s.last {
                println!("mean_ep_reward    {:.6}", r.mean_episode_reward);
            }
            if s.diverged {
                eprintln!("run halted: non-finite loss at iteration {}", s.iterations);
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Eval {
            checkpoint,
            cfg,
            episodes,
            seed,
        } => {
            let expected = match cfg.config.is_some() || !cfg.set.is_empty() {
                true => Some(load(&cfg, &[])?),
                false => None,
            };
            let r = harness::evaluate_checkpoint(&checkpoint, expected.as_ref(), episodes, seed)?;
            print_eval(&r);
        }
        Cmd::Compare {
            cfg,
            baseline_config,
            seeds,
            out_dir,
            out_root,
        } => {
            let a = load(&cfg, &[])?;
            let b = load(
                &ConfigArgs {
                    config: baseline_config,
                    set: cfg.set.clone(),
                },
                &["algorithm=dense_baseline".into()],
            )?;
            let dir = run_dir(out_dir, &out_root, "compare".into());
            let entries = vec![(a.algorithm.name().to_string(), a), ("dense_baseline".to_string(), b)];
            if entries[0].0 == entries[1].0 {
                bail!("both compare slots use the dense baseline; give a randpol --config");
            }
            let report = harness::compare(&entries, &seeds, &dir)?;
            print!("{}", std::fs::read_to_string(dir.join("compare.txt"))?);
            println!("written to        {}", dir.display());
            if report.outcomes.iter().any(|o| o.diverged) {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::CountParams {
            cfg,
            obs_dim,
            privileged_dim,
            action_dim,
        } => {
            let base = load(&cfg, &[])?;
            let d = harness::env_dims(&base);
            let dims = EnvDims {
                obs: obs_dim.unwrap_or(d.obs),
                privileged: privileged_dim.unwrap_or(d.privileged),
                action: action_dim.unwrap_or(d.action),
            };
            println!(
                "dims: actor input {}, critic input {}, action {}",
                dims.obs, dims.privileged, dims.action
            );
            println!(
                "{:<16} {:>12} {:>12} {:>12} {:>12} {:>12}",
                "algorithm", "actor", "critic", "trainable", "frozen", "total"
            );
            let mut trainable = Vec::new();
            for alg in [Algorithm::Randpol, Algorithm::DenseBaseline] {
                let mut c = base.clone();
                c.algorithm = alg;
                let n = harness::model_counts(&c, dims)?;
                println!(
                    "{:<16} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    alg.name(),
                    n.actor_trainable,
                    n.critic_trainable,
                    n.trainable,
                    n.frozen,
                    n.total
                );
                trainable.push(n.trainable as f64);
            }
            println!("trainable ratio   {:.5}", trainable[0] / trainable[1]);
        }
        Cmd::Bench { cfg, seed, iterations } => {
            let mut extra = seed_override(seed);
            extra.push("algorithm=dense_baseline".into());
            let dense = load(&cfg, &extra)?;
            extra.pop();
            extra.push("algorithm=randpol".into());
            let mut randpol = load(&cfg, &extra)?;
            randpol.horizon = dense.horizon;
            randpol.num_envs = dense.num_envs;
            randpol.epochs = dense.epochs;
            randpol.minibatches = dense.minibatches;
            println!(
                "schedule: {} envs x {} steps, {} epochs x {} minibatches, {} iterations",
                dense.num_envs, dense.horizon, dense.epochs, dense.minibatches, iterations
            );
            println!(
                "{:<16} {:>12} {:>14} {:>10} {:>14}",
                "algorithm", "trainable", "learn_s/iter", "rel_std", "collect_s/iter"
            );
            for c in [&randpol, &dense] {
                let b = harness::bench(c, iterations)?;
                println!(
                    "{:<16} {:>12} {:>14.6} {:>9.1}% {:>14.6}",
                    b.label,
                    b.counts.trainable,
                    b.learn_mean_s,
                    100.0 * b.learn_rel_std,
                    b.collect_mean_s
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
