use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stl_qlearn::experiment::{
    run_evaluate, run_inspect, run_monitor, run_train, ExperimentConfig, ExperimentError,
};
use stl_qlearn::learning::ObjectiveKind;

/// Learn and check STL-constrained policies on the grid robot.
#[derive(Parser)]
#[command(name = "stlq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy and write artifacts.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "artifacts")]
        out: PathBuf,
        /// max_probability or max_robustness
        #[arg(long)]
        objective: Option<String>,
    },
    /// Greedy rollouts of a trained policy.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        artifacts: PathBuf,
        #[arg(long)]
        rollouts: Option<usize>,
        #[arg(long)]
        objective: Option<String>,
    },
    /// Check a signal CSV against a formula (text or file).
    Monitor {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        signal: PathBuf,
    },
    /// Dump the tau-state table as CSV.
    Inspect {
        #[arg(long)]
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, objective: Option<&str>) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(o) = objective {
        cfg.learning.objective = ObjectiveKind::parse(o)
            .ok_or_else(|| ExperimentError::Config(format!("unknown objective `{o}`")))?;
    }
    Ok(cfg)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |v| format!("{v:.4}"))
}

fn run(cli: Cli) -> Result<u8, ExperimentError> {
    match cli.command {
        Command::Train {
            config,
            seed,
            out,
            objective,
        } => {
            let mut cfg = load(&config, objective.as_deref())?;
            if let Some(s) = seed {
                cfg.learning.seed = s;
            }
            let s = run_train(&cfg, &out)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("tau-states: {} (SAT {}, UNSAT {}, MIXED {})", s.states, s.sat, s.unsat, s.mixed);
            println!("episodes: {} of length {}", s.episodes, s.horizon);
            println!("construction time: {:.3}s", s.build_time.as_secs_f64());
            println!("training time: {:.3}s", s.train_time.as_secs_f64());
            println!("artifacts: {}", out.display());
        }
        Command::Evaluate {
            config,
            artifacts,
            rollouts,
            objective,
        } => {
            let cfg = load(&config, objective.as_deref())?;
            let r = run_evaluate(&cfg, &artifacts, rollouts)?;
            println!("rollouts: {}", r.rollouts);
            println!("satisfaction probability: {}", opt(r.p_hat));
            println!("mean robustness: {}", opt(r.mean));
            println!("std robustness: {}", opt(r.std));
            println!("trace reaches satisfying set: {}", opt(r.abstract_eps));
            if r.soundness_violations > 0 {
                eprintln!("warning: {} rollouts disagree with the Boolean monitor", r.soundness_violations);
            }
            println!("evaluation time: {:.3}s", r.elapsed.as_secs_f64());
        }
        Command::Monitor { formula, signal } => {
            let (sat, rob) = run_monitor(&formula, &signal)?;
            println!("satisfied: {sat}");
            println!("robustness: {rob}");
            if !sat {
                return Ok(3);
            }
        }
        Command::Inspect { config, out } => {
            let cfg = load(&config, None)?;
            let s = match &out {
                Some(p) => run_inspect(&cfg, std::fs::File::create(p)?)?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    let s = run_inspect(&cfg, &mut lock)?;
                    lock.flush()?;
                    s
                }
            };
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("tau-states: {} (SAT {}, UNSAT {}, MIXED {})", s.states, s.sat, s.unsat, s.mixed);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
