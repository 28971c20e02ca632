use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wdiomp::distributed::{transmission_cost, Scheme};
use wdiomp::experiments::{emit_csv, run_scenario, write_traces, Algorithm, MetricsReport, ScenarioConfig};

#[derive(Parser)]
#[command(name = "wdiomp", version, about = "Distributed sparse channel estimation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario over its configured training lengths.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Restrict the run to these training lengths.
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one scenario over an explicit range of training lengths.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 10)]
        t_min: usize,
        #[arg(long, default_value_t = 40)]
        t_max: usize,
        #[arg(long, default_value_t = 2)]
        t_step: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the cooperation trace (one JSON object per trial, round and user).
    Trace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long = "t")]
        t: usize,
        #[arg(long, default_value = "wdiomp")]
        algorithm: String,
        /// SNR profile tag; defaults to the first profile.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the support-estimation bit cost of both schemes.
    Cost {
        #[arg(long, default_value_t = 36)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        users: u64,
        #[arg(long, default_value_t = 20)]
        slots: u64,
        #[arg(long, default_value_t = 200)]
        atoms: usize,
        #[arg(long, default_value_t = 5)]
        sparsity: u64,
        #[arg(long, default_value_t = 6)]
        out_degree: u64,
    },
    /// Print a shipped preset as a config file.
    Preset { name: String },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: exp1, exp2 or exp3.
    #[arg(long)]
    preset: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path)?,
            (None, Some(name)) => ScenarioConfig::preset(name)
                .with_context(|| format!("unknown preset {name:?}; try one of {:?}", ScenarioConfig::PRESETS))?,
            (None, None) => unreachable!("clap requires one of them"),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        Ok(cfg)
    }
}

fn parse_algorithm(name: &str) -> Result<Algorithm> {
    Algorithm::ALL
        .into_iter()
        .find(|a| a.name() == name)
        .with_context(|| format!("unknown algorithm {name:?}"))
}

fn print_summary(report: &MetricsReport) {
    println!("{:<10} {:>4} {:<16} {:>8} {:>10} {:>8}", "algorithm", "T", "snr_tag", "asce", "nmse", "bits");
    for r in &report.rows {
        println!(
            "{:<10} {:>4} {:<16} {:>8.4} {:>10.4e} {:>8}",
            r.algorithm, r.t, r.snr_tag, r.asce, r.nmse, r.bits
        );
    }
}

fn execute(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let start = Instant::now();
    let report = run_scenario(cfg)?;
    emit_csv(&report, out)?;
    print_summary(&report);
    eprintln!(
        "{}: {} rows, {} trials per point, {:.1}s -> {}",
        cfg.name,
        report.rows.len(),
        cfg.trials,
        start.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, t, out } => {
            let mut cfg = scenario.load()?;
            if !t.is_empty() {
                cfg.t_list = t;
            }
            execute(&cfg, &out)
        }
        Command::Sweep {
            scenario,
            t_min,
            t_max,
            t_step,
            out,
        } => {
            if t_step == 0 || t_min > t_max {
                bail!("empty sweep {t_min}..={t_max} step {t_step}");
            }
            let mut cfg = scenario.load()?;
            cfg.t_list = (t_min..=t_max).step_by(t_step).collect();
            execute(&cfg, &out)
        }
        Command::Trace {
            scenario,
            t,
            algorithm,
            profile,
            out,
        } => {
            let mut cfg = scenario.load()?;
            cfg.t_list = vec![t];
            let algorithm = parse_algorithm(&algorithm)?;
            let profile_idx = match profile {
                None => 0,
                Some(tag) => cfg
                    .snr_profiles
                    .iter()
                    .position(|p| p.tag == tag)
                    .with_context(|| format!("no SNR profile tagged {tag:?}"))?,
            };
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut w = BufWriter::new(file);
            write_traces(&cfg, algorithm, t, profile_idx, cfg.trials, &mut w)?;
            w.flush().with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
        Command::Cost {
            q,
            users,
            slots,
            atoms,
            sparsity,
            out_degree,
        } => {
            let central = transmission_cost(Scheme::CentralizedSomp, q, users, slots, atoms, sparsity, out_degree);
            let coop = transmission_cost(Scheme::DiompFamily, q, users, slots, atoms, sparsity, out_degree);
            println!("centralized_somp {central}");
            println!("diomp_family {coop}");
            Ok(())
        }
        Command::Preset { name } => {
            let cfg = ScenarioConfig::preset(&name).with_context(|| format!("unknown preset {name:?}"))?;
            print!("{}", cfg.to_toml_string());
            Ok(())
        }
    }
}
