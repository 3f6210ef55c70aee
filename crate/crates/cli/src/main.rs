use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qubit_chern::commands::{cmd_chern, cmd_oracle, cmd_ramprate, cmd_tomography, cmd_transition, Report};
use qubit_chern::config::ExperimentConfig;

/// Berry curvature and Chern number of a ramped qubit, from its nonadiabatic response.
#[derive(Parser, Debug)]
#[command(name = "qubit-chern", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bloch vector at every tomography time of one ramp.
    Tomography(Common),
    /// Curvature profile and Chern number of one ramp.
    Chern(Common),
    /// Chern number against delta2/delta1 for each transition ramp time.
    Transition(Common),
    /// Chern number and curvature map against ramp time.
    RampRate(Common),
    /// Closed-form curvature, lattice Chern number and adiabatic consistency.
    Oracle(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` config file; unset keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV. Extra tables go next to it as `<stem>.<name>.csv`.
    /// Without it all tables are written to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per tomography axis, or `exact` for expectation values.
    #[arg(long, value_name = "N|exact")]
    shots: Option<String>,
    /// Coherent evolution (no T1/T2* processes).
    #[arg(long)]
    no_dissipation: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Override any config key, e.g. `--set delta2_mhz=45`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        for kv in &self.overrides {
            let Some((key, value)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{kv}`");
            };
            cfg.set(key.trim(), value.trim())?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(shots) = &self.shots {
            cfg.set("shots", shots)?;
        }
        if self.no_dissipation {
            cfg.dissipation = false;
        }
        Ok(cfg)
    }
}

fn table_path(out: &Path, name: &str) -> PathBuf {
    if name.is_empty() {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}.{name}.csv"))
}

fn write_report(report: &Report, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(out) => {
            for table in &report.tables {
                let path = table_path(out, table.name);
                std::fs::write(&path, &table.text).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            for table in &report.tables {
                print!("{}", table.text);
            }
        }
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (common, cmd): (&Common, fn(&ExperimentConfig) -> qubit_chern::Result<Report>) = match &cli.command {
        Command::Tomography(c) => (c, cmd_tomography),
        Command::Chern(c) => (c, cmd_chern),
        Command::Transition(c) => (c, cmd_transition),
        Command::RampRate(c) => (c, cmd_ramprate),
        Command::Oracle(c) => (c, cmd_oracle),
    };
    let cfg = common.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let report = pool.install(|| cmd(&cfg))?;
    write_report(&report, common.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
