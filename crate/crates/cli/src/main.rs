use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use vaclab_cli::{run, Command, ExperimentConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sub {
    Minimize,
    EnergyProfile,
    BadDiscs,
    Monotonicity,
    MaxPrinciple,
    Competitor,
    Bootstrap,
    VerifyPotential,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Minimize => Command::Minimize,
            Sub::EnergyProfile => Command::EnergyProfile,
            Sub::BadDiscs => Command::BadDiscs,
            Sub::Monotonicity => Command::Monotonicity,
            Sub::MaxPrinciple => Command::MaxPrinciple,
            Sub::Competitor => Command::Competitor,
            Sub::Bootstrap => Command::Bootstrap,
            Sub::VerifyPotential => Command::VerifyPotential,
        }
    }
}

/// Run one vaclab experiment.
///
/// Exit codes: 0 ok, 1 I/O error, 2 config error, 3 solver divergence,
/// 4 invariant violation.
#[derive(Parser, Debug)]
#[command(name = "vaclab", version)]
struct Args {
    #[arg(value_enum)]
    command: Sub,
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(t) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    match run(&cfg, args.command.into(), &out) {
        Ok(o) => {
            for a in &o.artifacts {
                println!("{}", a.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
