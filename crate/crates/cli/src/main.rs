//! `depthsep`: build the hard radial function and its 3-layer network,
//! verify the numeric lemmas behind the construction, sample the measure,
//! and sweep 2-layer training widths against the built target.
//!
//! Exit codes: 0 success, 1 hard check failure (or a fatal numeric
//! error), 2 usage/config error.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use depthsep_core::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "depthsep", version, about = "radial depth-separation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Config file: one `key = value` per line, `#` comments.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread cap; 0 = all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the lemma-check suite and write reports.csv.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Restrict to one lemma id (e.g. rd_bounds).
        #[arg(long)]
        only: Option<String>,
    },
    /// Build the interval family, select signs, compile the 3-layer net.
    Build {
        #[command(flatten)]
        common: Common,
    },
    /// Train 2-layer networks of swept widths against the built target.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Draw points from μ and write them as CSV.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Number of points.
        #[arg(long, short = 'n')]
        count: Option<usize>,
    },
    /// Evaluate a built 3-layer net against the hard function.
    Eval {
        #[command(flatten)]
        common: Common,
    },
}

fn assemble(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.load_file(path)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    cfg.validate()?;
    if cfg.threads > 0 {
        // a second invocation in-process keeps the first pool; that's fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    std::fs::create_dir_all(&cfg.out)?;
    Ok(cfg)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<u8, Error> {
        match &cli.command {
            Command::Verify { common, only } => {
                let cfg = assemble(common)?;
                commands::cmd_verify(&cfg, only.as_deref())
            }
            Command::Build { common } => {
                let cfg = assemble(common)?;
                commands::cmd_build(&cfg)
            }
            Command::Sweep { common } => {
                let cfg = assemble(common)?;
                commands::cmd_sweep(&cfg)
            }
            Command::Sample { common, count } => {
                let mut cfg = assemble(common)?;
                if let Some(c) = count {
                    cfg.sample_count = *c;
                }
                commands::cmd_sample(&cfg)
            }
            Command::Eval { common } => {
                let cfg = assemble(common)?;
                commands::cmd_eval(&cfg)
            }
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
