//! Configuration-driven entry point.
//!
//! Exit status: 0 all checks pass, 2 a property or stability check failed,
//! 3 a continuation path failed, 4 the configuration was rejected, 1 any
//! other error (for example writing the output directory).

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{config_hash, ExperimentConfig, Mode};
pub use report::{payload_json, write_artifacts};
pub use run::{run, RunReport, Status, EXIT_CONFIG, EXIT_INTERNAL, EXIT_PASS, EXIT_PATH_FAILURE, EXIT_VIOLATION};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "dhym", version, about = "dHYM phase algebra, torus solver and stability checks")]
pub struct Args {
    /// TOML experiment document; every key has a default.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the document's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: machine parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error [{}]: {e}", e.reason_code());
    exit_for(e)
}

fn execute(args: &Args) -> Result<i32, Error> {
    let mut config = match &args.config {
        Some(path) => config::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));
    let resolved = config.resolve()?;
    let report = run::run_resolved(&resolved)?;
    write_artifacts(&report, &out, resolved.config.output.dump_fields)?;
    if !args.quiet {
        let p = &report.payload;
        println!(
            "{} seed={} status={} exit={} config={}",
            p.mode.name(),
            resolved.config.seed,
            serde_json::to_value(p.status).expect("status serializes").as_str().unwrap_or(""),
            p.exit_code,
            &report.config_hash[..12],
        );
        for name in &p.failed {
            println!("failed: {name}");
        }
        println!("report: {}", out.join("report.json").display());
    }
    Ok(report.exit_code())
}

/// Parses flags, runs on a pool of the requested size and returns the exit
/// status.
pub fn main_with(args: Args) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = args.threads {
        if k == 0 {
            return fail(&Error::config("threads", "--threads must be positive"));
        }
        pool = pool.num_threads(k);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return fail(&Error::Io(e.to_string())),
    };
    pool.install(|| execute(&args)).unwrap_or_else(|e| fail(&e))
}
