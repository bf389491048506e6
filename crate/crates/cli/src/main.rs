use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use geomconc_cli::config;
use geomconc_cli::run::{self, CliError, Command};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Component counts of random geometric graphs: experiment runner.
#[derive(Debug, Parser)]
#[command(name = "geomconc", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: config `output`, else `.`].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides the config and GEOMCONC_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

fn threads(args: &Args, cfg: &config::ExperimentConfig) -> Result<Option<usize>, config::ConfigError> {
    let env = match std::env::var("GEOMCONC_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| config::ConfigError::new("GEOMCONC_THREADS", format!("not a thread count: {v:?}")))?,
        ),
        Err(_) => None,
    };
    let n = args.threads.or(cfg.threads).or(env);
    if n == Some(0) {
        return Err(config::ConfigError::new("threads", "must be positive"));
    }
    Ok(n)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: --config {}: {e}", args.config.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Some(s) = args.seed {
        cfg.master_seed = Some(s);
    }
    match threads(&args, &cfg) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    let out = args.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| ".".into());
    match run::run(args.subcommand, &cfg, &out) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(CliError::Validation(e)) => {
            eprintln!("error: invalid config: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
