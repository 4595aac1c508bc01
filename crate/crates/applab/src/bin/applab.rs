use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::info;

use applab::cli::{self, Experiment, ExperimentConfig};

/// stdout may be a closed pipe (`applab describe x | head`); drop the error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

/// Operator experiment runner; see `applab describe <experiment>` for the
/// CSV schemas and config fields.
#[derive(Parser, Debug)]
#[command(name = "applab", version, about)]
struct Args {
    /// validate | eval | moments | limits | verify-paper | rates | dbv |
    /// describe
    command: String,
    /// Experiment name when the command is `describe`.
    name: Option<String>,
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker pool size; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory the CSV files land in; defaults to the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("APPLAB_LOG")).init();
    let args = Args::parse();
    let code = dispatch(&args);
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn fail(e: &cli::CliError) -> i32 {
    eprintln!("{e}");
    e.exit_code()
}

fn dispatch(args: &Args) -> i32 {
    if args.command == "describe" {
        return match &args.name {
            Some(name) => match cli::describe(name) {
                Some(text) => {
                    emit(text);
                    emit(
                        "exit codes: 0 ok, 1 malformed config, 2 bound violation, \
                         3 validation failure, 4 numerical non-convergence",
                    );
                    0
                }
                None => {
                    eprintln!("unknown experiment '{name}'");
                    1
                }
            },
            None => {
                eprintln!("usage: applab describe <experiment>");
                1
            }
        };
    }

    let Some(experiment) = Experiment::parse(&args.command) else {
        eprintln!(
            "unknown command '{}' (expected describe or one of validate, eval, moments, \
             limits, verify-paper, rates, dbv)",
            args.command
        );
        return 1;
    };
    let Some(config_path) = &args.config else {
        eprintln!("--config <path> is required for experiment runs");
        return 1;
    };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", config_path.display());
            return 1;
        }
    };
    let cfg = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cfg.experiment != experiment {
        eprintln!(
            "command '{}' does not match config experiment '{}'",
            experiment.as_str(),
            cfg.experiment.as_str()
        );
        return 1;
    }

    let threads = args
        .threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(usize::from)
                .unwrap_or(1)
        })
        .max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot build a {threads}-thread pool: {e}");
            return 1;
        }
    };
    info!(
        "running {} with {threads} threads from {}",
        experiment.as_str(),
        config_path.display()
    );

    let out = match cli::run(&cfg, &pool) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for report in &out.reports {
        match report.write(&dir) {
            Ok(path) => info!("wrote {} ({} rows)", path.display(), report.rows.len()),
            Err(e) => return fail(&e),
        }
    }
    for line in &out.summary {
        emit(line);
    }
    if out.validation_failures > 0 {
        eprintln!("{} validation checks failed", out.validation_failures);
        return 3;
    }
    if out.violations > 0 {
        eprintln!("{} bound rows violated", out.violations);
        return 2;
    }
    0
}
