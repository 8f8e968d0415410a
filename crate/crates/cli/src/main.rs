//! `mbot`: command-line driver for mini-batch optimal transport experiments.
//!
//! Every subcommand writes its outputs plus a `manifest.json` into `--out`.
//! Exit codes: 0 success, 2 invalid input, 3 no accepted ABC sample,
//! 4 internal consistency failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use minibatch_ot::Error;

use args::{Cli, Command};
use output::Output;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Config(_) | Error::Io(_) => 2,
        Error::NoAcceptance { .. } => 3,
        Error::Internal(_) => 4,
    }
}

fn run(cli: &Cli, threads: usize) -> minibatch_ot::Result<std::path::PathBuf> {
    let mut out = Output::new(&cli.out)?;
    let summary = match &cli.command {
        Command::Plan(a) => commands::plan(a, &mut out)?,
        Command::Flow(a) => commands::flow(a, &mut out)?,
        Command::Color(a) => commands::color(a, &mut out)?,
        Command::Abc(a) => commands::abc(a, &mut out)?,
        Command::Bench(a) => commands::bench(a, &mut out)?,
    };
    let config = serde_json::to_value(&cli.command).expect("arguments serialize");
    out.finish(
        cli.command.name(),
        config,
        threads,
        summary.seeds,
        summary.results,
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli, pool.current_num_threads())) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
