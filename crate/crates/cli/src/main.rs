//! `lpkit`: split graphs, score baselines, embed, rate attributes, train,
//! evaluate and run whole pipelines from a config.
//!
//! Exit status is 0 on success, 1 on a runtime failure and 2 on a usage or
//! config error (bad flags, missing inputs, inconsistent options).

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    // clap prints its own message and exits with status 2 on bad usage
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Split(a) => commands::split(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Embed(a) => commands::embed(a),
        Command::Attrs(args::AttrsCommand::Score(a)) => commands::attrs_score(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Diagnose(d) => commands::diagnose(d),
        Command::Run(a) => commands::run(a),
        Command::Rerun(a) => commands::rerun(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
