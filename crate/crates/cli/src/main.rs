mod args;
mod commands;
mod config;
mod error;
mod ingest;
mod report;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::ErrorReport;

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Mediate(_) => "mediate",
        Command::Simulate(_) => "simulate",
        Command::Truth(_) => "truth",
        Command::Study(_) => "study",
        Command::ClosedForm(_) => "closed-form",
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Results are substream-keyed, so the pool size only affects speed.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let name = command_name(&cli.command);
    let result = match &cli.command {
        Command::Mediate(args) => commands::cmd_mediate(args),
        Command::Simulate(args) => commands::cmd_simulate(args),
        Command::Truth(args) => commands::cmd_truth(args),
        Command::Study(args) => commands::cmd_study(args),
        Command::ClosedForm(args) => commands::cmd_closed_form(args),
    };
    if let Err(err) = result {
        let body = serde_json::to_string(&ErrorReport::new(&err, Some(name)))
            .unwrap_or_else(|_| format!("{{\"kind\":\"{}\"}}", err.kind()));
        eprintln!("{body}");
        std::process::exit(1);
    }
}
