mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, RulesAction};

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Rules { action: RulesAction::List { catalog, json } } => commands::rules_list(catalog, *json),
        Command::Subdivide(a) => commands::subdivide(a),
        Command::Cover(a) => commands::cover(a),
        Command::Growth(a) => commands::growth(a),
        Command::Cayley(a) => commands::cayley(a),
        Command::Pack(a) => commands::pack_cmd(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
