mod args;
mod bench;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Output;

fn run(cli: Cli) -> recapc_core::Result<()> {
    let out = Output::new(cli.out_dir);
    match &cli.command {
        Command::Gen(a) => commands::gen(a, &out),
        Command::Solve(a) => commands::solve(a, &out),
        Command::Walk(a) => commands::walk(a, &out),
        Command::Bench(a) => bench::bench(a, &out),
        Command::Simulate(a) => commands::simulate_cmd(a, &out),
        Command::Eval(a) => commands::eval(a),
        Command::Separator(a) => commands::separator(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let rendered = e.kind().as_str().map(str::to_string).unwrap_or_else(|| e.to_string());
            let detail = e
                .to_string()
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_string();
            let message = if detail.is_empty() { rendered } else { detail };
            eprintln!("error[usage]: {message}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
