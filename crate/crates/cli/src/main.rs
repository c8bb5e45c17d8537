mod args;
mod commands;
mod exit;
mod suites;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(exit::USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Build(a) => commands::build(a, &cli.global),
        Command::Check(a) => commands::check(a, &cli.global),
        Command::Tl(a) => commands::tl(a, &cli.global),
        Command::Report(a) => commands::report(a),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
