use std::io::{stderr, stdout};
use std::process::ExitCode;

use clap::Parser;
use friable_cli::args::Cli;

fn main() -> ExitCode {
    let code = friable_cli::run(Cli::parse(), stdout().lock(), stderr().lock());
    ExitCode::from(code as u8)
}
