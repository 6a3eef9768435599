//! Command-line front end for the `friable` crate.

pub mod args;
pub mod commands;
pub mod context;
pub mod output;

use std::io::Write;

use args::Cli;
use commands::{execute, Outcome};
use context::Context;

/// Runs a parsed command line, writing results to `out`. Returns the exit
/// code: 0 on success, 1 when `selftest` finds a failing criterion, 2 for
/// invalid input and 3 when tables cannot be built, read or written.
pub fn run<W: Write>(cli: Cli, mut out: W, mut err: impl Write) -> i32 {
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            let _ = writeln!(err, "warning: thread pool already configured: {e}");
        }
    }
    let format = cli.global.format;
    let ctx = Context::new(cli.global);
    let result = execute(&cli.command, &ctx).and_then(|o: Outcome| {
        o.render(format.unwrap_or(o.default_format), &mut out)?;
        Ok(o.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_resource() {
                3
            } else {
                2
            }
        }
    }
}
