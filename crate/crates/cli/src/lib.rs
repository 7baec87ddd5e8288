//! Command-line front end.
//!
//! Invoked with a subcommand (`weights`, `trace`, `simulate`) it parses
//! long-form flags; otherwise it behaves as the classic smoothing program
//! (see [`reference`]).

pub mod commands;
pub mod input;
pub mod reference;

use std::io::Write;

use clap::Parser;

use crate::commands::{Cli, Command, SUBCOMMANDS};

/// Run with the full argument vector (program name first). Returns the exit
/// status.
pub fn run<O: Write, E: Write>(args: &[String], out: &mut O, err: &mut E) -> i32 {
    let is_subcommand = args
        .get(1)
        .is_some_and(|a| SUBCOMMANDS.contains(&a.as_str()));
    if !is_subcommand {
        return reference::smooth_command(args, out, err);
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Weights(a) => commands::weights(a, out),
        Command::Trace(a) => commands::trace(a, out),
        Command::Simulate(a) => commands::simulate(a, out, err),
    };
    match result.and_then(|()| out.flush().map_err(Into::into)) {
        Ok(()) => 0,
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}
