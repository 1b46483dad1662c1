//! `grigid`: command-line front end. Each subcommand writes a certificate
//! report (or an SVG for `render`) and exits 0 on PASS/INFO, 1 on any FAIL
//! and 2 on usage or input errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("grigid: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("grigid: {e:#}");
            ExitCode::from(2)
        }
    }
}
