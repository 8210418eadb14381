//! Command-line and HTTP front ends for `sra-core`.

pub mod cli;
pub mod ops;
pub mod server;

use std::process::ExitCode;

use clap::Parser;

/// Exit status for domain errors such as `NoSolution` or `Unreachable`.
/// Usage errors exit with 2 through clap.
pub const EXIT_DOMAIN_ERROR: u8 = 1;

pub fn main_entry() -> ExitCode {
    let args = cli::Cli::parse();
    if let cli::Command::Serve(s) = &args.command {
        let runtime = match tokio::runtime::Runtime::new() {
            Ok(rt) => rt,
            Err(e) => {
                eprintln!("error: cannot start runtime: {e}");
                return ExitCode::FAILURE;
            }
        };
        return match runtime.block_on(server::serve(s.port)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot serve on port {}: {e}", s.port);
                ExitCode::FAILURE
            }
        };
    }
    match cli::render(&args.command) {
        Ok(out) => match out.path {
            Some(path) => match std::fs::write(&path, out.text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(EXIT_DOMAIN_ERROR)
                }
            },
            None => {
                print!("{}", out.text);
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {}: {}", e.name(), e.detail());
            ExitCode::from(EXIT_DOMAIN_ERROR)
        }
    }
}
