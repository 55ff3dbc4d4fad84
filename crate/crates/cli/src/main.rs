use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};
use nonat::error::USAGE_EXIT;
use nonat::{run, Command, Flags, RunConfig};

#[derive(Parser)]
#[command(
    name = "nonat",
    version,
    about = "Certificates and diagnostics for a non-AT Z2-extension of a translation action"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Flatness scans, density certificate and the SBH verdict
    Certify(Flags),
    /// Spectral coefficients by the direct and product routes
    Coeffs(Flags),
    /// Name separation and the AT ball bound at one level
    Names(Flags),
    /// Adversarial search for large SBH quadratic forms
    SbhSearch(Flags),
    /// Gauss sum, flatness and autocorrelation checks over a prime range
    GaussCheck(Flags),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_EXIT as u8),
            };
        }
    };
    let (command, flags) = match cli.command {
        Sub::Certify(f) => (Command::Certify, f),
        Sub::Coeffs(f) => (Command::Coeffs, f),
        Sub::Names(f) => (Command::Names, f),
        Sub::SbhSearch(f) => (Command::SbhSearch, f),
        Sub::GaussCheck(f) => (Command::GaussCheck, f),
    };
    let result = RunConfig::resolve(&flags).and_then(|cfg| run(command, &cfg).map(|r| (r, cfg.output)));
    match result {
        Ok(((report, outcome), format)) => {
            print!("{}", report.render(format));
            ExitCode::from(outcome.code() as u8)
        }
        Err(e) => {
            eprintln!("nonat {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
