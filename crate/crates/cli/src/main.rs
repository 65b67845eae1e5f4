use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod io;

use commands::{ApproxArgs, ExactArgs, McArgs, ScanArgs, Status, VerifyArgs};

/// Exact, approximate and simulated first-passage functionals of random walks
/// killed at zero.
#[derive(Parser)]
#[command(name = "fpwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Survival table, stopping profile and ladder moments of a lattice walk
    Exact(ExactArgs),
    /// Corrected diffusion approximation and bound envelopes
    Approx(ApproxArgs),
    /// Seeded Monte Carlo estimates
    Mc(McArgs),
    /// Check the inequalities over parameter grids
    Verify(VerifyArgs),
    /// Overshoot scan and error-rate sweep
    Scan(ScanArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact(a) => commands::exact(a),
        Command::Approx(a) => commands::approx(a),
        Command::Mc(a) => commands::mc(a),
        Command::Verify(a) => commands::verify(a),
        Command::Scan(a) => commands::scan(a),
    };
    match result {
        Ok(Status::Violation) => {
            eprintln!("fpwalk: an explicit-constant bound was violated");
            Status::Violation.into()
        }
        Ok(s) => s.into(),
        Err(e) => {
            eprintln!("fpwalk: {e}");
            ExitCode::from(2)
        }
    }
}
