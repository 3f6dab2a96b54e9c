//! Batch front end: verification suites, norm sweeps, correlator queries and
//! sphere states, with JSON and CSV outputs.

mod commands;
mod config;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "confdisk",
    version,
    about = "Conformal ball embeddings, harmonic Hilbert spaces and their Wick algebra — batch verification and queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and emit a report.
    Verify(commands::verify::VerifyArgs),
    /// Sweep the divergence probe over separation ratios and cutoffs (CSV).
    NormSweep(commands::sweep::SweepArgs),
    /// Evaluate correlator queries from a JSON file.
    Npoint(commands::npoint::NpointArgs),
    /// Evaluate the sphere state of a configuration file.
    Sphere(commands::sphere::SphereArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => commands::verify::run(args),
        Command::NormSweep(args) => commands::sweep::run(args),
        Command::Npoint(args) => commands::npoint::run(args),
        Command::Sphere(args) => commands::sphere::run(args),
    };
    std::process::exit(match code {
        Ok(all_passed) => {
            if all_passed {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    });
}
