use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lattice_wiretap::report::{run, Command, Options};

/// Lattice wiretap codes: zeta functions, bounds, design criteria and
/// Monte Carlo simulation of the Alamouti wiretap channel.
#[derive(Parser)]
#[command(name = "lattice-wiretap", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Epstein or shifted zeta values next to their direct sums.
    Zeta(Options),
    /// Bounds on the eavesdropper's correct-decoding probability over an SNR grid.
    Bound(Options),
    /// Rank lattices by their design criterion.
    Criterion(Options),
    /// Monte Carlo estimate of the eavesdropper's correct-decoding rate.
    Simulate(Options),
    /// Dataset for figure 1-4.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        #[command(flatten)]
        opts: Options,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::Zeta(o) => (Command::Zeta, o),
        Cmd::Bound(o) => (Command::Bound, o),
        Cmd::Criterion(o) => (Command::Criterion, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Figure { id, opts } => (Command::Figure(id), opts),
    };
    let result = run(command, &opts).and_then(|report| match &report.params.out {
        Some(out) => report.write(out).map(|files| {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }),
        None => {
            let csv = report.table.to_csv()?;
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| lattice_wiretap::Error::Io(e.to_string()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
