use std::path::PathBuf;
use std::process::ExitCode;

use cartan::cli::{self, Command, Options};
use clap::{Parser, ValueEnum};
use num_rational::BigRational;

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    CheckElement,
    Characters,
    CartanTest,
    Prolong,
    Torsion,
    Symbol,
    Charvar,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::CheckElement => Command::CheckElement,
            Cmd::Characters => Command::Characters,
            Cmd::CartanTest => Command::CartanTest,
            Cmd::Prolong => Command::Prolong,
            Cmd::Torsion => Command::Torsion,
            Cmd::Symbol => Command::Symbol,
            Cmd::Charvar => Command::Charvar,
        }
    }
}

/// Cartan's test, prolongation and characteristic varieties for exterior
/// differential systems.
#[derive(Parser)]
#[command(name = "cartan", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// A `.eds` file.
    file: PathBuf,
    /// Print the JSON report.
    #[arg(long)]
    json: bool,
    /// Seed for the generic flag and for free chart unknowns.
    #[arg(long)]
    seed: Option<u64>,
    /// With `prolong`: alternate Cartan's test and prolongation up to N times.
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,
    /// With `torsion`: set the first torsion entry to zero, solving for SYMBOL,
    /// and rerun Cartan's test.
    #[arg(long, value_name = "SYMBOL")]
    solve_for: Option<String>,
    /// With `prolong`: comma separated names for the new coordinates.
    #[arg(long, value_delimiter = ',')]
    names: Option<Vec<String>>,
    /// With `symbol`: comma separated components of the covector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<BigRational>>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        json: args.json,
        seed: args.seed,
        max_steps: args.max_steps,
        solve_for: args.solve_for,
        names: args.names,
        xi: args.xi,
    };
    let out = cli::run(args.command.into(), &text, &opts);
    print!("{}", out.stdout);
    ExitCode::from(out.code as u8)
}
