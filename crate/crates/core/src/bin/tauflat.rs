use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tauflat::commands::{self, Outcome, Settings, Status};
use tauflat::{Error, Limits};

#[derive(Parser)]
#[command(name = "tauflat", version, about = "Strongly abelian congruences, flat sorted algebras and graph interpretation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Term arity used by term conditions and boxmap scans.
    #[arg(long, global = true)]
    arity_bound: Option<usize>,
    /// Cap on the elements of any generated structure.
    #[arg(long, global = true, default_value_t = Limits::default().max_elements)]
    max_elements: usize,
    /// Cap on tables or term applications enumerated.
    #[arg(long, global = true, default_value_t = Limits::default().max_tables)]
    max_tables: usize,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a congruence and run both term conditions on it.
    Analyze { algebra: PathBuf, congruence: PathBuf },
    /// List the strongly abelian congruences and the radical candidate.
    Radical { algebra: PathBuf },
    /// Decomposition arities, coordinatizations and violating boxmaps.
    Boxmaps { algebra: PathBuf, congruence: PathBuf },
    /// Build the flat sorted algebra and dump it.
    Flat {
        algebra: PathBuf,
        congruence: PathBuf,
        /// Where to write the dump; standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a flat algebra dump is essentially unary.
    CheckUnary { dump: PathBuf },
    /// Encode a bipartite graph and recover it from the definable relations.
    Interpret {
        algebra: PathBuf,
        congruence: PathBuf,
        graph: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, (i32, String)> {
    fs::read_to_string(path).map_err(|e| (2, format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Outcome, (i32, String)> {
    let settings = Settings {
        arity_bound: cli.common.arity_bound,
        limits: Limits {
            max_tables: cli.common.max_tables,
            max_elements: cli.common.max_elements,
        },
    };
    let fail = |e: Error| (commands::exit_code(&e), e.to_string());
    let outcome = match &cli.command {
        Command::Analyze { algebra, congruence } => {
            commands::analyze(&read(algebra)?, &read(congruence)?, &settings).map_err(fail)?
        }
        Command::Radical { algebra } => commands::radical(&read(algebra)?, &settings).map_err(fail)?,
        Command::Boxmaps { algebra, congruence } => {
            commands::boxmaps(&read(algebra)?, &read(congruence)?, &settings).map_err(fail)?
        }
        Command::Flat { algebra, congruence, out } => {
            let (outcome, dump) = commands::flat(&read(algebra)?, &read(congruence)?, &settings).map_err(fail)?;
            match out {
                Some(path) => fs::write(path, dump).map_err(|e| (2, format!("cannot write {}: {e}", path.display())))?,
                None => print!("{dump}"),
            }
            outcome
        }
        Command::CheckUnary { dump } => commands::check_unary(&read(dump)?, &settings).map_err(fail)?,
        Command::Interpret { algebra, congruence, graph } => {
            commands::interpret(&read(algebra)?, &read(congruence)?, &read(graph)?, &settings).map_err(fail)?
        }
    };
    if let Some(path) = &cli.common.report {
        fs::write(path, &outcome.report).map_err(|e| (2, format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            match outcome.status {
                Status::Verified => ExitCode::SUCCESS,
                Status::Mismatch => ExitCode::from(1),
            }
        }
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
