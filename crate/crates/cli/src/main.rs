//! `pentagram`: verification and simulation commands.
//!
//! Exit codes: 0 pass or report, 1 failed check or internal defect, 2 usage
//! or parse error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use report::{OutDir, Outcome};

#[derive(Parser)]
#[command(
    name = "pentagram",
    version,
    about = "Exact checks and simulations on the three-qubit pentagram"
)]
struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Directory for written artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Master seed for randomized commands (required by `simulate` and `genkey`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BasisFilter {
    All,
    Pure,
    Hybrid,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Uniform,
    Fixed,
    RoundRobin,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OrderArg {
    AliceFirst,
    BobFirst,
}

#[derive(Subcommand)]
enum Command {
    /// Check commutation and product signs of the five edges.
    VerifyPentagram {
        /// Flip the expected sign of E5 (forces a failure).
        #[arg(long)]
        flip_e5: bool,
    },
    /// Build the 40 rays and write rays.json.
    Atlas,
    /// List orthogonal bases of the ray set.
    Bases {
        #[arg(long, value_enum, default_value = "all")]
        kind: BasisFilter,
    },
    /// Print the outcome-label grid of a scheme file and write table.json.
    Table { scheme: PathBuf },
    /// Compare the bundled scheme's label grid with the reference grid.
    VerifyFig2 {
        /// Check this scheme file instead of the bundled one.
        #[arg(long)]
        scheme: Option<PathBuf>,
    },
    /// Parity proof of a scheme, confirmed by exhaustive search.
    ProveBks { scheme: PathBuf },
    /// Brute-force the 1024 sign assignments of the ten observables.
    Mermin,
    /// Count even-coverage sets of bases of a given size.
    Enumerate {
        #[arg(long, default_value_t = 11)]
        size: usize,
        /// Also write every scheme to schemes.json.
        #[arg(long)]
        dump: bool,
    },
    /// Run the two-party protocol and write runs.jsonl.
    Simulate {
        #[arg(long)]
        trials: u64,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Alice's row: index 1..11, `pivot | Ex {a,b} ; Ey {c,d}`, or `Ex-Ey+`/`Ex-Ey-`.
        #[arg(long)]
        alice: Option<String>,
        /// Bob's row, same forms as --alice.
        #[arg(long)]
        bob: Option<String>,
        #[arg(long, value_enum, default_value = "alice-first")]
        order: OrderArg,
    },
    /// Run uniform trials, sift an octal key and check a revealed sample.
    Genkey {
        #[arg(long)]
        trials: u64,
        /// Fraction of sifted letters revealed for comparison.
        #[arg(long, default_value_t = 0.1)]
        reveal: f64,
    },
}

fn require_seed(seed: Option<u64>) -> Result<u64, report::Failure> {
    seed.ok_or_else(|| report::Failure::usage("--seed is required for randomized commands"))
}

fn run(cli: &Cli) -> Result<Outcome, report::Failure> {
    let out = OutDir::new(cli.out.clone());
    match &cli.command {
        Command::VerifyPentagram { flip_e5 } => commands::verify_pentagram(*flip_e5),
        Command::Atlas => commands::atlas(&out),
        Command::Bases { kind } => commands::bases(*kind),
        Command::Table { scheme } => commands::table(scheme, &out),
        Command::VerifyFig2 { scheme } => commands::verify_fig2(scheme.as_deref()),
        Command::ProveBks { scheme } => commands::prove_bks(scheme),
        Command::Mermin => commands::mermin(),
        Command::Enumerate { size, dump } => commands::enumerate(*size, *dump, &out),
        Command::Simulate {
            trials,
            policy,
            alice,
            bob,
            order,
        } => commands::simulate(
            &commands::SimulateArgs {
                trials: *trials,
                seed: require_seed(cli.seed)?,
                policy: *policy,
                alice: alice.as_deref(),
                bob: bob.as_deref(),
                order: *order,
            },
            &out,
        ),
        Command::Genkey { trials, reveal } => {
            commands::genkey(*trials, require_seed(cli.seed)?, *reveal, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            outcome.emit(cli.json);
            outcome.status.exit_code()
        }
        Err(failure) => {
            if cli.json {
                let doc = serde_json::json!({
                    "status": if failure.code == 2 { "usage-error" } else { "error" },
                    "error": failure.message,
                });
                println!("{doc}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
