use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::{CliError, Session};

#[derive(Debug, Parser)]
#[command(
    name = "typelattice",
    version,
    about = "Types of rank-1 groups and rational cotorsion theories"
)]
struct Cli {
    /// Number of prime cells in the session indexing.
    #[arg(long = "modulus", global = true, default_value_t = 16)]
    modulus: usize,

    /// Largest m checked by the infinite-rank witness verifier.
    #[arg(long = "m-max", global = true, default_value_t = 8)]
    m_max: u32,

    /// Largest k checked by the infinite-rank witness verifier.
    #[arg(long = "k-max", global = true, default_value_t = 8)]
    k_max: u32,

    /// Number of primes checked by the infinite-rank witness verifier.
    #[arg(long = "primes", global = true, default_value_t = 40)]
    primes: usize,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare two types: equivalent, less, greater or incomparable.
    Cmp { left: String, right: String },
    /// Pointwise maximum of two types.
    Join { left: String, right: String },
    /// Pointwise minimum of two types.
    Meet { left: String, right: String },
    /// Decide Ext(T, X) = 0 for rank-1 groups of the given types.
    Ext { t: String, x: String },
    /// Classify a strict pair, build a separating witness and verify it.
    Separate { lower: String, upper: String },
    /// Embed a power set or a poset into the lattice of types.
    Embed(EmbedArgs),
    /// Run the randomized invariant suites.
    Selftest {
        /// Random cases per suite.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Largest power set checked exhaustively.
        #[arg(long = "powerset-max", default_value_t = 6)]
        powerset_max: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct EmbedArgs {
    /// Embed the power set of {0..n-1}.
    #[arg(long)]
    powerset: Option<usize>,
    /// Embed the poset described by a JSON file {"n": .., "le": [[a, b], ..]}.
    #[arg(long)]
    poset: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let session = match Session::new(
        cli.modulus,
        cli.m_max,
        cli.k_max,
        cli.primes,
        cli.seed,
        cli.json,
    ) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let result = match &cli.command {
        Command::Cmp { left, right } => session.cmp(left, right),
        Command::Join { left, right } => session.join(left, right),
        Command::Meet { left, right } => session.meet(left, right),
        Command::Ext { t, x } => session.ext(t, x),
        Command::Separate { lower, upper } => session.separate(lower, upper),
        Command::Embed(args) => match (args.powerset, &args.poset) {
            (Some(n), _) => session.embed_powerset(n),
            (None, Some(path)) => session.embed_poset(path),
            (None, None) => Err(CliError::Usage("embed needs --powerset or --poset".into())),
        },
        Command::Selftest {
            trials,
            powerset_max,
        } => session.selftest(*trials, *powerset_max),
    };
    match result {
        Ok(output) => {
            print!("{}", output.body);
            ExitCode::from(output.code)
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.code())
}
