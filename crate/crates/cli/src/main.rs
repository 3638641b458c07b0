//! `dauction` — run diffusion auctions from the shell.
//!
//! Exit codes: 0 success, 1 property violation found, 2 validation or
//! parse error, 3 empty market, 4 size-guard refusal.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dauction_core::{Error, Mechanism};

#[derive(Parser)]
#[command(
    name = "dauction",
    version,
    about = "Diffusion auctions on social networks",
    after_help = "Set DAUCTION_LOG=debug for diagnostics on stderr."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MechanismArg {
    Fdm,
    Idm,
    Vcg,
    /// Run all three and print their outcomes back to back.
    All,
}

impl MechanismArg {
    fn mechanisms(self) -> Vec<Mechanism> {
        match self {
            MechanismArg::Fdm => vec![Mechanism::Fdm],
            MechanismArg::Idm => vec![Mechanism::Idm],
            MechanismArg::Vcg => vec![Mechanism::Vcg],
            MechanismArg::All => Mechanism::ALL.to_vec(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Ir,
    Ic,
    Revenue,
    Oracle,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run one auction on an instance file and print the outcome.
    Run {
        /// Instance file (JSON).
        file: PathBuf,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        /// Write a machine-readable outcome dump to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Override a reported valuation, e.g. --bid b=8 or --bid l=32/3.
        #[arg(long = "bid", value_name = "ID=VALUE")]
        bids: Vec<String>,
        /// Override an invited set, e.g. --invite "b=e,f" (empty allowed).
        #[arg(long = "invite", value_name = "ID=LIST")]
        invites: Vec<String>,
        /// Make a buyer take no action at all.
        #[arg(long = "nil", value_name = "ID")]
        nils: Vec<String>,
        /// Break bid ties with a seeded random priority instead of the
        /// first-listed buyer.
        #[arg(long, value_name = "SEED")]
        tie_seed: Option<u64>,
        /// Also print summary metrics (beneficial buyers, critical
        /// ancestors, ratio). Truthful reports only.
        #[arg(long, conflicts_with_all = ["bids", "invites", "nils"])]
        metrics: bool,
    },
    /// Generate instance files from a seeded random family.
    Gen {
        /// e.g. "erdos_renyi(10,0.3)", "watts_strogatz(12,4,0.1)",
        /// "random_tree(9)", "star(6)".
        #[arg(long)]
        generator: String,
        /// e.g. "uniform_int(1,100)" or "exp_int(20)".
        #[arg(long, default_value = "uniform_int(1,100)")]
        valuations: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Directory for the generated files; stdout when omitted and
        /// count is 1.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a batch experiment from a config file and write a CSV.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check mechanism properties on an instance file or a generated
    /// batch.
    Verify {
        /// Instance file; omit when using --config.
        file: Option<PathBuf>,
        /// Experiment config describing a generated batch.
        #[arg(long, conflicts_with = "file")]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Run the property detectors against a deliberately broken
        /// mechanism; they must report violations.
        #[arg(long)]
        self_test: bool,
        /// Write the property reports as JSON to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the built-in reference instance file.
    Fixture {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DAUCTION_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            file,
            mechanism,
            dump,
            bids,
            invites,
            nils,
            tie_seed,
            metrics,
        } => commands::run(
            &file,
            &mechanism.mechanisms(),
            dump.as_deref(),
            &bids,
            &invites,
            &nils,
            tie_seed,
            metrics,
        ),
        Command::Gen {
            generator,
            valuations,
            seed,
            count,
            out_dir,
        } => commands::gen(&generator, &valuations, seed, count, out_dir.as_deref()),
        Command::Experiment { config, out } => commands::experiment(&config, &out),
        Command::Verify {
            file,
            config,
            suite,
            self_test,
            report,
        } => commands::verify(file.as_deref(), config.as_deref(), suite, self_test, report.as_deref()),
        Command::Fixture { out } => commands::fixture(out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NoParticipants => 3,
        Error::SizeGuard { .. } => 4,
        _ => 2,
    }
}
