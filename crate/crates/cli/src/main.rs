//! `cbn`: analyses of constrained Bayesian networks from the command line.
//!
//! Exit codes: 0 success / holds, 1 fails / violations found, 2 unknown or
//! timeout, 3 usage error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Fail = 1,
    Unknown = 2,
    Usage = 3,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl std::fmt::Display) -> Self {
        CliError { exit: Exit::Usage, message: message.to_string() }
    }

    pub fn unknown(message: impl std::fmt::Display) -> Self {
        CliError { exit: Exit::Unknown, message: message.to_string() }
    }

    pub fn fail(message: impl std::fmt::Display) -> Self {
        CliError { exit: Exit::Fail, message: message.to_string() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cbn", version, about = "Constrained Bayesian network analysis")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// SMT solver binary (default: $CBN_SOLVER, then z3 on PATH).
    #[arg(long, global = true)]
    pub solver: Option<PathBuf>,
    /// Per-check solver timeout in seconds.
    #[arg(long, global = true, default_value_t = 60)]
    pub timeout: u64,
    /// Seed for the solver and the random model generator.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Omit `D > 0` from generated marginal definitions.
    #[arg(long, global = true)]
    pub no_denominator_guard: bool,
    /// Leave wall-clock timings out of reports so they are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    May,
    Must,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check well-formedness, soundness and consistency.
    Validate { model: PathBuf },
    /// Decide a may- or must-judgment.
    Judge {
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Constraint (or, for may, an existential query).
        #[arg(long)]
        phi: String,
    },
    /// Bracket the supremum of a term over all concretizations.
    Sup(Optimize),
    /// Bracket the infimum of a term over all concretizations.
    Inf(Optimize),
    /// Print the symbolic marginal of a model marginal or of an ad-hoc query.
    Marginal {
        model: PathBuf,
        /// A marginal variable declared in the model.
        #[arg(long, conflicts_with_all = ["node", "state"])]
        mp: Option<String>,
        #[arg(long, requires = "state")]
        node: Option<String>,
        #[arg(long, requires = "node")]
        state: Option<String>,
        /// Hard evidence `node=state`, repeatable.
        #[arg(long = "given")]
        given: Vec<String>,
    },
    /// Constrained union of two models.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Link constraint over post-rename names, repeatable.
        #[arg(long = "link")]
        links: Vec<String>,
        /// Suffix for clashing left names; enables automatic renaming.
        #[arg(long)]
        left_suffix: Option<String>,
        /// Suffix for clashing right names; enables automatic renaming.
        #[arg(long)]
        right_suffix: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Symbolic sensitivity value of a hypothesis to an evidence likelihood.
    Sensitivity {
        model: PathBuf,
        /// `node=state`
        #[arg(long)]
        hypothesis: String,
        /// `node=state`
        #[arg(long)]
        evidence: String,
        /// Sum the complement of the hypothesis state by state.
        #[arg(long)]
        raw: bool,
        /// Also bracket the sensitivity value's sup and inf with this width.
        #[arg(long)]
        bounds: Option<String>,
        /// Write `var,s` samples of the closed form to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sampled variable (default: the only probability variable).
        #[arg(long)]
        var: Option<String>,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "1")]
        to: String,
        #[arg(long, default_value_t = 100)]
        steps: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random constrained network (deterministic under --seed).
    GenRandom {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 10)]
        max_states: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time symbolic inference on generated models.
    Stress {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV output `nodes,x_vars,total_states,marginal_len,seconds`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct Optimize {
    pub model: PathBuf,
    #[arg(long)]
    pub term: String,
    /// Interval width, e.g. `1e-9` or `1/1000`.
    #[arg(long, default_value = "1e-6")]
    pub delta: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Usage as u8),
            };
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            let text = report.render();
            print!("{text}");
            if let Some(path) = &cli.global.report {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(Exit::Usage as u8);
                }
            }
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit as u8)
        }
    }
}
