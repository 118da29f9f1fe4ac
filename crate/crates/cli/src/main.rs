//! Command-line front end for the computation-offloading game solvers.

mod commands;
mod instance;

use clap::{Args, Parser, Subcommand, ValueEnum};
use offload_game::model::CloudKind;

/// Exit codes: 0 success, 1 usage/parse error, 2 instance too large for
/// exhaustive search, 3 verification failure.
#[derive(Debug, Parser)]
#[command(
    name = "offload-game",
    version,
    about = "Equilibrium solvers and experiments for the multi-access computation-offloading game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Elastic,
    Nonelastic,
}

impl From<ModelArg> for CloudKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Elastic => CloudKind::Elastic,
            ModelArg::Nonelastic => CloudKind::NonElastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    /// Improvement-path dynamics from the all-local profile.
    Dynamics,
    /// Player-by-player induction with the update phase (non-elastic only).
    Inductive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    Given,
    Random,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// JSON instance/config file (scenario config, optionally with explicit
    /// `users` and `aps` lists).
    #[arg(long)]
    instance: Option<std::path::PathBuf>,
    /// Number of users for an inline sampled instance.
    #[arg(long)]
    n_users: Option<usize>,
    /// Number of APs for an inline sampled instance.
    #[arg(long, default_value_t = 3)]
    n_aps: usize,
    /// Cloud model; overrides the instance file's `cloud` field.
    #[arg(long)]
    model: Option<ModelArg>,
    /// Scenario seed; overrides the instance file's `seed` field.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute and verify one equilibrium (or a seed sweep with --runs).
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long, value_enum, default_value_t = OrderingArg::Given)]
        ordering: OrderingArg,
        /// Accepted-step cap for dynamics runs (default 50 * N * (A + 1)).
        #[arg(long)]
        step_cap: Option<usize>,
        /// Solve this many consecutive seeds and verify each.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Write the JSON solve report(s) here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run a batch experiment preset and emit its CSV (or JSON).
    Simulate {
        /// Figure preset: cost-ratio, offload-ratio or iterations.
        #[arg(long, value_enum)]
        preset: PresetArg,
        /// Master seed for the batch.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Repetitions per grid cell (preset default when omitted).
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Cap on worker threads for the batch.
        #[arg(long)]
        jobs: Option<usize>,
        /// Profile-count cap for brute-force presets.
        #[arg(long, default_value_t = offload_game::oracle::DEFAULT_ENUM_CAP)]
        enum_cap: u64,
    },
    /// Replay the compiled-in cyclic improvement path and verify it.
    ReproduceCycle,
    /// Price-of-anarchy report(s): empirical (exhaustive) plus the analytic
    /// bound.
    Poa {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Evaluate this many consecutive seeds per dimension.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Sweep over several user counts (overrides --n-users).
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
        /// Skip enumeration and report only the analytic bound.
        #[arg(long)]
        bound_only: bool,
        #[arg(long, default_value_t = offload_game::oracle::DEFAULT_ENUM_CAP)]
        enum_cap: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output path for sweeps; stdout when omitted.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    CostRatio,
    OffloadRatio,
    Iterations,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage and parse problems exit 1 (clap's default would be 2);
            // --help and --version stay 0.
            let is_usage = e.use_stderr();
            let _ = e.print();
            std::process::exit(if is_usage { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Solve {
            instance,
            solver,
            ordering,
            step_cap,
            runs,
            out,
        } => commands::solve(instance, solver, ordering, step_cap, runs, out),
        Command::Simulate {
            preset,
            seed,
            reps,
            format,
            out,
            jobs,
            enum_cap,
        } => commands::simulate(preset, seed, reps, format, out, jobs, enum_cap),
        Command::ReproduceCycle => commands::reproduce_cycle(),
        Command::Poa {
            instance,
            runs,
            sweep,
            bound_only,
            enum_cap,
            format,
            out,
        } => commands::poa(instance, runs, sweep, bound_only, enum_cap, format, out),
    };
    match outcome {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            println!("{}", outcome.summary);
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit_code);
        }
    }
}
