//! Implementations of the CLI subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use offload_game::batch::{run_batch, FigurePreset};
use offload_game::cycle::build_cycle_instance;
use offload_game::dynamics::MovePolicy;
use offload_game::inductive::InsertionOrder;
use offload_game::model::{CloudKind, GameInstance, StrategyProfile};
use offload_game::oracle;
use offload_game::scenario::{generate, ScenarioConfig};
use offload_game::solve::{solve_instance, SolveReport, SolverChoice};
use offload_game::Error;

use crate::instance::InstanceFile;
use crate::{FormatArg, InstanceArgs, OrderingArg, PresetArg, SolverArg};

pub struct CommandOutcome {
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

pub struct CommandError {
    pub exit_code: i32,
    pub message: String,
}

impl CommandError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit_code: 1,
            message: message.into(),
        }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self {
            exit_code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::InstanceTooLarge { .. } => 2,
            _ => 1,
        };
        Self {
            exit_code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<CommandOutcome, CommandError>;

/// Write to a temporary sibling and rename, so malformed runs never leave a
/// partial output file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CommandError> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, contents)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| CommandError::usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<Vec<PathBuf>, CommandError> {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            Ok(vec![path.clone()])
        }
        None => {
            print!("{contents}");
            Ok(Vec::new())
        }
    }
}

fn profile_str(p: &StrategyProfile) -> String {
    let inner: Vec<String> = p.decisions().iter().map(|d| d.to_string()).collect();
    format!("({})", inner.join(","))
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Resolved instance source: the game plus the config it was drawn from.
struct Resolved {
    config: ScenarioConfig,
    explicit: bool,
    file: Option<InstanceFile>,
}

impl Resolved {
    fn game(&self) -> Result<GameInstance, CommandError> {
        match &self.file {
            Some(f) => {
                let mut f = f.clone();
                f.config = self.config.clone();
                f.build().map_err(CommandError::usage)
            }
            None => generate(&self.config).map_err(CommandError::from),
        }
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self {
            config: ScenarioConfig {
                seed,
                ..self.config.clone()
            },
            explicit: self.explicit,
            file: self.file.clone(),
        }
    }
}

fn resolve(args: &InstanceArgs) -> Result<Resolved, CommandError> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CommandError::usage(format!("cannot read {}: {e}", path.display())))?;
        let file = InstanceFile::parse(&text).map_err(CommandError::usage)?;
        let mut config = file.config.clone();
        if let Some(m) = args.model {
            config.cloud = m.into();
        }
        if let Some(s) = args.seed {
            config.seed = s;
        }
        if let Some(n) = args.n_users {
            config.n_users = n;
        }
        let explicit = file.users.is_some() || file.aps.is_some();
        Ok(Resolved {
            config,
            explicit,
            file: Some(file),
        })
    } else {
        let n_users = args
            .n_users
            .ok_or_else(|| CommandError::usage("need --instance or --n-users"))?;
        let model = args
            .model
            .ok_or_else(|| CommandError::usage("need --model for inline instances"))?;
        Ok(Resolved {
            config: ScenarioConfig::defaults(
                n_users,
                args.n_aps,
                model.into(),
                args.seed.unwrap_or(0),
            ),
            explicit: false,
            file: None,
        })
    }
}

fn choose_solver(
    solver: Option<SolverArg>,
    ordering: OrderingArg,
    step_cap: Option<usize>,
    model: CloudKind,
    seed: u64,
) -> SolverChoice {
    let solver = solver.unwrap_or(match model {
        CloudKind::Elastic => SolverArg::Dynamics,
        CloudKind::NonElastic => SolverArg::Inductive,
    });
    match solver {
        SolverArg::Dynamics => SolverChoice::Dynamics {
            policy: MovePolicy::RoundRobinFirstImprovement,
            step_cap,
        },
        SolverArg::Inductive => SolverChoice::Inductive {
            ordering: match ordering {
                OrderingArg::Given => InsertionOrder::Given,
                OrderingArg::Random => {
                    InsertionOrder::Random(offload_game::batch::mix_seed(seed, 0x0D0E))
                }
                OrderingArg::Ratio => InsertionOrder::ByRatioAscending,
            },
        },
    }
}

pub fn solve(
    args: InstanceArgs,
    solver: Option<SolverArg>,
    ordering: OrderingArg,
    step_cap: Option<usize>,
    runs: usize,
    out: Option<PathBuf>,
) -> CmdResult {
    if runs == 0 {
        return Err(CommandError::usage("--runs must be positive"));
    }
    let resolved = resolve(&args)?;
    if resolved.explicit && runs > 1 {
        return Err(CommandError::usage(
            "--runs > 1 needs a sampled instance, not an explicit user list",
        ));
    }
    let base_seed = resolved.config.seed;
    let mut reports: Vec<SolveReport> = Vec::with_capacity(runs);
    let mut verified = 0usize;
    for k in 0..runs {
        let seed = base_seed + k as u64;
        let game = resolved.with_seed(seed).game()?;
        let choice = choose_solver(solver, ordering, step_cap, game.cloud().kind, seed);
        let report = solve_instance(&game, choice)?;
        if runs == 1 {
            println!(
                "instance: model={} n_users={} n_aps={} seed={}",
                game.cloud().kind.label(),
                game.num_users(),
                game.num_aps(),
                seed
            );
            println!("profile: {}", profile_str(&report.profile));
            for (i, cost) in report.per_user_costs.iter().enumerate() {
                let decision = report.profile.decision(i);
                let label = if decision == 0 {
                    "local".to_string()
                } else {
                    format!("AP {decision}")
                };
                println!("  user {i}: {label:<8} cost {cost}");
            }
            println!("total cost: {}", report.total_cost);
            println!("iterations: {}", report.iterations);
            println!(
                "verification: {}",
                if report.verified {
                    "Nash equilibrium"
                } else {
                    "FAILED unilateral-deviation check"
                }
            );
        }
        if report.verified {
            verified += 1;
        }
        reports.push(report);
    }

    let artifacts = if let Some(path) = &out {
        let json = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .expect("reports serialize");
        write_atomic(path, &json)?;
        vec![path.clone()]
    } else {
        Vec::new()
    };

    let summary = format!(
        "solve: model={} n_users={} n_aps={} seed={} runs={} verified={}/{} iterations={}",
        resolved.config.cloud.label(),
        resolved.config.n_users,
        resolved.config.n_aps,
        base_seed,
        runs,
        verified,
        runs,
        reports.iter().map(|r| r.iterations).sum::<usize>(),
    );
    if verified != runs {
        println!("{summary}");
        return Err(CommandError::verification(format!(
            "{} of {} runs failed the unilateral-deviation check",
            runs - verified,
            runs
        )));
    }
    Ok(CommandOutcome { summary, artifacts })
}

pub fn simulate(
    preset: PresetArg,
    seed: u64,
    reps: Option<usize>,
    format: FormatArg,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    enum_cap: u64,
) -> CmdResult {
    if let Some(jobs) = jobs {
        configure_jobs(jobs)?;
    }
    let preset = match preset {
        PresetArg::CostRatio => FigurePreset::CostRatio,
        PresetArg::OffloadRatio => FigurePreset::OffloadRatio,
        PresetArg::Iterations => FigurePreset::Iterations,
    };
    let mut spec = preset.spec(seed, reps);
    spec.enum_cap = enum_cap;
    let result = run_batch(&spec).map_err(CommandError::from)?;
    let contents = match format {
        FormatArg::Csv => result.to_csv(),
        FormatArg::Json => result.to_json(),
    };
    let artifacts = emit(&out, &contents)?;
    Ok(CommandOutcome {
        summary: format!(
            "simulate: preset={} seed={} reps={} cells={} records={}",
            preset.label(),
            seed,
            spec.repetitions,
            spec.cells.len(),
            result.runs.len(),
        ),
        artifacts,
    })
}

#[cfg(feature = "parallel")]
fn configure_jobs(jobs: usize) -> Result<(), CommandError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| CommandError::usage(format!("cannot configure thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn configure_jobs(_jobs: usize) -> Result<(), CommandError> {
    // Sequential build; --jobs has no effect.
    Ok(())
}

pub fn reproduce_cycle() -> CmdResult {
    let fx = build_cycle_instance();
    let steps = fx
        .replay()
        .map_err(|e| CommandError::verification(format!("cycle fixture regression: {e}")))?;
    let name = |i: usize| (b'a' + i as u8) as char;
    println!("non-elastic instance with 5 users, 3 APs; better-response cycle:");
    println!("x(0) = {}", profile_str(&fx.initial));
    for (k, s) in steps.iter().enumerate() {
        let from = if s.from == 0 {
            "local".to_string()
        } else {
            format!("AP {}", s.from)
        };
        let to = if s.to == 0 {
            "local".to_string()
        } else {
            format!("AP {}", s.to)
        };
        println!(
            "step {}: {} moves {} -> {}: cost {} -> {} | x({}) = ({})",
            k + 1,
            name(s.user),
            from,
            to,
            s.old_cost,
            s.new_cost,
            k + 1,
            s.profile_after
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    let movers: String = steps
        .iter()
        .map(|s| name(s.user).to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok(CommandOutcome {
        summary: format!(
            "reproduce-cycle: {} improvement steps, movers ({movers}), returned to {}",
            steps.len(),
            profile_str(&fx.initial)
        ),
        artifacts: Vec::new(),
    })
}

pub fn poa(
    args: InstanceArgs,
    runs: usize,
    sweep: Option<Vec<usize>>,
    bound_only: bool,
    enum_cap: u64,
    format: FormatArg,
    out: Option<PathBuf>,
) -> CmdResult {
    if runs == 0 {
        return Err(CommandError::usage("--runs must be positive"));
    }
    let resolved = resolve(&args)?;
    let user_counts = sweep.unwrap_or_else(|| vec![resolved.config.n_users]);
    if resolved.explicit && (runs > 1 || user_counts.len() > 1) {
        return Err(CommandError::usage(
            "sweeps need a sampled instance, not an explicit user list",
        ));
    }
    let base_seed = resolved.config.seed;
    let single = user_counts.len() == 1 && runs == 1;

    #[derive(serde::Serialize)]
    struct PoaRow {
        model: &'static str,
        n_users: usize,
        n_aps: usize,
        seed: u64,
        optimal_cost: Option<f64>,
        worst_ne_cost: Option<f64>,
        best_ne_cost: Option<f64>,
        ne_count: Option<u64>,
        empirical_poa: Option<f64>,
        poa_upper_bound: f64,
    }

    let mut table: Vec<PoaRow> = Vec::new();
    let mut last_report: Option<oracle::PoaReport> = None;
    for &n in &user_counts {
        for k in 0..runs {
            let seed = base_seed + k as u64;
            let mut r = resolved.with_seed(seed);
            r.config.n_users = n;
            let game = r.game()?;
            let report = if bound_only {
                None
            } else {
                Some(oracle::poa_report_capped(&game, enum_cap).map_err(CommandError::from)?)
            };
            table.push(PoaRow {
                model: game.cloud().kind.label(),
                n_users: game.num_users(),
                n_aps: game.num_aps(),
                seed,
                optimal_cost: report.as_ref().map(|r| r.optimal_cost),
                worst_ne_cost: report.as_ref().map(|r| r.worst_ne_cost),
                best_ne_cost: report.as_ref().map(|r| r.best_ne_cost),
                ne_count: report.as_ref().map(|r| r.ne_count),
                empirical_poa: report.as_ref().map(|r| r.empirical_poa),
                poa_upper_bound: oracle::poa_upper_bound(&game),
            });
            last_report = report;
        }
    }
    let count = table.len();

    let artifacts = if single && out.is_none() {
        // Human-readable single report.
        if let Some(report) = &last_report {
            println!("optimal_cost:    {}", report.optimal_cost);
            println!("optimal_profile: {}", profile_str(&report.optimal_profile));
            println!("worst_ne_cost:   {}", report.worst_ne_cost);
            println!("best_ne_cost:    {}", report.best_ne_cost);
            println!("ne_count:        {}", report.ne_count);
            println!("empirical_poa:   {}", report.empirical_poa);
            println!("poa_upper_bound: {}", report.poa_upper_bound);
        } else {
            println!("poa_upper_bound: {}", table[0].poa_upper_bound);
        }
        Vec::new()
    } else {
        match format {
            FormatArg::Csv => {
                let mut rows = String::from(
                    "model,n_users,n_aps,seed,optimal_cost,worst_ne_cost,best_ne_cost,ne_count,empirical_poa,poa_upper_bound\n",
                );
                for r in &table {
                    let _ = writeln!(
                        rows,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.model,
                        r.n_users,
                        r.n_aps,
                        r.seed,
                        fmt_opt(&r.optimal_cost),
                        fmt_opt(&r.worst_ne_cost),
                        fmt_opt(&r.best_ne_cost),
                        fmt_opt(&r.ne_count),
                        fmt_opt(&r.empirical_poa),
                        r.poa_upper_bound,
                    );
                }
                emit(&out, &rows)?
            }
            FormatArg::Json => {
                let text = serde_json::to_string_pretty(&table).expect("rows serialize");
                emit(&out, &text)?
            }
        }
    };

    Ok(CommandOutcome {
        summary: format!(
            "poa: model={} n_users={:?} n_aps={} seed={} reports={}{}",
            resolved.config.cloud.label(),
            user_counts,
            resolved.config.n_aps,
            base_seed,
            count,
            if bound_only { " (bound only)" } else { "" },
        ),
        artifacts,
    })
}
