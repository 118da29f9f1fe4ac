//! High-level solve entry point shared by the batch runner and the CLI.

use serde::Serialize;

use crate::dynamics::{run_improvement_path, ImprovementTrace, MovePolicy};
use crate::error::Result;
use crate::inductive::{self, InductionReport, InsertionOrder};
use crate::model::{GameInstance, StrategyProfile};

/// Which algorithm computes the equilibrium.
#[derive(Debug, Clone)]
pub enum SolverChoice {
    /// Improvement-path dynamics from the all-local profile. Guaranteed to
    /// terminate in an equilibrium under the elastic model; under the
    /// non-elastic model the run may instead detect a cycle or hit the step
    /// cap.
    Dynamics {
        policy: MovePolicy,
        /// Accepted-step cap; defaults to `50 * N * (A + 1)`.
        step_cap: Option<usize>,
    },
    /// Player-by-player induction with the update phase (non-elastic only).
    Inductive { ordering: InsertionOrder },
}

impl SolverChoice {
    pub fn dynamics_default() -> Self {
        SolverChoice::Dynamics {
            policy: MovePolicy::RoundRobinFirstImprovement,
            step_cap: None,
        }
    }
}

/// Per-run detail of how the equilibrium was reached.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveTrace {
    Path(ImprovementTrace),
    Induction(InductionReport),
}

/// Solver output: the profile, per-user costs, iteration count and the
/// verification verdict of the exhaustive unilateral-deviation check.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub profile: StrategyProfile,
    pub per_user_costs: Vec<f64>,
    pub total_cost: f64,
    /// Accepted improvement steps (dynamics) or total update steps over all
    /// induction steps (inductive).
    pub iterations: usize,
    /// `true` iff the output passed the unilateral-deviation check.
    pub verified: bool,
    pub trace: SolveTrace,
}

/// Sensible accepted-step cap for improvement-path runs.
pub fn default_step_cap(game: &GameInstance) -> usize {
    50 * game.num_users() * (game.num_aps() + 1)
}

/// Run the chosen solver on `game` and verify the output.
pub fn solve_instance(game: &GameInstance, choice: SolverChoice) -> Result<SolveReport> {
    let (profile, iterations, trace) = match choice {
        SolverChoice::Dynamics { policy, step_cap } => {
            let cap = step_cap.unwrap_or_else(|| default_step_cap(game));
            let initial = StrategyProfile::all_local(game);
            let (profile, trace) = run_improvement_path(game, &initial, policy, cap)?;
            // A cycling or capped run is not an equilibrium and will fail
            // the is_nash check below.
            let iterations = trace.steps.len();
            (profile, iterations, SolveTrace::Path(trace))
        }
        SolverChoice::Inductive { ordering } => {
            let (profile, report) = inductive::solve(game, ordering)?;
            let iterations = report.total_updates;
            (profile, iterations, SolveTrace::Induction(report))
        }
    };
    let verified = game.is_nash(&profile)?;
    let per_user_costs: Vec<f64> = (0..game.num_users())
        .map(|i| game.user_cost(i, &profile).map(|c| c.total))
        .collect::<Result<_>>()?;
    let total_cost = game.total_cost(&profile)?;
    Ok(SolveReport {
        profile,
        per_user_costs,
        total_cost,
        iterations,
        verified,
        trace,
    })
}
