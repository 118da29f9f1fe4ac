#![allow(dead_code)]

use offload_game::dynamics::{run_improvement_path, ImprovementTrace, MovePolicy};
use offload_game::model::{CloudKind, GameInstance, StrategyProfile};
use offload_game::scenario::{generate, ScenarioConfig};
use offload_game::solve::default_step_cap;
use rand::Rng;
use rand_pcg::Pcg64;

/// Instance drawn from the default evaluation scenario.
pub fn scenario_game(n_users: usize, n_aps: usize, cloud: CloudKind, seed: u64) -> GameInstance {
    generate(&ScenarioConfig::defaults(n_users, n_aps, cloud, seed)).unwrap()
}

/// Round-robin improvement path from the all-local profile.
pub fn elastic_solve(game: &GameInstance) -> (StrategyProfile, ImprovementTrace) {
    run_improvement_path(
        game,
        &StrategyProfile::all_local(game),
        MovePolicy::RoundRobinFirstImprovement,
        default_step_cap(game),
    )
    .unwrap()
}

/// Independent best-reply oracle: exhaustive argmin over all strategies via
/// the public cost operations, with the stated tie-breaks (current strategy,
/// then local, then lowest AP index).
pub fn oracle_best_reply(game: &GameInstance, user: usize, profile: &StrategyProfile) -> usize {
    let current = profile.decision(user);
    let cost_of = |s: usize| {
        game.user_cost(user, &profile.with_decision(user, s))
            .unwrap()
            .total
    };
    let mut best = current;
    let mut best_cost = cost_of(current);
    for s in (0..=game.num_aps()).filter(|&s| s != current) {
        let c = cost_of(s);
        if c < best_cost {
            best = s;
            best_cost = c;
        }
    }
    best
}

/// Uniformly random valid profile.
pub fn random_profile(rng: &mut Pcg64, game: &GameInstance) -> StrategyProfile {
    let d = (0..game.num_users())
        .map(|_| rng.gen_range(0..=game.num_aps()))
        .collect();
    StrategyProfile::new(game, d).unwrap()
}
