//! Best replies, the elastic threshold structure, the ordinal potential and
//! improvement-path execution.
//!
//! Under the elastic cloud a best reply reduces to comparing a per-user
//! threshold against per-AP load ratios, the game admits a generalized
//! ordinal potential, and every improvement path reaches an equilibrium.
//! Under the non-elastic cloud improvement paths may cycle; the path runner
//! detects revisited profiles.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{strictly_better, Congestion, Evaluator, GameInstance, StrategyProfile};

/// Default bound on the number of distinct profiles remembered for cycle
/// detection; beyond it only the step cap limits a run.
pub const DEFAULT_VISITED_CAP: usize = 1 << 20;

/// Mover selection rule for [`run_improvement_path`].
#[derive(Debug, Clone)]
pub enum MovePolicy {
    /// Scan users in index order each round; the first user with an improving
    /// deviation plays her best reply.
    RoundRobinFirstImprovement,
    /// Among all users with improving deviations, the one whose best reply
    /// decreases her cost the most moves (ties: lowest user index).
    BestReply,
    /// Like round-robin, but the scan order is reshuffled every round with a
    /// seeded generator.
    RandomOrder(u64),
    /// Replay an explicit `(user, target strategy)` schedule, cycling through
    /// it. Every scheduled move must be a strict improvement for its mover.
    Schedule(Vec<(usize, usize)>),
}

/// One accepted improvement step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementStep {
    pub user: usize,
    pub from: usize,
    pub to: usize,
    pub old_cost: f64,
    pub new_cost: f64,
    /// Potential before/after the step; populated for elastic runs only.
    pub potential_before: Option<f64>,
    pub potential_after: Option<f64>,
}

/// Why an improvement path stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Terminal {
    /// No user has an improving deviation.
    Equilibrium,
    /// A previously visited profile recurred; `period` steps separate the two
    /// visits.
    CycleDetected { period: usize },
    /// The step cap was reached first.
    StepCapExceeded,
}

/// Trace of an improvement-path run.
#[derive(Debug, Clone, Serialize)]
pub struct ImprovementTrace {
    pub steps: Vec<ImprovementStep>,
    pub terminal: Terminal,
}

/// Elastic-model offloading threshold of `user`.
///
/// Offloading via AP `a` beats local computing exactly when the AP's load
/// ratio `n_a/B_a` (counting the user) is below this value. May be non-positive
/// when the cloud is slower than the device and energy is free, in which case
/// offloading is never a best reply.
pub fn threshold(game: &GameInstance, user: usize) -> Result<f64> {
    if !game.cloud().is_elastic() {
        return Err(Error::WrongModel {
            expected: "elastic",
        });
    }
    Ok(threshold_unchecked(game, user))
}

fn threshold_unchecked(game: &GameInstance, user: usize) -> f64 {
    let u = &game.users()[user];
    let numer = u.weight_energy * u.energy_per_cycle
        + u.weight_time * (1.0 / u.local_speed - 1.0 / game.cloud().speed);
    let denom = u.weight_time + u.weight_energy * u.tx_power;
    numer / denom * (u.cycles / u.data_bits)
}

/// A cost-minimizing strategy for `user` against the others' decisions in
/// `profile`.
///
/// Ties are broken in favour of the current strategy, then local computing,
/// then the lowest AP index. Candidate AP costs count the user on that AP.
/// The elastic model uses the threshold comparison; the non-elastic model
/// evaluates all `A + 1` candidate costs directly.
pub fn best_reply(game: &GameInstance, user: usize, profile: &StrategyProfile) -> Result<usize> {
    let counts = game.congestion_counts(profile)?;
    let ev = Evaluator::new(game);
    Ok(best_reply_with(
        game,
        &ev,
        user,
        profile.decision(user),
        &counts,
    ))
}

/// Best reply evaluated from precomputed congestion counts. `current` is the
/// user's strategy reflected in `counts`.
pub(crate) fn best_reply_with(
    game: &GameInstance,
    ev: &Evaluator,
    user: usize,
    current: usize,
    counts: &Congestion,
) -> usize {
    if game.cloud().is_elastic() {
        let t = threshold_unchecked(game, user);
        // Cost order is fully captured by comparing the local key T against
        // per-AP load ratios with the user counted on the candidate AP.
        let key = |s: usize| -> f64 {
            if s == 0 {
                t
            } else {
                let n = if s == current {
                    counts.on_ap(s)
                } else {
                    counts.on_ap(s) + 1
                };
                n as f64 / game.bandwidth(s)
            }
        };
        if t <= 0.0 && current == 0 {
            // Load ratios are positive, so local is already optimal.
            return 0;
        }
        let mut best = current;
        let mut best_key = key(current);
        for s in (0..=game.num_aps()).filter(|&s| s != current) {
            let k = key(s);
            if k < best_key {
                best = s;
                best_key = k;
            }
        }
        best
    } else {
        let mut best = current;
        let mut best_cost = ev.current_cost(user, current, &counts.per_ap, counts.total);
        for s in (0..=game.num_aps()).filter(|&s| s != current) {
            let c = ev.deviation_cost(user, current, s, &counts.per_ap, counts.total);
            if c < best_cost {
                best = s;
                best_cost = c;
            }
        }
        best
    }
}

/// Generalized ordinal potential of the elastic game: the sum of triangular
/// load terms per AP plus the thresholds of local users. Strictly decreases
/// along every improvement step.
pub fn potential(game: &GameInstance, profile: &StrategyProfile) -> Result<f64> {
    if !game.cloud().is_elastic() {
        return Err(Error::WrongModel {
            expected: "elastic",
        });
    }
    let counts = game.congestion_counts(profile)?;
    let mut phi = 0.0;
    for ap in 1..=game.num_aps() {
        let n = counts.on_ap(ap) as f64;
        phi += n * (n + 1.0) / 2.0 / game.bandwidth(ap);
    }
    for user in 0..game.num_users() {
        if profile.decision(user) == 0 {
            phi += threshold_unchecked(game, user);
        }
    }
    Ok(phi)
}

/// Costs of all offloaders in `profile`, sorted in decreasing order.
pub fn sorted_offloader_costs(game: &GameInstance, profile: &StrategyProfile) -> Result<Vec<f64>> {
    let counts = game.congestion_counts(profile)?;
    let ev = Evaluator::new(game);
    let mut costs: Vec<f64> = (0..game.num_users())
        .filter(|&i| profile.decision(i) > 0)
        .map(|i| ev.current_cost(i, profile.decision(i), &counts.per_ap, counts.total))
        .collect();
    costs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(costs)
}

/// Load ratio `n_a / B_a` experienced by each offloader, sorted in
/// decreasing order.
///
/// This is the lexicographic progress witness for AP-swap-only dynamics: a
/// swap from AP `a` to AP `b` improves its mover exactly when
/// `(n_b + 1)/B_b < n_a/B_a`, independently of who moves, and every such
/// swap makes this vector strictly lexicographically smaller. The raw cost
/// vector of [`sorted_offloader_costs`] does not have that property: a swap
/// can raise a heavy user's cost on the target AP above the previous
/// maximum.
pub fn sorted_offloader_load_ratios(
    game: &GameInstance,
    profile: &StrategyProfile,
) -> Result<Vec<f64>> {
    let counts = game.congestion_counts(profile)?;
    let mut ratios: Vec<f64> = (0..game.num_users())
        .filter(|&i| profile.decision(i) > 0)
        .map(|i| {
            let ap = profile.decision(i);
            counts.on_ap(ap) as f64 / game.bandwidth(ap)
        })
        .collect();
    ratios.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(ratios)
}

/// Run an improvement path from `initial` under `policy`, for at most
/// `step_cap` accepted steps, with cycle detection over visited profiles.
pub fn run_improvement_path(
    game: &GameInstance,
    initial: &StrategyProfile,
    policy: MovePolicy,
    step_cap: usize,
) -> Result<(StrategyProfile, ImprovementTrace)> {
    run_improvement_path_capped(game, initial, policy, step_cap, DEFAULT_VISITED_CAP)
}

/// [`run_improvement_path`] with an explicit visited-set memory cap.
pub fn run_improvement_path_capped(
    game: &GameInstance,
    initial: &StrategyProfile,
    policy: MovePolicy,
    step_cap: usize,
    visited_cap: usize,
) -> Result<(StrategyProfile, ImprovementTrace)> {
    if step_cap == 0 {
        return Err(Error::InvalidArgument("step_cap must be positive".into()));
    }
    if let MovePolicy::Schedule(s) = &policy {
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty move schedule".into()));
        }
    }
    let mut profile = initial.clone();
    game.congestion_counts(&profile)?; // validates
    let ev = Evaluator::new(game);
    let elastic = game.cloud().is_elastic();
    let mut counts = game.congestion_counts(&profile)?;

    let mut visited: HashMap<StrategyProfile, usize> = HashMap::new();
    visited.insert(profile.clone(), 0);

    let mut order: Vec<usize> = (0..game.num_users()).collect();
    let mut rng = match &policy {
        MovePolicy::RandomOrder(seed) => Some(Pcg64::seed_from_u64(*seed)),
        _ => None,
    };
    let mut schedule_pos = 0usize;

    let mut steps: Vec<ImprovementStep> = Vec::new();
    let mut phi = if elastic {
        Some(potential(game, &profile)?)
    } else {
        None
    };

    let terminal = loop {
        if steps.len() >= step_cap {
            break Terminal::StepCapExceeded;
        }

        // Pick the next accepted move under the policy.
        let chosen: Option<(usize, usize)> = match &policy {
            MovePolicy::RoundRobinFirstImprovement | MovePolicy::RandomOrder(_) => {
                if let Some(rng) = rng.as_mut() {
                    order.shuffle(rng);
                }
                let mut found = None;
                for &user in &order {
                    let cur = profile.decision(user);
                    let br = best_reply_with(game, &ev, user, cur, &counts);
                    if br != cur {
                        let old = ev.current_cost(user, cur, &counts.per_ap, counts.total);
                        let new = ev.deviation_cost(user, cur, br, &counts.per_ap, counts.total);
                        if strictly_better(new, old) {
                            found = Some((user, br));
                            break;
                        }
                    }
                }
                found
            }
            MovePolicy::BestReply => {
                let mut found: Option<(usize, usize, f64)> = None;
                for user in 0..game.num_users() {
                    let cur = profile.decision(user);
                    let br = best_reply_with(game, &ev, user, cur, &counts);
                    if br != cur {
                        let old = ev.current_cost(user, cur, &counts.per_ap, counts.total);
                        let new = ev.deviation_cost(user, cur, br, &counts.per_ap, counts.total);
                        if strictly_better(new, old) {
                            let gain = old - new;
                            if found.is_none_or(|(_, _, g)| gain > g) {
                                found = Some((user, br, gain));
                            }
                        }
                    }
                }
                found.map(|(u, s, _)| (u, s))
            }
            MovePolicy::Schedule(moves) => {
                let (user, target) = moves[schedule_pos % moves.len()];
                schedule_pos += 1;
                if user >= game.num_users() || target > game.num_aps() {
                    return Err(Error::InvalidArgument(format!(
                        "scheduled move ({user} -> {target}) out of range"
                    )));
                }
                let cur = profile.decision(user);
                let old = ev.current_cost(user, cur, &counts.per_ap, counts.total);
                let new = ev.deviation_cost(user, cur, target, &counts.per_ap, counts.total);
                if cur == target || !strictly_better(new, old) {
                    return Err(Error::InvalidArgument(format!(
                        "scheduled move (user {user}: {cur} -> {target}) is not a strict improvement"
                    )));
                }
                Some((user, target))
            }
        };

        let Some((user, target)) = chosen else {
            break Terminal::Equilibrium;
        };

        let from = profile.decision(user);
        let old_cost = ev.current_cost(user, from, &counts.per_ap, counts.total);
        apply_move(&mut counts, from, target);
        profile.set(user, target);
        let new_cost = ev.current_cost(user, target, &counts.per_ap, counts.total);

        let (pb, pa) = if elastic {
            let before = phi.unwrap();
            let after = potential(game, &profile)?;
            phi = Some(after);
            (Some(before), Some(after))
        } else {
            (None, None)
        };
        steps.push(ImprovementStep {
            user,
            from,
            to: target,
            old_cost,
            new_cost,
            potential_before: pb,
            potential_after: pa,
        });

        if let Some(&first) = visited.get(&profile) {
            break Terminal::CycleDetected {
                period: steps.len() - first,
            };
        }
        if visited.len() < visited_cap {
            visited.insert(profile.clone(), steps.len());
        }
    };

    Ok((profile, ImprovementTrace { steps, terminal }))
}

pub(crate) fn apply_move(counts: &mut Congestion, from: usize, to: usize) {
    if from > 0 {
        counts.per_ap[from - 1] -= 1;
        counts.total -= 1;
    }
    if to > 0 {
        counts.per_ap[to - 1] += 1;
        counts.total += 1;
    }
}
