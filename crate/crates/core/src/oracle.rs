//! Exhaustive-search ground truth: globally optimal profiles, full
//! equilibrium enumeration, the empirical price of anarchy and its analytic
//! upper bound.
//!
//! Profiles are enumerated in mixed-radix order (user 0 is the least
//! significant digit, base `A + 1`) with incremental congestion-count
//! updates, so a transition costs O(1) before the per-profile evaluation.
//! Scans are partitioned into index ranges and merged with order-independent
//! reductions, which keeps results identical under the parallel and
//! sequential builds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{nash_witness_with, Evaluator, GameInstance, StrategyProfile};
use crate::par;

/// Default cap on the number of profiles an exhaustive scan may visit.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

const CHUNK: u64 = 1 << 14;

/// Empirical and analytic price-of-anarchy data for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct PoaReport {
    pub optimal_cost: f64,
    pub optimal_profile: StrategyProfile,
    pub worst_ne_cost: f64,
    pub best_ne_cost: f64,
    pub ne_count: u64,
    /// `worst_ne_cost / optimal_cost`.
    pub empirical_poa: f64,
    pub poa_upper_bound: f64,
}

fn num_profiles(game: &GameInstance, cap: u64) -> Result<u64> {
    let base = (game.num_aps() + 1) as u128;
    let mut total: u128 = 1;
    for _ in 0..game.num_users() {
        total = total.saturating_mul(base);
        if total > cap as u128 {
            return Err(Error::InstanceTooLarge {
                profiles: total,
                cap,
            });
        }
    }
    Ok(total as u64)
}

/// Incremental mixed-radix profile walker.
struct Walker {
    digits: Vec<usize>,
    per_ap: Vec<usize>,
    total_off: usize,
    base: usize,
}

impl Walker {
    fn from_index(mut idx: u64, n: usize, num_aps: usize) -> Self {
        let base = num_aps + 1;
        let mut digits = vec![0usize; n];
        for d in digits.iter_mut() {
            *d = (idx % base as u64) as usize;
            idx /= base as u64;
        }
        let mut per_ap = vec![0usize; num_aps];
        let mut total_off = 0usize;
        for &d in &digits {
            if d > 0 {
                per_ap[d - 1] += 1;
                total_off += 1;
            }
        }
        Self {
            digits,
            per_ap,
            total_off,
            base,
        }
    }

    fn advance(&mut self) {
        for i in 0..self.digits.len() {
            let d = self.digits[i];
            if d > 0 {
                self.per_ap[d - 1] -= 1;
                self.total_off -= 1;
            }
            if d + 1 == self.base {
                self.digits[i] = 0;
            } else {
                self.digits[i] = d + 1;
                self.per_ap[d] += 1;
                self.total_off += 1;
                return;
            }
        }
    }

    #[inline]
    fn total_cost(&self, ev: &Evaluator) -> f64 {
        let mult = if ev.elastic {
            1.0
        } else {
            self.total_off as f64
        };
        let mut sum = 0.0;
        for (i, &d) in self.digits.iter().enumerate() {
            sum += if d == 0 {
                ev.local[i]
            } else {
                ev.rate_factor[i] * self.per_ap[d - 1] as f64 / ev.bandwidth[d - 1]
                    + ev.cloud_factor[i] * mult
            };
        }
        sum
    }
}

#[derive(Clone)]
struct OptimalAcc {
    cost: f64,
    profile: Vec<usize>,
}

impl OptimalAcc {
    fn better_than(&self, other: &OptimalAcc) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.profile < other.profile)
    }
}

fn chunk_ranges(total: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        out.push((start, end));
        start = end;
    }
    out
}

/// Globally cost-minimal profile and its total cost; ties resolved toward the
/// lexicographically smallest decision vector.
pub fn brute_force_optimal(game: &GameInstance) -> Result<(StrategyProfile, f64)> {
    brute_force_optimal_capped(game, DEFAULT_ENUM_CAP)
}

/// [`brute_force_optimal`] with an explicit enumeration cap.
pub fn brute_force_optimal_capped(game: &GameInstance, cap: u64) -> Result<(StrategyProfile, f64)> {
    let total = num_profiles(game, cap)?;
    let ev = Evaluator::new(game);
    let partials = par::map_collect(chunk_ranges(total), |(start, end)| {
        let mut w = Walker::from_index(start, game.num_users(), game.num_aps());
        let mut best = OptimalAcc {
            cost: w.total_cost(&ev),
            profile: w.digits.clone(),
        };
        for _ in start + 1..end {
            w.advance();
            let cost = w.total_cost(&ev);
            let cand = OptimalAcc {
                cost,
                profile: w.digits.clone(),
            };
            if cand.better_than(&best) {
                best = cand;
            }
        }
        best
    });
    let best = partials
        .into_iter()
        .reduce(|a, b| if b.better_than(&a) { b } else { a })
        .expect("at least one profile");
    Ok((StrategyProfile::new(game, best.profile)?, best.cost))
}

#[derive(Clone, Copy, Default)]
struct NeStats {
    count: u64,
    worst: f64,
    best: f64,
}

impl NeStats {
    fn absorb(&mut self, cost: f64) {
        if self.count == 0 {
            self.worst = cost;
            self.best = cost;
        } else {
            self.worst = self.worst.max(cost);
            self.best = self.best.min(cost);
        }
        self.count += 1;
    }

    fn merge(mut self, other: NeStats) -> NeStats {
        if other.count > 0 {
            if self.count == 0 {
                return other;
            }
            self.worst = self.worst.max(other.worst);
            self.best = self.best.min(other.best);
            self.count += other.count;
        }
        self
    }
}

fn scan_equilibria(
    game: &GameInstance,
    cap: u64,
    collect: bool,
) -> Result<(Vec<Vec<usize>>, NeStats)> {
    let total = num_profiles(game, cap)?;
    let ev = Evaluator::new(game);
    let partials = par::map_collect(chunk_ranges(total), |(start, end)| {
        let mut w = Walker::from_index(start, game.num_users(), game.num_aps());
        let mut stats = NeStats::default();
        let mut found = Vec::new();
        let mut idx = start;
        loop {
            if nash_witness_with(&ev, &w.digits, &w.per_ap, w.total_off).is_none() {
                stats.absorb(w.total_cost(&ev));
                if collect {
                    found.push(w.digits.clone());
                }
            }
            idx += 1;
            if idx == end {
                break;
            }
            w.advance();
        }
        (found, stats)
    });
    let mut all = Vec::new();
    let mut stats = NeStats::default();
    for (found, s) in partials {
        all.extend(found);
        stats = stats.merge(s);
    }
    Ok((all, stats))
}

/// All Nash equilibria of the instance, in mixed-radix enumeration order.
pub fn enumerate_equilibria(game: &GameInstance) -> Result<Vec<StrategyProfile>> {
    enumerate_equilibria_capped(game, DEFAULT_ENUM_CAP)
}

/// [`enumerate_equilibria`] with an explicit enumeration cap.
pub fn enumerate_equilibria_capped(game: &GameInstance, cap: u64) -> Result<Vec<StrategyProfile>> {
    let (found, _) = scan_equilibria(game, cap, true)?;
    found
        .into_iter()
        .map(|d| StrategyProfile::new(game, d))
        .collect()
}

/// Analytic upper bound on the price of anarchy: total local cost divided by
/// the sum of each user's cheapest conceivable cost (local, or offloading
/// alone through her best AP). Valid for both cloud models.
pub fn poa_upper_bound(game: &GameInstance) -> f64 {
    let ev = Evaluator::new(game);
    let mut numer = 0.0;
    let mut denom = 0.0;
    for i in 0..game.num_users() {
        let mut floor = ev.local[i];
        for ap in 1..=game.num_aps() {
            // Cost of offloading alone: one user on the AP, one offloader in
            // total; identical under both cloud models.
            let solo = ev.rate_factor[i] / ev.bandwidth[ap - 1] + ev.cloud_factor[i];
            floor = floor.min(solo);
        }
        numer += ev.local[i];
        denom += floor;
    }
    numer / denom
}

/// Full price-of-anarchy report for one enumerable instance.
pub fn poa_report(game: &GameInstance) -> Result<PoaReport> {
    poa_report_capped(game, DEFAULT_ENUM_CAP)
}

/// [`poa_report`] with an explicit enumeration cap.
pub fn poa_report_capped(game: &GameInstance, cap: u64) -> Result<PoaReport> {
    let (optimal_profile, optimal_cost) = brute_force_optimal_capped(game, cap)?;
    let (_, stats) = scan_equilibria(game, cap, false)?;
    debug_assert!(stats.count > 0, "every instance has a pure equilibrium");
    Ok(PoaReport {
        optimal_cost,
        optimal_profile,
        worst_ne_cost: stats.worst,
        best_ne_cost: stats.best,
        ne_count: stats.count,
        empirical_poa: stats.worst / optimal_cost,
        poa_upper_bound: poa_upper_bound(game),
    })
}
