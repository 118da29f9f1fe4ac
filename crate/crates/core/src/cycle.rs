//! A compiled-in non-elastic instance whose better-response dynamics cycle.
//!
//! Five users (`a`..`e` at indices 0..4) and three APs. Starting from the
//! profile `(1,2,1,0,0)`, the mover schedule `c,b,d,e,c,b,e,d,b` produces
//! nine strict improvement steps and returns to the starting profile,
//! demonstrating that improvement paths need not terminate under the
//! non-elastic cloud. An equilibrium still exists for the same instance and
//! the inductive solver finds one.

use serde::Serialize;

use crate::error::Result;
use crate::model::{AccessPoint, CloudModel, GameInstance, MobileUser, StrategyProfile};

/// The cycling instance together with its start profile, mover schedule and
/// the expected profile orbit.
#[derive(Debug, Clone)]
pub struct CycleFixture {
    pub game: GameInstance,
    pub initial: StrategyProfile,
    /// `(user, target strategy)` pairs; applying them in order walks the
    /// cycle.
    pub schedule: Vec<(usize, usize)>,
    /// The ten profiles `x(0)..x(9)`; the last equals the first.
    pub expected_profiles: Vec<Vec<usize>>,
}

/// One replayed step of the cycle.
#[derive(Debug, Clone, Serialize)]
pub struct CycleStep {
    pub user: usize,
    pub from: usize,
    pub to: usize,
    pub old_cost: f64,
    pub new_cost: f64,
    pub profile_after: Vec<usize>,
}

/// Build the five-user, three-AP cycling instance.
///
/// The parameters place each user's local cost strictly inside the window
/// required for her scheduled moves, with wide margins, so the replay is
/// robust to floating-point rounding:
///
/// * bandwidths satisfy `B2 > B1 > (2/3) B2` and `B2 > B3 > (1/2) B2`,
/// * users `d` and `e` have cloud terms exceeding their solo upload term on
///   AP 2, which lets each of them profitably join a busier AP 2 and later
///   profitably abandon an emptier one as the total offloader count swings.
pub fn build_cycle_instance() -> CycleFixture {
    let cloud_speed = 10e9;
    let aps = vec![
        AccessPoint::new(4.5e6).unwrap(),
        AccessPoint::new(6e6).unwrap(),
        AccessPoint::new(3.5e6).unwrap(),
    ];
    // All users weight time fully and energy not at all, so each cost is
    // data * n_ap / B_ap + cycles * n / cloud_speed against local cycles/f.
    let mk = |data_bits: f64, cycles: f64, local_cost: f64| {
        MobileUser::new(data_bits, cycles, cycles / local_cost, 5e-12, 0.4, 1.0, 0.0).unwrap()
    };
    let users = vec![
        // a: stays on AP 1 throughout.
        mk(1e6, 0.5e9, 0.5),
        // b: leaves AP 2 at n=3 congestion, joins AP 3 at n=5, swaps back.
        //    Window: (B-term 2/B2 + 3 cloud, 1/B3 + 5 cloud) around 0.719.
        mk(2e6, 0.25e9, 0.719),
        // c: pure AP swapper; only bandwidth ordering matters.
        mk(1e6, 0.5e9, 0.625),
        // d: joins AP 2 when n=3, leaves when n=4. Window (0.65, 0.70).
        mk(0.6e6, 1.5e9, 0.675),
        // e: joins AP 2 when n=4, leaves when n=5. Window (0.90, 0.95).
        mk(0.6e6, 1.5e9, 0.925),
    ];
    let game =
        GameInstance::new(users, aps, CloudModel::non_elastic(cloud_speed).unwrap()).unwrap();
    let initial = StrategyProfile::new(&game, vec![1, 2, 1, 0, 0]).unwrap();
    let schedule = vec![
        (2, 2), // c: AP1 -> AP2
        (1, 0), // b: AP2 -> local
        (3, 2), // d: local -> AP2
        (4, 2), // e: local -> AP2
        (2, 1), // c: AP2 -> AP1
        (1, 3), // b: local -> AP3
        (4, 0), // e: AP2 -> local
        (3, 0), // d: AP2 -> local
        (1, 2), // b: AP3 -> AP2
    ];
    let expected_profiles = vec![
        vec![1, 2, 1, 0, 0],
        vec![1, 2, 2, 0, 0],
        vec![1, 0, 2, 0, 0],
        vec![1, 0, 2, 2, 0],
        vec![1, 0, 2, 2, 2],
        vec![1, 0, 1, 2, 2],
        vec![1, 3, 1, 2, 2],
        vec![1, 3, 1, 2, 0],
        vec![1, 3, 1, 0, 0],
        vec![1, 2, 1, 0, 0],
    ];
    CycleFixture {
        game,
        initial,
        schedule,
        expected_profiles,
    }
}

impl CycleFixture {
    /// Apply the schedule once, checking that every step is a strict
    /// improvement for its mover and that the visited profiles match the
    /// expected orbit. Returns the per-step record.
    pub fn replay(&self) -> Result<Vec<CycleStep>> {
        let mut profile = self.initial.clone();
        let mut out = Vec::with_capacity(self.schedule.len());
        assert_eq!(profile.decisions(), &self.expected_profiles[0][..]);
        for (k, &(user, target)) in self.schedule.iter().enumerate() {
            let from = profile.decision(user);
            let old_cost = self.game.user_cost(user, &profile)?.total;
            let next = profile.with_decision(user, target);
            let new_cost = self.game.user_cost(user, &next)?.total;
            if !crate::model::strictly_better(new_cost, old_cost) {
                return Err(crate::error::Error::InvalidArgument(format!(
                    "cycle fixture step {k} (user {user}: {from} -> {target}) does not improve"
                )));
            }
            if next.decisions() != &self.expected_profiles[k + 1][..] {
                return Err(crate::error::Error::InvalidArgument(format!(
                    "cycle fixture step {k} reached {:?}, expected {:?}",
                    next.decisions(),
                    self.expected_profiles[k + 1]
                )));
            }
            out.push(CycleStep {
                user,
                from,
                to: target,
                old_cost,
                new_cost,
                profile_after: next.decisions().to_vec(),
            });
            profile = next;
        }
        Ok(out)
    }
}
