//! Domain types and cost formulas of the computation-offloading game.
//!
//! A game consists of `N` mobile users and `A` access points in front of a
//! cloud. Each user either computes her task locally (strategy `0`) or
//! offloads it via one AP (strategies `1..=A`). AP bandwidth is split equally
//! among the users connected to it; the cloud is either *elastic* (every
//! offloader gets the full cloud speed) or *non-elastic* (cloud speed is split
//! equally among all offloaders, coupling every offloading user).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which a unilateral deviation counts as a strict
/// improvement: `new < old - IMPROVEMENT_EPS * max(1, old)`.
///
/// Continuous random parameters make exact cost ties measure-zero; the
/// tolerance keeps floating-point noise from generating spurious improvement
/// steps that would break termination arguments.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// `true` iff moving from a cost of `old` to a cost of `new` is a strict
/// improvement under the global comparison tolerance.
#[inline]
pub fn strictly_better(new: f64, old: f64) -> bool {
    new < old - IMPROVEMENT_EPS * old.max(1.0)
}

/// One mobile user: task parameters, device parameters and cost weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobileUser {
    /// Input data size of the task, bits.
    pub data_bits: f64,
    /// CPU cycles required by the task.
    pub cycles: f64,
    /// Local computational capability, cycles/second.
    pub local_speed: f64,
    /// Energy consumed per CPU cycle when computing locally, joules/cycle.
    pub energy_per_cycle: f64,
    /// Transmit power used while uploading, watts.
    pub tx_power: f64,
    /// Weight attributed to completion time, in (0, 1].
    pub weight_time: f64,
    /// Weight attributed to energy consumption, in [0, 1), strictly below
    /// `weight_time`.
    pub weight_energy: f64,
}

impl MobileUser {
    pub fn new(
        data_bits: f64,
        cycles: f64,
        local_speed: f64,
        energy_per_cycle: f64,
        tx_power: f64,
        weight_time: f64,
        weight_energy: f64,
    ) -> Result<Self> {
        let user = Self {
            data_bits,
            cycles,
            local_speed,
            energy_per_cycle,
            tx_power,
            weight_time,
            weight_energy,
        };
        user.validate()?;
        Ok(user)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("data_bits", self.data_bits),
            ("cycles", self.cycles),
            ("local_speed", self.local_speed),
        ];
        for (what, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter {
                    what,
                    detail: format!("must be a positive finite real, got {v}"),
                });
            }
        }
        let non_negative = [
            ("energy_per_cycle", self.energy_per_cycle),
            ("tx_power", self.tx_power),
        ];
        for (what, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    what,
                    detail: format!("must be a non-negative finite real, got {v}"),
                });
            }
        }
        // 0 <= weight_energy < weight_time <= 1
        if !self.weight_time.is_finite()
            || !self.weight_energy.is_finite()
            || self.weight_energy < 0.0
            || self.weight_energy >= self.weight_time
            || self.weight_time > 1.0
        {
            return Err(Error::InvalidParameter {
                what: "weights",
                detail: format!(
                    "need 0 <= weight_energy < weight_time <= 1, got energy={} time={}",
                    self.weight_energy, self.weight_time
                ),
            });
        }
        Ok(())
    }
}

/// One access point; its uplink bandwidth is shared equally by its users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    /// Uplink bandwidth, bits/second.
    pub bandwidth: f64,
}

impl AccessPoint {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::InvalidParameter {
                what: "bandwidth",
                detail: format!("must be a positive finite real, got {bandwidth}"),
            });
        }
        Ok(Self { bandwidth })
    }
}

/// How the cloud assigns computing power to offloaders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudKind {
    /// Every offloader receives the full cloud speed.
    Elastic,
    /// Cloud speed is divided equally among all offloaders.
    #[serde(rename = "nonelastic")]
    NonElastic,
}

impl CloudKind {
    pub fn label(self) -> &'static str {
        match self {
            CloudKind::Elastic => "elastic",
            CloudKind::NonElastic => "nonelastic",
        }
    }
}

/// Cloud model: scaling behaviour plus the cloud computational capability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudModel {
    pub kind: CloudKind,
    /// Cloud computational capability, cycles/second.
    pub speed: f64,
}

impl CloudModel {
    pub fn new(kind: CloudKind, speed: f64) -> Result<Self> {
        if !speed.is_finite() || speed <= 0.0 {
            return Err(Error::InvalidParameter {
                what: "cloud speed",
                detail: format!("must be a positive finite real, got {speed}"),
            });
        }
        Ok(Self { kind, speed })
    }

    pub fn elastic(speed: f64) -> Result<Self> {
        Self::new(CloudKind::Elastic, speed)
    }

    pub fn non_elastic(speed: f64) -> Result<Self> {
        Self::new(CloudKind::NonElastic, speed)
    }

    pub fn is_elastic(&self) -> bool {
        self.kind == CloudKind::Elastic
    }
}

/// An immutable game instance: users, APs and the cloud model.
///
/// User indices are `0..N`, AP indices in strategy space are `1..=A`
/// (`0` means local computing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameInstance {
    users: Vec<MobileUser>,
    aps: Vec<AccessPoint>,
    cloud: CloudModel,
}

impl GameInstance {
    pub fn new(users: Vec<MobileUser>, aps: Vec<AccessPoint>, cloud: CloudModel) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidParameter {
                what: "users",
                detail: "a game needs at least one user".into(),
            });
        }
        if aps.is_empty() {
            return Err(Error::InvalidParameter {
                what: "aps",
                detail: "a game needs at least one access point".into(),
            });
        }
        for u in &users {
            u.validate()?;
        }
        Ok(Self { users, aps, cloud })
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn users(&self) -> &[MobileUser] {
        &self.users
    }

    pub fn aps(&self) -> &[AccessPoint] {
        &self.aps
    }

    pub fn cloud(&self) -> CloudModel {
        self.cloud
    }

    /// Bandwidth of AP `ap` (1-based strategy index).
    pub fn bandwidth(&self, ap: usize) -> f64 {
        self.aps[ap - 1].bandwidth
    }

    /// The same game with `user` appended as the last user.
    pub fn with_user(&self, user: MobileUser) -> Result<Self> {
        user.validate()?;
        let mut users = self.users.clone();
        users.push(user);
        Ok(Self {
            users,
            aps: self.aps.clone(),
            cloud: self.cloud,
        })
    }

    /// The same game with user `user` removed (higher indices shift down).
    pub fn without_user(&self, user: usize) -> Result<Self> {
        if user >= self.num_users() {
            return Err(Error::InvalidArgument(format!(
                "user index {user} out of range for {} users",
                self.num_users()
            )));
        }
        if self.num_users() == 1 {
            return Err(Error::InvalidArgument(
                "cannot remove the last user of a game".into(),
            ));
        }
        let mut users = self.users.clone();
        users.remove(user);
        Ok(Self {
            users,
            aps: self.aps.clone(),
            cloud: self.cloud,
        })
    }

    /// Restriction of the game to the first `n` users.
    pub fn restrict(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.num_users() {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict a {}-user game to {n} users",
                self.num_users()
            )));
        }
        Ok(Self {
            users: self.users[..n].to_vec(),
            aps: self.aps.clone(),
            cloud: self.cloud,
        })
    }

    fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.decisions.len() != self.num_users() {
            return Err(Error::ProfileLength {
                expected: self.num_users(),
                got: profile.decisions.len(),
            });
        }
        for (user, &s) in profile.decisions.iter().enumerate() {
            if s > self.num_aps() {
                return Err(Error::StrategyOutOfRange {
                    user,
                    strategy: s,
                    num_aps: self.num_aps(),
                });
            }
        }
        Ok(())
    }
}

/// One decision per user: `0` for local computing, `1..=A` for the chosen AP.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyProfile {
    decisions: Vec<usize>,
}

impl StrategyProfile {
    /// A profile validated against `game` (length and strategy range).
    pub fn new(game: &GameInstance, decisions: Vec<usize>) -> Result<Self> {
        let p = Self { decisions };
        game.check_profile(&p)?;
        Ok(p)
    }

    /// The profile in which every user computes locally.
    pub fn all_local(game: &GameInstance) -> Self {
        Self {
            decisions: vec![0; game.num_users()],
        }
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    pub fn decision(&self, user: usize) -> usize {
        self.decisions[user]
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    /// Number of users that offload in this profile.
    pub fn num_offloaders(&self) -> usize {
        self.decisions.iter().filter(|&&d| d > 0).count()
    }

    /// A copy with user `user` playing `strategy` instead.
    pub fn with_decision(&self, user: usize, strategy: usize) -> Self {
        let mut d = self.decisions.clone();
        d[user] = strategy;
        Self { decisions: d }
    }

    pub(crate) fn set(&mut self, user: usize, strategy: usize) {
        self.decisions[user] = strategy;
    }

    pub(crate) fn push(&mut self, strategy: usize) {
        self.decisions.push(strategy);
    }

    pub(crate) fn remove(&mut self, user: usize) {
        self.decisions.remove(user);
    }
}

/// Congestion counts of a profile: users per AP and total offloaders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congestion {
    /// `per_ap[a-1]` is the number of users offloading via AP `a`.
    pub per_ap: Vec<usize>,
    /// Total number of offloaders.
    pub total: usize,
}

impl Congestion {
    /// Count of AP `ap` (1-based strategy index).
    pub fn on_ap(&self, ap: usize) -> usize {
        self.per_ap[ap - 1]
    }
}

/// Cost of one user in one profile, split into its weighted components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    /// Total cost; equals `time_component + energy_component` up to 1e-12
    /// relative rounding.
    pub total: f64,
    /// Time-weighted part.
    pub time_component: f64,
    /// Energy-weighted part.
    pub energy_component: f64,
    /// Strategy the cost was evaluated at.
    pub decision: usize,
}

/// Precomputed per-user cost constants.
///
/// `offload cost = rate_factor * n_a / B_a + cloud_factor * m`, where `m` is
/// `1` under the elastic model and the total offloader count under the
/// non-elastic model. The public cost operations use the same groupings, so
/// both routes produce bit-identical values.
#[derive(Debug, Clone)]
pub(crate) struct Evaluator {
    /// `(weight_time + weight_energy * tx_power) * data_bits` per user.
    pub rate_factor: Vec<f64>,
    /// `weight_time * cycles / cloud_speed` per user.
    pub cloud_factor: Vec<f64>,
    /// Local cost per user.
    pub local: Vec<f64>,
    /// AP bandwidths, 0-based.
    pub bandwidth: Vec<f64>,
    pub elastic: bool,
}

impl Evaluator {
    pub fn new(game: &GameInstance) -> Self {
        let cloud_speed = game.cloud.speed;
        let mut rate_factor = Vec::with_capacity(game.num_users());
        let mut cloud_factor = Vec::with_capacity(game.num_users());
        let mut local = Vec::with_capacity(game.num_users());
        for u in &game.users {
            rate_factor.push(rate_cost_factor(u));
            cloud_factor.push(u.weight_time * u.cycles / cloud_speed);
            local.push(local_cost_of(u));
        }
        Self {
            rate_factor,
            cloud_factor,
            local,
            bandwidth: game.aps.iter().map(|ap| ap.bandwidth).collect(),
            elastic: game.cloud.is_elastic(),
        }
    }

    pub fn num_aps(&self) -> usize {
        self.bandwidth.len()
    }

    /// Cost of `user` offloading via AP `ap` when `count_on_ap` users
    /// (including her) share the AP and `total_offloaders` users (including
    /// her) offload overall.
    #[inline]
    pub fn offload_cost(
        &self,
        user: usize,
        ap: usize,
        count_on_ap: usize,
        total_offloaders: usize,
    ) -> f64 {
        let mult = if self.elastic {
            1.0
        } else {
            total_offloaders as f64
        };
        self.rate_factor[user] * count_on_ap as f64 / self.bandwidth[ap - 1]
            + self.cloud_factor[user] * mult
    }

    #[inline]
    pub fn local_cost(&self, user: usize) -> f64 {
        self.local[user]
    }

    /// Cost of `user` in the profile whose congestion counts are
    /// `(per_ap, total)`, given her current `strategy`.
    #[inline]
    pub fn current_cost(
        &self,
        user: usize,
        strategy: usize,
        per_ap: &[usize],
        total: usize,
    ) -> f64 {
        if strategy == 0 {
            self.local[user]
        } else {
            self.offload_cost(user, strategy, per_ap[strategy - 1], total)
        }
    }

    /// Cost of `user` after unilaterally deviating to `strategy` from her
    /// current decision, with congestion counts re-derived for the deviated
    /// profile.
    #[inline]
    pub fn deviation_cost(
        &self,
        user: usize,
        current: usize,
        strategy: usize,
        per_ap: &[usize],
        total: usize,
    ) -> f64 {
        if strategy == 0 {
            return self.local[user];
        }
        let count_on_ap = if strategy == current {
            per_ap[strategy - 1]
        } else {
            per_ap[strategy - 1] + 1
        };
        let total = if current == 0 { total + 1 } else { total };
        self.offload_cost(user, strategy, count_on_ap, total)
    }
}

#[inline]
fn rate_cost_factor(u: &MobileUser) -> f64 {
    (u.weight_time + u.weight_energy * u.tx_power) * u.data_bits
}

#[inline]
fn local_cost_of(u: &MobileUser) -> f64 {
    (u.weight_time / u.local_speed + u.weight_energy * u.energy_per_cycle) * u.cycles
}

/// Witness that a profile is not a Nash equilibrium: `user` strictly gains
/// by deviating to `strategy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NashWitness {
    pub user: usize,
    pub strategy: usize,
}

impl GameInstance {
    /// Per-AP user counts and the total offloader count of `profile`.
    pub fn congestion_counts(&self, profile: &StrategyProfile) -> Result<Congestion> {
        self.check_profile(profile)?;
        let mut per_ap = vec![0usize; self.num_aps()];
        let mut total = 0usize;
        for &d in &profile.decisions {
            if d > 0 {
                per_ap[d - 1] += 1;
                total += 1;
            }
        }
        Ok(Congestion { per_ap, total })
    }

    /// Uplink rate of `user`, bits/second: her AP's bandwidth divided by the
    /// number of users sharing it. Errors if she computes locally.
    pub fn uplink_rate(&self, user: usize, profile: &StrategyProfile) -> Result<f64> {
        let counts = self.congestion_counts(profile)?;
        let ap = profile.decision(user);
        if ap == 0 {
            return Err(Error::NotAnOffloader { user });
        }
        Ok(self.bandwidth(ap) / counts.on_ap(ap) as f64)
    }

    /// Cost of `user` computing locally; independent of the profile.
    pub fn local_cost(&self, user: usize) -> f64 {
        local_cost_of(&self.users[user])
    }

    /// Cost of `user` offloading via AP `ap` in `profile`.
    ///
    /// The congestion counts include the user herself; `profile` must have
    /// her on AP `ap`.
    pub fn offload_cost(&self, user: usize, ap: usize, profile: &StrategyProfile) -> Result<f64> {
        let counts = self.congestion_counts(profile)?;
        if profile.decision(user) != ap || ap == 0 {
            return Err(Error::InconsistentQuery { user, ap });
        }
        let u = &self.users[user];
        let mult = if self.cloud.is_elastic() {
            1.0
        } else {
            counts.total as f64
        };
        Ok(
            rate_cost_factor(u) * counts.on_ap(ap) as f64 / self.bandwidth(ap)
                + (u.weight_time * u.cycles / self.cloud.speed) * mult,
        )
    }

    /// Cost of `user` in `profile`, with its weighted time/energy split.
    pub fn user_cost(&self, user: usize, profile: &StrategyProfile) -> Result<CostBreakdown> {
        let counts = self.congestion_counts(profile)?;
        Ok(self.user_cost_with_counts(user, profile, &counts))
    }

    fn user_cost_with_counts(
        &self,
        user: usize,
        profile: &StrategyProfile,
        counts: &Congestion,
    ) -> CostBreakdown {
        let u = &self.users[user];
        let d = profile.decision(user);
        if d == 0 {
            let time = u.weight_time * (u.cycles / u.local_speed);
            let energy = u.weight_energy * (u.energy_per_cycle * u.cycles);
            CostBreakdown {
                total: local_cost_of(u),
                time_component: time,
                energy_component: energy,
                decision: 0,
            }
        } else {
            let rate = self.bandwidth(d) / counts.on_ap(d) as f64;
            let tx_time = u.data_bits / rate;
            let cloud_speed_share = if self.cloud.is_elastic() {
                self.cloud.speed
            } else {
                self.cloud.speed / counts.total as f64
            };
            let time = u.weight_time * (u.cycles / cloud_speed_share + tx_time);
            let energy = u.weight_energy * (u.data_bits * u.tx_power / rate);
            let mult = if self.cloud.is_elastic() {
                1.0
            } else {
                counts.total as f64
            };
            let total = rate_cost_factor(u) * counts.on_ap(d) as f64 / self.bandwidth(d)
                + (u.weight_time * u.cycles / self.cloud.speed) * mult;
            CostBreakdown {
                total,
                time_component: time,
                energy_component: energy,
                decision: d,
            }
        }
    }

    /// Sum of all users' costs in `profile`.
    pub fn total_cost(&self, profile: &StrategyProfile) -> Result<f64> {
        let counts = self.congestion_counts(profile)?;
        let ev = Evaluator::new(self);
        Ok((0..self.num_users())
            .map(|i| ev.current_cost(i, profile.decision(i), &counts.per_ap, counts.total))
            .sum())
    }

    /// Reluctance of offloading `user`: her offloading cost divided by her
    /// local cost. Above 1 iff offloading is currently worse than local.
    pub fn reluctance(&self, user: usize, profile: &StrategyProfile) -> Result<f64> {
        let ap = profile.decision(user);
        if ap == 0 {
            return Err(Error::NotAnOffloader { user });
        }
        Ok(self.offload_cost(user, ap, profile)? / self.local_cost(user))
    }

    /// Strategies that strictly improve `user`'s cost as unilateral
    /// deviations from `profile`, in ascending strategy order.
    pub fn improving_deviations(
        &self,
        user: usize,
        profile: &StrategyProfile,
    ) -> Result<Vec<usize>> {
        let counts = self.congestion_counts(profile)?;
        let ev = Evaluator::new(self);
        let current = profile.decision(user);
        let cost_now = ev.current_cost(user, current, &counts.per_ap, counts.total);
        let mut out = Vec::new();
        for s in 0..=self.num_aps() {
            if s == current {
                continue;
            }
            if strictly_better(
                ev.deviation_cost(user, current, s, &counts.per_ap, counts.total),
                cost_now,
            ) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// `None` if `profile` is a Nash equilibrium, otherwise the first
    /// improving deviation found scanning users then strategies in ascending
    /// order.
    pub fn nash_witness(&self, profile: &StrategyProfile) -> Result<Option<NashWitness>> {
        let counts = self.congestion_counts(profile)?;
        let ev = Evaluator::new(self);
        Ok(nash_witness_with(
            &ev,
            profile.decisions(),
            &counts.per_ap,
            counts.total,
        ))
    }

    /// `true` iff no user has a strictly improving unilateral deviation.
    pub fn is_nash(&self, profile: &StrategyProfile) -> Result<bool> {
        Ok(self.nash_witness(profile)?.is_none())
    }
}

pub(crate) fn nash_witness_with(
    ev: &Evaluator,
    decisions: &[usize],
    per_ap: &[usize],
    total: usize,
) -> Option<NashWitness> {
    for (user, &current) in decisions.iter().enumerate() {
        let cost_now = ev.current_cost(user, current, per_ap, total);
        for s in 0..=ev.num_aps() {
            if s == current {
                continue;
            }
            if strictly_better(ev.deviation_cost(user, current, s, per_ap, total), cost_now) {
                return Some(NashWitness { user, strategy: s });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn user(
        data_bits: f64,
        cycles: f64,
        local_speed: f64,
        weight_time: f64,
        weight_energy: f64,
    ) -> MobileUser {
        MobileUser::new(
            data_bits,
            cycles,
            local_speed,
            5e-12,
            0.4,
            weight_time,
            weight_energy,
        )
        .unwrap()
    }

    fn simple_game(n: usize, bands: &[f64], cloud: CloudModel) -> GameInstance {
        let users = (0..n).map(|_| user(1e6, 0.5e9, 1e9, 1.0, 0.0)).collect();
        let aps = bands
            .iter()
            .map(|&b| AccessPoint::new(b).unwrap())
            .collect();
        GameInstance::new(users, aps, cloud).unwrap()
    }

    #[test]
    fn weight_constraint_rejected() {
        assert!(MobileUser::new(1e6, 1e9, 1e9, 0.0, 0.4, 0.5, 0.5).is_err());
        assert!(MobileUser::new(1e6, 1e9, 1e9, 0.0, 0.4, 0.3, 0.6).is_err());
        assert!(MobileUser::new(1e6, 1e9, 1e9, 0.0, 0.4, 1.2, 0.1).is_err());
        assert!(MobileUser::new(1e6, -1.0, 1e9, 0.0, 0.4, 1.0, 0.0).is_err());
        assert!(MobileUser::new(1e6, 1e9, 1e9, 0.0, 0.4, 1.0, 0.0).is_ok());
    }

    #[test]
    fn congestion_counts_match_examples() {
        let g = simple_game(5, &[5e6, 5e6, 5e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1, 2, 1, 0, 0]).unwrap();
        let c = g.congestion_counts(&p).unwrap();
        assert_eq!(c.per_ap, vec![2, 1, 0]);
        assert_eq!(c.total, 3);

        let all_local = StrategyProfile::all_local(&g);
        let c = g.congestion_counts(&all_local).unwrap();
        assert_eq!(c.per_ap, vec![0, 0, 0]);
        assert_eq!(c.total, 0);

        let g1 = simple_game(3, &[5e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g1, vec![1, 1, 1]).unwrap();
        let c = g1.congestion_counts(&p).unwrap();
        assert_eq!(c.per_ap, vec![3]);
        assert_eq!(c.total, 3);
    }

    #[test]
    fn congestion_counts_rejects_length_mismatch() {
        let g = simple_game(3, &[5e6], CloudModel::elastic(100e9).unwrap());
        let other = simple_game(2, &[5e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&other, vec![1, 0]).unwrap();
        assert!(matches!(
            g.congestion_counts(&p),
            Err(Error::ProfileLength {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn profile_rejects_out_of_range_strategy() {
        let g = simple_game(2, &[5e6], CloudModel::elastic(100e9).unwrap());
        assert!(matches!(
            StrategyProfile::new(&g, vec![0, 2]),
            Err(Error::StrategyOutOfRange {
                user: 1,
                strategy: 2,
                num_aps: 1
            })
        ));
    }

    #[test]
    fn uplink_rate_divides_equally() {
        let g = simple_game(3, &[6e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1, 1, 1]).unwrap();
        assert_eq!(g.uplink_rate(0, &p).unwrap(), 2e6);

        let g = simple_game(2, &[5e6], CloudModel::elastic(100e9).unwrap());
        let sole = StrategyProfile::new(&g, vec![1, 0]).unwrap();
        assert_eq!(g.uplink_rate(0, &sole).unwrap(), 5e6);
        let both = StrategyProfile::new(&g, vec![1, 1]).unwrap();
        assert_eq!(g.uplink_rate(0, &both).unwrap(), 2.5e6);
        assert_eq!(g.uplink_rate(1, &both).unwrap(), 2.5e6);

        assert!(matches!(
            g.uplink_rate(1, &sole),
            Err(Error::NotAnOffloader { user: 1 })
        ));
    }

    #[test]
    fn equal_sharing_identity() {
        // uplink_rate * n_a == B_a exactly for every offloader.
        let g = simple_game(4, &[6e6, 7e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1, 1, 2, 1]).unwrap();
        let counts = g.congestion_counts(&p).unwrap();
        for i in 0..4 {
            let ap = p.decision(i);
            let rate = g.uplink_rate(i, &p).unwrap();
            assert_eq!(rate * counts.on_ap(ap) as f64, g.bandwidth(ap));
        }
    }

    #[test]
    fn local_cost_examples() {
        // Pure time term c/f.
        let u = user(1e6, 0.5e9, 1e9, 1.0, 0.0);
        let g = GameInstance::new(
            vec![u],
            vec![AccessPoint::new(5e6).unwrap()],
            CloudModel::elastic(100e9).unwrap(),
        )
        .unwrap();
        assert_eq!(g.local_cost(0), 0.5);

        // Zero energy weight kills the energy term regardless of v.
        let u = MobileUser::new(1e6, 0.5e9, 1e9, 123.0, 0.4, 1.0, 0.0).unwrap();
        let g = GameInstance::new(
            vec![u],
            vec![AccessPoint::new(5e6).unwrap()],
            CloudModel::elastic(100e9).unwrap(),
        )
        .unwrap();
        assert_eq!(g.local_cost(0), 0.5);

        // Hand-expanded arithmetic: 0.8*0.5 + 0.2*6.4e-12*0.4e9 = 0.400512.
        let u = MobileUser::new(1e6, 0.4e9, 0.8e9, 6.4e-12, 0.4, 0.8, 0.2).unwrap();
        let g = GameInstance::new(
            vec![u],
            vec![AccessPoint::new(5e6).unwrap()],
            CloudModel::elastic(100e9).unwrap(),
        )
        .unwrap();
        let expected = 0.8 * (0.4e9 / 0.8e9) + 0.2 * 6.4e-12 * 0.4e9;
        assert!((g.local_cost(0) - expected).abs() < 1e-15);
        assert!((g.local_cost(0) - 0.400512).abs() < 1e-12);
    }

    #[test]
    fn offload_cost_examples() {
        // Elastic, single offloader: 1e6/5e6 + 0.5e9/100e9 = 0.205.
        let g = simple_game(1, &[5e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1]).unwrap();
        assert!((g.offload_cost(0, 1, &p).unwrap() - 0.205).abs() < 1e-15);

        // Non-elastic with n == 1 collapses to the elastic cost.
        let gn = simple_game(1, &[5e6], CloudModel::non_elastic(100e9).unwrap());
        assert_eq!(
            gn.offload_cost(0, 1, &p).unwrap(),
            g.offload_cost(0, 1, &p).unwrap()
        );

        // Non-elastic, second offloader elsewhere: 0.2 + 2*0.005 = 0.21.
        let gn = simple_game(2, &[5e6, 5e6], CloudModel::non_elastic(100e9).unwrap());
        let p = StrategyProfile::new(&gn, vec![1, 2]).unwrap();
        assert!((gn.offload_cost(0, 1, &p).unwrap() - 0.21).abs() < 1e-15);

        // Inconsistent query: user 1 is on AP 2, not AP 1.
        assert!(matches!(
            gn.offload_cost(1, 1, &p),
            Err(Error::InconsistentQuery { user: 1, ap: 1 })
        ));
    }

    #[test]
    fn user_cost_selects_branch_and_breakdown_sums() {
        let g = simple_game(3, &[5e6, 4e6], CloudModel::non_elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![0, 1, 2]).unwrap();

        // Local user: cost equals local cost no matter what others play.
        let c0 = g.user_cost(0, &p).unwrap();
        assert_eq!(c0.total, g.local_cost(0));
        assert_eq!(c0.decision, 0);
        let p2 = StrategyProfile::new(&g, vec![0, 2, 2]).unwrap();
        assert_eq!(g.user_cost(0, &p2).unwrap().total, c0.total);

        // Offloader: matches offload_cost, components sum to total.
        let c1 = g.user_cost(1, &p).unwrap();
        assert_eq!(c1.total, g.offload_cost(1, 1, &p).unwrap());
        for c in [c0, c1] {
            let sum = c.time_component + c.energy_component;
            assert!(
                (sum - c.total).abs() <= 1e-12 * c.total.abs().max(1e-300),
                "components {sum} vs total {}",
                c.total
            );
        }
    }

    #[test]
    fn total_cost_matches_independent_sum() {
        let g = simple_game(4, &[5e6, 4e6], CloudModel::non_elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1, 1, 2, 0]).unwrap();
        // Recompute from raw formulas.
        let n = 3.0;
        let expected = {
            let f = |d: f64| (1.0 + 0.0 * 0.4) * d;
            let c01 = f(1e6) * 2.0 / 5e6 + (0.5e9 / 100e9) * n;
            let c2 = f(1e6) * 1.0 / 4e6 + (0.5e9 / 100e9) * n;
            let l = 0.5;
            c01 * 2.0 + c2 + l
        };
        assert!((g.total_cost(&p).unwrap() - expected).abs() < 1e-12);

        // N = 1: equals the single user's cost.
        let g1 = simple_game(1, &[5e6], CloudModel::elastic(100e9).unwrap());
        let p1 = StrategyProfile::new(&g1, vec![1]).unwrap();
        assert_eq!(
            g1.total_cost(&p1).unwrap(),
            g1.user_cost(0, &p1).unwrap().total
        );

        // All-local: sum of local costs.
        let pl = StrategyProfile::all_local(&g);
        assert_eq!(g.total_cost(&pl).unwrap(), 4.0 * 0.5);
    }

    #[test]
    fn reluctance_is_cost_ratio() {
        let g = simple_game(1, &[5e6], CloudModel::elastic(100e9).unwrap());
        let p = StrategyProfile::new(&g, vec![1]).unwrap();
        let rel = g.reluctance(0, &p).unwrap();
        assert!((rel - 0.205 / 0.5).abs() < 1e-15);

        let pl = StrategyProfile::all_local(&g);
        assert!(matches!(
            g.reluctance(0, &pl),
            Err(Error::NotAnOffloader { user: 0 })
        ));
    }

    #[test]
    fn model_collapse_when_single_offloader() {
        // Elastic and non-elastic agree whenever n(d) == 1.
        let ge = simple_game(3, &[5e6, 3e6], CloudModel::elastic(100e9).unwrap());
        let gn = simple_game(3, &[5e6, 3e6], CloudModel::non_elastic(100e9).unwrap());
        for ap in 1..=2 {
            let mut d = vec![0, 0, 0];
            d[1] = ap;
            let p = StrategyProfile::new(&ge, d).unwrap();
            assert_eq!(
                ge.offload_cost(1, ap, &p).unwrap(),
                gn.offload_cost(1, ap, &p).unwrap()
            );
        }
    }

    #[test]
    fn monotone_congestion() {
        // Adding one offloader to an AP strictly raises the cost of everyone
        // already there; under the non-elastic model adding an offloader
        // anywhere strictly raises every offloader's cost.
        for cloud in [
            CloudModel::elastic(100e9).unwrap(),
            CloudModel::non_elastic(100e9).unwrap(),
        ] {
            let g = simple_game(4, &[5e6, 3e6], cloud);
            let before = StrategyProfile::new(&g, vec![1, 1, 0, 0]).unwrap();
            let after = StrategyProfile::new(&g, vec![1, 1, 1, 0]).unwrap();
            for i in 0..2 {
                assert!(
                    g.offload_cost(i, 1, &after).unwrap() > g.offload_cost(i, 1, &before).unwrap()
                );
            }
            let elsewhere = StrategyProfile::new(&g, vec![1, 1, 2, 0]).unwrap();
            let raised = g.offload_cost(0, 1, &elsewhere).unwrap();
            let base = g.offload_cost(0, 1, &before).unwrap();
            if g.cloud().is_elastic() {
                assert_eq!(raised, base);
            } else {
                assert!(raised > base);
            }
        }
    }

    #[test]
    fn weight_scaling_leaves_deviations_unchanged() {
        // Scaling (weight_time, weight_energy) by a common factor scales all
        // costs linearly and leaves the improving-deviation set unchanged.
        let mk = |scale: f64| {
            let users = vec![
                MobileUser::new(1.2e6, 0.4e9, 0.7e9, 4e-12, 0.4, 0.9 * scale, 0.3 * scale).unwrap(),
                MobileUser::new(0.8e6, 0.6e9, 0.9e9, 6e-12, 0.4, 0.8 * scale, 0.1 * scale).unwrap(),
                MobileUser::new(1.9e6, 0.2e9, 0.5e9, 8e-12, 0.4, 0.7 * scale, 0.2 * scale).unwrap(),
            ];
            let aps = vec![
                AccessPoint::new(5e6).unwrap(),
                AccessPoint::new(4e6).unwrap(),
            ];
            GameInstance::new(users, aps, CloudModel::non_elastic(100e9).unwrap()).unwrap()
        };
        let g1 = mk(1.0);
        let g2 = mk(0.5);
        for d in [vec![0, 1, 2], vec![1, 1, 1], vec![2, 0, 1]] {
            let p = StrategyProfile::new(&g1, d).unwrap();
            for i in 0..3 {
                assert_eq!(
                    g1.improving_deviations(i, &p).unwrap(),
                    g2.improving_deviations(i, &p).unwrap()
                );
                let c1 = g1.user_cost(i, &p).unwrap().total;
                let c2 = g2.user_cost(i, &p).unwrap().total;
                assert!((c2 - 0.5 * c1).abs() < 1e-12 * c1.max(1.0));
            }
        }
    }

    #[test]
    fn single_user_argmin_is_nash() {
        let g = simple_game(1, &[5e6], CloudModel::elastic(100e9).unwrap());
        // Offloading costs 0.205 < local 0.5, so AP 1 is the argmin.
        let p = StrategyProfile::new(&g, vec![1]).unwrap();
        assert!(g.is_nash(&p).unwrap());
        let pl = StrategyProfile::all_local(&g);
        assert_eq!(
            g.nash_witness(&pl).unwrap(),
            Some(NashWitness {
                user: 0,
                strategy: 1
            })
        );
    }
}
