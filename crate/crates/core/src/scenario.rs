//! Seeded random scenario generation and the evaluation metrics.
//!
//! Default parameters: AP bandwidth is normal with mean 5 MHz and standard
//! deviation 0.2 of the mean (resampled until positive); task input sizes are
//! uniform on [0.42, 2] Mb; task cycles uniform on [0.1, 0.8] Gigacycles;
//! device speeds uniform on [0.5, 1] Gigacycles/s; the time and energy
//! weights are uniform on [0, 1] with the pair swapped whenever the energy
//! weight exceeds the time weight (resampled on exact equality); energy per
//! cycle is `1e-11 * f^2` with `f` in Gigacycles/s; transmit power is 0.4 W;
//! the cloud computes at 100 Gigacycles/s.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AccessPoint, CloudKind, CloudModel, GameInstance, MobileUser, StrategyProfile};

fn default_bandwidth_mean() -> f64 {
    5e6
}
fn default_bandwidth_sd_fraction() -> f64 {
    0.2
}
fn default_data_bits_range() -> [f64; 2] {
    [0.42e6, 2e6]
}
fn default_cycles_range() -> [f64; 2] {
    [0.1e9, 0.8e9]
}
fn default_local_speed_range() -> [f64; 2] {
    [0.5e9, 1e9]
}
fn default_tx_power() -> f64 {
    0.4
}
fn default_cloud_speed() -> f64 {
    100e9
}

/// Parameters of one random scenario. Serializes as the JSON instance/config
/// document consumed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_users: usize,
    pub n_aps: usize,
    pub cloud: CloudKind,
    #[serde(default = "default_bandwidth_mean")]
    pub bandwidth_mean_hz: f64,
    #[serde(default = "default_bandwidth_sd_fraction")]
    pub bandwidth_sd_fraction: f64,
    #[serde(default = "default_data_bits_range")]
    pub data_bits_range: [f64; 2],
    #[serde(default = "default_cycles_range")]
    pub cycles_range: [f64; 2],
    #[serde(default = "default_local_speed_range")]
    pub local_speed_range: [f64; 2],
    #[serde(default = "default_tx_power")]
    pub tx_power_w: f64,
    #[serde(default = "default_cloud_speed")]
    pub cloud_speed: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    /// The default evaluation scenario for the given dimensions.
    pub fn defaults(n_users: usize, n_aps: usize, cloud: CloudKind, seed: u64) -> Self {
        Self {
            n_users,
            n_aps,
            cloud,
            bandwidth_mean_hz: default_bandwidth_mean(),
            bandwidth_sd_fraction: default_bandwidth_sd_fraction(),
            data_bits_range: default_data_bits_range(),
            cycles_range: default_cycles_range(),
            local_speed_range: default_local_speed_range(),
            tx_power_w: default_tx_power(),
            cloud_speed: default_cloud_speed(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_aps == 0 {
            return Err(Error::Config("n_users and n_aps must be positive".into()));
        }
        if !self.bandwidth_mean_hz.is_finite()
            || self.bandwidth_mean_hz <= 0.0
            || !self.bandwidth_sd_fraction.is_finite()
            || self.bandwidth_sd_fraction < 0.0
        {
            return Err(Error::Config(
                "bandwidth mean must be positive and sd fraction non-negative".into(),
            ));
        }
        for (name, r) in [
            ("data_bits_range", self.data_bits_range),
            ("cycles_range", self.cycles_range),
            ("local_speed_range", self.local_speed_range),
        ] {
            if !r[0].is_finite() || !r[1].is_finite() || r[0] <= 0.0 || r[1] < r[0] {
                return Err(Error::Config(format!(
                    "{name} must be positive and ordered, got [{}, {}]",
                    r[0], r[1]
                )));
            }
        }
        if self.tx_power_w < 0.0 || !self.tx_power_w.is_finite() || self.cloud_speed <= 0.0 {
            return Err(Error::Config(
                "tx power must be non-negative, cloud speed positive".into(),
            ));
        }
        Ok(())
    }
}

fn sample_range(rng: &mut Pcg64, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.gen_range(range[0]..range[1])
    }
}

/// Draw a game instance from `config`. Deterministic given the seed.
pub fn generate(config: &ScenarioConfig) -> Result<GameInstance> {
    config.validate()?;
    let mut rng = Pcg64::seed_from_u64(config.seed);
    let normal = Normal::new(
        config.bandwidth_mean_hz,
        config.bandwidth_sd_fraction * config.bandwidth_mean_hz,
    )
    .map_err(|e| Error::Config(format!("bad bandwidth distribution: {e}")))?;

    let mut aps = Vec::with_capacity(config.n_aps);
    for _ in 0..config.n_aps {
        // Resample non-positive draws; bandwidths must be physical.
        let b = loop {
            let b = normal.sample(&mut rng);
            if b > 0.0 {
                break b;
            }
        };
        aps.push(AccessPoint::new(b)?);
    }

    let mut users = Vec::with_capacity(config.n_users);
    for _ in 0..config.n_users {
        let data_bits = sample_range(&mut rng, config.data_bits_range);
        let cycles = sample_range(&mut rng, config.cycles_range);
        let local_speed = sample_range(&mut rng, config.local_speed_range);
        let (weight_time, weight_energy) = loop {
            let a: f64 = rng.gen();
            let b: f64 = rng.gen();
            if a == b {
                continue;
            }
            break (a.max(b), a.min(b));
        };
        let ghz = local_speed / 1e9;
        let energy_per_cycle = 1e-11 * ghz * ghz;
        users.push(MobileUser::new(
            data_bits,
            cycles,
            local_speed,
            energy_per_cycle,
            config.tx_power_w,
            weight_time,
            weight_energy,
        )?);
    }

    GameInstance::new(
        users,
        aps,
        CloudModel::new(config.cloud, config.cloud_speed)?,
    )
}

/// Ratio of the equilibrium total cost to the optimal total cost.
pub fn cost_ratio(
    game: &GameInstance,
    equilibrium: &StrategyProfile,
    optimal: &StrategyProfile,
) -> Result<f64> {
    Ok(game.total_cost(equilibrium)? / game.total_cost(optimal)?)
}

/// `(offloaders at equilibrium - offloaders at optimum) / N`.
pub fn offloading_difference_ratio(
    game: &GameInstance,
    equilibrium: &StrategyProfile,
    optimal: &StrategyProfile,
) -> Result<f64> {
    game.congestion_counts(equilibrium)?;
    game.congestion_counts(optimal)?;
    Ok(
        (equilibrium.num_offloaders() as f64 - optimal.num_offloaders() as f64)
            / game.num_users() as f64,
    )
}
