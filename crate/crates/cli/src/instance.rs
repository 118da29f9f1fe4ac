//! Instance/config file schema: a scenario config document, optionally
//! carrying explicit user and AP lists for hand-built instances.

use offload_game::model::{AccessPoint, CloudModel, GameInstance, MobileUser};
use offload_game::scenario::{generate, ScenarioConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub config: ScenarioConfig,
    /// Explicit users; when present the scenario sampling fields are ignored
    /// and `n_users` must match.
    #[serde(default)]
    pub users: Option<Vec<MobileUser>>,
    /// Explicit APs; `n_aps` must match when present.
    #[serde(default)]
    pub aps: Option<Vec<AccessPoint>>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid instance file: {e}"))
    }

    /// Build the game: explicit lists when given, sampled otherwise.
    pub fn build(&self) -> Result<GameInstance, String> {
        match (&self.users, &self.aps) {
            (None, None) => generate(&self.config).map_err(|e| e.to_string()),
            (users, aps) => {
                let users = match users {
                    Some(u) => u.clone(),
                    None => generate(&self.config)
                        .map_err(|e| e.to_string())?
                        .users()
                        .to_vec(),
                };
                let aps = match aps {
                    Some(a) => a.clone(),
                    None => generate(&self.config)
                        .map_err(|e| e.to_string())?
                        .aps()
                        .to_vec(),
                };
                if users.len() != self.config.n_users {
                    return Err(format!(
                        "n_users is {} but {} users listed",
                        self.config.n_users,
                        users.len()
                    ));
                }
                if aps.len() != self.config.n_aps {
                    return Err(format!(
                        "n_aps is {} but {} APs listed",
                        self.config.n_aps,
                        aps.len()
                    ));
                }
                let cloud = CloudModel::new(self.config.cloud, self.config.cloud_speed)
                    .map_err(|e| e.to_string())?;
                GameInstance::new(users, aps, cloud).map_err(|e| e.to_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use offload_game::model::CloudKind;

    #[test]
    fn sampled_instance_uses_scenario_defaults() {
        let f = InstanceFile::parse(r#"{"n_users": 4, "n_aps": 2, "cloud": "elastic", "seed": 5}"#)
            .unwrap();
        assert_eq!(f.config.bandwidth_mean_hz, 5e6);
        let g = f.build().unwrap();
        assert_eq!(g.num_users(), 4);
        assert_eq!(g.num_aps(), 2);
        assert_eq!(g.cloud().kind, CloudKind::Elastic);
    }

    #[test]
    fn explicit_instance_round_trips() {
        let text = r#"{
            "n_users": 2, "n_aps": 1, "cloud": "nonelastic", "cloud_speed": 1e10,
            "users": [
                {"data_bits": 1e6, "cycles": 5e8, "local_speed": 1e9,
                 "energy_per_cycle": 5e-12, "tx_power": 0.4,
                 "weight_time": 1.0, "weight_energy": 0.0},
                {"data_bits": 2e6, "cycles": 3e8, "local_speed": 8e8,
                 "energy_per_cycle": 5e-12, "tx_power": 0.4,
                 "weight_time": 0.9, "weight_energy": 0.1}
            ],
            "aps": [{"bandwidth": 5e6}]
        }"#;
        let g = InstanceFile::parse(text).unwrap().build().unwrap();
        assert_eq!(g.num_users(), 2);
        assert_eq!(g.bandwidth(1), 5e6);
        assert_eq!(g.cloud().speed, 1e10);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let text = r#"{"n_users": 3, "n_aps": 1, "cloud": "elastic",
            "users": [{"data_bits": 1e6, "cycles": 5e8, "local_speed": 1e9,
                       "energy_per_cycle": 0.0, "tx_power": 0.4,
                       "weight_time": 1.0, "weight_energy": 0.0}]}"#;
        assert!(InstanceFile::parse(text).unwrap().build().is_err());
    }

    #[test]
    fn invalid_weights_are_rejected_on_build() {
        let text = r#"{"n_users": 1, "n_aps": 1, "cloud": "elastic",
            "users": [{"data_bits": 1e6, "cycles": 5e8, "local_speed": 1e9,
                       "energy_per_cycle": 0.0, "tx_power": 0.4,
                       "weight_time": 0.2, "weight_energy": 0.9}],
            "aps": [{"bandwidth": 5e6}]}"#;
        assert!(InstanceFile::parse(text).unwrap().build().is_err());
    }
}
