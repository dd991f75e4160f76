//! Scenario config files: flat `key = value` TOML, strictly validated.
//!
//! Angles are degrees here (and only here); everything downstream of
//! [`ScenarioConfig::to_scenario`] works in radians.

use nfmodes::Scenario;
use serde::{Deserialize, Serialize};

/// Scenario description as read from a config file.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub tx_length_m: f64,
    pub rx_length_m: f64,
    #[serde(default)]
    pub rx_center_offset_m: f64,
    #[serde(default)]
    pub tx_rotation_deg: f64,
    pub distance_m: f64,
    pub frequency_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_spacing_m: Option<f64>,
}

impl ScenarioConfig {
    /// Parse a config file, rejecting unknown keys by name.
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Validate and convert into the library's scenario (radians).
    pub fn to_scenario(&self) -> Result<Scenario, String> {
        Scenario::new(
            self.tx_length_m,
            self.rx_length_m,
            self.rx_center_offset_m,
            self.tx_rotation_deg.to_radians(),
            self.distance_m,
            self.frequency_hz,
        )
        .map_err(|e| e.to_string())
    }
}
