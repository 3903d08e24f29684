//! Scenario files: a TOML document with a `[network]` table, one `[[tier]]`
//! table per tier, and optional `[quadrature]` and `[simulation]` tables.
//!
//! ```toml
//! [network]
//! alpha = 4.0
//! user_type = 2
//! coupled_tier = 2      # 1-based, must name a pcp tier
//! user_spread = 0.04
//!
//! [[tier]]
//! kind = "ppp"
//! power = 1.0
//! intensity = 1.0
//!
//! [[tier]]
//! kind = "pcp"
//! power = 100.0
//! parent_intensity = 2.5
//! mean_cluster_size = 4.0
//! cluster_spread = 0.04
//! ```

use std::path::Path;

use hetnet_meta::{NetworkModel, QuadratureConfig, TierSpec, UserPlacement};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub network: NetworkSection,
    #[serde(default)]
    pub tier: Vec<TierSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub alpha: f64,
    pub user_type: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupled_tier: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TierSection {
    Ppp {
        power: f64,
        intensity: f64,
    },
    Pcp {
        power: f64,
        parent_intensity: f64,
        mean_cluster_size: f64,
        cluster_spread: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_cutoff_sigmas: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_cutoff_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gil_pelaez_t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gil_pelaez_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gil_pelaez_tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_km: Option<f64>,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: NetworkModel,
    pub quadrature: QuadratureConfig,
    pub simulation: SimulationSection,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => config_error(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_model(&self) -> Result<NetworkModel, CliError> {
        let tiers = self
            .tier
            .iter()
            .map(|t| match *t {
                TierSection::Ppp { power, intensity } => TierSpec::Ppp { intensity, power },
                TierSection::Pcp {
                    power,
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                } => TierSpec::Pcp {
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                    power,
                },
            })
            .collect();
        let n = &self.network;
        let user = match n.user_type {
            1 => {
                if n.coupled_tier.is_some() || n.user_spread.is_some() {
                    return Err(config_error(
                        "network.coupled_tier and network.user_spread only apply to user_type = 2",
                    ));
                }
                UserPlacement::Type1
            }
            2 => {
                let q = n.coupled_tier.ok_or_else(|| {
                    config_error("network.coupled_tier: required for user_type = 2")
                })?;
                if q == 0 {
                    return Err(config_error(
                        "network.coupled_tier: tiers are numbered from 1",
                    ));
                }
                let s = n.user_spread.ok_or_else(|| {
                    config_error("network.user_spread: required for user_type = 2")
                })?;
                UserPlacement::Type2 {
                    coupled_tier: q - 1,
                    user_spread: s,
                }
            }
            other => {
                return Err(config_error(format!(
                    "network.user_type: must be 1 or 2, got {other}"
                )))
            }
        };
        let model = NetworkModel {
            tiers,
            alpha: n.alpha,
            user,
        };
        let violations = model.validate();
        if !violations.is_empty() {
            let msg = violations
                .iter()
                .map(|v| config_field(&v.field) + ": " + &v.message)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(config_error(msg));
        }
        Ok(model)
    }

    pub fn quadrature_config(&self) -> Result<QuadratureConfig, CliError> {
        let mut c = QuadratureConfig::default();
        if let Some(q) = &self.quadrature {
            c.rel_tol = q.rel_tol.unwrap_or(c.rel_tol);
            c.abs_tol = q.abs_tol.unwrap_or(c.abs_tol);
            c.max_depth = q.max_depth.unwrap_or(c.max_depth);
            c.z_cutoff_sigmas = q.z_cutoff_sigmas.unwrap_or(c.z_cutoff_sigmas);
            c.r_cutoff_mass = q.r_cutoff_mass.unwrap_or(c.r_cutoff_mass);
            c.gil_pelaez_t_max = q.gil_pelaez_t_max.unwrap_or(c.gil_pelaez_t_max);
            c.gil_pelaez_nodes = q.gil_pelaez_nodes.unwrap_or(c.gil_pelaez_nodes);
            c.gil_pelaez_tail_tol = q.gil_pelaez_tail_tol.unwrap_or(c.gil_pelaez_tail_tol);
        }
        c.validate().map_err(|e| config_error(e.to_string()))?;
        Ok(c)
    }

    pub fn resolve(&self) -> Result<Scenario, CliError> {
        Ok(Scenario {
            model: self.to_model()?,
            quadrature: self.quadrature_config()?,
            simulation: self.simulation.clone().unwrap_or_default(),
        })
    }

    /// The scenario file describing `model` with the given overrides.
    pub fn from_parts(
        model: &NetworkModel,
        quadrature: Option<QuadratureSection>,
        simulation: Option<SimulationSection>,
    ) -> Self {
        let (user_type, coupled_tier, user_spread) = match model.user {
            UserPlacement::Type1 => (1, None, None),
            UserPlacement::Type2 {
                coupled_tier,
                user_spread,
            } => (2, Some(coupled_tier + 1), Some(user_spread)),
        };
        let tier = model
            .tiers
            .iter()
            .map(|t| match *t {
                TierSpec::Ppp { intensity, power } => TierSection::Ppp { power, intensity },
                TierSpec::Pcp {
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                    power,
                } => TierSection::Pcp {
                    power,
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                },
            })
            .collect();
        Self {
            network: NetworkSection {
                alpha: model.alpha,
                user_type,
                coupled_tier,
                user_spread,
            },
            tier,
            quadrature,
            simulation,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }
}

/// Maps a model field path (`tiers[1].power`, `user.coupled_tier`) to the
/// scenario file's naming (`tier[2].power`, `network.coupled_tier`).
fn config_field(field: &str) -> String {
    if let Some(rest) = field.strip_prefix("tiers[") {
        if let Some((idx, tail)) = rest.split_once(']') {
            if let Ok(i) = idx.parse::<usize>() {
                return format!("tier[{}]{tail}", i + 1);
            }
        }
    }
    if let Some(rest) = field.strip_prefix("user.") {
        return format!("network.{rest}");
    }
    if field == "alpha" {
        return "network.alpha".into();
    }
    field.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = include_str!("../examples/fig1_type2.toml");

    #[test]
    fn parses_reference_scenario() {
        let s = ScenarioFile::parse(FIG1).unwrap().resolve().unwrap();
        assert_eq!(s.model, NetworkModel::two_tier_reference(0.04, true));
        assert_eq!(s.quadrature, QuadratureConfig::default());
    }

    #[test]
    fn dump_round_trips() {
        let m = NetworkModel::two_tier_reference(0.06, true);
        let sim = SimulationSection {
            realizations: Some(10),
            seed: Some(3),
            window_km: None,
        };
        let text = ScenarioFile::from_parts(&m, None, Some(sim.clone())).to_toml();
        let back = ScenarioFile::parse(&text).unwrap().resolve().unwrap();
        assert_eq!(back.model, m);
        assert_eq!(back.simulation, sim);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let bad = FIG1.replace("cluster_spread", "cluster_sprad");
        let e = ScenarioFile::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("cluster_sprad"), "{e}");
        let bad = format!("{FIG1}\n[network2]\nx = 1\n");
        assert!(ScenarioFile::parse(&bad).is_err());
    }

    #[test]
    fn validation_reports_config_paths() {
        let bad = FIG1.replace("parent_intensity = 2.5", "parent_intensity = -2.5");
        let e = ScenarioFile::parse(&bad)
            .unwrap()
            .resolve()
            .unwrap_err()
            .to_string();
        assert!(e.contains("tier[2]"), "{e}");
        let bad = FIG1.replace("coupled_tier = 2", "coupled_tier = 1");
        let e = ScenarioFile::parse(&bad)
            .unwrap()
            .resolve()
            .unwrap_err()
            .to_string();
        assert!(e.contains("coupled_tier"), "{e}");
        let bad = FIG1.replace("coupled_tier = 2", "coupled_tier = 0");
        assert!(ScenarioFile::parse(&bad).unwrap().resolve().is_err());
    }
}
