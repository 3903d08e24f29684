//! Shared fixtures for the criterion benches.

use hetnet_meta::{NetworkModel, SimConfig};

/// The two-tier reference network at cluster spread 0.04 km.
pub fn reference(type2: bool) -> NetworkModel {
    NetworkModel::two_tier_reference(0.04, type2)
}

pub fn single_ppp() -> NetworkModel {
    NetworkModel::single_ppp(1.0, 1.0, 4.0)
}

/// A short simulation at 0 dB.
pub fn small_run(model: &NetworkModel, realizations: usize) -> SimConfig {
    SimConfig::new(model, realizations, 1, vec![1.0])
}
