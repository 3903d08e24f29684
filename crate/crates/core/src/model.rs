//! Scenario description shared by the analytic engine and the simulator.
//!
//! Units: distances in km, intensities per km², powers linear (only ratios
//! between tiers matter).

use std::fmt;

use crate::error::{Error, Result};

/// One tier of base stations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TierSpec {
    /// Homogeneous PPP with `intensity` BSs per km².
    Ppp { intensity: f64, power: f64 },
    /// Thomas cluster process: parent PPP of `parent_intensity` per km²,
    /// Poisson(`mean_cluster_size`) offspring with isotropic Gaussian
    /// displacement of standard deviation `cluster_spread` km per axis.
    Pcp {
        parent_intensity: f64,
        mean_cluster_size: f64,
        cluster_spread: f64,
        power: f64,
    },
}

impl TierSpec {
    pub fn power(&self) -> f64 {
        match *self {
            TierSpec::Ppp { power, .. } | TierSpec::Pcp { power, .. } => power,
        }
    }

    pub fn is_pcp(&self) -> bool {
        matches!(self, TierSpec::Pcp { .. })
    }

    /// Mean BS density: λ for a PPP, λ_p·m̄ for a PCP.
    pub fn mean_intensity(&self) -> f64 {
        match *self {
            TierSpec::Ppp { intensity, .. } => intensity,
            TierSpec::Pcp {
                parent_intensity,
                mean_cluster_size,
                ..
            } => parent_intensity * mean_cluster_size,
        }
    }

    /// Offspring law of a PCP tier.
    pub fn cluster(&self) -> Option<ClusterKernel> {
        match *self {
            TierSpec::Pcp {
                mean_cluster_size,
                cluster_spread,
                power,
                ..
            } => Some(ClusterKernel {
                mean_size: mean_cluster_size,
                spread: cluster_spread,
                power,
            }),
            TierSpec::Ppp { .. } => None,
        }
    }
}

/// Offspring law of one cluster: Poisson(`mean_size`) points, Gaussian
/// displacement with per-axis deviation `spread`, all transmitting at `power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterKernel {
    pub mean_size: f64,
    pub spread: f64,
    pub power: f64,
}

/// Where users sit relative to the BS tiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UserPlacement {
    /// Users independent of all BS tiers.
    Type1,
    /// Users clustered around the parents of PCP tier `coupled_tier`
    /// (0-based index into [`NetworkModel::tiers`]) with Gaussian spread
    /// `user_spread` km. The typical user then sees an extra cluster of
    /// that tier centred at its own parent.
    Type2 {
        coupled_tier: usize,
        user_spread: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    pub tiers: Vec<TierSpec>,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    pub user: UserPlacement,
}

/// A cluster-type source of BSs seen by the typical user: a PCP tier with
/// PPP parents, or the user's own cluster (Type 2 only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusterSource {
    Tier(usize),
    Palm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_positive(v: &mut Vec<Violation>, field: String, x: f64) {
    if !(x.is_finite() && x > 0.0) {
        v.push(Violation {
            field,
            message: format!("must be finite and > 0, got {x}"),
        });
    }
}

impl NetworkModel {
    /// Every invariant violation, with a field path. Empty means usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.tiers.is_empty() {
            v.push(Violation {
                field: "tiers".into(),
                message: "at least one tier is required".into(),
            });
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            v.push(Violation {
                field: "alpha".into(),
                message: format!("path-loss exponent must be > 2, got {}", self.alpha),
            });
        }
        for (i, t) in self.tiers.iter().enumerate() {
            match *t {
                TierSpec::Ppp { intensity, power } => {
                    check_positive(&mut v, format!("tiers[{i}].intensity"), intensity);
                    check_positive(&mut v, format!("tiers[{i}].power"), power);
                }
                TierSpec::Pcp {
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                    power,
                } => {
                    check_positive(
                        &mut v,
                        format!("tiers[{i}].parent_intensity"),
                        parent_intensity,
                    );
                    check_positive(
                        &mut v,
                        format!("tiers[{i}].mean_cluster_size"),
                        mean_cluster_size,
                    );
                    check_positive(&mut v, format!("tiers[{i}].cluster_spread"), cluster_spread);
                    check_positive(&mut v, format!("tiers[{i}].power"), power);
                }
            }
        }
        if let UserPlacement::Type2 {
            coupled_tier,
            user_spread,
        } = self.user
        {
            match self.tiers.get(coupled_tier) {
                None => v.push(Violation {
                    field: "user.coupled_tier".into(),
                    message: format!("no tier with index {coupled_tier}"),
                }),
                Some(t) if !t.is_pcp() => v.push(Violation {
                    field: "user.coupled_tier".into(),
                    message: format!("tier {coupled_tier} is a PPP; Type 2 users need a PCP tier"),
                }),
                _ => {}
            }
            check_positive(&mut v, "user.user_spread".into(), user_spread);
        }
        v
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    /// Spatial rescaling by `k`: intensities / k², spreads · k. Moments of
    /// the conditional success probability are invariant under it.
    pub fn scale(&self, k: f64) -> Result<NetworkModel> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be > 0, got {k}"
            )));
        }
        let k2 = k * k;
        let tiers = self
            .tiers
            .iter()
            .map(|t| match *t {
                TierSpec::Ppp { intensity, power } => TierSpec::Ppp {
                    intensity: intensity / k2,
                    power,
                },
                TierSpec::Pcp {
                    parent_intensity,
                    mean_cluster_size,
                    cluster_spread,
                    power,
                } => TierSpec::Pcp {
                    parent_intensity: parent_intensity / k2,
                    mean_cluster_size,
                    cluster_spread: cluster_spread * k,
                    power,
                },
            })
            .collect();
        let user = match self.user {
            UserPlacement::Type1 => UserPlacement::Type1,
            UserPlacement::Type2 {
                coupled_tier,
                user_spread,
            } => UserPlacement::Type2 {
                coupled_tier,
                user_spread: user_spread * k,
            },
        };
        Ok(NetworkModel {
            tiers,
            alpha: self.alpha,
            user,
        })
    }

    /// Cluster-type sources in evaluation order: PCP tiers, then the palm
    /// cluster for Type 2 users.
    pub fn cluster_sources(&self) -> Vec<ClusterSource> {
        let mut out: Vec<_> = self
            .tiers
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_pcp())
            .map(|(i, _)| ClusterSource::Tier(i))
            .collect();
        if matches!(self.user, UserPlacement::Type2 { .. }) {
            out.push(ClusterSource::Palm);
        }
        out
    }

    /// Offspring kernel of a cluster source. The palm cluster reuses the
    /// coupled tier's kernel.
    pub fn kernel(&self, source: ClusterSource) -> Option<ClusterKernel> {
        match source {
            ClusterSource::Tier(i) => self.tiers.get(i)?.cluster(),
            ClusterSource::Palm => match self.user {
                UserPlacement::Type2 { coupled_tier, .. } => {
                    self.tiers.get(coupled_tier)?.cluster()
                }
                UserPlacement::Type1 => None,
            },
        }
    }

    /// Σ_{PPP tiers} π λ_i P_i^{2/α}.
    pub fn ppp_weight(&self) -> f64 {
        let delta = 2.0 / self.alpha;
        self.tiers
            .iter()
            .filter_map(|t| match *t {
                TierSpec::Ppp { intensity, power } => {
                    Some(std::f64::consts::PI * intensity * power.powf(delta))
                }
                _ => None,
            })
            .sum()
    }

    /// The homogeneous-PPP reference: every PCP tier replaced by a PPP of the
    /// same mean density and power, Type 1 users.
    pub fn ppp_baseline(&self) -> NetworkModel {
        NetworkModel {
            tiers: self
                .tiers
                .iter()
                .map(|t| TierSpec::Ppp {
                    intensity: t.mean_intensity(),
                    power: t.power(),
                })
                .collect(),
            alpha: self.alpha,
            user: UserPlacement::Type1,
        }
    }

    /// The two-tier reference network: a PPP macro tier (1 /km², P = 1) and
    /// a TCP small-cell tier (2.5 parents/km², 4 BSs per cluster, spread
    /// `sigma` km, P = 100), α = 4. For Type 2 the users share the
    /// small-cell parents with user spread `sigma`.
    pub fn two_tier_reference(sigma: f64, type2: bool) -> NetworkModel {
        NetworkModel {
            tiers: vec![
                TierSpec::Ppp {
                    intensity: 1.0,
                    power: 1.0,
                },
                TierSpec::Pcp {
                    parent_intensity: 2.5,
                    mean_cluster_size: 4.0,
                    cluster_spread: sigma,
                    power: 100.0,
                },
            ],
            alpha: 4.0,
            user: if type2 {
                UserPlacement::Type2 {
                    coupled_tier: 1,
                    user_spread: sigma,
                }
            } else {
                UserPlacement::Type1
            },
        }
    }

    pub fn single_ppp(intensity: f64, power: f64, alpha: f64) -> NetworkModel {
        NetworkModel {
            tiers: vec![TierSpec::Ppp { intensity, power }],
            alpha,
            user: UserPlacement::Type1,
        }
    }
}

/// Free-function form of [`NetworkModel::validate`].
pub fn validate(model: &NetworkModel) -> Vec<Violation> {
    model.validate()
}

/// Free-function form of [`NetworkModel::scale`].
pub fn scale_model(model: &NetworkModel, k: f64) -> Result<NetworkModel> {
    model.scale(k)
}
