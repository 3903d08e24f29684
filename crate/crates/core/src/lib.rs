//! Meta distribution of the downlink SIR in K-tier heterogeneous cellular
//! networks whose tiers are Poisson or Thomas cluster processes.
//!
//! [`engine`] evaluates the b-th moments of the conditional success
//! probability by nested quadrature and turns them into meta distribution
//! curves; [`simulator`] samples the same networks and measures the same
//! quantities empirically.

pub mod engine;
pub mod error;
pub mod model;
pub mod projection;
pub mod quadrature;
pub mod simulator;
pub mod special;

pub use engine::{
    beta_approx, meta_ccdf_beta, meta_ccdf_gil_pelaez, moment, BetaApproxParams, CurveMethod,
    MetaCurve, MomentOrder, MomentResult, QuadratureConfig,
};
pub use error::{Error, Result};
pub use model::{
    scale_model, validate, ClusterKernel, ClusterSource, NetworkModel, TierSpec, UserPlacement,
    Violation,
};
pub use simulator::{run_monte_carlo, EmpiricalMeta, Realization, SimConfig};
pub use special::ComplexScalar;
