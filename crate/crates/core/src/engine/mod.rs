//! Analytic moments of the conditional success probability and the meta
//! distribution built from them.

mod factors;
mod functionals;
mod meta;
mod moment;

use crate::error::{Error, Result};
use crate::special::ComplexScalar;

pub use factors::{
    g_factor, ppp_hypergeometric, ppp_hypergeometric_quad, q_factor, rho_factor, u_factor,
};
pub use functionals::{pgfl, spfl};
pub use meta::{
    beta_approx, beta_approx_with_error, gil_pelaez_ccdf, meta_ccdf_beta, meta_ccdf_gil_pelaez,
    BetaApproxParams, CurveMethod, MetaCurve, DEGENERATE_VARIANCE,
};
pub use moment::{moment, moments};

/// Order b of the moment E[P_s^b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOrder(pub ComplexScalar);

impl MomentOrder {
    pub fn real(b: f64) -> Self {
        Self(ComplexScalar::new(b, 0.0))
    }

    /// b = j·t.
    pub fn imag(t: f64) -> Self {
        Self(ComplexScalar::new(0.0, t))
    }

    pub fn b(&self) -> ComplexScalar {
        self.0
    }
}

impl From<f64> for MomentOrder {
    fn from(b: f64) -> Self {
        Self::real(b)
    }
}

/// Tolerances and truncation rules for the nested quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel budget of each adaptive integral.
    pub max_depth: usize,
    /// Half-width, in cluster spreads, of the support kept for a Rician law.
    pub z_cutoff_sigmas: f64,
    /// Serving-mark probability mass covered by the outer integral.
    pub r_cutoff_mass: f64,
    pub gil_pelaez_t_max: f64,
    pub gil_pelaez_nodes: usize,
    /// Largest |M_{jt}| tolerated on the last Gil-Pelaez panel.
    pub gil_pelaez_tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_depth: 400,
            z_cutoff_sigmas: 8.0,
            r_cutoff_mass: 1.0 - 1e-8,
            gil_pelaez_t_max: 200.0,
            gil_pelaez_nodes: 2000,
            gil_pelaez_tail_tol: 0.1,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "quadrature.{name} must be finite and > 0, got {v}"
                )))
            }
        };
        pos("rel_tol", self.rel_tol)?;
        pos("abs_tol", self.abs_tol)?;
        pos("z_cutoff_sigmas", self.z_cutoff_sigmas)?;
        pos("gil_pelaez_t_max", self.gil_pelaez_t_max)?;
        if !(self.r_cutoff_mass > 0.0 && self.r_cutoff_mass < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature.r_cutoff_mass must lie in (0, 1), got {}",
                self.r_cutoff_mass
            )));
        }
        if self.max_depth == 0 || self.gil_pelaez_nodes == 0 {
            return Err(Error::InvalidParameter(
                "quadrature.max_depth and gil_pelaez_nodes must be >= 1".into(),
            ));
        }
        if self.gil_pelaez_tail_tol.is_nan() || self.gil_pelaez_tail_tol <= 0.0 {
            return Err(Error::InvalidParameter(
                "quadrature.gil_pelaez_tail_tol must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// M_b(β) with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: ComplexScalar,
    pub est_error: f64,
    pub beta: f64,
    pub order: MomentOrder,
}
