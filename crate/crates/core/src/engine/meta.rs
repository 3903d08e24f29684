//! Meta distribution curves: beta-kernel moment matching and Gil-Pelaez
//! inversion of imaginary-order moments.

use num_complex::Complex64;
use rayon::prelude::*;

use super::moment::moment;
use super::{MomentOrder, QuadratureConfig};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::quadrature::gauss_legendre;
use crate::special::regularized_incomplete_beta;

/// Smallest accepted variance M₂ − M₁² of a beta fit.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaApproxParams {
    pub theta1: f64,
    pub theta2: f64,
    pub m1: f64,
    pub m2: f64,
}

impl BetaApproxParams {
    /// Moment matching: θ₁ = M₁(M₁−M₂)/(M₂−M₁²), θ₂ = θ₁(1−M₁)/M₁.
    pub fn from_moments(m1: f64, m2: f64) -> Result<Self> {
        let var = m2 - m1 * m1;
        if !(m1 > 0.0 && m1 <= 1.0 && m2 > 0.0 && m2 < m1) || var <= DEGENERATE_VARIANCE {
            return Err(Error::Degenerate { m1, m2 });
        }
        let theta1 = m1 * (m1 - m2) / var;
        let theta2 = theta1 * (1.0 - m1) / m1;
        if !(theta1 > 0.0 && theta2 > 0.0) {
            return Err(Error::Degenerate { m1, m2 });
        }
        Ok(Self {
            theta1,
            theta2,
            m1,
            m2,
        })
    }

    /// The beta law with the given shape parameters and its first two moments.
    pub fn from_shape(theta1: f64, theta2: f64) -> Self {
        let s = theta1 + theta2;
        let m1 = theta1 / s;
        let m2 = m1 * (theta1 + 1.0) / (s + 1.0);
        Self {
            theta1,
            theta2,
            m1,
            m2,
        }
    }

    /// 1 − I_θ(θ₁, θ₂).
    pub fn ccdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 1.0;
        }
        if theta >= 1.0 {
            return 0.0;
        }
        let i = regularized_incomplete_beta(theta, self.theta1, self.theta2)
            .expect("theta in (0,1) and positive shapes");
        (1.0 - i).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMethod {
    BetaApprox,
    GilPelaez,
    Empirical,
}

impl CurveMethod {
    pub fn tag(self) -> &'static str {
        match self {
            CurveMethod::BetaApprox => "beta",
            CurveMethod::GilPelaez => "gil-pelaez",
            CurveMethod::Empirical => "empirical",
        }
    }
}

/// F̄(β, θ) sampled on a θ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaCurve {
    pub beta: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub method: CurveMethod,
    /// For the beta kernel, the summed quadrature error of M₁ and M₂; for
    /// Gil-Pelaez, the truncation bound plus any monotonicity repair.
    pub est_error: f64,
}

impl MetaCurve {
    /// Largest |self − other| over grid points where both are defined and
    /// `keep(θ)` holds. The grids must match.
    pub fn sup_distance(&self, other: &MetaCurve, keep: impl Fn(f64) -> bool) -> f64 {
        assert_eq!(self.thetas, other.thetas, "curves on different grids");
        self.thetas
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(t, _)| keep(**t))
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_grid(thetas: &[f64]) -> Result<()> {
    match thetas
        .iter()
        .find(|t| !(t.is_finite() && **t > 0.0 && **t <= 1.0))
    {
        Some(t) => Err(Error::InvalidParameter(format!(
            "theta grid values must lie in (0, 1], got {t}"
        ))),
        None => Ok(()),
    }
}

/// First two moments and their fitted beta law, plus the summed
/// quadrature error of the moments.
pub fn beta_approx_with_error(
    beta: f64,
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Result<(BetaApproxParams, f64)> {
    let (r1, r2) = rayon::join(
        || moment(beta, MomentOrder::real(1.0), model, cfg),
        || moment(beta, MomentOrder::real(2.0), model, cfg),
    );
    let (r1, r2) = (r1?, r2?);
    let p = BetaApproxParams::from_moments(r1.value.re, r2.value.re)?;
    Ok((p, r1.est_error + r2.est_error))
}

pub fn beta_approx(
    beta: f64,
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Result<BetaApproxParams> {
    beta_approx_with_error(beta, model, cfg).map(|(p, _)| p)
}

pub fn meta_ccdf_beta(
    beta: f64,
    thetas: &[f64],
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Result<MetaCurve> {
    check_grid(thetas)?;
    let (p, err) = beta_approx_with_error(beta, model, cfg)?;
    Ok(MetaCurve {
        beta,
        thetas: thetas.to_vec(),
        values: thetas.iter().map(|&t| p.ccdf(t)).collect(),
        method: CurveMethod::BetaApprox,
        est_error: err,
    })
}

/// Panel edges on [0, t_max]: doubling widths from 0.05 up to 6.4, then
/// uniform panels no wider than 6.4.
fn panels(t_max: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut t = 0.05;
    while t < t_max && t <= 6.4 {
        edges.push(t);
        t *= 2.0;
    }
    let start = *edges.last().unwrap();
    let n = ((t_max - start) / 6.4).ceil().max(1.0) as usize;
    for i in 1..=n {
        edges.push(start + (t_max - start) * i as f64 / n as f64);
    }
    edges.dedup();
    edges
}

/// Gil-Pelaez inversion F̄(θ) = ½ + (1/π)∫₀^{t_max} Im(e^{−jt ln θ} M(t))/t dt
/// for an arbitrary imaginary-order moment function M(t) = E[X^{jt}].
///
/// M is evaluated once per node (in parallel) and shared across the grid.
/// Returns the curve values in grid order and an error estimate; fails when
/// |M| has not decayed below the configured tail tolerance by t_max.
pub fn gil_pelaez_ccdf<F>(
    moment_at: F,
    thetas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    check_grid(thetas)?;
    cfg.validate()?;
    let edges = panels(cfg.gil_pelaez_t_max);
    let per = (cfg.gil_pelaez_nodes / (edges.len() - 1)).max(4);
    let (x, w) = gauss_legendre(per);
    let mut nodes = Vec::with_capacity(per * (edges.len() - 1));
    for e in edges.windows(2) {
        let (c, h) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push((c + h * xi, h * wi));
        }
    }
    let values: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(t, _)| moment_at(t))
        .collect::<Result<_>>()?;

    let last_start = edges[edges.len() - 2];
    let tail_bound = nodes
        .iter()
        .zip(&values)
        .filter(|((t, _), _)| *t >= last_start)
        .map(|(_, m)| m.norm())
        .fold(0.0, f64::max);
    if tail_bound > cfg.gil_pelaez_tail_tol {
        return Err(Error::GilPelaezTail { tail_bound });
    }

    let mut out: Vec<f64> = thetas
        .iter()
        .map(|&theta| {
            let lt = theta.ln();
            let s: f64 = nodes
                .iter()
                .zip(&values)
                .map(|(&(t, wt), m)| wt * (Complex64::new(0.0, -t * lt).exp() * m).im / t)
                .sum();
            (0.5 + s / std::f64::consts::PI).clamp(0.0, 1.0)
        })
        .collect();

    // enforce F̄ nonincreasing in θ and charge the repair to the error
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    let mut repair = 0.0f64;
    let mut running = 1.0f64;
    for &i in &order {
        if out[i] > running {
            repair = repair.max(out[i] - running);
            out[i] = running;
        }
        running = out[i];
    }
    Ok((out, tail_bound / std::f64::consts::PI + repair))
}

pub fn meta_ccdf_gil_pelaez(
    beta: f64,
    thetas: &[f64],
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Result<MetaCurve> {
    model.ensure_valid()?;
    let (values, est_error) = gil_pelaez_ccdf(
        |t| moment(beta, MomentOrder::imag(t), model, cfg).map(|r| r.value),
        thetas,
        cfg,
    )?;
    Ok(MetaCurve {
        beta,
        thetas: thetas.to_vec(),
        values,
        method: CurveMethod::GilPelaez,
        est_error,
    })
}
