//! Per-point factors of the moment formula: the interference kernel u, the
//! PPP factor Q, and the per-cluster factors g and ρ.

use num_complex::Complex64;

use super::{MomentOrder, QuadratureConfig};
use crate::error::{Error, Result};
use crate::model::{ClusterKernel, NetworkModel};
use crate::projection::rician_pdf;
use crate::quadrature::{integrate, Tolerance};
use crate::special::{complex_expm1, gauss_2f1_neg};

/// 1 − (1 + y)^{−b}, accurate for small y.
pub(crate) fn one_minus_pow(y: f64, b: Complex64) -> Complex64 {
    -complex_expm1(-b * y.ln_1p())
}

/// u(r, x) = 1 − (1 + βr/x)^{−b}, principal branch.
pub fn u_factor(r: f64, x: f64, beta: f64, b: MomentOrder) -> Complex64 {
    one_minus_pow(beta * r / x, b.0)
}

/// ₂F₁(b, −2/α; 1 − 2/α; −β), the PPP interference functional.
///
/// The power series is tried first; when it cannot deliver the accuracy
/// (large |Im b| cancellation, or β so large the series crawls) the
/// equivalent integral 1 + δ∫₀¹ v^{−δ−1}(1 − (1+βv)^{−b}) dv is used.
pub fn ppp_hypergeometric(b: MomentOrder, alpha: f64, beta: f64) -> Result<Complex64> {
    let delta = 2.0 / alpha;
    match gauss_2f1_neg(b.0, -delta, 1.0 - delta, -beta) {
        Ok(v) => Ok(v),
        Err(Error::SeriesNonConvergence { .. }) => ppp_hypergeometric_quad(b, alpha, beta),
        Err(e) => Err(e),
    }
}

/// Integral route for [`ppp_hypergeometric`]; exposed so the two routes can
/// be checked against each other.
pub fn ppp_hypergeometric_quad(b: MomentOrder, alpha: f64, beta: f64) -> Result<Complex64> {
    let delta = 2.0 / alpha;
    // v = y^m with m = 1/(1−δ) makes the integrand finite at y = 0
    let m = 1.0 / (1.0 - delta);
    let f = |y: f64| {
        let v = y.powf(m);
        one_minus_pow(beta * v, b.0) * (m * y.powf(-m * delta - 1.0))
    };
    let tol = Tolerance::new(1e-14, 1e-12, 5000);
    let e = integrate(f, &[0.0, 0.25, 0.5, 0.75, 1.0], &tol);
    if !e.converged {
        return Err(Error::Accuracy {
            context: format!("PPP hypergeometric integral, b = {}, beta = {beta}", b.0),
            estimate: e.value.norm(),
            error: e.error,
        });
    }
    Ok(1.0 + e.value * delta)
}

/// Q(r) = exp(−π r^{2/α} Σ_{PPP} λ_j P_j^{2/α} ₂F₁(b, −2/α; 1−2/α; −β)).
pub fn q_factor(r: f64, model: &NetworkModel, beta: f64, b: MomentOrder) -> Result<Complex64> {
    let c = model.ppp_weight();
    if c == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let f = ppp_hypergeometric(b, model.alpha, beta)?;
    Ok((-(c * r.powf(2.0 / model.alpha)) * f).exp())
}

/// ρ(r, z) = m̄ P^{1/α} (1/α) r^{1/α−1} f_d((rP)^{1/α} | z).
pub fn rho_factor(r: f64, z: f64, kernel: &ClusterKernel, alpha: f64) -> f64 {
    let p = kernel.power.powf(1.0 / alpha);
    kernel.mean_size * p / alpha
        * r.powf(1.0 / alpha - 1.0)
        * rician_pdf(r.powf(1.0 / alpha) * p, z, kernel.spread)
}

/// g(r, z) for one cluster with parent at distance `z`:
/// exp(−m̄ ∫_r^∞ u(r,x) P^{1/α}(1/α) x^{1/α−1} f_d((xP)^{1/α}|z) dx − m̄ F_d((rP)^{1/α}|z)).
pub fn g_factor(
    r: f64,
    z: f64,
    kernel: &ClusterKernel,
    alpha: f64,
    beta: f64,
    b: MomentOrder,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let eval = ClusterEval::new(*kernel, alpha, beta, b, cfg);
    let rho = eval.serving_radius(r);
    let d = eval.deficit(rho, z);
    if !d.converged {
        return Err(Error::Accuracy {
            context: format!("g factor at r = {r}, z = {z}"),
            estimate: d.value.norm(),
            error: d.error,
        });
    }
    Ok((-kernel.mean_size * d.value).exp())
}

/// Result of an inner integral with its error bookkeeping.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Inner {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Evaluates the cluster-level quantities for one offspring kernel at a
/// fixed (β, b). Works in distance units: the projected threshold r maps to
/// the serving radius ρ = (rP)^{1/α} of this tier.
pub(crate) struct ClusterEval {
    pub kernel: ClusterKernel,
    pub alpha: f64,
    beta: f64,
    b: Complex64,
    trivial_order: bool,
    /// Rician support half-width in units of σ.
    pub cutoff: f64,
    tol: Tolerance,
}

impl ClusterEval {
    pub fn new(
        kernel: ClusterKernel,
        alpha: f64,
        beta: f64,
        b: MomentOrder,
        cfg: &QuadratureConfig,
    ) -> Self {
        Self {
            kernel,
            alpha,
            beta,
            b: b.0,
            trivial_order: b.0 == Complex64::new(0.0, 0.0),
            cutoff: cfg.z_cutoff_sigmas,
            tol: Tolerance::new(0.0, cfg.rel_tol * 1e-2, cfg.max_depth),
        }
    }

    pub fn serving_radius(&self, r: f64) -> f64 {
        (r * self.kernel.power).powf(1.0 / self.alpha)
    }

    fn u_at(&self, rho: f64, s: f64) -> Complex64 {
        one_minus_pow(self.beta * (rho / s).powf(self.alpha), self.b)
    }

    /// D(ρ, z) = F_d(ρ|z) + ∫_ρ^∞ u f_d(s|z) ds, so that g = exp(−m̄ D).
    pub fn deficit(&self, rho: f64, z: f64) -> Inner {
        let sigma = self.kernel.spread;
        let lo = (z - self.cutoff * sigma).max(0.0);
        let hi = z + self.cutoff * sigma;
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut converged = true;

        if rho >= hi {
            return Inner {
                value: Complex64::new(1.0, 0.0),
                error: 0.0,
                converged: true,
            };
        }
        if rho > lo {
            let pts = breakpoints(lo, rho, &[z]);
            let e = integrate(|s| rician_pdf(s, z, sigma), &pts, &self.tol);
            value += e.value;
            error += e.error;
            converged &= e.converged;
        }
        if !self.trivial_order {
            let a = rho.max(lo);
            let pts = breakpoints(a, hi, &[z]);
            let e = integrate(
                |s| self.u_at(rho, s) * rician_pdf(s, z, sigma),
                &pts,
                &self.tol,
            );
            value += e.value;
            error += e.error;
            converged &= e.converged;
        }
        Inner {
            value,
            error,
            converged,
        }
    }

    /// 1 − g(ρ, z) and g(ρ, z), with the error of g.
    pub fn g_parts(&self, rho: f64, z: f64) -> (Complex64, Complex64, f64, bool) {
        let d = self.deficit(rho, z);
        let m = self.kernel.mean_size;
        let one_minus_g = -complex_expm1(-m * d.value);
        let g = Complex64::new(1.0, 0.0) - one_minus_g;
        (one_minus_g, g, m * d.error * g.norm(), d.converged)
    }
}

/// Sorted breakpoints for [a, b] with any interior `extra` points.
pub(crate) fn breakpoints(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = extra.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}
