//! The b-th moment of the conditional success probability.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::factors::ppp_hypergeometric;
use super::functionals::SourceEval;
use super::{MomentOrder, MomentResult, QuadratureConfig};
use crate::error::{Error, Result};
use crate::model::{ClusterSource, NetworkModel};
use crate::quadrature::{integrate, QuadValue, Tolerance};

/// Survival quantiles of the serving mark used as outer breakpoints.
const QUANTILES: [f64; 8] = [0.999, 0.99, 0.9, 0.5, 0.1, 1e-2, 1e-4, 1e-6];

/// Integrand value together with the propagated inner-quadrature error.
#[derive(Debug, Clone, Copy, Default)]
struct Tracked {
    value: Complex64,
    error: f64,
}

impl Add for Tracked {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

impl Sub for Tracked {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            value: self.value - o.value,
            error: self.error - o.error,
        }
    }
}

impl Mul<f64> for Tracked {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            error: self.error * k,
        }
    }
}

impl QuadValue for Tracked {
    // refinement is driven by the value alone
    fn norm(self) -> f64 {
        self.value.norm()
    }
}

struct Sources {
    tiers: Vec<SourceEval>,
    palm: Option<SourceEval>,
}

impl Sources {
    fn new(
        model: &NetworkModel,
        beta: f64,
        b: MomentOrder,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let mut tiers = Vec::new();
        let mut palm = None;
        for src in model.cluster_sources() {
            let ev = SourceEval::new(src, model, beta, b, cfg)?;
            match src {
                ClusterSource::Tier(_) => tiers.push(ev),
                ClusterSource::Palm => palm = Some(ev),
            }
        }
        Ok(Self { tiers, palm })
    }
}

/// Survival function of the serving projected mark at r = w^α, used to
/// place breakpoints and truncate the outer integral.
fn survival(w: f64, c: f64, zero: &Sources) -> f64 {
    let mut s = (-c * w * w).exp();
    for t in &zero.tiers {
        s *= t.pgfl(w).value.re;
    }
    if let Some(p) = &zero.palm {
        s *= p.pgfl(w).value.re;
    }
    s
}

/// A w at which the survival is safely above 1 − 1e-3, and one below `floor`.
fn bracket(c: f64, zero: &Sources, floor: f64) -> (f64, f64) {
    let mut guess = f64::INFINITY;
    if c > 0.0 {
        guess = guess.min(1.0 / c.sqrt());
    }
    for s in zero.tiers.iter().chain(zero.palm.iter()) {
        let (spread, proot, _) = s.kernel_scale();
        guess = guess.min(spread / proot);
        if let Some(l) = s.parent_intensity() {
            guess = guess.min(1.0 / (l.sqrt() * proot));
        }
    }
    let mut lo = guess;
    for _ in 0..200 {
        if survival(lo, c, zero) > 0.9999 {
            break;
        }
        lo *= 0.5;
    }
    let mut hi = guess;
    for _ in 0..200 {
        if survival(hi, c, zero) < floor {
            break;
        }
        hi *= 2.0;
    }
    (lo, hi)
}

/// Smallest w (to a relative 1e-4) with survival ≤ q, searched in [lo, hi].
fn quantile(q: f64, c: f64, zero: &Sources, mut lo: f64, mut hi: f64) -> f64 {
    while hi / lo > 1.0 + 1e-4 {
        let mid = (lo * hi).sqrt();
        if survival(mid, c, zero) > q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// M_b(β) for the typical user of `model`.
///
/// The outer integral over the serving mark r is carried out in w = r^{1/α},
/// where every term is smooth and bounded:
/// Q(w^α) Π_j PG_j(w) [(2Cw + Σ_j Â_j(w)) PG₀(w) + Ŝ₀(w)].
pub fn moment(
    beta: f64,
    b: MomentOrder,
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Result<MomentResult> {
    model.ensure_valid()?;
    cfg.validate()?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be finite and > 0, got {beta}"
        )));
    }
    if !(b.0.re.is_finite() && b.0.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment order must be finite, got {}",
            b.0
        )));
    }

    let c = model.ppp_weight();
    let f_ppp = if c > 0.0 {
        ppp_hypergeometric(b, model.alpha, beta)?
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sources = Sources::new(model, beta, b, cfg)?;
    let zero = Sources::new(model, beta, MomentOrder::real(0.0), cfg)?;

    let tail = 1.0 - cfg.r_cutoff_mass;
    let (lo, hi) = bracket(c, &zero, tail);
    let w_max = quantile(tail, c, &zero, lo, hi);
    let mut pts = vec![0.0];
    let mut prev = lo;
    for &q in QUANTILES.iter().filter(|&&q| q > tail) {
        let w = quantile(q, c, &zero, prev, w_max);
        if w > *pts.last().unwrap() && w < w_max {
            pts.push(w);
            prev = w;
        }
    }
    pts.push(w_max);

    let mut failed: Option<String> = None;
    let integrand = |w: f64| -> Tracked {
        let q = (-(c * w * w) * f_ppp).exp();
        let mut front = q;
        let mut rel = 0.0;
        let mut sum_a = Complex64::new(2.0 * c * w, 0.0);
        let mut err_a = 0.0;
        for t in &sources.tiers {
            let pg = t.pgfl(w);
            let a = t.sp_hat(w);
            if !(pg.converged && a.converged) && failed.is_none() {
                failed = Some(format!("cluster functionals at w = {w:e}"));
            }
            front *= pg.value;
            rel += pg.error;
            sum_a += a.value;
            err_a += a.error;
        }
        let bracket = match &sources.palm {
            None => sum_a,
            Some(p) => {
                let pg0 = p.pgfl(w);
                let s0 = p.sp_hat(w);
                if !(pg0.converged && s0.converged) && failed.is_none() {
                    failed = Some(format!("own-cluster functionals at w = {w:e}"));
                }
                let v = sum_a * pg0.value + s0.value;
                err_a = err_a * pg0.value.norm()
                    + sum_a.norm() * pg0.value.norm() * pg0.error
                    + s0.error;
                v
            }
        };
        let f = front * bracket;
        if f.norm() > 0.0 {
            rel += err_a / bracket.norm();
        }
        Tracked {
            value: f,
            error: rel * f.norm(),
        }
    };
    let tol = Tolerance::new(cfg.abs_tol, cfg.rel_tol, cfg.max_depth);
    let e = integrate(integrand, &pts, &tol);

    // inner errors are integrated alongside the value on the same nodes
    let est_error = e.error + e.value.error + tail;
    let value = e.value.value;
    let allowed = 10.0 * cfg.abs_tol.max(cfg.rel_tol * value.norm());
    if est_error > allowed {
        return Err(Error::Accuracy {
            context: failed
                .unwrap_or_else(|| format!("outer integral for b = {}, beta = {beta}", b.0)),
            estimate: value.norm(),
            error: est_error,
        });
    }
    Ok(MomentResult {
        value,
        est_error,
        beta,
        order: b,
    })
}

/// [`moment`] over several thresholds and orders, evaluated in parallel.
/// Results come back in (beta, order) row-major order.
pub fn moments(
    betas: &[f64],
    orders: &[MomentOrder],
    model: &NetworkModel,
    cfg: &QuadratureConfig,
) -> Vec<Result<MomentResult>> {
    use rayon::prelude::*;
    let jobs: Vec<(f64, MomentOrder)> = betas
        .iter()
        .flat_map(|&beta| orders.iter().map(move |&b| (beta, b)))
        .collect();
    jobs.par_iter()
        .map(|&(beta, b)| moment(beta, b, model, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gauss_2f1_neg;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn single_ppp_closed_form() {
        let m = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        let v = moment(1.0, MomentOrder::real(1.0), &m, &cfg()).unwrap();
        assert!(
            (v.value.re - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-7,
            "{}",
            v.value
        );
        assert!(v.value.im.abs() < 1e-15);
        for &alpha in &[3.0, 3.7, 5.0] {
            for &beta in &[0.2, 3.0] {
                let b = MomentOrder::real(1.5);
                let want = 1.0
                    / gauss_2f1_neg(b.0, -2.0 / alpha, 1.0 - 2.0 / alpha, -beta)
                        .unwrap()
                        .re;
                let m = NetworkModel::single_ppp(0.3, 7.0, alpha);
                let got = moment(beta, b, &m, &cfg()).unwrap();
                assert!(
                    (got.value.re - want).abs() < 1e-6 * want,
                    "alpha={alpha} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn imaginary_order_ppp() {
        let m = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        let b = MomentOrder::imag(5.0);
        let want = 1.0 / gauss_2f1_neg(b.0, -0.5, 0.5, -1.0).unwrap();
        let got = moment(1.0, b, &m, &cfg()).unwrap();
        assert!((got.value - want).norm() < 1e-6, "{} vs {want}", got.value);
        let conj = moment(1.0, MomentOrder::imag(-5.0), &m, &cfg()).unwrap();
        assert!((conj.value - got.value.conj()).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        assert!(moment(0.0, MomentOrder::real(1.0), &m, &cfg()).is_err());
        assert!(moment(1.0, MomentOrder::real(f64::NAN), &m, &cfg()).is_err());
        let bad = NetworkModel::single_ppp(-1.0, 1.0, 4.0);
        assert!(matches!(
            moment(1.0, MomentOrder::real(1.0), &bad, &cfg()),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn fig1_normalization_and_jensen() {
        for type2 in [false, true] {
            let m = NetworkModel::two_tier_reference(0.04, type2);
            let m0 = moment(1.0, MomentOrder::real(0.0), &m, &cfg()).unwrap();
            assert!(
                (m0.value.re - 1.0).abs() < 1e-5,
                "type2={type2}: {}",
                m0.value
            );
            let m1 = moment(1.0, MomentOrder::real(1.0), &m, &cfg())
                .unwrap()
                .value
                .re;
            let m2 = moment(1.0, MomentOrder::real(2.0), &m, &cfg())
                .unwrap()
                .value
                .re;
            assert!(m1 * m1 <= m2 && m2 <= m1 && m1 <= 1.0, "{m1} {m2}");
        }
    }
}
