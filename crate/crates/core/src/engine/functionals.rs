//! Probability generating and sum-product functionals of the cluster
//! sources seen by the typical user.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::factors::{breakpoints, ClusterEval, Inner};
use super::{MomentOrder, QuadratureConfig};
use crate::error::{Error, Result};
use crate::model::{ClusterSource, NetworkModel, TierSpec, UserPlacement};
use crate::projection::{rayleigh_pdf, rician_pdf};
use crate::quadrature::{integrate, Tolerance};

enum Parents {
    /// PPP of parents with this intensity.
    Ppp(f64),
    /// One parent at Rayleigh distance with this spread.
    Palm(f64),
}

/// Evaluates PGFL and the w-form SPFL of one cluster source at fixed (β, b).
///
/// Everything is parametrized by w = r^{1/α}; the serving radius of the
/// source is then ρ = w·P^{1/α}.
pub(crate) struct SourceEval {
    cluster: ClusterEval,
    parents: Parents,
    power_root: f64,
    trivial_order: bool,
    e_tol: Tolerance,
    s_tol: Tolerance,
}

impl SourceEval {
    pub fn new(
        source: ClusterSource,
        model: &NetworkModel,
        beta: f64,
        b: MomentOrder,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let kernel = model.kernel(source).ok_or_else(|| {
            Error::InvalidParameter(format!("{source:?} is not a cluster source of this model"))
        })?;
        let parents = match source {
            ClusterSource::Tier(i) => match model.tiers[i] {
                TierSpec::Pcp {
                    parent_intensity, ..
                } => Parents::Ppp(parent_intensity),
                TierSpec::Ppp { .. } => unreachable!("kernel() only returns PCP tiers"),
            },
            ClusterSource::Palm => match model.user {
                UserPlacement::Type2 { user_spread, .. } => Parents::Palm(user_spread),
                UserPlacement::Type1 => unreachable!("kernel() rejects palm for Type 1"),
            },
        };
        let inner_rel = cfg.rel_tol * 0.1;
        Ok(Self {
            cluster: ClusterEval::new(kernel, model.alpha, beta, b, cfg),
            parents,
            power_root: kernel.power.powf(1.0 / model.alpha),
            trivial_order: b.0 == Complex64::new(0.0, 0.0),
            e_tol: Tolerance::new(inner_rel, inner_rel, cfg.max_depth),
            s_tol: Tolerance::new(0.0, inner_rel, cfg.max_depth),
        })
    }

    pub fn is_palm(&self) -> bool {
        matches!(self.parents, Parents::Palm(_))
    }

    /// Mean cluster size and spread, for scale guesses.
    pub fn kernel_scale(&self) -> (f64, f64, f64) {
        let k = &self.cluster.kernel;
        (k.spread, self.power_root, k.mean_size)
    }

    pub fn parent_intensity(&self) -> Option<f64> {
        match self.parents {
            Parents::Ppp(l) => Some(l),
            Parents::Palm(_) => None,
        }
    }

    fn sigma(&self) -> f64 {
        self.cluster.kernel.spread
    }

    fn cutoff(&self) -> f64 {
        self.cluster.cutoff * self.sigma()
    }

    /// PGFL at w. For a PPP of parents this is exp(−E) with
    /// E = 2πλ_p ∫ z (1 − g) dz; the error is relative (δE).
    pub fn pgfl(&self, w: f64) -> Inner {
        let rho = w * self.power_root;
        match self.parents {
            Parents::Ppp(lambda) => {
                let e = self.log_pgfl(rho, lambda);
                Inner {
                    value: (-e.value).exp(),
                    error: e.error,
                    converged: e.converged,
                }
            }
            Parents::Palm(su) => {
                let top = self.cluster.cutoff * su;
                let s = self.sigma();
                let pts = breakpoints(0.0, top, &[rho - 2.0 * s, rho, rho + 2.0 * s, su]);
                let mut ok = true;
                let e = integrate(
                    |z| {
                        let (_, g, _, c) = self.cluster.g_parts(rho, z);
                        ok &= c;
                        g * rayleigh_pdf(z, su)
                    },
                    &pts,
                    &self.s_tol,
                );
                let rel = (e.error + self.s_tol.rel * e.abs_integral)
                    / e.value.norm().max(f64::MIN_POSITIVE);
                Inner {
                    value: e.value,
                    error: rel,
                    converged: ok && e.converged,
                }
            }
        }
    }

    /// E = 2πλ_p ∫₀^∞ z (1 − g(ρ, z)) dz, split into a closed-form core,
    /// the Rician transition band, and (for b ≠ 0) the polynomial far field.
    fn log_pgfl(&self, rho: f64, lambda: f64) -> Inner {
        let m = self.cluster.kernel.mean_size;
        let l = self.cutoff();
        let s = self.sigma();
        let za = (rho - l).max(0.0);
        let zb = rho + l;
        // D ≡ 1 for z + Lσ ≤ ρ
        let core = 0.5 * za * za * (-(-m).exp_m1());

        let mut ok = true;
        let pts = breakpoints(za, zb, &[rho - 2.0 * s, rho, rho + 2.0 * s]);
        let near = integrate(
            |z| {
                let (omg, _, _, c) = self.cluster.g_parts(rho, z);
                ok &= c;
                omg * z
            },
            &pts,
            &self.e_tol.tightened(1.0 / (2.0 * PI * lambda).max(1.0)),
        );
        let mut value = Complex64::new(core, 0.0) + near.value;
        let mut error = near.error;
        let mut abs = core + near.abs_integral;
        let mut converged = near.converged;

        if !self.trivial_order {
            // z = zb·τ^{−k}, k = 1/(α−2): z(1−g) dz becomes nearly flat in τ
            let k = 1.0 / (self.cluster.alpha - 2.0);
            let far = integrate(
                |tau: f64| {
                    let z = zb * tau.powf(-k);
                    let (omg, _, _, c) = self.cluster.g_parts(rho, z);
                    ok &= c;
                    omg * (z * k * z / tau)
                },
                &[0.0, 1e-6, 1e-3, 0.1, 1.0],
                &self.e_tol.tightened(1.0 / (2.0 * PI * lambda).max(1.0)),
            );
            value += far.value;
            error += far.error;
            abs += far.abs_integral;
            converged &= far.converged;
        }
        let scale = 2.0 * PI * lambda;
        Inner {
            value: value * scale,
            error: scale * (error + self.s_tol.rel * m * abs),
            converged: converged && ok,
        }
    }

    /// w-form SPFL kernel: for a parent PPP, Â = 2πλ_p ∫ z m̄ P^{1/α} f_d(ρ|z) g dz
    /// (the PGFL factor is applied by the caller); for the palm cluster,
    /// Ŝ = ∫ m̄ P^{1/α} f_d(ρ|z) g f_Ray(z) dz. The error is absolute.
    pub fn sp_hat(&self, w: f64) -> Inner {
        let rho = w * self.power_root;
        let l = self.cutoff();
        let s = self.sigma();
        let m = self.cluster.kernel.mean_size;
        let lo = (rho - l).max(0.0);
        let mut hi = rho + l;
        let weight: Box<dyn Fn(f64) -> f64> = match self.parents {
            Parents::Ppp(lambda) => Box::new(move |z| 2.0 * PI * lambda * z),
            Parents::Palm(su) => {
                hi = hi.min(self.cluster.cutoff * su);
                Box::new(move |z| rayleigh_pdf(z, su))
            }
        };
        if hi <= lo || m == 0.0 {
            return Inner {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
                converged: true,
            };
        }
        let pts = breakpoints(lo, hi, &[rho - 2.0 * s, rho, rho + 2.0 * s]);
        let mut ok = true;
        let e = integrate(
            |z| {
                let (_, g, _, c) = self.cluster.g_parts(rho, z);
                ok &= c;
                g * (weight(z) * rician_pdf(rho, z, s))
            },
            &pts,
            &self.s_tol,
        );
        let scale = m * self.power_root;
        Inner {
            value: e.value * scale,
            error: scale * (e.error + self.s_tol.rel * m * e.abs_integral),
            converged: ok && e.converged,
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "r must be finite and > 0, got {r}"
        )))
    }
}

fn accuracy(context: String, e: Inner) -> Error {
    Error::Accuracy {
        context,
        estimate: e.value.norm(),
        error: e.error,
    }
}

/// PGFL of a cluster source at projected threshold r: for a PCP tier,
/// exp(−∫ 2πλ_p z (1 − g(r,z)) dz); for the palm cluster, ∫ g(r,z) f_Ray(z) dz.
pub fn pgfl(
    r: f64,
    source: ClusterSource,
    model: &NetworkModel,
    beta: f64,
    b: MomentOrder,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_r(r)?;
    let ev = SourceEval::new(source, model, beta, b, cfg)?;
    let p = ev.pgfl(r.powf(1.0 / model.alpha));
    if !p.converged {
        return Err(accuracy(format!("PGFL of {source:?} at r = {r}"), p));
    }
    Ok(p.value)
}

/// SPFL of a cluster source at projected threshold r (density in r).
pub fn spfl(
    r: f64,
    source: ClusterSource,
    model: &NetworkModel,
    beta: f64,
    b: MomentOrder,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_r(r)?;
    let ev = SourceEval::new(source, model, beta, b, cfg)?;
    let w = r.powf(1.0 / model.alpha);
    let a = ev.sp_hat(w);
    if !a.converged {
        return Err(accuracy(format!("SPFL of {source:?} at r = {r}"), a));
    }
    // dw/dr
    let jac = w / (model.alpha * r);
    if ev.is_palm() {
        Ok(a.value * jac)
    } else {
        let p = ev.pgfl(w);
        if !p.converged {
            return Err(accuracy(format!("PGFL of {source:?} at r = {r}"), p));
        }
        Ok(a.value * p.value * jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::factors::g_factor;
    use crate::engine::factors::rho_factor;
    use crate::model::ClusterKernel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn fig1(type2: bool) -> NetworkModel {
        NetworkModel::two_tier_reference(0.04, type2)
    }

    #[test]
    fn trivial_sources() {
        let mut m = fig1(true);
        if let TierSpec::Pcp {
            mean_cluster_size, ..
        } = &mut m.tiers[1]
        {
            *mean_cluster_size = 0.0;
        }
        for src in [ClusterSource::Tier(1), ClusterSource::Palm] {
            let p = pgfl(0.01, src, &m, 1.0, MomentOrder::real(1.0), &cfg()).unwrap();
            assert!((p.re - 1.0).abs() < 1e-12, "{p}");
            let s = spfl(0.01, src, &m, 1.0, MomentOrder::real(1.0), &cfg()).unwrap();
            assert_eq!(s.norm(), 0.0);
        }
        let m = fig1(true);
        let p = pgfl(
            1e-40,
            ClusterSource::Tier(1),
            &m,
            1.0,
            MomentOrder::real(0.0),
            &cfg(),
        )
        .unwrap();
        assert!((p.re - 1.0).abs() < 1e-9);
        assert!(pgfl(
            0.01,
            ClusterSource::Tier(0),
            &m,
            1.0,
            MomentOrder::real(1.0),
            &cfg()
        )
        .is_err());
        assert!(pgfl(
            0.01,
            ClusterSource::Palm,
            &fig1(false),
            1.0,
            MomentOrder::real(1.0),
            &cfg()
        )
        .is_err());
    }

    #[test]
    fn vanishing_parent_intensity_kills_spfl() {
        let mut m = fig1(false);
        if let TierSpec::Pcp {
            parent_intensity, ..
        } = &mut m.tiers[1]
        {
            *parent_intensity = 1e-300;
        }
        let s = spfl(
            1e-4,
            ClusterSource::Tier(1),
            &m,
            1.0,
            MomentOrder::real(1.0),
            &cfg(),
        )
        .unwrap();
        assert!(s.norm() < 1e-290);
    }

    #[test]
    fn campbell_at_order_zero() {
        // SPFL/PGFL = ∫ 2πλ_p z ρ(r,z) g₀ dz, with ρ and g₀ from the factor API
        let m = fig1(false);
        let k = m.tiers[1].cluster().unwrap();
        let r = 3e-5;
        let b0 = MomentOrder::real(0.0);
        let sp = spfl(r, ClusterSource::Tier(1), &m, 1.0, b0, &cfg()).unwrap();
        let pg = pgfl(r, ClusterSource::Tier(1), &m, 1.0, b0, &cfg()).unwrap();
        let mut acc = 0.0;
        let n = 4000;
        let (lo, hi) = (0.0, 0.6);
        let h = (hi - lo) / n as f64;
        for i in 0..n {
            let z = lo + (i as f64 + 0.5) * h;
            let g = g_factor(r, z, &k, 4.0, 1.0, b0, &cfg()).unwrap().re;
            acc += 2.0 * PI * 2.5 * z * rho_factor(r, z, &k, 4.0) * g * h;
        }
        assert!(
            ((sp / pg).re - acc).abs() < 1e-5 * acc,
            "{} vs {acc}",
            (sp / pg).re
        );
    }

    #[test]
    fn palm_pgfl_matches_direct_average() {
        let m = fig1(true);
        let k = m.tiers[1].cluster().unwrap();
        let r = 2e-5;
        let b = MomentOrder::real(1.0);
        let got = pgfl(r, ClusterSource::Palm, &m, 1.0, b, &cfg()).unwrap().re;
        let n = 3000;
        let hi = 0.4;
        let h = hi / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let z = (i as f64 + 0.5) * h;
            acc += g_factor(r, z, &k, 4.0, 1.0, b, &cfg()).unwrap().re * rayleigh_pdf(z, 0.04) * h;
        }
        assert!((got - acc).abs() < 1e-6, "{got} vs {acc}");
    }

    /// Monte Carlo E[Π_parents Π_offspring h(x)] where h is the per-BS factor
    /// 1{x>ρ}(1+β(ρ/x)^α)^{−1}, with parents of a PPP in a large disc.
    fn mc_pgfl(kernel: ClusterKernel, lambda_p: f64, rho: f64, beta: f64, n: usize) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let radius: f64 = 3.0;
        let np = Poisson::new(lambda_p * PI * radius * radius).unwrap();
        let nc = Poisson::new(kernel.mean_size).unwrap();
        let normal = rand_distr::Normal::new(0.0, kernel.spread).unwrap();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let parents = np.sample(&mut rng) as usize;
            let mut prod = 1.0;
            for _ in 0..parents {
                let rr = radius * rng.random::<f64>().sqrt();
                let th = 2.0 * PI * rng.random::<f64>();
                let (px, py) = (rr * th.cos(), rr * th.sin());
                for _ in 0..nc.sample(&mut rng) as usize {
                    let d = (px + normal.sample(&mut rng)).hypot(py + normal.sample(&mut rng));
                    prod *= if d <= rho {
                        0.0
                    } else {
                        1.0 / (1.0 + beta * (rho / d).powi(4))
                    };
                }
                if prod == 0.0 {
                    break;
                }
            }
            s += prod;
            s2 += prod * prod;
        }
        let mean = s / n as f64;
        (mean, ((s2 / n as f64 - mean * mean) / n as f64).sqrt())
    }

    #[test]
    fn pcp_pgfl_matches_monte_carlo() {
        let m = fig1(false);
        let k = m.tiers[1].cluster().unwrap();
        // r such that the tier-2 serving radius is 0.15 km
        let rho: f64 = 0.15;
        let r = rho.powi(4) / 100.0;
        let got = pgfl(
            r,
            ClusterSource::Tier(1),
            &m,
            1.0,
            MomentOrder::real(1.0),
            &cfg(),
        )
        .unwrap()
        .re;
        let (mean, se) = mc_pgfl(k, 2.5, rho, 1.0, 40_000);
        assert!((got - mean).abs() < 3.5 * se, "{got} vs {mean} ± {se}");
    }

    #[test]
    fn conjugate_symmetric_in_order() {
        let m = fig1(true);
        let r = 3e-5;
        for src in [ClusterSource::Tier(1), ClusterSource::Palm] {
            let a = pgfl(r, src, &m, 2.0, MomentOrder::imag(3.0), &cfg()).unwrap();
            let b = pgfl(r, src, &m, 2.0, MomentOrder::imag(-3.0), &cfg()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
            let a = spfl(r, src, &m, 2.0, MomentOrder::imag(3.0), &cfg()).unwrap();
            let b = spfl(r, src, &m, 2.0, MomentOrder::imag(-3.0), &cfg()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
        }
    }
}
