//! Distance laws and the projection of the planar BS process onto the half
//! line via x ↦ ‖x‖^α / P.
//!
//! Conditioned on the parent points of every cluster source, the projected
//! marks form an inhomogeneous PPP on (0, ∞). The functions here give its
//! mean measure and intensity for a finite parent configuration.

use std::f64::consts::PI;

use crate::model::{NetworkModel, TierSpec, UserPlacement};
use crate::special::{bessel_i0_scaled, marcum_q1};

/// Radial distances of cluster parents, per model tier (entries for PPP
/// tiers are ignored), plus the user's own parent for Type 2.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParentConfig {
    pub per_tier: Vec<Vec<f64>>,
    pub palm: Option<f64>,
}

impl ParentConfig {
    pub fn empty(model: &NetworkModel) -> Self {
        Self {
            per_tier: vec![Vec::new(); model.tiers.len()],
            palm: None,
        }
    }

    fn parents(&self, tier: usize) -> &[f64] {
        self.per_tier.get(tier).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// A BS after projection: its mark P_i^{-1}‖x‖^α and the tier it came from
/// (`None` for the palm cluster).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub mark: f64,
    pub tier: Option<usize>,
}

/// Rician density of the distance from the origin to a point displaced
/// from a parent at distance `z` by an isotropic Gaussian of deviation
/// `sigma`. Uses the scaled Bessel function so it never overflows.
pub fn rician_pdf(x: f64, z: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    let d = x - z;
    (x / s2) * (-(d * d) / (2.0 * s2)).exp() * bessel_i0_scaled(x * z / s2)
}

/// CDF of the Rician distance, 1 − Q₁(z/σ, x/σ).
pub fn rician_cdf(x: f64, z: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let q = marcum_q1(z / sigma, x / sigma).expect("finite nonnegative arguments");
    1.0 - q
}

/// Rayleigh density, the z = 0 case of [`rician_pdf`].
pub fn rayleigh_pdf(x: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    (x / s2) * (-(x * x) / (2.0 * s2)).exp()
}

fn cluster_terms(model: &NetworkModel, parents: &ParentConfig) -> Vec<(f64, f64, f64, f64)> {
    // (mean size, spread, power, parent distance) for every conditioned cluster
    let mut out = Vec::new();
    for (i, t) in model.tiers.iter().enumerate() {
        if let TierSpec::Pcp {
            mean_cluster_size,
            cluster_spread,
            power,
            ..
        } = *t
        {
            for &z in parents.parents(i) {
                out.push((mean_cluster_size, cluster_spread, power, z));
            }
        }
    }
    if let (UserPlacement::Type2 { coupled_tier, .. }, Some(z0)) = (model.user, parents.palm) {
        if let Some(k) = model.tiers.get(coupled_tier).and_then(TierSpec::cluster) {
            out.push((k.mean_size, k.spread, k.power, z0));
        }
    }
    out
}

/// Mean measure Λ̃(x) of the projected process on (0, x].
pub fn projected_measure(x: f64, model: &NetworkModel, parents: &ParentConfig) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let delta = 2.0 / model.alpha;
    let ppp = model.ppp_weight() * x.powf(delta);
    let pcp: f64 = cluster_terms(model, parents)
        .into_iter()
        .map(|(m, s, p, z)| m * rician_cdf((x * p).powf(1.0 / model.alpha), z, s))
        .sum();
    ppp + pcp
}

/// Intensity λ̃(x) = dΛ̃/dx of the projected process.
pub fn projected_intensity(x: f64, model: &NetworkModel, parents: &ParentConfig) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = model.alpha;
    let delta = 2.0 / a;
    let ppp = model.ppp_weight() * delta * x.powf(delta - 1.0);
    let pcp: f64 = cluster_terms(model, parents)
        .into_iter()
        .map(|(m, s, p, z)| {
            m * p.powf(1.0 / a) / a
                * x.powf(1.0 / a - 1.0)
                * rician_pdf((x * p).powf(1.0 / a), z, s)
        })
        .sum();
    ppp + pcp
}

/// Density of the smallest projected mark (the serving BS),
/// λ̃(x)·exp(−Λ̃(x)).
pub fn serving_distance_pdf(x: f64, model: &NetworkModel, parents: &ParentConfig) -> f64 {
    projected_intensity(x, model, parents) * (-projected_measure(x, model, parents)).exp()
}

/// Exact single-PPP form of the serving-mark density, used as a reference.
pub fn single_ppp_serving_pdf(x: f64, intensity: f64, power: f64, alpha: f64) -> f64 {
    let c = PI * intensity * power.powf(2.0 / alpha);
    let d = 2.0 / alpha;
    c * d * x.powf(d - 1.0) * (-c * x.powf(d)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};
    use crate::special::bessel_i0;

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 1e-11, 2000)
    }

    #[test]
    fn rician_reductions() {
        for &x in &[0.01, 0.04, 0.1] {
            let s = 0.04f64;
            let want = x / (s * s) * (-x * x / (2.0 * s * s)).exp();
            assert!((rician_pdf(x, 0.0, s) - want).abs() < 1e-12 * want);
            assert!((rician_cdf(x, 0.0, s) - (1.0 - (-x * x / (2.0 * s * s)).exp())).abs() < 1e-14);
        }
        assert_eq!(rician_pdf(0.0, 0.2, 0.04), 0.0);
        assert_eq!(rician_cdf(0.0, 0.2, 0.04), 0.0);
    }

    #[test]
    fn rician_reference_values() {
        // oracle: unscaled formula with the power-series Bessel value
        let (x, z, s) = (0.05f64, 0.03f64, 0.04f64);
        let direct = x / (s * s)
            * (-(x * x + z * z) / (2.0 * s * s)).exp()
            * bessel_i0(x * z / (s * s)).unwrap();
        assert!((rician_pdf(x, z, s) - direct).abs() < 1e-12 * direct);
        assert!((rician_pdf(x, z, s) - 13.306_272_775_19).abs() < 1e-8);
        // numerical derivative of the CDF
        let h = 1e-6;
        let fd = (rician_cdf(x + h, z, s) - rician_cdf(x - h, z, s)) / (2.0 * h);
        assert!((fd - direct).abs() < 1e-5 * direct);
        // quadrature of the pdf
        let q = integrate(|t| rician_pdf(t, 0.03, 0.04), &[0.0, 0.08], &tol()).value;
        assert!((rician_cdf(0.08, 0.03, 0.04) - q).abs() < 1e-10);
        assert!((q - 0.788_850_421_266_48).abs() < 1e-10);
    }

    #[test]
    fn rician_normalized_on_grid() {
        for &s in &[0.01f64, 0.04, 0.5] {
            for &z in &[0.0, 0.5 * s, 3.0 * s, 40.0 * s] {
                let hi = z + 12.0 * s;
                let lo = (z - 12.0 * s).max(0.0);
                let e = integrate(|x| rician_pdf(x, z, s), &[lo, z.max(lo + s), hi], &tol());
                assert!((e.value - 1.0).abs() < 1e-8, "s={s} z={z}: {}", e.value);
            }
        }
    }

    #[test]
    fn rician_cdf_monotone() {
        let s = 0.04;
        for &z in &[0.0, 0.05, 0.2] {
            let mut prev = 0.0;
            for i in 0..200 {
                let c = rician_cdf(i as f64 * 0.002, z, s);
                assert!(c >= prev - 1e-15);
                prev = c;
            }
        }
        // for x below z, moving the parent outward lowers the CDF
        let x = 0.05;
        let mut prev = 1.0;
        for i in 0..40 {
            let c = rician_cdf(x, 0.05 + 0.005 * i as f64, s);
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    fn fig1_parents(model: &NetworkModel) -> ParentConfig {
        let mut p = ParentConfig::empty(model);
        p.per_tier[1] = vec![0.1];
        p.palm = Some(0.05);
        p
    }

    #[test]
    fn single_ppp_forms() {
        let m = NetworkModel::single_ppp(1.3, 2.0, 3.5);
        let p = ParentConfig::empty(&m);
        for &x in &[0.01, 0.3, 2.0] {
            let c = PI * 1.3 * 2.0f64.powf(2.0 / 3.5);
            assert!((projected_measure(x, &m, &p) - c * x.powf(2.0 / 3.5)).abs() < 1e-13);
            let lam = c * (2.0 / 3.5) * x.powf(2.0 / 3.5 - 1.0);
            assert!((projected_intensity(x, &m, &p) - lam).abs() < 1e-12 * lam);
        }
        let m4 = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        for &x in &[0.01f64, 0.2, 1.0] {
            let want = PI * 0.5 / x.sqrt() * (-PI * x.sqrt()).exp();
            assert!((serving_distance_pdf(x, &m4, &p) - want).abs() < 1e-12 * want);
            assert!((single_ppp_serving_pdf(x, 1.0, 1.0, 4.0) - want).abs() < 1e-12 * want);
        }
        assert_eq!(projected_measure(0.0, &m4, &p), 0.0);
        assert!(projected_measure(1e-14, &m4, &p) < 1e-6);
    }

    #[test]
    fn measure_is_antiderivative_of_intensity() {
        let m = NetworkModel::two_tier_reference(0.04, true);
        let p = fig1_parents(&m);
        // fundamental theorem: Λ̃(1) = ∫₀¹ λ̃; substitute x = t^α to remove the singularity at 0
        let e = integrate(
            |t: f64| projected_intensity(t.powi(4), &m, &p) * 4.0 * t.powi(3),
            &[0.0, 0.1, 0.2, 0.35, 0.5, 1.0],
            &tol(),
        );
        let lam = projected_measure(1.0, &m, &p);
        assert!((e.value - lam).abs() < 1e-8 * lam, "{} vs {}", e.value, lam);

        // central differences at scattered points
        let h = 1e-6;
        for &x in &[0.5, 1e-3, 3e-3, 1e-2, 2e-2, 5e-2, 0.2, 1.7] {
            let fd = (projected_measure(x * (1.0 + h), &m, &p)
                - projected_measure(x * (1.0 - h), &m, &p))
                / (2.0 * h * x);
            let lam = projected_intensity(x, &m, &p);
            assert!((fd - lam).abs() <= 1e-5 * lam, "x={x}: {fd} vs {lam}");
        }
    }

    #[test]
    fn pcp_only_single_parent_at_origin() {
        let m = NetworkModel {
            tiers: vec![TierSpec::Pcp {
                parent_intensity: 1.0,
                mean_cluster_size: 3.0,
                cluster_spread: 0.1,
                power: 5.0,
            }],
            alpha: 3.0,
            user: UserPlacement::Type1,
        };
        let mut p = ParentConfig::empty(&m);
        p.per_tier[0] = vec![0.0];
        for &x in &[1e-4, 1e-3, 0.01] {
            let d = (x * 5.0f64).powf(1.0 / 3.0);
            let want =
                3.0 * 5.0f64.powf(1.0 / 3.0) / 3.0 * x.powf(1.0 / 3.0 - 1.0) * rayleigh_pdf(d, 0.1);
            assert!((projected_intensity(x, &m, &p) - want).abs() < 1e-12 * want);
        }
        // no parents at all: no BS anywhere
        let empty = ParentConfig::empty(&m);
        for &x in &[1e-4, 0.1, 10.0] {
            assert_eq!(serving_distance_pdf(x, &m, &empty), 0.0);
        }
    }

    #[test]
    fn serving_pdf_normalized() {
        let m = NetworkModel::two_tier_reference(0.04, true);
        let p = fig1_parents(&m);
        // in w = x^{1/4}: density picks up 4 w^3
        let e = integrate(
            |w: f64| serving_distance_pdf(w.powi(4), &m, &p) * 4.0 * w.powi(3),
            &[0.0, 0.01, 0.02, 0.04, 0.08, 0.15, 0.3, 0.6, 1.2, 2.5, 5.0],
            &tol(),
        );
        assert!((e.value - 1.0).abs() < 1e-6, "{}", e.value);
    }
}
