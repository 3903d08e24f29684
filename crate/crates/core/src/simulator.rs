//! Monte Carlo sampling of the planar network, used as an independent check
//! on the analytic engine.
//!
//! Fading is not sampled: given a realization, the success probability over
//! Rayleigh fading is the closed-form product Π (1 + β x̃*/x̃)^{−1}.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::engine::{CurveMethod, MetaCurve};
use crate::error::{Error, Result};
use crate::model::{NetworkModel, TierSpec, UserPlacement};
use crate::projection::ParentConfig;

/// Parent discs extend this many cluster spreads past the window.
pub const GUARD_SIGMAS: f64 = 6.0;

/// Discard fraction above which a run carries a warning.
pub const DISCARD_WARNING: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Radius of the sampling disc around the typical user, km.
    pub window_radius: f64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Thresholds β (linear).
    pub beta_grid: Vec<f64>,
    /// Reliability levels θ at which the empirical CCDF is reported.
    pub theta_grid: Vec<f64>,
}

impl SimConfig {
    /// Default window for `model`, θ grid 0.01, 0.02, …, 0.99.
    pub fn new(
        model: &NetworkModel,
        n_realizations: usize,
        seed: u64,
        beta_grid: Vec<f64>,
    ) -> Self {
        Self {
            window_radius: default_window(model),
            n_realizations,
            seed,
            beta_grid,
            theta_grid: (1..100).map(|k| k as f64 / 100.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window_radius.is_finite() && self.window_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "simulation.window_radius must be finite and > 0, got {}",
                self.window_radius
            )));
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter(
                "simulation.realizations must be >= 1".into(),
            ));
        }
        if let Some(b) = self
            .beta_grid
            .iter()
            .find(|b| !(b.is_finite() && **b > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and > 0, got {b}"
            )));
        }
        if let Some(t) = self
            .theta_grid
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= 1.0))
        {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1], got {t}"
            )));
        }
        Ok(())
    }
}

/// max(10·σ_max, 25/√(π λ_min)) where λ_min is the smallest mean tier
/// density. The interference from beyond this radius shifts P_s by well
/// under a standard error at 10⁵ realizations.
pub fn default_window(model: &NetworkModel) -> f64 {
    let mut sigma_max: f64 = 0.0;
    let mut lambda_min = f64::INFINITY;
    for t in &model.tiers {
        if let TierSpec::Pcp { cluster_spread, .. } = *t {
            sigma_max = sigma_max.max(cluster_spread);
        }
        lambda_min = lambda_min.min(t.mean_intensity());
    }
    if let UserPlacement::Type2 { user_spread, .. } = model.user {
        sigma_max = sigma_max.max(user_spread);
    }
    (10.0 * sigma_max).max(25.0 / (PI * lambda_min).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsPoint {
    /// Planar position relative to the typical user, km.
    pub position: [f64; 2],
    /// Model tier index, or `None` for the user's own cluster.
    pub tier: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Realization {
    pub points: Vec<BsPoint>,
    /// Parent of the user's own cluster (Type 2 only).
    pub palm_center: Option<[f64; 2]>,
}

/// The random stream of realization `index`: independent of how work is
/// scheduled across threads.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean)
            .expect("finite positive mean")
            .sample(rng) as usize
    }
}

fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let th = 2.0 * PI * rng.random::<f64>();
    [r * th.cos(), r * th.sin()]
}

fn spawn_cluster<R: Rng + ?Sized>(
    center: [f64; 2],
    mean_size: f64,
    spread: f64,
    rng: &mut R,
    mut emit: impl FnMut([f64; 2]),
) {
    let n = poisson(mean_size, rng);
    if n == 0 {
        return;
    }
    let normal = Normal::new(0.0, spread).expect("positive spread");
    for _ in 0..n {
        emit([
            center[0] + normal.sample(rng),
            center[1] + normal.sample(rng),
        ]);
    }
}

/// Streams every BS of one realization to `emit(position, tier)`.
fn sample_into<R: Rng + ?Sized>(
    model: &NetworkModel,
    window: f64,
    rng: &mut R,
    mut emit: impl FnMut([f64; 2], Option<usize>),
) -> Option<[f64; 2]> {
    for (i, t) in model.tiers.iter().enumerate() {
        match *t {
            TierSpec::Ppp { intensity, .. } => {
                for _ in 0..poisson(intensity * PI * window * window, rng) {
                    emit(uniform_in_disc(window, rng), Some(i));
                }
            }
            TierSpec::Pcp {
                parent_intensity,
                mean_cluster_size,
                cluster_spread,
                ..
            } => {
                let outer = window + GUARD_SIGMAS * cluster_spread;
                for _ in 0..poisson(parent_intensity * PI * outer * outer, rng) {
                    let c = uniform_in_disc(outer, rng);
                    spawn_cluster(c, mean_cluster_size, cluster_spread, rng, |p| {
                        emit(p, Some(i))
                    });
                }
            }
        }
    }
    if let UserPlacement::Type2 {
        coupled_tier,
        user_spread,
    } = model.user
    {
        let k = model.tiers[coupled_tier]
            .cluster()
            .expect("validated coupled tier");
        let n = Normal::new(0.0, user_spread).expect("positive spread");
        let z0 = [n.sample(rng), n.sample(rng)];
        spawn_cluster(z0, k.mean_size, k.spread, rng, |p| emit(p, None));
        return Some(z0);
    }
    None
}

/// One planar realization of every tier around the typical user at the
/// origin: PPP tiers in the window disc, PCP parents in the disc enlarged by
/// the guard, and for Type 2 the user's own cluster.
pub fn sample_realization<R: Rng + ?Sized>(
    model: &NetworkModel,
    cfg: &SimConfig,
    rng: &mut R,
) -> Realization {
    let mut points = Vec::new();
    let palm_center = sample_into(model, cfg.window_radius, rng, |position, tier| {
        points.push(BsPoint { position, tier })
    });
    Realization {
        points,
        palm_center,
    }
}

fn power_of(model: &NetworkModel, tier: Option<usize>) -> f64 {
    match (tier, model.user) {
        (Some(i), _) => model.tiers[i].power(),
        (None, UserPlacement::Type2 { coupled_tier, .. }) => model.tiers[coupled_tier].power(),
        (None, UserPlacement::Type1) => panic!("own-cluster point in a Type 1 model"),
    }
}

fn mark(position: [f64; 2], power: f64, alpha: f64) -> f64 {
    let d2 = position[0] * position[0] + position[1] * position[1];
    let pl = if alpha == 4.0 {
        d2 * d2
    } else {
        d2.powf(0.5 * alpha)
    };
    pl / power
}

/// Projected marks ‖x‖^α / P of every BS in the realization.
pub fn projected_marks(real: &Realization, model: &NetworkModel) -> Vec<f64> {
    real.points
        .iter()
        .map(|p| mark(p.position, power_of(model, p.tier), model.alpha))
        .collect()
}

/// P_s(β) for each β: the serving BS has the smallest mark x̃* (first one
/// on ties) and every other mark x̃ contributes a factor (1 + β x̃*/x̃)^{−1}.
pub fn success_probabilities_from_marks(marks: &[f64], betas: &[f64]) -> Result<Vec<f64>> {
    let (serving, &x_star) = marks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::EmptyRealization)?;
    let mut log_ps = vec![0.0; betas.len()];
    for (i, &x) in marks.iter().enumerate() {
        if i == serving {
            continue;
        }
        let ratio = x_star / x;
        for (acc, &beta) in log_ps.iter_mut().zip(betas) {
            *acc -= (beta * ratio).ln_1p();
        }
    }
    Ok(log_ps.into_iter().map(f64::exp).collect())
}

pub fn conditional_success_probability(
    real: &Realization,
    model: &NetworkModel,
    beta: f64,
) -> Result<f64> {
    success_probabilities_from_marks(&projected_marks(real, model), &[beta]).map(|v| v[0])
}

/// Fraction of samples strictly above each θ.
pub fn empirical_ccdf(samples: &[f64], thetas: &[f64]) -> Vec<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    thetas
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&x| x <= t);
            (sorted.len() - at_or_below) as f64 / n
        })
        .collect()
}

/// Empirical quantities at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBeta {
    pub beta: f64,
    /// P_s of every kept realization, in realization order.
    pub samples: Vec<f64>,
    pub m1: f64,
    pub m2: f64,
    pub se_m1: f64,
    pub se_m2: f64,
    pub curve: MetaCurve,
    /// Binomial standard error of each CCDF point.
    pub ccdf_se: Vec<f64>,
}

impl EmpiricalBeta {
    fn from_samples(beta: f64, samples: Vec<f64>, thetas: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean_sd = |f: &dyn Fn(f64) -> f64| {
            let m = samples.iter().map(|&x| f(x)).sum::<f64>() / n;
            let v = if samples.len() > 1 {
                samples.iter().map(|&x| (f(x) - m).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (m, (v / n).sqrt())
        };
        let (m1, se_m1) = mean_sd(&|x| x);
        let (m2, se_m2) = mean_sd(&|x| x * x);
        let values = empirical_ccdf(&samples, thetas);
        let ccdf_se = values.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
        let worst = values
            .iter()
            .map(|p| (p * (1.0 - p) / n).sqrt())
            .fold(0.0, f64::max);
        Self {
            beta,
            samples,
            m1,
            m2,
            se_m1,
            se_m2,
            curve: MetaCurve {
                beta,
                thetas: thetas.to_vec(),
                values,
                method: CurveMethod::Empirical,
                est_error: worst,
            },
            ccdf_se,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeta {
    /// One entry per β of the configuration, in the same order.
    pub per_beta: Vec<EmpiricalBeta>,
    pub n_realizations: usize,
    /// Realizations without any BS; these carry no sample.
    pub discarded: usize,
    pub warning: Option<String>,
}

/// Samples `cfg.n_realizations` networks (in parallel, each from its own
/// stream) and collects P_s at every β.
pub fn run_monte_carlo(model: &NetworkModel, cfg: &SimConfig) -> Result<EmpiricalMeta> {
    model.ensure_valid()?;
    cfg.validate()?;
    let per_real: Vec<Option<Vec<f64>>> = (0..cfg.n_realizations as u64)
        .into_par_iter()
        .map_init(Vec::new, |marks: &mut Vec<f64>, idx| {
            marks.clear();
            let mut rng = realization_rng(cfg.seed, idx);
            sample_into(model, cfg.window_radius, &mut rng, |p, tier| {
                marks.push(mark(p, power_of(model, tier), model.alpha))
            });
            success_probabilities_from_marks(marks, &cfg.beta_grid).ok()
        })
        .collect();

    let discarded = per_real.iter().filter(|r| r.is_none()).count();
    let kept: Vec<Vec<f64>> = per_real.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::EmptyRealization);
    }
    let per_beta = cfg
        .beta_grid
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let samples = kept.iter().map(|v| v[j]).collect();
            EmpiricalBeta::from_samples(beta, samples, &cfg.theta_grid)
        })
        .collect();
    let frac = discarded as f64 / cfg.n_realizations as f64;
    let warning = (frac > DISCARD_WARNING).then(|| {
        format!(
            "{discarded} of {} realizations had no base station ({:.1}%); the window of {} km is too small",
            cfg.n_realizations,
            100.0 * frac,
            cfg.window_radius
        )
    });
    Ok(EmpiricalMeta {
        per_beta,
        n_realizations: cfg.n_realizations,
        discarded,
        warning,
    })
}

/// Sorted projected marks for fixed cluster parents: each parent at radial
/// distance z is placed at (z, 0), the PPP tiers are sampled in a disc of
/// radius `window`, and only marks below the level where the PPP disc is
/// complete are returned (the clusters are always complete). The second
/// value is that completeness level.
pub fn sample_marks_given_parents<R: Rng + ?Sized>(
    model: &NetworkModel,
    parents: &ParentConfig,
    window: f64,
    rng: &mut R,
) -> (Vec<f64>, f64) {
    let mut marks = Vec::new();
    let mut limit = f64::INFINITY;
    for (i, t) in model.tiers.iter().enumerate() {
        match *t {
            TierSpec::Ppp { intensity, power } => {
                limit = limit.min(window.powf(model.alpha) / power);
                for _ in 0..poisson(intensity * PI * window * window, rng) {
                    marks.push(mark(uniform_in_disc(window, rng), power, model.alpha));
                }
            }
            TierSpec::Pcp {
                mean_cluster_size,
                cluster_spread,
                power,
                ..
            } => {
                for &z in parents.per_tier.get(i).map(Vec::as_slice).unwrap_or(&[]) {
                    spawn_cluster([z, 0.0], mean_cluster_size, cluster_spread, rng, |p| {
                        marks.push(mark(p, power, model.alpha))
                    });
                }
            }
        }
    }
    if let (Some(z0), UserPlacement::Type2 { coupled_tier, .. }) = (parents.palm, model.user) {
        let k = model.tiers[coupled_tier]
            .cluster()
            .expect("validated coupled tier");
        spawn_cluster([z0, 0.0], k.mean_size, k.spread, rng, |p| {
            marks.push(mark(p, k.power, model.alpha))
        });
    }
    marks.retain(|&x| x <= limit);
    marks.sort_by(f64::total_cmp);
    (marks, limit)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the continuous CDF `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at the 1% level for n samples.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
