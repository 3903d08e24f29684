//! Regularized incomplete beta function.

use super::gamma::ln_gamma;
use crate::error::{Error, Result};

pub fn ln_beta(p: f64, q: f64) -> f64 {
    ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
}

/// I_x(p, q) via the continued fraction of the incomplete beta integral,
/// using I_x(p,q) = 1 − I_{1−x}(q,p) on the side where it converges fast.
pub fn regularized_incomplete_beta(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::Domain {
            function: "regularized_incomplete_beta",
            detail: format!("x = {x}, p = {p}, q = {q}"),
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = p * x.ln() + q * (1.0 - x).ln() - ln_beta(p, q);
    let v = if x < (p + 1.0) / (p + q + 2.0) {
        ln_front.exp() * beta_cont_frac(x, p, q) / p
    } else {
        1.0 - ln_front.exp() * beta_cont_frac(1.0 - x, q, p) / q
    };
    Ok(v.clamp(0.0, 1.0))
}

fn beta_cont_frac(x: f64, p: f64, q: f64) -> f64 {
    let tiny = 1e-300;
    let qab = p + q;
    let qap = p + 1.0;
    let qam = p - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (q - m) * x / ((qam + m2) * (p + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
