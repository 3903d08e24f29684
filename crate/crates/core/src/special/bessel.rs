//! Modified Bessel function of the first kind, order zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this argument the power series is used; above it the asymptotic
/// expansion, whose smallest term near k = 2x is far below f64 epsilon.
const SERIES_LIMIT: f64 = 30.0;

/// I₀(x) for x ≥ 0. Signals a range error once the value overflows f64.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= SERIES_LIMIT {
        return Ok(i0_series(x));
    }
    let ln_val = x + asymptotic_scaled(x).ln();
    if ln_val >= f64::MAX.ln() {
        return Err(Error::Range {
            function: "bessel_i0",
            arg: x,
        });
    }
    Ok(ln_val.exp())
}

/// Exponentially scaled e^{-x} I₀(x); finite for every finite x ≥ 0.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= SERIES_LIMIT {
        i0_series(x) * (-x).exp()
    } else {
        asymptotic_scaled(x)
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            function: "bessel_i0",
            detail: format!("x = {x}, need finite x >= 0"),
        });
    }
    Ok(())
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    sum
}

// e^{-x} I₀(x) ~ (2πx)^{-1/2} Σ_k [(2k-1)!!]² / (k! 8^k x^k)
fn asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}
