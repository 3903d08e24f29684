//! Gauss hypergeometric function on the negative real axis.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;

/// ₂F₁(a, b; c; z) for z ≤ 0 and complex `a`.
///
/// Uses the Pfaff transformation
/// ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)), which moves the
/// argument into [0, 1), then sums the power series. Because 1 − z ≥ 1 the
/// power is taken on a positive real base.
///
/// Fails with [`Error::SeriesNonConvergence`] when the series has not
/// converged after 10 000 terms, or when cancellation between terms has
/// destroyed more precision than the target accuracy allows (large |a|).
pub fn gauss_2f1_neg(a: Complex64, b: f64, c: f64, z: f64) -> Result<Complex64> {
    if !(z.is_finite() && z <= 0.0) {
        return Err(Error::Domain {
            function: "gauss_2f1_neg",
            detail: format!("z = {z}, need finite z <= 0"),
        });
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Domain {
            function: "gauss_2f1_neg",
            detail: format!("c = {c} is a nonpositive integer"),
        });
    }
    if !(a.re.is_finite() && a.im.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::Domain {
            function: "gauss_2f1_neg",
            detail: "non-finite parameter".into(),
        });
    }
    if z == 0.0 || a == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }

    let w = z / (z - 1.0);
    let bp = c - b;
    let tol = if a.im == 0.0 { 1e-10 } else { 1e-8 };

    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        term *= (a + kf) * ((bp + kf) / ((c + kf) * (kf + 1.0)) * w);
        sum += term;
        k += 1;
        let t = term.norm();
        max_term = max_term.max(t);
        let s = sum.norm();
        // the term ratio tends to w < 1; once it is contracting, the tail is bounded
        // by a geometric series
        let ratio = ((a + kf + 1.0) * (bp + kf + 1.0)).norm() / ((c + kf + 1.0) * (kf + 2.0)) * w;
        if ratio < 1.0 && t / (1.0 - ratio) <= 1e-16 * s || t == 0.0 {
            break;
        }
        if k >= MAX_TERMS {
            return Err(Error::SeriesNonConvergence {
                partial: sum,
                terms: k,
                digits_lost: (max_term / s).log10().max(0.0),
            });
        }
    }

    let s = sum.norm();
    let rounding = max_term * f64::EPSILON * (k as f64).sqrt();
    if rounding > tol * s {
        return Err(Error::SeriesNonConvergence {
            partial: sum,
            terms: k,
            digits_lost: (max_term / s).log10(),
        });
    }

    let prefactor = (-a * (1.0 - z).ln()).exp();
    Ok(prefactor * sum)
}
