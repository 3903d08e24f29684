//! First-order Marcum Q function.

use super::gamma::{gamma_q, ln_factorial};
use crate::error::{Error, Result};

/// Q₁(a, b) = P(Rician(a, 1) > b).
///
/// Evaluated as the Poisson mixture Σ_k Pois(k; a²/2)·P(Pois(b²/2) ≤ k),
/// summed outward from the mode of the first Poisson law in log space so
/// large arguments neither overflow nor need all terms from k = 0.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::Domain {
            function: "marcum_q1",
            detail: format!("a = {a}, b = {b}, need finite nonnegative"),
        });
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    let mu_b = 0.5 * b * b;
    if a == 0.0 {
        return Ok((-mu_b).exp());
    }
    let mu_a = 0.5 * a * a;

    let k0 = mu_a.floor() as u64;
    let ln_pois = |k: u64, mu: f64| -mu + k as f64 * mu.ln() - ln_factorial(k);

    let w0 = ln_pois(k0, mu_a).exp();
    let pb0 = ln_pois(k0, mu_b).exp();
    let c0 = gamma_q(k0 as f64 + 1.0, mu_b);
    let mut sum = w0 * c0;

    // upward from the mode
    let (mut w, mut c, mut pb) = (w0, c0, pb0);
    let mut k = k0;
    loop {
        let kn = k + 1;
        w *= mu_a / kn as f64;
        pb = if pb > 0.0 {
            pb * mu_b / kn as f64
        } else {
            ln_pois(kn, mu_b).exp()
        };
        c = (c + pb).min(1.0);
        sum += w * c;
        k = kn;
        let ratio = mu_a / (k + 1) as f64;
        if ratio < 1.0 && w / (1.0 - ratio) < 1e-17 * sum.max(1e-300) {
            break;
        }
        if w == 0.0 {
            break;
        }
    }

    // downward from the mode
    let (mut w, mut c, mut pb) = (w0, c0, pb0);
    let mut k = k0;
    while k > 0 {
        w *= k as f64 / mu_a;
        c = (c - pb).max(0.0);
        pb = if pb > 0.0 {
            pb * k as f64 / mu_b
        } else {
            ln_pois(k - 1, mu_b).exp()
        };
        k -= 1;
        let term = w * c;
        sum += term;
        // both w and c decrease from here on
        if w * (k as f64 + 1.0) < 1e-17 * sum.max(1e-300) || term == 0.0 && c == 0.0 {
            break;
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::bessel_i0_scaled;

    fn rician_pdf_unit(x: f64, a: f64) -> f64 {
        x * (-(x - a) * (x - a) / 2.0).exp() * bessel_i0_scaled(x * a)
    }

    // oracle: composite Simpson on the Rician density
    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn boundary_cases() {
        for &b in &[0.1, 1.0, 2.5, 7.0] {
            let q = marcum_q1(0.0, b).unwrap();
            assert!((q - (-b * b / 2.0f64).exp()).abs() < 1e-15);
        }
        for &a in &[0.0, 0.3, 4.0, 40.0] {
            assert_eq!(marcum_q1(a, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn reference_value() {
        let oracle = simpson(|x| rician_pdf_unit(x, 1.0), 2.0, 14.0, 20_000);
        let q = marcum_q1(1.0, 2.0).unwrap();
        assert!((q - oracle).abs() < 1e-10);
        assert!((q - 0.269_012_060_035_91).abs() < 1e-10);
    }

    #[test]
    fn complements_rician_cdf_on_grid() {
        for i in 0..=10 {
            for j in 1..=10 {
                let a = 0.5 * i as f64;
                let b = 0.5 * j as f64;
                let cdf = simpson(|x| rician_pdf_unit(x, a), 0.0, b, 4000);
                let q = marcum_q1(a, b).unwrap();
                assert!((q + cdf - 1.0).abs() < 1e-8, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn large_arguments() {
        // Rician(a,1) is ~ N(a, 1) for large a; Q₁(a, a) -> 1/2 + O(1/a)
        let q = marcum_q1(400.0, 400.0).unwrap();
        assert!((q - 0.5).abs() < 0.01, "{q}");
        let oracle = simpson(|x| rician_pdf_unit(x, 60.0), 58.0, 80.0, 20_000);
        assert!((marcum_q1(60.0, 58.0).unwrap() - oracle).abs() < 1e-9);
        assert!(marcum_q1(3.0, 40.0).unwrap() < 1e-100);
        assert!((marcum_q1(40.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monotone() {
        let mut prev = 1.0;
        for j in 0..50 {
            let q = marcum_q1(2.0, 0.2 * j as f64).unwrap();
            assert!(q <= prev + 1e-15);
            prev = q;
        }
        let mut prev = 0.0;
        for i in 0..50 {
            let q = marcum_q1(0.2 * i as f64, 3.0).unwrap();
            assert!(q >= prev - 1e-15);
            prev = q;
        }
    }
}
