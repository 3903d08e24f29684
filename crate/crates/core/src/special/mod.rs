//! Numerical kernels for the special functions used by the analytic engine.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod beta;
mod gamma;
mod hypergeometric;
mod marcum;

use num_complex::Complex64;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use beta::{ln_beta, regularized_incomplete_beta};
pub use gamma::{gamma_p, gamma_q, ln_gamma};
pub use hypergeometric::gauss_2f1_neg;
pub use marcum::marcum_q1;

/// Complex scalar used for moment orders b ∈ ℂ and complex-valued factors.
pub type ComplexScalar = Complex64;

/// e^w − 1 without cancellation for small |w|.
pub fn complex_expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    let re = w.re.exp_m1() * w.im.cos() - 2.0 * half * half;
    let im = w.re.exp() * w.im.sin();
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_small_and_large() {
        let w = Complex64::new(1e-12, -3e-13);
        let v = complex_expm1(w);
        assert!((v - w).norm() < 1e-24);
        let w = Complex64::new(0.7, 2.1);
        assert!((complex_expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }
}
