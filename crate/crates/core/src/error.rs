use num_complex::Complex64;
use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{function}: argument out of domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: result not representable at x = {arg}")]
    Range { function: &'static str, arg: f64 },

    #[error("hypergeometric series failed after {terms} terms (partial sum {partial}, lost {digits_lost:.1} digits)")]
    SeriesNonConvergence {
        partial: Complex64,
        terms: usize,
        digits_lost: f64,
    },

    #[error(
        "quadrature did not reach tolerance in {context}: estimate {estimate:e}, error {error:e}"
    )]
    Accuracy {
        context: String,
        estimate: f64,
        error: f64,
    },

    #[error("invalid network model: {}", format_violations(.0))]
    InvalidModel(Vec<Violation>),

    #[error("degenerate moments, no beta fit exists: M1 = {m1}, M2 = {m2}")]
    Degenerate { m1: f64, m2: f64 },

    #[error("Gil-Pelaez integral not converged at t_max: tail bound {tail_bound:e}")]
    GilPelaezTail { tail_bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("realization contains no base station")]
    EmptyRealization,
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
