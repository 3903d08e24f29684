//! CSV tables written by the subcommands.

use std::io::Write;

use hetnet_meta::MetaCurve;

pub const CURVE_HEADER: [&str; 5] = ["beta_db", "theta", "value", "method", "est_error"];
pub const MOMENT_HEADER: [&str; 4] = ["beta_db", "order", "value", "est_error"];
pub const BETA_HEADER: [&str; 5] = ["beta_db", "theta1", "theta2", "m1", "m2"];
pub const COMPARE_HEADER: [&str; 8] = [
    "beta_db",
    "order",
    "analytic",
    "simulated",
    "abs_diff",
    "std_error",
    "est_error",
    "verdict",
];

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Thresholds in dB: shortest exact decimal.
pub fn fmt_db(x: f64) -> String {
    format!("{x}")
}

/// Probabilities, θ and moments: six decimals.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.6}")
}

/// Error estimates: six significant digits in scientific notation.
pub fn fmt_error(x: f64) -> String {
    format!("{x:.5e}")
}

/// One table: header plus rows, kept as strings so sorting is by the
/// numeric keys captured alongside.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<(Vec<f64>, Vec<String>)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Adds a row; `key` orders the output.
    pub fn push(&mut self, key: Vec<f64>, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push((key, row));
    }

    pub fn write<W: Write>(&mut self, out: W) -> csv::Result<()> {
        self.rows.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for (_, row) in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn push_curve(table: &mut Table, beta_db: f64, curve: &MetaCurve) {
    for (&t, &v) in curve.thetas.iter().zip(&curve.values) {
        table.push(
            vec![beta_db, t],
            vec![
                fmt_db(beta_db),
                fmt_value(t),
                fmt_value(v),
                curve.method.tag().to_string(),
                fmt_error(curve.est_error),
            ],
        );
    }
}
