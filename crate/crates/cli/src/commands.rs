use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use hetnet_meta::engine::{
    beta_approx_with_error, moments, BetaApproxParams, CurveMethod, MetaCurve,
};
use hetnet_meta::simulator::{default_window, run_monte_carlo, SimConfig};
use hetnet_meta::{meta_ccdf_gil_pelaez, MomentOrder, NetworkModel};
use rayon::prelude::*;

use crate::output::{
    db_to_linear, fmt_db, fmt_error, fmt_value, push_curve, Table, BETA_HEADER, COMPARE_HEADER,
    CURVE_HEADER, MOMENT_HEADER,
};
use crate::scenario::{Scenario, ScenarioFile};
use crate::{BetaArgs, Cli, CliError, Command, Method, SimArgs};

const DEFAULT_REALIZATIONS: usize = 100_000;
const DEFAULT_SEED: u64 = 1;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(Command::Meta {
        self_test_uniform: true,
        betas,
        grid,
        ..
    }) = &cli.command
    {
        return uniform_self_test(cli, betas, &parse_theta_grid(&grid.theta_grid)?);
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let file = ScenarioFile::load(path)?;
    let scenario = file.resolve()?;
    if cli.dump_config {
        let canonical = ScenarioFile::from_parts(
            &scenario.model,
            file.quadrature.clone(),
            file.simulation.clone(),
        );
        return emit_text(cli.out.as_deref(), &canonical.to_toml());
    }
    match &cli.command {
        None => Err(CliError::Config(
            "no subcommand given (moments, meta, simulate, compare)".into(),
        )),
        Some(Command::Moments { betas, orders }) => cmd_moments(cli, &scenario, betas, orders),
        Some(Command::Meta {
            betas,
            grid,
            method,
            ..
        }) => cmd_meta(
            cli,
            &scenario,
            betas,
            &parse_theta_grid(&grid.theta_grid)?,
            *method,
        ),
        Some(Command::Simulate { betas, grid, sim }) => cmd_simulate(
            cli,
            &scenario,
            betas,
            &parse_theta_grid(&grid.theta_grid)?,
            sim,
        ),
        Some(Command::Compare {
            betas,
            sim,
            sim_alpha,
        }) => cmd_compare(cli, &scenario, betas, sim, *sim_alpha),
    }
}

/// `N` gives θ = k/N for k = 1..=N; anything else is a comma-separated list.
pub fn parse_theta_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Config(format!(
            "--theta-grid: expected N or a list of values in (0, 1], got {spec:?}"
        ))
    };
    let spec = spec.trim();
    if !spec.contains(',') && !spec.contains('.') {
        if let Ok(n) = spec.parse::<usize>() {
            if n == 0 {
                return Err(bad());
            }
            return Ok((1..=n).map(|k| k as f64 / n as f64).collect());
        }
    }
    let grid: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(bad());
    }
    Ok(grid)
}

fn check_betas(b: &BetaArgs) -> Result<(), CliError> {
    if b.beta_db.is_empty() || b.beta_db.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config(
            "--beta-db: expected finite dB values".into(),
        ));
    }
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut w = open(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Writes the main table to `--out` (or stdout) and the secondary table to
/// `<out><suffix>`; on stdout the two are separated by a blank line.
fn emit_tables(
    out: Option<&Path>,
    main: &mut Table,
    second: Option<(&mut Table, &str)>,
) -> Result<(), CliError> {
    match out {
        Some(p) => {
            main.write(File::create(p)?)?;
            if let Some((t, suffix)) = second {
                t.write(File::create(sibling(p, suffix))?)?;
            }
        }
        None => {
            let mut w = io::stdout().lock();
            main.write(&mut w)?;
            if let Some((t, _)) = second {
                writeln!(w)?;
                t.write(&mut w)?;
            }
        }
    }
    Ok(())
}

fn cmd_moments(cli: &Cli, s: &Scenario, betas: &BetaArgs, orders: &[f64]) -> Result<(), CliError> {
    check_betas(betas)?;
    if orders.is_empty() || orders.iter().any(|b| !b.is_finite()) {
        return Err(CliError::Config(
            "--orders: expected finite real orders".into(),
        ));
    }
    let lin: Vec<f64> = betas.beta_db.iter().map(|&d| db_to_linear(d)).collect();
    let ords: Vec<MomentOrder> = orders.iter().map(|&b| MomentOrder::real(b)).collect();
    let results = moments(&lin, &ords, &s.model, &s.quadrature);
    let mut table = Table::new(&MOMENT_HEADER);
    for (k, r) in results.into_iter().enumerate() {
        let r = r?;
        let db = betas.beta_db[k / orders.len()];
        let b = orders[k % orders.len()];
        table.push(
            vec![db, b],
            vec![
                fmt_db(db),
                format!("{b}"),
                fmt_value(r.value.re),
                fmt_error(r.est_error),
            ],
        );
    }
    emit_tables(cli.out.as_deref(), &mut table, None)
}

fn push_beta_row(t: &mut Table, db: f64, p: &BetaApproxParams) {
    t.push(
        vec![db],
        vec![
            fmt_db(db),
            fmt_value(p.theta1),
            fmt_value(p.theta2),
            fmt_value(p.m1),
            fmt_value(p.m2),
        ],
    );
}

fn uniform_self_test(cli: &Cli, betas: &BetaArgs, grid: &[f64]) -> Result<(), CliError> {
    check_betas(betas)?;
    let p = BetaApproxParams::from_shape(1.0, 1.0);
    let mut curves = Table::new(&CURVE_HEADER);
    let mut side = Table::new(&BETA_HEADER);
    for &db in &betas.beta_db {
        let curve = MetaCurve {
            beta: db_to_linear(db),
            thetas: grid.to_vec(),
            values: grid.iter().map(|&t| p.ccdf(t)).collect(),
            method: CurveMethod::BetaApprox,
            est_error: 0.0,
        };
        push_curve(&mut curves, db, &curve);
        push_beta_row(&mut side, db, &p);
    }
    emit_tables(
        cli.out.as_deref(),
        &mut curves,
        Some((&mut side, ".beta.csv")),
    )
}

fn cmd_meta(
    cli: &Cli,
    s: &Scenario,
    betas: &BetaArgs,
    grid: &[f64],
    method: Method,
) -> Result<(), CliError> {
    check_betas(betas)?;
    let mut curves = Table::new(&CURVE_HEADER);
    match method {
        Method::Beta => {
            let fits: Vec<_> = betas
                .beta_db
                .par_iter()
                .map(|&db| beta_approx_with_error(db_to_linear(db), &s.model, &s.quadrature))
                .collect();
            let mut side = Table::new(&BETA_HEADER);
            for (&db, fit) in betas.beta_db.iter().zip(fits) {
                let (p, err) = fit?;
                let curve = MetaCurve {
                    beta: db_to_linear(db),
                    thetas: grid.to_vec(),
                    values: grid.iter().map(|&t| p.ccdf(t)).collect(),
                    method: CurveMethod::BetaApprox,
                    est_error: err,
                };
                push_curve(&mut curves, db, &curve);
                push_beta_row(&mut side, db, &p);
            }
            emit_tables(
                cli.out.as_deref(),
                &mut curves,
                Some((&mut side, ".beta.csv")),
            )
        }
        Method::GilPelaez => {
            for &db in &betas.beta_db {
                let c = meta_ccdf_gil_pelaez(db_to_linear(db), grid, &s.model, &s.quadrature)?;
                push_curve(&mut curves, db, &c);
            }
            emit_tables(cli.out.as_deref(), &mut curves, None)
        }
    }
}

fn sim_config(
    s: &Scenario,
    model: &NetworkModel,
    args: &SimArgs,
    betas: &[f64],
    grid: &[f64],
) -> SimConfig {
    SimConfig {
        window_radius: args
            .window_km
            .or(s.simulation.window_km)
            .unwrap_or_else(|| default_window(model)),
        n_realizations: args
            .realizations
            .or(s.simulation.realizations)
            .unwrap_or(DEFAULT_REALIZATIONS),
        seed: args.seed.or(s.simulation.seed).unwrap_or(DEFAULT_SEED),
        beta_grid: betas.iter().map(|&d| db_to_linear(d)).collect(),
        theta_grid: grid.to_vec(),
    }
}

fn cmd_simulate(
    cli: &Cli,
    s: &Scenario,
    betas: &BetaArgs,
    grid: &[f64],
    args: &SimArgs,
) -> Result<(), CliError> {
    check_betas(betas)?;
    let cfg = sim_config(s, &s.model, args, &betas.beta_db, grid);
    eprintln!("seed: {}", cfg.seed);
    let emp = run_monte_carlo(&s.model, &cfg)?;
    if let Some(w) = &emp.warning {
        eprintln!("warning: {w}");
    }
    let mut curves = Table::new(&CURVE_HEADER);
    let mut mom = Table::new(&MOMENT_HEADER);
    for (&db, e) in betas.beta_db.iter().zip(&emp.per_beta) {
        push_curve(&mut curves, db, &e.curve);
        for (b, v, se) in [(1.0, e.m1, e.se_m1), (2.0, e.m2, e.se_m2)] {
            mom.push(
                vec![db, b],
                vec![fmt_db(db), format!("{b}"), fmt_value(v), fmt_error(se)],
            );
        }
    }
    emit_tables(
        cli.out.as_deref(),
        &mut curves,
        Some((&mut mom, ".moments.csv")),
    )
}

fn cmd_compare(
    cli: &Cli,
    s: &Scenario,
    betas: &BetaArgs,
    args: &SimArgs,
    sim_alpha: Option<f64>,
) -> Result<(), CliError> {
    check_betas(betas)?;
    let mut sim_model = s.model.clone();
    if let Some(a) = sim_alpha {
        sim_model.alpha = a;
        sim_model.ensure_valid()?;
    }
    let lin: Vec<f64> = betas.beta_db.iter().map(|&d| db_to_linear(d)).collect();
    let orders = [MomentOrder::real(1.0), MomentOrder::real(2.0)];
    let analytic = moments(&lin, &orders, &s.model, &s.quadrature);
    let cfg = sim_config(s, &sim_model, args, &betas.beta_db, &[0.5]);
    eprintln!("seed: {}", cfg.seed);
    let emp = run_monte_carlo(&sim_model, &cfg)?;
    if let Some(w) = &emp.warning {
        eprintln!("warning: {w}");
    }

    let mut table = Table::new(&COMPARE_HEADER);
    let mut failures = Vec::new();
    for (k, r) in analytic.into_iter().enumerate() {
        let r = r?;
        let j = k / 2;
        let db = betas.beta_db[j];
        let e = &emp.per_beta[j];
        let (b, sim, se) = if k % 2 == 0 {
            (1.0, e.m1, e.se_m1)
        } else {
            (2.0, e.m2, e.se_m2)
        };
        let diff = (r.value.re - sim).abs();
        let pass = diff <= 3.0 * se + r.est_error;
        if !pass {
            failures.push(format!("(beta_db = {db}, b = {b})"));
        }
        table.push(
            vec![db, b],
            vec![
                fmt_db(db),
                format!("{b}"),
                fmt_value(r.value.re),
                fmt_value(sim),
                fmt_error(diff),
                fmt_error(se),
                fmt_error(r.est_error),
                if pass { "PASS" } else { "FAIL" }.to_string(),
            ],
        );
    }
    emit_tables(cli.out.as_deref(), &mut table, None)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::CompareFailed(failures.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_grid_forms() {
        assert_eq!(parse_theta_grid("4").unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_theta_grid("0.1, 0.5,1").unwrap(), vec![0.1, 0.5, 1.0]);
        assert_eq!(parse_theta_grid("0.5").unwrap(), vec![0.5]);
        assert!(parse_theta_grid("0").is_err());
        assert!(parse_theta_grid("0.0,0.5").is_err());
        assert!(parse_theta_grid("1.5").is_err());
        assert!(parse_theta_grid("x").is_err());
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("/tmp/a.csv"), ".beta.csv"),
            PathBuf::from("/tmp/a.csv.beta.csv")
        );
    }
}
