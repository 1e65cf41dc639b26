//! Sweep implementations behind the CLI subcommands.
//!
//! Every command maps a parameter grid onto rows through a bounded rayon
//! pool; cells fail independently (the row keeps a status column and the
//! run exits with the numerical-failure code if anything went wrong), and
//! collection preserves grid order so outputs are deterministic.

use std::time::Instant;

use fermitherm_core::metrology::{
    self, fi_rate, noise_to_signal, noise_to_signal_markovian, optimal_measurement_time, Method,
};
use fermitherm_core::model::ModelParams;
use fermitherm_core::quad::QuadConfig;
use fermitherm_core::{multi_probe, single_probe};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::output::{write_metadata, write_table, Cell, Metadata, Table};

pub struct RunOutcome {
    pub failed_rows: usize,
    pub checks_failed: usize,
}

type RowResult = (Vec<Cell>, Option<String>);

fn status_ok() -> Cell {
    Cell::Text("ok".into())
}

fn status_err(e: &str) -> Cell {
    Cell::Text(format!("error: {e}"))
}

fn run_rows<I, F>(jobs: usize, items: Vec<I>, f: F) -> Vec<Result<RowResult, (Vec<Cell>, String)>>
where
    I: Send + Sync,
    F: Fn(&I) -> Result<RowResult, (Vec<Cell>, String)> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Assembles rows + status column into the table, collecting flags.
fn collect(
    table: &mut Table,
    flags: &mut Vec<String>,
    rows: Vec<Result<RowResult, (Vec<Cell>, String)>>,
) -> usize {
    let mut failed = 0;
    for row in rows {
        match row {
            Ok((mut cells, flag)) => {
                cells.push(status_ok());
                table.push(cells);
                if let Some(f) = flag {
                    flags.push(f);
                }
            }
            Err((mut cells, msg)) => {
                failed += 1;
                cells.push(status_err(&msg));
                table.push(cells);
            }
        }
    }
    failed
}

fn gammas_of(config: &RunConfig) -> Vec<f64> {
    config
        .gamma_grid
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![config.gamma])
}

fn require_grid<'a>(
    grid: &'a Option<crate::config::GridSpec>,
    what: &str,
) -> Result<&'a crate::config::GridSpec, ConfigError> {
    grid.as_ref()
        .ok_or_else(|| ConfigError(format!("this command requires {what}")))
}

pub fn execute(config: &RunConfig) -> Result<RunOutcome, ConfigError> {
    let start = Instant::now();
    let quad = config.quad();
    let mut flags: Vec<String> = Vec::new();

    let (table, failed, checks_failed) = match config.command.as_str() {
        "equilibrium-sweep" => {
            let tgrid = require_grid(&config.temperature_grid, "--T-grid")?;
            let gammas = gammas_of(config);
            let mut cells_in = Vec::new();
            for &gamma in &gammas {
                for t in tgrid.values() {
                    cells_in.push((t, gamma));
                }
            }
            let mut table = Table::new(vec![
                "T",
                "gamma",
                "p1_steady",
                "noise_to_signal",
                "markovian_noise_to_signal",
                "status",
            ]);
            let rows = run_rows(config.jobs, cells_in, |&(temperature, gamma)| {
                let head = vec![Cell::Num(temperature), Cell::Num(gamma)];
                let fill = |e: String| (pad(head.clone(), 3), e);
                let params = config
                    .single_params_at(gamma, temperature)
                    .map_err(|e| fill(e.to_string()))?;
                let p = single_probe::p1_steady(&params, &quad).map_err(|e| fill(e.to_string()))?;
                let nsr = noise_to_signal(&params, &quad).map_err(|e| fill(e.to_string()))?;
                let nsr_mk = noise_to_signal_markovian(&params).map_err(|e| fill(e.to_string()))?;
                let mut cells = head;
                cells.extend([Cell::Num(p), Cell::Num(nsr), Cell::Num(nsr_mk)]);
                Ok((cells, None))
            });
            let failed = collect(&mut table, &mut flags, rows);
            (table, failed, 0)
        }
        "transient-fi" => {
            let tgrid = require_grid(&config.t_grid, "--t-grid")?;
            let gammas = gammas_of(config);
            let mut cells_in = Vec::new();
            for &gamma in &gammas {
                for t in tgrid.values() {
                    cells_in.push((t, gamma));
                }
            }
            let mut table = Table::new(vec![
                "t",
                "gamma",
                "p1",
                "dp1_dT",
                "fi_exact",
                "fi_markovian",
                "status",
            ]);
            let rows = run_rows(config.jobs, cells_in, |&(t, gamma)| {
                let head = vec![Cell::Num(t), Cell::Num(gamma)];
                let fill = |e: String| (pad(head.clone(), 4), e);
                let params = config
                    .single_params_at(gamma, config.temperature)
                    .map_err(|e| fill(e.to_string()))?;
                let p =
                    single_probe::p1_exact(t, &params, &quad).map_err(|e| fill(e.to_string()))?;
                let d = single_probe::p1_exact_dt(t, &params, &quad)
                    .map_err(|e| fill(e.to_string()))?;
                let fi = metrology::fi_two_outcome(p, d).map_err(|e| fill(e.to_string()))?;
                let fi_mk =
                    metrology::fi_markovian_at(t, &params).map_err(|e| fill(e.to_string()))?;
                let mut cells = head;
                cells.extend([Cell::Num(p), Cell::Num(d), Cell::Num(fi), Cell::Num(fi_mk)]);
                Ok((cells, None))
            });
            let failed = collect(&mut table, &mut flags, rows);
            (table, failed, 0)
        }
        "fi-rate" => {
            let tgrid = require_grid(&config.t_grid, "--t-grid")?;
            let gammas = gammas_of(config);
            let mut cells_in = Vec::new();
            for &gamma in &gammas {
                for t in tgrid.values() {
                    cells_in.push((t, gamma));
                }
            }
            let mut table = Table::new(vec![
                "t",
                "gamma",
                "gamma_t",
                "rate_exact",
                "rate_markovian",
                "status",
            ]);
            let rows = run_rows(config.jobs, cells_in, |&(t, gamma)| {
                let head = vec![Cell::Num(t), Cell::Num(gamma), Cell::Num(gamma * t)];
                let fill = |e: String| (pad(head.clone(), 2), e);
                let params = config
                    .single_params_at(gamma, config.temperature)
                    .map_err(|e| fill(e.to_string()))?;
                let fi =
                    metrology::fi_exact_at(t, &params, &quad).map_err(|e| fill(e.to_string()))?;
                let fi_mk =
                    metrology::fi_markovian_at(t, &params).map_err(|e| fill(e.to_string()))?;
                let mut cells = head;
                cells.extend([Cell::Num(fi_rate(t, fi)), Cell::Num(fi_rate(t, fi_mk))]);
                Ok((cells, None))
            });
            let failed = collect(&mut table, &mut flags, rows);
            // record the located optimum per coupling in the metadata
            for &gamma in &gammas {
                if let Ok(params) = config.single_params_at(gamma, config.temperature) {
                    if let Ok(opt) = optimal_measurement_time(&params, &quad, Method::Exact) {
                        flags.push(format!(
                            "gamma={gamma}: exact rate optimum t*={} (Gamma t*={}){}",
                            opt.argmax,
                            gamma * opt.argmax,
                            if opt.boundary { " [boundary]" } else { "" }
                        ));
                    }
                }
            }
            (table, failed, 0)
        }
        "tstar-contour" => {
            let ggrid = require_grid(&config.gamma_grid, "--gamma-grid")?;
            let tgrid = require_grid(&config.temperature_grid, "--T-grid")?;
            let mut cells_in = Vec::new();
            for &gamma in &ggrid.values() {
                for temperature in tgrid.values() {
                    cells_in.push((gamma, temperature));
                }
            }
            let mut table = Table::new(vec![
                "gamma",
                "T",
                "t_star",
                "gamma_t_star",
                "boundary_flag",
                "status",
            ]);
            let rows = run_rows(config.jobs, cells_in, |&(gamma, temperature)| {
                let head = vec![Cell::Num(gamma), Cell::Num(temperature)];
                let fill = |e: String| (pad(head.clone(), 3), e);
                let params = config
                    .single_params_at(gamma, temperature)
                    .map_err(|e| fill(e.to_string()))?;
                let opt = optimal_measurement_time(&params, &quad, Method::Exact)
                    .map_err(|e| fill(e.to_string()))?;
                let mut cells = head;
                cells.extend([
                    Cell::Num(opt.argmax),
                    Cell::Num(gamma * opt.argmax),
                    Cell::Flag(opt.boundary),
                ]);
                let flag = opt
                    .boundary
                    .then(|| format!("boundary optimum at gamma={gamma}, T={temperature}"));
                Ok((cells, flag))
            });
            let failed = collect(&mut table, &mut flags, rows);
            (table, failed, 0)
        }
        "gamma-opt" => {
            let ggrid = require_grid(&config.gamma_grid, "--gamma-grid")?;
            let mut table = Table::new(vec![
                "gamma",
                "fi_steady",
                "max_fi_rate",
                "t_star",
                "boundary_flag",
                "status",
            ]);
            let rows = run_rows(config.jobs, ggrid.values(), |&gamma| {
                let head = vec![Cell::Num(gamma)];
                let fill = |e: String| (pad(head.clone(), 4), e);
                let params = config
                    .single_params_at(gamma, config.temperature)
                    .map_err(|e| fill(e.to_string()))?;
                let fi = metrology::fi_steady(&params, &quad).map_err(|e| fill(e.to_string()))?;
                let opt = optimal_measurement_time(&params, &quad, Method::Exact)
                    .map_err(|e| fill(e.to_string()))?;
                let mut cells = head;
                cells.extend([
                    Cell::Num(fi),
                    Cell::Num(opt.max),
                    Cell::Num(opt.argmax),
                    Cell::Flag(opt.boundary),
                ]);
                let flag = opt
                    .boundary
                    .then(|| format!("boundary rate optimum at gamma={gamma}"));
                Ok((cells, flag))
            });
            let failed = collect(&mut table, &mut flags, rows);
            (table, failed, 0)
        }
        "multi-additivity" => {
            let mut table = Table::new(vec![
                "axis",
                "gamma",
                "gamma_t",
                "qfi_common",
                "qfi_independent",
                "ratio",
                "status",
            ]);
            let rows = if config.steady {
                let ggrid = require_grid(&config.gamma_grid, "--gamma-grid (with --steady)")?;
                run_rows(config.jobs, ggrid.values(), |&gamma| {
                    let head = vec![Cell::Num(gamma), Cell::Num(gamma), Cell::Num(f64::INFINITY)];
                    let fill = |e: String| (pad(head.clone(), 3), e);
                    let params = config
                        .pair_params_at(gamma, config.temperature)
                        .map_err(|e| fill(e.to_string()))?;
                    let cmp = multi_probe::qfi_additivity_steady(&params, &quad)
                        .map_err(|e| fill(e.to_string()))?;
                    let mut cells = head;
                    cells.extend([
                        Cell::Num(cmp.qfi_common),
                        Cell::Num(cmp.qfi_independent),
                        Cell::Num(cmp.ratio),
                    ]);
                    Ok((cells, None))
                })
            } else {
                let tgrid = require_grid(&config.t_grid, "--t-grid")?;
                run_rows(config.jobs, tgrid.values(), |&t| {
                    let gamma = config.gamma;
                    let head = vec![Cell::Num(t), Cell::Num(gamma), Cell::Num(gamma * t)];
                    let fill = |e: String| (pad(head.clone(), 3), e);
                    let params = config.pair_params().map_err(|e| fill(e.to_string()))?;
                    let cmp = multi_probe::qfi_common_vs_independent(t, &params, &quad)
                        .map_err(|e| fill(e.to_string()))?;
                    let mut cells = head;
                    cells.extend([
                        Cell::Num(cmp.qfi_common),
                        Cell::Num(cmp.qfi_independent),
                        Cell::Num(cmp.ratio),
                    ]);
                    Ok((cells, None))
                })
            };
            if let Ok(p) = config.pair_params() {
                flags.push(format!(
                    "gap convention: eps = {:?}, mu = {} (common-bath QFI is sensitive to eps_1 - mu)",
                    p.epsilons(),
                    p.mu()
                ));
            }
            let failed = collect(&mut table, &mut flags, rows);
            (table, failed, 0)
        }
        "verify" => {
            let (table, n_failed) = run_verify(config, &quad);
            (table, 0, n_failed)
        }
        other => return Err(ConfigError(format!("unknown command '{other}'"))),
    };

    if !flags.is_empty() {
        for f in &flags {
            eprintln!("note: {f}");
        }
    }

    if let Some(out) = &config.out {
        write_table(out, config.format, config, &table)
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", out.display())))?;
        let meta = Metadata {
            command: config.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            columns: table.columns.iter().map(|c| c.to_string()).collect(),
            rows: table.rows.len(),
            failed_rows: failed,
            wall_time_s: start.elapsed().as_secs_f64(),
            flags,
        };
        write_metadata(out, &meta)
            .map_err(|e| ConfigError(format!("cannot write metadata: {e}")))?;
    } else if config.command != "verify" {
        return Err(ConfigError("--out is required for sweep commands".into()));
    }

    Ok(RunOutcome {
        failed_rows: failed,
        checks_failed,
    })
}

fn pad(mut cells: Vec<Cell>, missing: usize) -> Vec<Cell> {
    for _ in 0..missing {
        cells.push(Cell::Num(f64::NAN));
    }
    cells
}

/// Composition of module invariants run as a self-check battery.
fn run_verify(config: &RunConfig, quad: &QuadConfig) -> (Table, usize) {
    let mut table = Table::new(vec!["check", "passed", "detail"]);
    let mut failed = 0;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{}: {name} - {detail}", if pass { "PASS" } else { "FAIL" });
        table.rows.push(vec![
            Cell::Text(name.into()),
            Cell::Flag(pass),
            Cell::Text(detail),
        ]);
        if !pass {
            failed += 1;
        }
    };

    // fluctuation-dissipation identity on a frequency grid
    let params = config
        .single_params()
        .unwrap_or_else(|_| ModelParams::single(1.0, 0.0, 0.5, 1.0, 0.0).expect("default params"));
    let mut worst = 0.0f64;
    for k in 0..100 {
        let omega = params.mu() - 6.0 + 12.0 * k as f64 / 99.0;
        let (lhs, rhs) = single_probe::fdr_check(omega, &params);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1e-300));
    }
    check(
        "fluctuation-dissipation",
        worst <= 1e-12,
        format!("max relative mismatch {worst:.2e} over 100 frequencies"),
    );

    // multi-probe n=1 reduction against the single-probe integral
    let mut worst = 0.0f64;
    let mut reduction_ok = true;
    for &(gamma, temperature, t) in &[(0.8, 0.3, 2.0), (0.2, 1.0, 5.0), (1.5, 0.1, 1.0)] {
        let p = ModelParams::single(
            params.epsilon().unwrap_or(1.0),
            params.mu(),
            gamma,
            temperature,
            0.0,
        )
        .expect("params");
        match (
            multi_probe::evolve_correlations(t, &p, quad),
            single_probe::p1_exact(t, &p, quad),
        ) {
            (Ok(corr), Ok(direct)) => worst = worst.max((corr.c[(0, 0)].re - direct).abs()),
            _ => reduction_ok = false,
        }
    }
    check(
        "n=1 reduction",
        reduction_ok && worst < 1e-8,
        format!("max |C_11 - p1_exact| = {worst:.2e} over 3 triples"),
    );

    // analytic temperature derivative against centered finite differences
    let mut worst = 0.0f64;
    let mut fd_ok = true;
    for &(gamma, temperature, t) in &[(0.8, 0.4, 2.0), (0.3, 1.0, 6.0)] {
        let mk = |temp: f64| {
            ModelParams::single(
                params.epsilon().unwrap_or(1.0),
                params.mu(),
                gamma,
                temp,
                0.0,
            )
            .expect("params")
        };
        let h = 1e-4 * temperature;
        let an = single_probe::p1_exact_dt(t, &mk(temperature), quad);
        let hi = single_probe::p1_exact(t, &mk(temperature + h), quad);
        let lo = single_probe::p1_exact(t, &mk(temperature - h), quad);
        match (an, hi, lo) {
            (Ok(an), Ok(hi), Ok(lo)) => {
                let fd = (hi - lo) / (2.0 * h);
                worst = worst.max(((an - fd) / an.abs().max(1e-12)).abs());
            }
            _ => fd_ok = false,
        }
    }
    check(
        "temperature-derivative cross-check",
        fd_ok && worst < 1e-4,
        format!("max relative deviation {worst:.2e}"),
    );

    // steady state consistency with the long-time limit
    let p = ModelParams::single(params.epsilon().unwrap_or(1.0), params.mu(), 1.0, 0.2, 0.0)
        .expect("params");
    let late = single_probe::p1_exact(50.0, &p, quad);
    let steady = single_probe::p1_steady(&p, quad);
    let (pass, detail) = match (late, steady) {
        (Ok(l), Ok(s)) => (
            (l - s).abs() < 1e-4,
            format!("|p1(50/G) - p_steady| = {:.2e}", (l - s).abs()),
        ),
        _ => (false, "evaluation failed".into()),
    };
    check("steady-state consistency", pass, detail);

    // weak-coupling Markovian agreement
    let mut worst = 0.0f64;
    let mut mk_ok = true;
    let p = ModelParams::single(params.epsilon().unwrap_or(1.0), params.mu(), 0.01, 1.0, 0.0)
        .expect("params");
    for &t in &[30.0, 100.0, 300.0] {
        let loose = QuadConfig {
            abs_tol: 1e-9,
            ..quad.clone()
        };
        match (
            single_probe::p1_exact(t, &p, &loose),
            single_probe::p1_markovian(t, &p),
        ) {
            (Ok(ex), Ok(mkv)) => worst = worst.max((ex - mkv).abs()),
            _ => mk_ok = false,
        }
    }
    check(
        "weak-coupling Markovian agreement",
        mk_ok && worst < 0.02,
        format!("max |exact - Markovian| = {worst:.2e}"),
    );

    (table, failed)
}
