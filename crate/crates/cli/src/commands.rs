use std::io::Write;

use anyhow::{bail, Result};

use nmwitness::suites::{run_suite, CheckHooks, Suite};
use nmwitness::witness::{axis_angle, state_pair_search, time_scan, ScanResult, WitnessOptions};

use crate::config::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_SLACK_VIOLATION: u8 = 2;

pub const CSV_HEADER: &str = "t,D,N_fd,N_analytic,M,C,slack,degenerate";

/// Twelve significant digits; negative zero prints as zero.
pub fn format_value(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn scan_csv(scan: &ScanResult) -> String {
    let mut out = String::with_capacity(128 * (scan.reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &scan.reports {
        let n_an = r.n_analytic.map_or_else(|| "NA".to_string(), format_value);
        let row = [
            format_value(r.t),
            format_value(r.d),
            format_value(r.n_fd),
            n_an,
            format_value(r.m_analytic),
            format_value(r.c),
            format_value(r.slack),
            r.degenerate.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Runs the time scan, writes the CSV to the configured output (or `csv_out`
/// when none is set) and a summary to `log`.
pub fn cmd_scan(cfg: &RunConfig, csv_out: &mut dyn Write, log: &mut dyn Write) -> Result<u8> {
    let model = cfg.build_model()?;
    let (p1, p2) = cfg.preparations(model.d_s)?;
    let opts = cfg.options();
    let scan = time_scan(&model, &p1, &p2, &cfg.grid(), &opts)?;
    let csv = scan_csv(&scan);
    match &cfg.output {
        Some(path) => std::fs::write(path, &csv)?,
        None => csv_out.write_all(csv.as_bytes())?,
    }

    let violations = scan.reports.iter().filter(|r| !r.slack_holds(opts.slack_tol)).count();
    writeln!(log, "model: {}  points: {}", model.name, scan.reports.len())?;
    writeln!(log, "max N_fd: {} at t = {}", format_value(scan.max_n), format_value(scan.argmax_t))?;
    writeln!(log, "non-Markovian detected: {}", scan.detected_nonmarkovian)?;
    writeln!(log, "correlations detected: {}", scan.detected_correlations)?;
    writeln!(log, "grid sum of max(N_fd, 0): {}", format_value(scan.blp_grid_sum))?;
    if violations > 0 {
        writeln!(log, "slack violations: {violations} (tolerance {})", opts.slack_tol)?;
        return Ok(EXIT_SLACK_VIOLATION);
    }
    Ok(EXIT_OK)
}

/// Runs one suite or all of them and prints a table; exit 0 iff every
/// instance passes.
pub fn cmd_check(
    suite: &str,
    n: usize,
    seed: u64,
    opts: &WitnessOptions,
    hooks: CheckHooks,
    out: &mut dyn Write,
) -> Result<u8> {
    let suites = Suite::parse_selection(suite)?;
    writeln!(out, "{:<14} {:>9} {:>20}  status", "suite", "passed", "worst margin")?;
    let mut all_pass = true;
    for s in suites {
        let outcome = run_suite(s, n, seed, opts, hooks)?;
        all_pass &= outcome.all_passed();
        let margin = outcome.worst_margin.map_or_else(|| "-".to_string(), format_value);
        let status = if outcome.all_passed() { "pass" } else { "FAIL" };
        let counts = format!("{}/{}", outcome.passed, outcome.total);
        writeln!(out, "{:<14} {:>9} {:>20}  {status}", s.name(), counts, margin)?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_ERROR })
}

fn describe(params: &[f64]) -> String {
    match axis_angle(params) {
        Some((axis, angle)) => format!(
            "axis = [{}, {}, {}], angle = {}",
            format_value(axis[0]),
            format_value(axis[1]),
            format_value(axis[2]),
            format_value(angle)
        ),
        None => {
            let p: Vec<String> = params.iter().map(|&x| format_value(x)).collect();
            format!("generator coefficients = [{}]", p.join(", "))
        }
    }
}

/// Searches unitary preparation pairs at the configured time.
pub fn cmd_search(cfg: &RunConfig, budget: usize, out: &mut dyn Write) -> Result<u8> {
    if budget == 0 {
        bail!("search budget must be at least 1");
    }
    let model = cfg.build_model()?;
    let r = state_pair_search(&model, cfg.search.t, budget, cfg.seed, &cfg.options())?;
    writeln!(out, "t: {}", format_value(r.t))?;
    writeln!(out, "evaluations: {}", r.evaluations)?;
    writeln!(out, "best N_fd: {}", format_value(r.best_n))?;
    writeln!(out, "C at best pair: {}", format_value(r.c_at_best))?;
    writeln!(out, "P1: {}", describe(&r.params1))?;
    writeln!(out, "P2: {}", describe(&r.params2))?;
    Ok(EXIT_OK)
}
