//! Builders for every table the subcommands print or the report writes.

use anyhow::{bail, Result};
use serde_json::json;

use euler_core::classical::classical_problem;
use euler_core::comb::{comb_approx, comb_eigen, comb_problem, CombSpectrum, COMB_WINDOWS};
use euler_core::compare::{compare_rows, Family};
use euler_core::grid2::{grid2_approx, grid2_eigen, grid2_problem, GridSpectrum, GRID2_WINDOWS};
use euler_core::ode::{
    log_lambda_grid, scan_points, uniform_lambda_grid, ShootingProblem, DEFAULT_ROOT_TOL,
    LAMBDA_EXCLUSION,
};

use crate::output::{num, text, Table};

fn check_roots(roots: usize, max: usize) -> Result<()> {
    if roots == 0 || roots > max {
        bail!("--roots must be between 1 and {max}");
    }
    Ok(())
}

pub fn comb_spectrum(roots: usize, steps: usize) -> Result<CombSpectrum> {
    check_roots(roots, COMB_WINDOWS.len())?;
    let spec = comb_eigen(&COMB_WINDOWS[..roots], roots, steps)?;
    if !spec.is_complete() {
        bail!(
            "found {} of {roots} comb eigenvalues (empty windows {:?})",
            spec.pairs.len(),
            spec.empty_windows
        );
    }
    Ok(spec)
}

pub fn grid_spectrum(roots: usize, steps: usize) -> Result<GridSpectrum> {
    check_roots(roots, GRID2_WINDOWS.len())?;
    let spec = grid2_eigen(&GRID2_WINDOWS[..roots], roots, steps)?;
    if !spec.is_complete() {
        bail!(
            "found {} of {roots} grid2 eigenvalues (empty windows {:?})",
            spec.pairs.len(),
            spec.empty_windows
        );
    }
    Ok(spec)
}

fn ode_meta(t: Table, steps: usize) -> Table {
    t.meta("rk4_steps_per_unit", steps)
        .meta("root_tol", format!("{DEFAULT_ROOT_TOL:e}"))
}

pub fn comb_table(spec: &CombSpectrum, steps: usize) -> Table {
    let mut t = ode_meta(
        Table::new(
            "comb eigenpairs",
            &[
                "n",
                "lambda",
                "inner_1",
                "norm2",
                "c",
                "shooting_residual",
                "operator_residual",
            ],
        ),
        steps,
    )
    .meta("normalization", "f(0) = 1, weight 1 - x");
    for (i, p) in spec.pairs.iter().enumerate() {
        t.push(vec![
            json!(i + 1),
            num(p.lambda),
            num(p.inner_1),
            num(p.norm2),
            num(p.c),
            num(p.shooting_residual),
            num(p.operator_residual()),
        ]);
    }
    t
}

pub fn grid_table(spec: &GridSpectrum, steps: usize) -> Table {
    let mut t = ode_meta(
        Table::new(
            "grid2 eigenpairs",
            &[
                "n",
                "lambda",
                "inner_1",
                "norm2",
                "c",
                "raw_inner_1",
                "raw_norm2",
                "raw_c",
                "shooting_residual",
                "operator_residual",
            ],
        ),
        steps,
    )
    .meta("normalization", "inner_1, norm2, c for g/lambda with g(1/2) = 1/2; raw_* are the U products of g with g(1/2) = lambda/2; c = raw_c / 4");
    for (i, p) in spec.pairs.iter().enumerate() {
        t.push(vec![
            json!(i + 1),
            num(p.lambda),
            num(p.inner_1),
            num(p.norm2),
            num(p.c),
            num(p.raw_inner_1),
            num(p.raw_norm2),
            num(p.raw_c),
            num(p.shooting_residual),
            num(p.operator_residual()),
        ]);
    }
    t
}

pub fn series_table(
    name: &str,
    m_max: usize,
    approx: impl Fn(usize) -> euler_core::series::SciFloat,
) -> Table {
    let mut t = Table::new(name, &["m", "approx"]);
    for m in 1..=m_max {
        t.push(vec![json!(m), text(approx(m))]);
    }
    t
}

pub fn comb_series(spec: &CombSpectrum, m_max: usize) -> Table {
    series_table("comb series (2m)! sum c lambda^(m-1)", m_max, |m| {
        comb_approx(&spec.pairs, m)
    })
}

pub fn grid_series(spec: &GridSpectrum, m_max: usize) -> Table {
    series_table("grid2 series (2m)! sum c lambda^(m-1)", m_max, |m| {
        grid2_approx(&spec.pairs, m)
    })
}

/// Table plus whether every judged row is within its threshold.
pub fn compare_table(
    family: Family,
    m_max: usize,
    terms: usize,
    steps: usize,
) -> Result<(Table, bool)> {
    let rows = compare_rows(family, m_max, terms, steps)?;
    let mut t = Table::new(
        &format!("{family} exact vs spectral"),
        &["m", "exact", "approx", "rel_err", "threshold", "pass"],
    )
    .meta("family", family)
    .meta("terms", terms)
    .meta("rk4_steps_per_unit", steps)
    .meta(
        "thresholds",
        "m=1 unjudged; m=2-3 2e-3; m=4-7 1e-4; m>=8 1e-6",
    );
    let mut ok = true;
    for r in &rows {
        ok &= r.passes();
        t.push(vec![
            json!(r.m),
            text(&r.exact),
            text(r.approx),
            num(r.rel_err),
            r.threshold.map_or(serde_json::Value::Null, num),
            json!(r.passes()),
        ]);
    }
    Ok((t, ok))
}

pub fn problem(name: &str) -> Result<ShootingProblem> {
    Ok(match name {
        "comb" => comb_problem(),
        "grid2" => grid2_problem(),
        "classical" => classical_problem(),
        other => bail!("unknown problem `{other}`"),
    })
}

fn residual_column(name: &str) -> &'static str {
    if name == "grid2" {
        "hprime1"
    } else {
        "residual"
    }
}

/// Residual against `λ` on a uniform or log-spaced grid.
pub fn scan_table(name: &str, lambdas: &[f64], steps: usize, spacing: &str) -> Result<Table> {
    let prob = problem(name)?;
    let scan = scan_points(&prob, lambdas, prob.steps_for(steps))?;
    let mut t = Table::new(
        &format!("{name} shooting residual"),
        &["lambda", residual_column(name)],
    )
    .meta("rk4_steps_per_unit", steps)
    .meta("spacing", spacing)
    .meta("excluded", format!("|lambda| < {LAMBDA_EXCLUSION}"))
    .meta("brackets", scan.brackets.len());
    for p in &scan.points {
        t.push(vec![num(p.lambda), num(p.residual)]);
    }
    Ok(t)
}

pub fn scan_grid(lmin: f64, lmax: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if log {
        if !(lmin > 0.0 && lmax > lmin) {
            bail!("--log needs 0 < lmin < lmax (the grid is mirrored to negative values)");
        }
        Ok(log_lambda_grid(lmin, lmax, points))
    } else {
        if lmax <= lmin {
            bail!("lmax must exceed lmin");
        }
        Ok(uniform_lambda_grid(lmin, lmax, points))
    }
}

/// Figure data: a full-range panel and a magnified panel near 0.
pub fn figure_scan(
    name: &str,
    points: usize,
    steps: usize,
    full: (f64, f64),
    zoom: (f64, f64),
) -> Result<Table> {
    let prob = problem(name)?;
    let steps_total = prob.steps_for(steps);
    let col = residual_column(name);
    let mut t = Table::new(
        &format!("{name} shooting residual"),
        &["panel", "lambda", col],
    )
    .meta("rk4_steps_per_unit", steps)
    .meta("full", format!("[{}, {}]", full.0, full.1))
    .meta("zoom", format!("[{}, {}]", zoom.0, zoom.1))
    .meta("excluded", format!("|lambda| < {LAMBDA_EXCLUSION}"));
    for (panel, (a, b)) in [("full", full), ("zoom", zoom)] {
        let scan = scan_points(&prob, &uniform_lambda_grid(a, b, points), steps_total)?;
        for p in &scan.points {
            t.push(vec![text(panel), num(p.lambda), num(p.residual)]);
        }
    }
    Ok(t)
}

/// Eigenfunctions on `[0, 1]`, every `stride`-th grid point.
pub fn eigenfunction_table(
    comb: Option<&CombSpectrum>,
    grid: Option<&GridSpectrum>,
    stride: usize,
    steps: usize,
) -> Result<Table> {
    if stride == 0 {
        bail!("--stride must be positive");
    }
    let mut columns = vec!["x".to_string()];
    let mut series: Vec<&[f64]> = Vec::new();
    let mut h = None;
    if let Some(s) = comb {
        for (i, p) in s.pairs.iter().enumerate() {
            columns.push(format!("comb_f{}", i + 1));
            series.push(&p.f);
            h = Some(p.spacing);
        }
    }
    if let Some(s) = grid {
        for (i, p) in s.pairs.iter().enumerate() {
            columns.push(format!("grid2_g{}", i + 1));
            series.push(&p.g);
            h = Some(p.spacing);
        }
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new("eigenfunctions", &cols)
        .meta("rk4_steps_per_unit", steps)
        .meta("stride", stride);
    if comb.is_some() {
        t = t.meta("comb_normalization", "f(0) = 1");
    }
    if grid.is_some() {
        t = t.meta("grid2_normalization", "g(1/2) = lambda/2");
    }
    let (Some(h), Some(first)) = (h, series.first()) else {
        return Ok(t);
    };
    for i in (0..first.len()).step_by(stride) {
        let mut row = vec![num(i as f64 * h)];
        row.extend(series.iter().map(|s| num(s[i])));
        t.push(row);
    }
    Ok(t)
}
