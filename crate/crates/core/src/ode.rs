//! Fixed-step RK4 for linear systems `y' = A(x, λ) y`, a shooting framework
//! over the spectral parameter `λ`, and composite Simpson quadrature.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// RK4 steps per unit length of the integration interval.
pub const DEFAULT_STEPS_PER_UNIT: usize = 1 << 16;

/// Half-width of the punctured neighborhood of `λ = 0` skipped by scans.
pub const LAMBDA_EXCLUSION: f64 = 1e-3;

/// Default bisection width.
pub const DEFAULT_ROOT_TOL: f64 = 1e-13;

/// Points per unit of `λ` in the default scan grid.
pub const DEFAULT_SCAN_DENSITY: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("λ = 0 is a singular point of the system")]
    ZeroLambda,
    #[error("step count must be even and at least 2, got {0}")]
    BadSteps(usize),
    #[error("residual does not change sign on [{lo}, {hi}]")]
    BadBracket { lo: f64, hi: f64 },
    #[error("Simpson's rule needs an even number of intervals, got {0}")]
    OddIntervals(usize),
    #[error("initial state has dimension {got}, system has {want}")]
    Dimension { got: usize, want: usize },
}

/// `y' = A(x, λ) y` on `[start, end]`. `coeff` writes `A` row-major into a
/// `dim * dim` buffer.
#[derive(Clone, Copy)]
pub struct LinearSystem {
    pub dim: usize,
    pub start: f64,
    pub end: f64,
    pub coeff: fn(x: f64, lambda: f64, a: &mut [f64]),
}

impl std::fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSystem")
            .field("dim", &self.dim)
            .field("start", &self.start)
            .field("end", &self.end)
            .finish()
    }
}

/// States of an RK4 run on a uniform grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub lambda: f64,
    pub dim: usize,
    pub grid: Vec<f64>,
    /// Row-major, `grid.len() * dim` entries.
    states: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.dim..(j + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// One state component sampled along the grid.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.chunks_exact(self.dim).map(|s| s[c]).collect()
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }
}

struct Rk4Work {
    a: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(d: usize) -> Self {
        Self {
            a: vec![0.0; d * d],
            k: [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]],
            tmp: vec![0.0; d],
        }
    }
}

fn mat_vec(a: &[f64], y: &[f64], out: &mut [f64]) {
    let d = y.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = a[i * d..(i + 1) * d]
            .iter()
            .zip(y)
            .map(|(p, q)| p * q)
            .sum();
    }
}

// index loops keep the four stages visibly parallel
#[allow(clippy::needless_range_loop)]
fn rk4_step(sys: &LinearSystem, x: f64, h: f64, lambda: f64, y: &mut [f64], w: &mut Rk4Work) {
    let d = sys.dim;
    (sys.coeff)(x, lambda, &mut w.a);
    mat_vec(&w.a, y, &mut w.k[0]);
    (sys.coeff)(x + 0.5 * h, lambda, &mut w.a);
    for i in 0..d {
        w.tmp[i] = y[i] + 0.5 * h * w.k[0][i];
    }
    mat_vec(&w.a, &w.tmp, &mut w.k[1]);
    for i in 0..d {
        w.tmp[i] = y[i] + 0.5 * h * w.k[1][i];
    }
    mat_vec(&w.a, &w.tmp, &mut w.k[2]);
    (sys.coeff)(x + h, lambda, &mut w.a);
    for i in 0..d {
        w.tmp[i] = y[i] + h * w.k[2][i];
    }
    mat_vec(&w.a, &w.tmp, &mut w.k[3]);
    for i in 0..d {
        y[i] += h / 6.0 * (w.k[0][i] + 2.0 * w.k[1][i] + 2.0 * w.k[2][i] + w.k[3][i]);
    }
}

fn check_args(sys: &LinearSystem, y0: &[f64], lambda: f64, steps: usize) -> Result<(), OdeError> {
    if lambda == 0.0 {
        return Err(OdeError::ZeroLambda);
    }
    if steps < 2 || steps % 2 == 1 {
        return Err(OdeError::BadSteps(steps));
    }
    if y0.len() != sys.dim {
        return Err(OdeError::Dimension {
            got: y0.len(),
            want: sys.dim,
        });
    }
    Ok(())
}

/// Classical RK4 with `steps` equal steps, storing every grid point.
pub fn rk4_integrate(
    sys: &LinearSystem,
    y0: &[f64],
    lambda: f64,
    steps: usize,
) -> Result<Trajectory, OdeError> {
    check_args(sys, y0, lambda, steps)?;
    let h = (sys.end - sys.start) / steps as f64;
    let mut w = Rk4Work::new(sys.dim);
    let mut y = y0.to_vec();
    let mut states = Vec::with_capacity((steps + 1) * sys.dim);
    let mut grid = Vec::with_capacity(steps + 1);
    states.extend_from_slice(&y);
    grid.push(sys.start);
    for j in 0..steps {
        rk4_step(sys, sys.start + j as f64 * h, h, lambda, &mut y, &mut w);
        states.extend_from_slice(&y);
        grid.push(if j + 1 == steps {
            sys.end
        } else {
            sys.start + (j + 1) as f64 * h
        });
    }
    Ok(Trajectory {
        lambda,
        dim: sys.dim,
        grid,
        states,
    })
}

/// Same integration as [`rk4_integrate`] keeping only the final state.
pub fn rk4_final(
    sys: &LinearSystem,
    y0: &[f64],
    lambda: f64,
    steps: usize,
) -> Result<Vec<f64>, OdeError> {
    check_args(sys, y0, lambda, steps)?;
    let h = (sys.end - sys.start) / steps as f64;
    let mut w = Rk4Work::new(sys.dim);
    let mut y = y0.to_vec();
    for j in 0..steps {
        rk4_step(sys, sys.start + j as f64 * h, h, lambda, &mut y, &mut w);
    }
    Ok(y)
}

/// A boundary-value eigenproblem posed as an initial-value problem in `λ`:
/// integrate from `init(λ)` and look for zeros of `residual`.
#[derive(Debug, Clone, Copy)]
pub struct ShootingProblem {
    pub name: &'static str,
    pub system: LinearSystem,
    pub init: fn(lambda: f64) -> Vec<f64>,
    pub residual: fn(end_state: &[f64], lambda: f64) -> f64,
}

impl ShootingProblem {
    /// RK4 steps for the problem's interval at `steps_per_unit`, rounded to even.
    pub fn steps_for(&self, steps_per_unit: usize) -> usize {
        let len = (self.system.end - self.system.start).abs();
        let s = (len * steps_per_unit as f64).round() as usize;
        (s + s % 2).max(2)
    }

    pub fn residual_at(&self, lambda: f64, steps: usize) -> Result<f64, OdeError> {
        let end = rk4_final(&self.system, &(self.init)(lambda), lambda, steps)?;
        Ok((self.residual)(&end, lambda))
    }

    pub fn solve(&self, lambda: f64, steps: usize) -> Result<Trajectory, OdeError> {
        rk4_integrate(&self.system, &(self.init)(lambda), lambda, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Scan {
    pub points: Vec<ScanPoint>,
    /// Adjacent grid points where the residual changes sign.
    pub brackets: Vec<(f64, f64)>,
}

/// Uniform grid of `n_grid` points on `[lmin, lmax]`.
pub fn uniform_lambda_grid(lmin: f64, lmax: f64, n_grid: usize) -> Vec<f64> {
    let n = n_grid.max(2);
    (0..n)
        .map(|i| lmin + (lmax - lmin) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Log-spaced grid on `[-hi, -lo] ∪ [lo, hi]`, `per_side` points on each side,
/// for resolving eigenvalues that cluster near 0.
pub fn log_lambda_grid(lo: f64, hi: f64, per_side: usize) -> Vec<f64> {
    let n = per_side.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    let side: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    side.iter()
        .rev()
        .map(|x| -x)
        .chain(side.iter().copied())
        .collect()
}

/// Evaluates the residual at every grid point (in parallel, results in grid
/// order) and flags sign changes between neighbors. Points inside the
/// excluded neighborhood of 0 are dropped and never bracket.
pub fn scan_points(
    prob: &ShootingProblem,
    lambdas: &[f64],
    steps: usize,
) -> Result<Scan, OdeError> {
    let kept: Vec<Option<f64>> = lambdas
        .iter()
        .map(|&l| (l.abs() >= LAMBDA_EXCLUSION).then_some(l))
        .collect();
    let values: Vec<Option<ScanPoint>> = kept
        .par_iter()
        .map(|l| match l {
            Some(l) => prob.residual_at(*l, steps).map(|r| {
                Some(ScanPoint {
                    lambda: *l,
                    residual: r,
                })
            }),
            None => Ok(None),
        })
        .collect::<Result<_, _>>()?;
    let mut scan = Scan::default();
    for pair in values.windows(2) {
        if let [Some(a), Some(b)] = pair {
            if a.residual == 0.0 || a.residual.signum() != b.residual.signum() && b.residual != 0.0
            {
                scan.brackets.push((a.lambda, b.lambda));
            }
        }
    }
    scan.points = values.into_iter().flatten().collect();
    Ok(scan)
}

/// Residual on a uniform `λ` grid; see [`scan_points`].
pub fn scan_lambda(
    prob: &ShootingProblem,
    lmin: f64,
    lmax: f64,
    n_grid: usize,
    steps: usize,
) -> Result<Scan, OdeError> {
    scan_points(prob, &uniform_lambda_grid(lmin, lmax, n_grid), steps)
}

/// Bisection of `f` on a sign-changing bracket down to width `tol`.
pub fn bisect<F>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<f64, OdeError>
where
    F: FnMut(f64) -> Result<f64, OdeError>,
{
    let (mut lo, mut hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(OdeError::BadBracket { lo, hi });
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection on the shooting residual.
pub fn refine_root(
    prob: &ShootingProblem,
    bracket: (f64, f64),
    steps: usize,
    tol: f64,
) -> Result<f64, OdeError> {
    bisect(|l| prob.residual_at(l, steps), bracket, tol)
}

/// Roots located window by window.
#[derive(Debug, Clone, Default)]
pub struct RootSearch {
    /// Sorted by `|λ|`, largest first.
    pub roots: Vec<f64>,
    /// Windows in which no sign change was found.
    pub empty_windows: Vec<(f64, f64)>,
}

/// Sub-grid used to bracket roots inside one search window.
const WINDOW_SCAN_POINTS: usize = 33;

/// Scans each window, refines every bracket and keeps the `n_roots` roots of
/// largest modulus.
pub fn find_roots(
    prob: &ShootingProblem,
    windows: &[(f64, f64)],
    n_roots: usize,
    steps: usize,
    tol: f64,
) -> Result<RootSearch, OdeError> {
    let per_window: Vec<Result<Vec<f64>, OdeError>> = windows
        .par_iter()
        .map(|&(a, b)| {
            let scan = scan_lambda(prob, a, b, WINDOW_SCAN_POINTS, steps)?;
            scan.brackets
                .iter()
                .map(|&br| refine_root(prob, br, steps, tol))
                .collect()
        })
        .collect();
    let mut search = RootSearch::default();
    for (w, found) in windows.iter().zip(per_window) {
        let found = found?;
        if found.is_empty() {
            search.empty_windows.push(*w);
        }
        search.roots.extend(found);
    }
    search.roots.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    search.roots.dedup_by(|a, b| (*a - *b).abs() <= 10.0 * tol);
    search.roots.truncate(n_roots);
    Ok(search)
}

/// Composite Simpson rule on equally spaced samples.
pub fn simpson(values: &[f64], h: f64) -> Result<f64, OdeError> {
    let intervals = values.len().saturating_sub(1);
    if intervals == 0 || intervals % 2 == 1 {
        return Err(OdeError::OddIntervals(intervals));
    }
    let interior: f64 = values[1..intervals]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    Ok(h / 3.0 * (values[0] + interior + values[intervals]))
}

/// Running integral `∫_{x₀}^{x_i}` at every sample.
///
/// Even indices use composite Simpson; odd indices add the quadratic
/// interpolant over one interval to the preceding even value.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
    }
    if n < 3 {
        return out;
    }
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    }
    for i in (1..n).step_by(2) {
        out[i] = if i + 1 < n {
            out[i - 1] + h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1])
        } else {
            out[i - 1] + h / 12.0 * (-values[i - 2] + 8.0 * values[i - 1] + 5.0 * values[i])
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_sys(_: f64, _: f64, a: &mut [f64]) {
        a[0] = 0.0;
    }

    fn growth(_: f64, _: f64, a: &mut [f64]) {
        a[0] = 1.0;
    }

    #[test]
    fn constant_solution() {
        let sys = LinearSystem {
            dim: 1,
            start: 0.0,
            end: 1.0,
            coeff: zero_sys,
        };
        let t = rk4_integrate(&sys, &[1.0], 1.0, 8).unwrap();
        assert_eq!(t.len(), 9);
        assert!(t.component(0).iter().all(|&v| v == 1.0));
        assert_eq!(t.grid[8], 1.0);
    }

    #[test]
    fn exponential() {
        let sys = LinearSystem {
            dim: 1,
            start: 0.0,
            end: 1.0,
            coeff: growth,
        };
        let end = rk4_final(&sys, &[1.0], 1.0, 1 << 14).unwrap();
        assert!((end[0] - std::f64::consts::E).abs() < 1e-10);
        let t = rk4_integrate(&sys, &[1.0], 1.0, 1 << 14).unwrap();
        assert_eq!(t.last()[0], end[0]);
    }

    #[test]
    fn argument_errors() {
        let sys = LinearSystem {
            dim: 1,
            start: 0.0,
            end: 1.0,
            coeff: growth,
        };
        assert_eq!(
            rk4_integrate(&sys, &[1.0], 0.0, 4).unwrap_err(),
            OdeError::ZeroLambda
        );
        assert_eq!(
            rk4_integrate(&sys, &[1.0], 1.0, 3).unwrap_err(),
            OdeError::BadSteps(3)
        );
        assert_eq!(
            rk4_integrate(&sys, &[1.0], 1.0, 0).unwrap_err(),
            OdeError::BadSteps(0)
        );
        assert!(matches!(
            rk4_integrate(&sys, &[1.0, 2.0], 1.0, 4),
            Err(OdeError::Dimension { got: 2, want: 1 })
        ));
    }

    #[test]
    fn bisection_sqrt2() {
        let r = bisect(|x| Ok(x * x - 2.0), (1.0, 2.0), 1e-13).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), (1.0, 2.0), 1e-13),
            Err(OdeError::BadBracket { .. })
        ));
    }

    #[test]
    fn simpson_rules() {
        let ones = vec![1.0; 11];
        assert!((simpson(&ones, 0.1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(simpson(&[0.0, 0.125, 1.0], 0.5).unwrap(), 0.25);
        let n = 64;
        let h = 1.0 / n as f64;
        let lin: Vec<f64> = (0..=n).map(|i| 1.0 - i as f64 * h).collect();
        assert!((simpson(&lin, h).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(simpson(&[1.0, 1.0], 1.0), Err(OdeError::OddIntervals(1)));
        assert_eq!(simpson(&[1.0], 1.0), Err(OdeError::OddIntervals(0)));
    }

    #[test]
    fn cumulative_simpson_is_exact_on_quadratics() {
        let n = 9;
        let h = 0.125;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(2)).collect();
        let cum = cumulative_simpson(&f, h);
        for (i, c) in cum.iter().enumerate() {
            let x = i as f64 * h;
            assert!((c - x.powi(3) / 3.0).abs() < 1e-15, "i = {i}");
        }
    }

    #[test]
    fn log_grid_is_symmetric() {
        let g = log_lambda_grid(1e-3, 0.1, 5);
        assert_eq!(g.len(), 10);
        assert!((g[0] + 0.1).abs() < 1e-15);
        assert!((g[9] - 0.1).abs() < 1e-15);
        assert!((g[4] + 1e-3).abs() < 1e-15);
    }
}
