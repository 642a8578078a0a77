//! Numerical exploration of `x_{n+1} = r x_n + 1`, `x_0 = 0` for `1 <= r < 2`:
//! how far the exact orbits `r^n y_0` stay from the pseudo-orbit.

use crate::error::{Error, Result};

/// Largest grid accepted by [`remark_audit`].
const MAX_GRID_POINTS: usize = 1_000_000;
const MAX_HORIZON: usize = 1000;

/// Inclusive grid `lo, lo + step, ...` clamped to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || lo > hi || step <= 0.0 {
            return Err(Error::InvalidParameter(format!("grid {lo}:{hi}:{step} needs finite lo <= hi and step > 0")));
        }
        let grid = GridSpec { lo, hi, step };
        if grid.len() > MAX_GRID_POINTS {
            return Err(Error::InvalidParameter(format!("grid has more than {MAX_GRID_POINTS} points")));
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        (((self.hi - self.lo) / self.step) * (1.0 + 4.0 * f64::EPSILON)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| (self.lo + i as f64 * self.step).min(self.hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub y0: f64,
    /// `sup_{n <= N} |x_n - r^n y0|`; `inf` when it overflows.
    pub sup: f64,
    pub ln_sup: f64,
    /// The second half of the horizon sets no new maximum.
    pub bounded: bool,
    /// True for the candidate `1/(r-1)` rather than a grid point.
    pub analytic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub r: f64,
    pub horizon: usize,
    pub rows: Vec<AuditRow>,
    /// Some grid point looks bounded.
    pub any_bounded: bool,
    /// Smallest supremum over the grid.
    pub min_sup: f64,
    /// `1/(r-1)` for `r > 1`.
    pub analytic_y0: Option<f64>,
    /// Constant-coefficient bound `r/(r-1)` for defects in `(-r, r)`, for `r > 1`.
    pub predicted_bound: Option<f64>,
    /// Whether the analytic start stays within `predicted_bound`.
    pub prediction_holds: Option<bool>,
}

/// `ln |x_n - r^n y0|` for `x_n = Σ_{j<n} r^j`, from the closed form
/// `r^n (C - y0) - C` with `C = 1/(r-1)`, or `n - y0` when `r = 1`.
fn log_distance(r: f64, y0: f64, n: usize) -> f64 {
    if r == 1.0 {
        return (n as f64 - y0).abs().ln();
    }
    let c = 1.0 / (r - 1.0);
    let gap = c - y0;
    let ln_scaled = n as f64 * r.ln() + gap.abs().ln();
    if ln_scaled < 700.0 {
        (r.powi(n as i32) * gap - c).abs().ln()
    } else {
        // |r^n gap| dwarfs C.
        ln_scaled
    }
}

fn row(r: f64, y0: f64, horizon: usize, analytic: bool) -> AuditRow {
    let half = horizon / 2;
    let logs: Vec<f64> = (0..=horizon).map(|n| log_distance(r, y0, n)).collect();
    let first = logs[..=half].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let second = logs[half + 1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_sup = first.max(second);
    let bounded = second <= first + 1e-9 || second == f64::NEG_INFINITY;
    AuditRow { y0, sup: ln_sup.exp(), ln_sup, bounded, analytic }
}

/// Per-start suprema over a grid of `y0`, plus the analytic candidate.
pub fn remark_audit(r: f64, grid: GridSpec, horizon: usize) -> Result<AuditReport> {
    if !(1.0..2.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r = {r} must lie in [1, 2)")));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::InvalidParameter(format!("horizon {horizon} exceeds {MAX_HORIZON}")));
    }
    let grid = GridSpec::new(grid.lo, grid.hi, grid.step)?;
    let mut rows: Vec<AuditRow> = grid.points().map(|y0| row(r, y0, horizon, false)).collect();
    let any_bounded = rows.iter().any(|row| row.bounded);
    let min_sup = rows.iter().map(|row| row.sup).fold(f64::INFINITY, f64::min);

    let (mut analytic_y0, mut predicted_bound, mut prediction_holds) = (None, None, None);
    if r > 1.0 {
        let y0 = 1.0 / (r - 1.0);
        let candidate = row(r, y0, horizon, true);
        let bound = r / (r - 1.0);
        analytic_y0 = Some(y0);
        predicted_bound = Some(bound);
        prediction_holds = Some(candidate.sup <= bound * (1.0 + 1e-12));
        rows.push(candidate);
    }
    Ok(AuditReport { r, horizon, rows, any_bounded, min_sup, analytic_y0, predicted_bound, prediction_holds })
}
