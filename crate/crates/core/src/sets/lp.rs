//! Dense two-phase simplex for the small feasibility problems behind polytope
//! membership. Bland's rule keeps pivoting finite and deterministic.

const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows x (cols + 1)`; last column is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize, objective: &mut [f64]) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, line) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = line[col];
            if factor != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                line[col] = 0.0;
            }
        }
        let factor = objective[col];
        if factor != 0.0 {
            for (v, pv) in objective.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            objective[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Minimizes the reduced-cost row `objective` (length cols + 1, last entry is
    /// minus the current objective value) over columns `< allowed`.
    fn optimize(&mut self, objective: &mut [f64], allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| objective[j] < -PIVOT_EPS) else {
                return true;
            };
            let rhs = self.cols;
            let mut best: Option<(usize, f64)> = None;
            for (r, line) in self.rows.iter().enumerate() {
                if line[col] > PIVOT_EPS {
                    let ratio = line[rhs] / line[col];
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-14 || (ratio <= bratio + 1e-14 && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col, objective),
                None => return false,
            }
        }
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x >= 0`.
pub(crate) fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Phase I: artificial columns n..n+m, rhs at n+m.
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, &rhs)) in a.iter().zip(b).enumerate() {
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        let mut line = vec![0.0; cols + 1];
        for (j, &v) in row.iter().enumerate() {
            line[j] = sign * v;
        }
        line[n + i] = 1.0;
        line[cols] = sign * rhs;
        rows.push(line);
    }
    let mut tableau = Tableau { rows, basis: (n..n + m).collect(), cols };

    let mut phase1 = vec![0.0; cols + 1];
    for line in &tableau.rows {
        for j in 0..n {
            phase1[j] -= line[j];
        }
        phase1[cols] -= line[cols];
    }
    tableau.optimize(&mut phase1, cols);
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if -phase1[cols] > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < tableau.rows.len() {
        if tableau.basis[r] >= n {
            match (0..n).find(|&j| tableau.rows[r][j].abs() > PIVOT_EPS) {
                Some(col) => tableau.pivot(r, col, &mut phase1),
                None => {
                    tableau.rows.remove(r);
                    tableau.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase II over the original columns only.
    let mut objective = vec![0.0; cols + 1];
    objective[..n].copy_from_slice(c);
    for (r, &basic) in tableau.basis.iter().enumerate() {
        let cb = objective[basic];
        if cb != 0.0 {
            for (v, tv) in objective.iter_mut().zip(&tableau.rows[r]) {
                *v -= cb * tv;
            }
        }
    }
    if !tableau.optimize(&mut objective, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (r, &basic) in tableau.basis.iter().enumerate() {
        if basic < n {
            x[basic] = tableau.rows[r][cols].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(c, x)| c * x).sum();
    LpOutcome::Optimal { x, objective }
}

/// Sup-norm distance from `target` to the convex hull of `points`, with the
/// convex weights attaining it.
pub(crate) fn hull_distance(points: &[Vec<f64>], target: &[f64]) -> (f64, Vec<f64>) {
    let m = points.len();
    let d = target.len();
    debug_assert!(m > 0);
    // Columns: w_1..w_m, t, s+_1..s+_d, s-_1..s-_d.
    let n = m + 1 + 2 * d;
    let mut a = Vec::with_capacity(2 * d + 1);
    let mut b = Vec::with_capacity(2 * d + 1);
    for j in 0..d {
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        for (i, p) in points.iter().enumerate() {
            plus[i] = p[j];
            minus[i] = -p[j];
        }
        plus[m] = -1.0;
        minus[m] = -1.0;
        plus[m + 1 + j] = 1.0;
        minus[m + 1 + d + j] = 1.0;
        a.push(plus);
        b.push(target[j]);
        a.push(minus);
        b.push(-target[j]);
    }
    let mut simplex = vec![0.0; n];
    simplex[..m].fill(1.0);
    a.push(simplex);
    b.push(1.0);

    let mut c = vec![0.0; n];
    c[m] = 1.0;
    match minimize(&c, &a, &b) {
        LpOutcome::Optimal { x, .. } => {
            let weights = x[..m].to_vec();
            // Recompute the distance from the weights rather than trusting t.
            let dist = (0..d)
                .map(|j| (weights.iter().zip(points).map(|(w, p)| w * p[j]).sum::<f64>() - target[j]).abs())
                .fold(0.0, f64::max);
            (dist, weights)
        }
        // Always feasible and bounded below by zero; reaching here means numerical breakdown.
        other => panic!("hull distance LP failed: {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_minimum() {
        // min -x - y  s.t. x + y + s1 = 4, x + 3y + s2 = 6
        let out = minimize(&[-1.0, -1.0, 0.0, 0.0], &[vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]], &[4.0, 6.0]);
        match out {
            LpOutcome::Optimal { objective, .. } => assert!((objective + 4.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0.
        assert_eq!(minimize(&[0.0, 0.0], &[vec![1.0, 1.0]], &[-1.0]), LpOutcome::Infeasible);
        // min -x s.t. x - y = 0.
        assert_eq!(minimize(&[-1.0, 0.0], &[vec![1.0, -1.0]], &[0.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let out = minimize(&[1.0, 1.0], &[vec![1.0, 1.0], vec![2.0, 2.0]], &[1.0, 2.0]);
        match out {
            LpOutcome::Optimal { objective, .. } => assert!((objective - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distance_to_unit_square() {
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let (inside, w) = hull_distance(&square, &[0.25, 0.75]);
        assert!(inside < 1e-12);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (outside, _) = hull_distance(&square, &[2.0, 0.5]);
        assert!((outside - 1.0).abs() < 1e-12);
        let (corner, _) = hull_distance(&square, &[-0.5, -0.25]);
        assert!((corner - 0.5).abs() < 1e-12);
    }
}
