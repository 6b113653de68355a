//! Phase-1 simplex for tiny feasibility systems `{ x >= 0 : A x = b }`.
//!
//! Dense tableau, one artificial per row, Bland's rule for both the entering
//! and the leaving variable so the method cannot cycle.

/// Pivot and reduced-cost tolerance.
pub const PIVOT_TOL: f64 = 1e-9;
/// A system is feasible iff the phase-1 optimum is at most this.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Returns a nonnegative solution of `A x = b`, or `None` if the phase-1
/// objective cannot be driven below [`FEASIBILITY_TOL`].
///
/// `a` is row-major with `a.len() == b.len()` rows of equal width.
pub fn find_feasible(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let rows = a.len();
    assert_eq!(rows, b.len(), "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 {
        return Some(vec![0.0; cols]);
    }
    // Columns: structural 0..cols, artificial cols..cols+rows, then rhs.
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; rows + 1];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i][j] = sign * a[i][j];
        }
        t[i][cols + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    // Objective row holds reduced costs of min sum(artificials).
    for i in 0..rows {
        for j in 0..cols {
            t[rows][j] -= t[i][j];
        }
        t[rows][rhs] -= t[i][rhs];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    while let Some(enter) = (0..cols + rows).find(|&j| t[rows][j] < -PIVOT_TOL) {
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..rows {
            if t[i][enter] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - PIVOT_TOL
                            || (ratio <= best_ratio + PIVOT_TOL && basis[i] < basis[l])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        // Phase-1 objective is bounded below by zero.
        let leave = leave.expect("phase-1 objective is bounded");
        pivot(&mut t, leave, enter);
        basis[leave] = enter;
    }

    if -t[rows][rhs] > FEASIBILITY_TOL {
        return None;
    }
    let mut x = vec![0.0; cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            x[var] = t[i][rhs].max(0.0);
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let factor = r[col];
        if factor != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible_system() {
        // x + y = 1, x - y = 0.2
        let x = find_feasible(&[vec![1.0, 1.0], vec![1.0, -1.0]], &[1.0, 0.2]).unwrap();
        assert!((x[0] - 0.6).abs() < 1e-12 && (x[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn infeasible_system() {
        // x + y = 1 with x >= 0.6 and y >= 0.6 via surplus columns.
        let a = vec![
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0, -1.0],
        ];
        assert!(find_feasible(&a, &[1.0, 0.6, 0.6]).is_none());
    }

    #[test]
    fn negative_rhs_is_normalized() {
        let x = find_feasible(&[vec![-1.0]], &[-0.5]).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_system_terminates() {
        // Redundant rows and a zero right-hand side.
        let a = vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0]];
        let x = find_feasible(&a, &[1.0, 1.0, 0.0]).unwrap();
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((x[0] - x[1]).abs() < 1e-9);
    }
}
