//! Dense phase-1 simplex for small equality-constrained feasibility problems.
//!
//! Finds `x >= 0` with `A x = b` by minimising the sum of artificial
//! variables. Pivoting follows Bland's rule, so the method cannot cycle.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex stalled after {pivots} pivots (best residual {residual:e})")]
    SolverStall { pivots: usize, residual: f64 },
    #[error("constraint matrix has {rows} rows but right-hand side has {rhs}")]
    Shape { rows: usize, rhs: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOne {
    /// Primal point, clipped at zero.
    pub x: Vec<f64>,
    /// Sum of artificial variables at the optimum.
    pub infeasibility: f64,
    /// `max_i |(A x - b)_i|`.
    pub residual: f64,
    pub pivots: usize,
}

/// Runs phase 1 on `A x = b, x >= 0`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], max_pivots: usize) -> Result<PhaseOne, LpError> {
    let m = a.len();
    if b.len() != m {
        return Err(LpError::Shape {
            rows: m,
            rhs: b.len(),
        });
    }
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;

    // Rows are [A | I | b] with b >= 0; the last row holds reduced costs.
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    let cost: Vec<f64> = (0..width)
        .map(|j| {
            if j < n || j == width - 1 {
                -t[..m].iter().map(|row| row[j]).sum::<f64>()
            } else {
                0.0
            }
        })
        .collect();
    t[m] = cost;
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    while let Some(enter) = (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS) {
        let leave = (0..m)
            .filter(|&i| t[i][enter] > PIVOT_EPS)
            .map(|i| (t[i][width - 1] / t[i][enter], basis[i], i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, _, i)| i);
        // Phase 1 is bounded below by zero, so a ratio row always exists.
        let Some(row) = leave else { break };
        if pivots >= max_pivots {
            let x = extract(&t, &basis, n);
            return Err(LpError::SolverStall {
                pivots,
                residual: residual(a, b, &x),
            });
        }

        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
    }

    let x = extract(&t, &basis, n);
    let infeasibility = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][width - 1].max(0.0))
        .sum();
    Ok(PhaseOne {
        residual: residual(a, b, &x),
        x,
        infeasibility,
        pivots,
    })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let inv = 1.0 / t[row][col];
    for v in t[row].iter_mut() {
        *v *= inv;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            r[col] = 0.0;
        }
    }
}

fn extract(t: &[Vec<f64>], basis: &[usize], n: usize) -> Vec<f64> {
    let rhs = t[0].len() - 1;
    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[i][rhs].max(0.0);
        }
    }
    x
}

fn residual(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, &bi)| (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_system() {
        // x + y = 1, x - y = 0.5
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let sol = phase_one(&a, &[1.0, 0.5], 100).unwrap();
        assert!(sol.residual < 1e-12);
        assert!((sol.x[0] - 0.75).abs() < 1e-12 && (sol.x[1] - 0.25).abs() < 1e-12);
        assert!(sol.infeasibility < 1e-12);
    }

    #[test]
    fn negative_rhs_is_flipped() {
        let a = vec![vec![-1.0, 0.0], vec![0.0, 1.0]];
        let sol = phase_one(&a, &[-2.0, 3.0], 100).unwrap();
        assert!(sol.residual < 1e-12);
        assert_eq!(sol.x, vec![2.0, 3.0]);
    }

    #[test]
    fn infeasible_system() {
        // x + y = 1 and x + y = 2 cannot both hold.
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let sol = phase_one(&a, &[1.0, 2.0], 100).unwrap();
        assert!(sol.infeasibility > 0.5);
        assert!(sol.residual >= 0.5 - 1e-12);

        // x = -1 with x >= 0.
        let sol = phase_one(&[vec![1.0]], &[-1.0], 100).unwrap();
        assert!((sol.infeasibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![
            vec![1.0, 1.0, 0.0],
            vec![2.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let sol = phase_one(&a, &[1.0, 2.0, 0.0], 100).unwrap();
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn stall_reports_residual() {
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        match phase_one(&a, &[1.0, 0.5], 1) {
            Err(LpError::SolverStall { pivots, residual }) => {
                assert_eq!(pivots, 1);
                assert!(residual.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            phase_one(&[vec![1.0]], &[1.0, 2.0], 10),
            Err(LpError::Shape { .. })
        ));
    }
}
