//! Dense tableau simplex for `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible from the start, so a single phase suffices.
//! Pivoting follows Bland's rule (lowest eligible index enters, lowest
//! basic index breaks ratio ties), which rules out cycling.

use thiserror::Error;

use crate::scalar::{is_positive, is_zero, lt, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("right-hand side must be non-negative (row {0})")]
    NegativeRhs(usize),
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("the program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub rows: Vec<Vec<S>>,
    pub rhs: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub value: S,
    pub x: Vec<S>,
    pub pivots: usize,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(objective: Vec<S>) -> Self {
        LinearProgram { objective, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn add_row(&mut self, coefficients: Vec<S>, rhs: S) {
        self.rows.push(coefficients);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpSolution<S>, LpError> {
        let n = self.objective.len();
        let m = self.rows.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Shape { row: r, got: row.len(), expected: n });
            }
            if lt(&self.rhs[r], &S::zero()) {
                return Err(LpError::NegativeRhs(r));
            }
        }
        // tableau rows: [A | I | b]; columns 0..n original, n..n+m slack
        let width = n + m + 1;
        let mut t: Vec<Vec<S>> = (0..m)
            .map(|r| {
                let mut row = Vec::with_capacity(width);
                row.extend(self.rows[r].iter().cloned());
                row.extend((0..m).map(|s| if s == r { S::one() } else { S::zero() }));
                row.push(self.rhs[r].clone());
                row
            })
            .collect();
        // reduced costs: maximize, so entering columns have positive cost
        let mut cost: Vec<S> = self.objective.iter().cloned().chain((0..=m).map(|_| S::zero())).collect();
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut pivots = 0;

        while let Some(enter) = (0..n + m).find(|&j| is_positive(&cost[j])) {
            let mut leave: Option<usize> = None;
            for r in 0..m {
                if !is_positive(&t[r][enter]) {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(l) => {
                        // compare b_r / a_r against b_l / a_l without dividing
                        let lhs = t[r][n + m].clone() * t[l][enter].clone();
                        let rhs = t[l][n + m].clone() * t[r][enter].clone();
                        lhs < rhs || (lhs == rhs && basis[r] < basis[l])
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            let Some(r) = leave else { return Err(LpError::Unbounded) };
            pivot(&mut t, &mut cost, r, enter);
            basis[r] = enter;
            pivots += 1;
        }

        let mut x = vec![S::zero(); n];
        for (r, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[r][n + m].clone();
            }
        }
        let value = x
            .iter()
            .zip(&self.objective)
            .fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        Ok(LpSolution { value, x, pivots })
    }
}

fn pivot<S: Scalar>(t: &mut [Vec<S>], cost: &mut [S], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || is_zero(&row[c]) {
            continue;
        }
        let factor = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !is_zero(pv) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
    }
    if !is_zero(&cost[c]) {
        let factor = cost[c].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            if !is_zero(pv) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn textbook_program() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(vec![q(3, 1), q(5, 1)]);
        lp.add_row(vec![q(1, 1), q(0, 1)], q(4, 1));
        lp.add_row(vec![q(0, 1), q(2, 1)], q(12, 1));
        lp.add_row(vec![q(3, 1), q(2, 1)], q(18, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y ≤ 1, x + 2y ≤ 1 → 2/3
        let mut lp = LinearProgram::new(vec![q(1, 1), q(1, 1)]);
        lp.add_row(vec![q(2, 1), q(1, 1)], q(1, 1));
        lp.add_row(vec![q(1, 1), q(2, 1)], q(1, 1));
        assert_eq!(lp.solve().unwrap().value, q(2, 3));
    }

    #[test]
    fn degenerate_program_terminates() {
        // several constraints tight at the origin
        let mut lp = LinearProgram::new(vec![q(2, 1), q(3, 1), q(-1, 1), q(-12, 1)]);
        lp.add_row(vec![q(-2, 1), q(-9, 1), q(1, 1), q(9, 1)], q(0, 1));
        lp.add_row(vec![q(1, 3), q(1, 1), q(-1, 3), q(-2, 1)], q(0, 1));
        lp.add_row(vec![q(1, 1), q(1, 1), q(1, 1), q(1, 1)], q(1, 1));
        let s = lp.solve().unwrap();
        assert!(s.value >= q(0, 1));
    }

    #[test]
    fn unbounded_and_bad_input() {
        let mut lp = LinearProgram::new(vec![q(1, 1)]);
        lp.add_row(vec![q(-1, 1)], q(1, 1));
        assert_eq!(lp.solve(), Err(LpError::Unbounded));
        let mut lp = LinearProgram::new(vec![q(1, 1)]);
        lp.add_row(vec![q(1, 1)], q(-1, 1));
        assert_eq!(lp.solve(), Err(LpError::NegativeRhs(0)));
    }

    #[test]
    fn works_on_floats() {
        let mut lp = LinearProgram::new(vec![1.0f64, 1.0]);
        lp.add_row(vec![2.0, 1.0], 1.0);
        lp.add_row(vec![1.0, 2.0], 1.0);
        assert!((lp.solve().unwrap().value - 2.0 / 3.0).abs() < 1e-12);
    }
}
