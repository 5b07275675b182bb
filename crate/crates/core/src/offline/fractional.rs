use crate::engine::{Allocation, TurnRecord};
use crate::scalar::Scalar;
use crate::sequence::FirefighterSequence;
use crate::tree::{RootedTree, VertexId};

use super::simplex::{LinearProgram, LpError};
use super::{OptError, OptResult};

/// `β_F`: the optimum of
///
/// ```text
/// max Σ p(v)·w(v)  s.t.  Σ_{v∈T_i} p(v) ≤ f_i,  Σ_{u ⪯ ℓ} p(u) ≤ 1 for every leaf ℓ,  p ≥ 0
/// ```
///
/// solved exactly. Path constraints on leaves imply the ones on inner
/// vertices; levels with `f_i = 0` contribute no variables.
pub fn beta_fractional<S: Scalar>(
    tree: &RootedTree,
    seq: &FirefighterSequence<S>,
) -> Result<OptResult<S>, OptError> {
    let h = tree.height();
    let budgets: Vec<S> = (0..=h).map(|i| if i == 0 { S::zero() } else { seq.get(i) }).collect();
    if let Some(i) = budgets.iter().position(|b| b.is_negative()) {
        return Err(OptError::Precondition(format!("f_{i} is negative")));
    }
    let vars: Vec<VertexId> = (1..=h)
        .filter(|&i| budgets[i].is_positive())
        .flat_map(|i| tree.level(i).iter().copied())
        .collect();
    let mut index = vec![usize::MAX; tree.n()];
    for (j, &v) in vars.iter().enumerate() {
        index[v] = j;
    }

    let mut lp = LinearProgram::new(vars.iter().map(|&v| S::from_count(tree.weight(v))).collect());
    for i in (1..=h).filter(|&i| budgets[i].is_positive()) {
        let mut row = vec![S::zero(); vars.len()];
        for &v in tree.level(i) {
            row[index[v]] = S::one();
        }
        lp.add_row(row, budgets[i].clone());
    }
    for leaf in tree.leaves() {
        let mut row = vec![S::zero(); vars.len()];
        let mut any = false;
        let mut u = Some(leaf);
        while let Some(x) = u {
            if index[x] != usize::MAX {
                row[index[x]] = S::one();
                any = true;
            }
            u = tree.parent(x);
        }
        if any {
            lp.add_row(row, S::one());
        }
    }

    let solution = lp.solve().map_err(|e| match e {
        LpError::Unbounded => unreachable!("the program is bounded by n"),
        other => OptError::Precondition(other.to_string()),
    })?;
    let mut witness: Vec<TurnRecord<S>> = Vec::new();
    for (j, x) in solution.x.iter().enumerate() {
        if !x.is_positive() {
            continue;
        }
        let v = vars[j];
        let turn = tree.level_of(v);
        match witness.last_mut() {
            Some(r) if r.turn == turn => r.allocation.add(v, x.clone()),
            _ => {
                let mut allocation = Allocation::new();
                allocation.add(v, x.clone());
                witness.push(TurnRecord { turn, allocation });
            }
        }
    }
    let result = OptResult { value: solution.value, witness, nodes_explored: solution.pivots as u64 };
    result.verify(tree, &seq.clone().into_fractional())?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::beta_integral;
    use crate::tree::{build_tree, gen_standard, Family};
    use crate::{Rational, Sequence};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// The LP optimum by brute force over vertex supports: every basic
    /// solution is the unique solution of some square subsystem of tight
    /// constraints, so trying all of them and keeping the best feasible
    /// one gives the optimum.
    fn vertex_support_optimum(t: &RootedTree, f: &[Rational]) -> Rational {
        let h = t.height();
        let vars: Vec<VertexId> = (1..=h)
            .filter(|&i| f.get(i - 1).is_some_and(|x| *x > q(0, 1)))
            .flat_map(|i| t.level(i).to_vec())
            .collect();
        let nv = vars.len();
        // all constraints as (row, rhs), including x_j ≥ 0 written as −x_j ≤ 0
        let mut cons: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for i in 1..=h {
            let fi = f.get(i - 1).cloned().unwrap_or(q(0, 1));
            if fi > q(0, 1) {
                cons.push((vars.iter().map(|&v| q((t.level_of(v) == i) as i64, 1)).collect(), fi));
            }
        }
        for leaf in t.leaves() {
            cons.push((vars.iter().map(|&v| q(t.is_ancestor_or_self(v, leaf) as i64, 1)).collect(), q(1, 1)));
        }
        for j in 0..nv {
            cons.push(((0..nv).map(|k| q(-((k == j) as i64), 1)).collect(), q(0, 1)));
        }
        let feasible = |x: &[Rational]| {
            cons.iter().all(|(row, rhs)| {
                row.iter().zip(x).fold(q(0, 1), |acc, (a, b)| acc + a * b) <= *rhs
            })
        };
        let mut best = q(0, 1);
        let m = cons.len();
        for mask in 0u64..(1 << m) {
            if mask.count_ones() as usize != nv {
                continue;
            }
            let rows: Vec<usize> = (0..m).filter(|&r| mask >> r & 1 == 1).collect();
            if let Some(x) = solve_square(&rows.iter().map(|&r| cons[r].clone()).collect::<Vec<_>>()) {
                if feasible(&x) {
                    let val = x.iter().zip(&vars).fold(q(0, 1), |acc, (xi, &v)| acc + xi * q(t.weight(v) as i64, 1));
                    if val > best {
                        best = val;
                    }
                }
            }
        }
        best
    }

    fn solve_square(sys: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
        let n = sys.len();
        let mut a: Vec<Vec<Rational>> =
            sys.iter().map(|(r, b)| r.iter().cloned().chain(std::iter::once(b.clone())).collect()).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| a[r][c] != q(0, 1))?;
            a.swap(c, p);
            let piv = a[c][c].clone();
            for x in a[c].iter_mut() {
                *x = &*x / &piv;
            }
            for r in 0..n {
                if r != c && a[r][c] != q(0, 1) {
                    let fac = a[r][c].clone();
                    let prow = a[c].clone();
                    for (x, y) in a[r].iter_mut().zip(prow) {
                        *x = &*x - &fac * y;
                    }
                }
            }
        }
        Some(a.into_iter().map(|r| r[n].clone()).collect())
    }

    fn cherry() -> RootedTree {
        // root 0; a = 1 with leaves 3, 4; b = 2
        build_tree(&[(1, 0), (2, 0), (3, 1), (4, 1)], 0).unwrap()
    }

    #[test]
    fn half_then_two() {
        let t = cherry();
        let f = Sequence::explicit(vec![q(1, 2), q(2, 1)]);
        let r = beta_fractional(&t, &f).unwrap();
        assert_eq!(r.value, q(5, 2));
        assert_eq!(vertex_support_optimum(&t, &f.prefix(2)), q(5, 2));
    }

    #[test]
    fn integral_optimum_on_a_path() {
        let t = gen_standard(&Family::Path { n: 5 }).unwrap();
        let f = Sequence::from_counts(&[1]);
        assert_eq!(beta_fractional(&t, &f).unwrap().value, q(4, 1));
        assert_eq!(beta_integral(&t, &f).unwrap().value, q(4, 1));
    }

    #[test]
    fn no_budget() {
        let t = cherry();
        let r = beta_fractional(&t, &Sequence::constant(q(0, 1))).unwrap();
        assert_eq!(r.value, q(0, 1));
    }

    #[test]
    fn matches_vertex_supports_on_small_trees() {
        let budgets = [
            vec![q(1, 2), q(1, 3), q(1, 1)],
            vec![q(1, 1), q(0, 1), q(2, 3)],
            vec![q(0, 1), q(3, 2), q(1, 4)],
        ];
        for seed in 0..12 {
            let t = gen_standard(&Family::Random { n: 7, seed }).unwrap();
            for f in &budgets {
                let seq = Sequence::explicit(f.clone());
                let lp = beta_fractional(&t, &seq).unwrap().value;
                assert_eq!(lp, vertex_support_optimum(&t, f), "seed {seed}");
            }
        }
    }

    #[test]
    fn float_scalar() {
        let t = cherry();
        let f = crate::sequence::FirefighterSequence::explicit(vec![0.5f64, 2.0]);
        assert!((beta_fractional(&t, &f).unwrap().value - 2.5).abs() < 1e-9);
    }
}
