use crate::scalar::Scalar;
use crate::sequence::FirefighterSequence;
use crate::tree::{RootedTree, VertexId};

use super::{integral_counts, picks_to_witness, OptError, OptResult};

/// Offline optimum for at most two firefighters.
///
/// With `t₁` the first turn with a firefighter and `a`, `b` the two
/// heaviest vertices of `T_{t₁}`, some optimum puts its first firefighter
/// on `a` or `b`. So it is enough to try both and add the heaviest vertex
/// of the second firefighter's level that is not below the first pick.
#[derive(Debug, Clone)]
pub struct BobTwo<'a> {
    tree: &'a RootedTree,
    by_weight: Vec<Vec<VertexId>>,
}

impl<'a> BobTwo<'a> {
    pub fn new(tree: &'a RootedTree) -> Self {
        let by_weight = tree
            .levels()
            .iter()
            .map(|level| {
                let mut l = level.clone();
                l.sort_by(|&a, &b| tree.weight(b).cmp(&tree.weight(a)).then(a.cmp(&b)));
                l
            })
            .collect();
        BobTwo { tree, by_weight }
    }

    /// Optimum for firefighters arriving at the given `(turn, count)`
    /// pairs (turns increasing, counts positive, total at most two).
    pub fn solve_sparse(&self, arrivals: &[(usize, u64)]) -> Result<(u64, Vec<(usize, Vec<VertexId>)>), OptError> {
        let total: u64 = arrivals.iter().map(|a| a.1).sum();
        if total > 2 {
            return Err(OptError::Precondition(format!("{total} firefighters, at most 2 allowed")));
        }
        let h = self.tree.height();
        let mut arrivals = arrivals.iter().copied().filter(|&(t, c)| c > 0 && t >= 1 && t <= h);
        let Some((t1, c1)) = arrivals.next() else { return Ok((0, Vec::new())) };
        let level = &self.by_weight[t1];
        let w = |v: VertexId| self.tree.weight(v);
        if c1 >= 2 || level.len() == 1 {
            let picks: Vec<VertexId> = level.iter().copied().take(c1 as usize).collect();
            return Ok((picks.iter().map(|&v| w(v)).sum(), vec![(t1, picks)]));
        }
        let Some((t2, _)) = arrivals.next() else {
            return Ok((w(level[0]), vec![(t1, vec![level[0]])]));
        };
        let mut best: Option<(u64, Vec<(usize, Vec<VertexId>)>)> = None;
        for &first in &level[..2] {
            let second = self.by_weight[t2].iter().copied().find(|&u| !self.tree.is_ancestor_or_self(first, u));
            let value = w(first) + second.map_or(0, w);
            if best.as_ref().is_none_or(|b| value > b.0) {
                let mut picks = vec![(t1, vec![first])];
                if let Some(u) = second {
                    picks.push((t2, vec![u]));
                }
                best = Some((value, picks));
            }
        }
        Ok(best.expect("two candidates tried"))
    }

    pub fn solve(&self, f: &[u64]) -> Result<(u64, Vec<(usize, Vec<VertexId>)>), OptError> {
        let arrivals: Vec<(usize, u64)> =
            f.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i + 1, c)).collect();
        self.solve_sparse(&arrivals)
    }
}

pub fn bob_two<S: Scalar>(tree: &RootedTree, seq: &FirefighterSequence<S>) -> Result<OptResult<S>, OptError> {
    let f = integral_counts(tree, seq)?;
    let (value, picks) = BobTwo::new(tree).solve(&f)?;
    let result = OptResult { value: S::from_count(value), witness: picks_to_witness(&picks), nodes_explored: 2 };
    result.verify(tree, seq)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::{integral_optimum, SearchLimits};
    use crate::tree::{build_tree, gen_standard, gen_w_klm, w_gadget, Family};
    use crate::Sequence;

    #[test]
    fn w_gadget_examples() {
        let t = gen_w_klm(1, 10, 16).unwrap();
        let g = w_gadget(1, 10, 16);
        let r = bob_two(&t, &Sequence::from_counts(&[1])).unwrap();
        assert_eq!(r.value, crate::Rational::from_integer(16.into()));
        assert_eq!(r.witness[0].allocation.iter().next().unwrap().0, g.y);
        let r = bob_two(&t, &Sequence::from_counts(&[1, 0, 1])).unwrap();
        assert_eq!(r.value, crate::Rational::from_integer(24.into()));
        assert_eq!(r.witness[0].allocation.iter().next().unwrap().0, g.x);
    }

    #[test]
    fn single_child_root() {
        let t = build_tree(&[(1, 0), (2, 1), (3, 1), (4, 3)], 0).unwrap();
        assert_eq!(bob_two(&t, &Sequence::from_counts(&[1])).unwrap().value, crate::Rational::from_integer(4.into()));
        assert_eq!(bob_two(&t, &Sequence::from_counts(&[2])).unwrap().value, crate::Rational::from_integer(4.into()));
    }

    #[test]
    fn too_many_firefighters() {
        let t = gen_standard(&Family::Path { n: 4 }).unwrap();
        assert!(matches!(bob_two(&t, &Sequence::from_counts(&[1, 1, 1])), Err(OptError::Precondition(_))));
    }

    #[test]
    fn equals_branch_and_bound() {
        for seed in 0..60 {
            let t = gen_standard(&Family::Random { n: 12, seed }).unwrap();
            let bob = BobTwo::new(&t);
            let h = t.height();
            for t1 in 1..=h {
                let mut f = vec![0u64; h];
                f[t1 - 1] = 2;
                let limits = SearchLimits::default();
                assert_eq!(bob.solve(&f).unwrap().0, integral_optimum(&t, &f, &limits).unwrap().0);
                for t2 in t1..=h {
                    let mut f = vec![0u64; h];
                    f[t1 - 1] += 1;
                    f[t2 - 1] += 1;
                    assert_eq!(
                        bob.solve(&f).unwrap().0,
                        integral_optimum(&t, &f, &limits).unwrap().0,
                        "seed {seed}, f {f:?}"
                    );
                }
            }
        }
    }
}
