use crate::engine::{Allocation, GameState};
use crate::scalar::{weights_at_least_inverse_phi, Scalar};
use crate::tree::{RootedTree, VertexId};

use super::greedy::by_weight;
use super::{available, Strategy, StrategyError};

/// Outcome of the first-firefighter test between the two heaviest
/// candidates `a` (heavier) and `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTest {
    pub a: VertexId,
    pub b: VertexId,
    /// The minimizing ratio as `(numerator, denominator)` and the relative
    /// depth below `a`/`b` where it occurs.
    pub min_ratio: (u64, u64),
    pub min_depth: usize,
    pub choose_a: bool,
}

/// Evaluates `min_d (w_a + w̄_b[d]) / (w_b + w̄_a[d])` over relative depths
/// `d ≥ 1`, where `w̄_v[d]` is the heaviest descendant of `v` exactly `d`
/// levels down (0 past the bottom of `T[v]`), and compares it to `1/φ`
/// exactly. Depths past both subtrees give `w_a / w_b ≥ 1` and are skipped.
pub fn phi_test(tree: &RootedTree, a: VertexId, b: VertexId) -> PhiTest {
    let (wa, wb) = (tree.weight(a), tree.weight(b));
    let pa = tree.level_weight_profile(a);
    let pb = tree.level_weight_profile(b);
    let depth = pa.len().max(pb.len());
    let bar = |p: &[u64], d: usize| p.get(d).copied().unwrap_or(0);
    let mut best = (wa, wb);
    let mut best_depth = 0;
    let mut choose_a = true;
    for d in 1..depth.max(2) {
        let p = wa + bar(&pb, d);
        let q = wb + bar(&pa, d);
        if (p as u128) * (best.1 as u128) < (best.0 as u128) * (q as u128) || best_depth == 0 {
            best = (p, q);
            best_depth = d;
        }
        if !weights_at_least_inverse_phi(p, q) {
            choose_a = false;
        }
    }
    PhiTest { a, b, min_ratio: best, min_depth: best_depth, choose_a }
}

/// The two-firefighter online algorithm. The first firefighter goes to the
/// heavier of the two heaviest available vertices unless the golden-ratio
/// test says the lighter one is the safer bet; every later firefighter goes
/// to the heaviest available vertex.
#[derive(Debug, Clone, Default)]
pub struct AlgoTwo {
    first_done: bool,
}

impl AlgoTwo {
    pub fn new() -> Self {
        Self::default()
    }
}

impl<S: Scalar> Strategy<S> for AlgoTwo {
    fn name(&self) -> &'static str {
        "algo2"
    }

    fn start(&mut self, _: &RootedTree, _: Option<&[S]>) -> Result<(), StrategyError> {
        self.first_done = false;
        Ok(())
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        let count = f_i.floor_count().unwrap_or(0);
        let mut alloc = Allocation::new();
        if count == 0 {
            return Ok(alloc);
        }
        let mut order = available(state, tree);
        by_weight(tree, &mut order);
        let mut taken: Vec<VertexId> = Vec::new();
        for _ in 0..count {
            let rest: Vec<VertexId> = order.iter().copied().filter(|v| !taken.contains(v)).collect();
            let Some(&heaviest) = rest.first() else { break };
            let pick = if self.first_done {
                heaviest
            } else {
                self.first_done = true;
                let b = rest.get(1).copied().unwrap_or(heaviest);
                if b == heaviest || phi_test(tree, heaviest, b).choose_a {
                    heaviest
                } else {
                    b
                }
            };
            taken.push(pick);
            alloc.add(pick, state.capacity(pick));
        }
        Ok(alloc)
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::play_game;
    use crate::sequence::FirefighterSequence;
    use crate::tree::{build_tree, gen_w_klm, w_gadget};
    use crate::Rational;

    /// `min_{d ≥ 1} (w_a + w̄_b[d]) / (w_b + w̄_a[d])` by scanning whole
    /// levels, as exact rationals.
    fn brute_min(t: &RootedTree, a: VertexId, b: VertexId) -> Rational {
        let bar = |v: VertexId, d: usize| -> u64 {
            t.level(t.level_of(v) + d)
                .iter()
                .filter(|&&u| t.is_ancestor_or_self(v, u))
                .map(|&u| t.weight(u))
                .max()
                .unwrap_or(0)
        };
        (1..=t.height())
            .map(|d| {
                Rational::new(
                    ((t.weight(a) + bar(b, d)) as i64).into(),
                    ((t.weight(b) + bar(a, d)) as i64).into(),
                )
            })
            .min()
            .unwrap()
    }

    fn a_c_b_tree() -> RootedTree {
        // a = 1 with child c = 3 holding 21 leaves; b = 2 with 21 leaves
        let mut edges = vec![(1, 0), (2, 0), (3, 1)];
        let mut next = 4;
        for _ in 0..21 {
            edges.push((next, 3));
            next += 1;
        }
        for _ in 0..21 {
            edges.push((next, 2));
            next += 1;
        }
        build_tree(&edges, 0).unwrap()
    }

    #[test]
    fn w_1_10_16_keeps_the_heavy_branch() {
        let t = gen_w_klm(1, 10, 16).unwrap();
        let g = w_gadget(1, 10, 16);
        let test = phi_test(&t, g.y, g.x);
        // two levels down the ratio is 17/24, three levels down 16/23
        let (p, q) = test.min_ratio;
        assert_eq!(Rational::new((p as i64).into(), (q as i64).into()), brute_min(&t, g.y, g.x));
        assert_eq!((p, q, test.min_depth), (16, 23, 3));
        assert!(test.choose_a);
        let out = play_game(&t, &FirefighterSequence::<Rational>::from_counts(&[1]), &mut AlgoTwo::new(), None)
            .unwrap();
        assert_eq!(out.saved, Rational::from_integer(16.into()));
    }

    #[test]
    fn switches_to_lighter_child() {
        let t = a_c_b_tree();
        assert_eq!((t.weight(1), t.weight(2)), (23, 22));
        let test = phi_test(&t, 1, 2);
        assert_eq!(test.min_ratio, (24, 44));
        assert!(!test.choose_a);
        let f = FirefighterSequence::<Rational>::from_counts(&[1, 1]);
        let out = play_game(&t, &f, &mut AlgoTwo::new(), None).unwrap();
        assert_eq!(out.transcript[0].allocation.get(2), Rational::from_integer(1.into()));
        assert_eq!(out.transcript[1].allocation.get(3), Rational::from_integer(1.into()));
        assert_eq!(out.saved, Rational::from_integer(44.into()));
    }

    #[test]
    fn single_child_root() {
        let t = build_tree(&[(1, 0), (2, 1), (3, 1)], 0).unwrap();
        let out = play_game(&t, &FirefighterSequence::<Rational>::from_counts(&[1]), &mut AlgoTwo::new(), None)
            .unwrap();
        assert_eq!(out.saved, Rational::from_integer(3.into()));
    }

    #[test]
    fn two_at_once_takes_both_heaviest() {
        let t = a_c_b_tree();
        let f = FirefighterSequence::<Rational>::from_counts(&[2]);
        let out = play_game(&t, &f, &mut AlgoTwo::new(), None).unwrap();
        assert_eq!(out.saved, Rational::from_integer(45.into()));
    }
}
