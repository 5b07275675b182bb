use crate::engine::{Allocation, GameState};
use crate::scalar::{min, Scalar};
use crate::tree::{RootedTree, VertexId};

use super::{available, fill_in_order, Strategy, StrategyError};

/// Vertices of the current level by non-increasing weight, ties by id.
pub(crate) fn by_weight(tree: &RootedTree, vertices: &mut [VertexId]) {
    vertices.sort_by(|&a, &b| tree.weight(b).cmp(&tree.weight(a)).then(a.cmp(&b)));
}

/// Each turn, solves the one-level program exactly: heaviest vertices first,
/// each taking `min(budget left, 1 − P(v))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

impl<S: Scalar> Strategy<S> for Greedy {
    fn name(&self) -> &'static str {
        "gr"
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        let mut order = available(state, tree);
        by_weight(tree, &mut order);
        Ok(fill_in_order(state, order, f_i))
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(*self)
    }
}

/// Protects the available vertices of largest degree. Fractional budgets
/// are rounded down to whole firefighters.
#[derive(Debug, Clone, Copy, Default)]
pub struct DegreeGreedy;

impl<S: Scalar> Strategy<S> for DegreeGreedy {
    fn name(&self) -> &'static str {
        "degree"
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        let mut order = available(state, tree);
        order.sort_by(|&a, &b| tree.degree(b).cmp(&tree.degree(a)).then(a.cmp(&b)));
        let count = f_i.floor_count().unwrap_or(0) as usize;
        Ok(order.into_iter().take(count).map(|v| (v, state.capacity(v))).collect())
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(*self)
    }
}

/// Spreads `f_i / |T_i|` on every vertex of the level, capped by what each
/// vertex can still take.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvenSpread;

impl<S: Scalar> Strategy<S> for EvenSpread {
    fn name(&self) -> &'static str {
        "even"
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        let level = tree.level(state.turn());
        if level.is_empty() {
            return Ok(Allocation::new());
        }
        let share = f_i.clone() / S::from_count(level.len() as u64);
        Ok(level
            .iter()
            .map(|&v| (v, min(share.clone(), state.capacity(v))))
            .filter(|(_, x)| x.is_positive())
            .collect())
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::play_game;
    use crate::sequence::FirefighterSequence;
    use crate::tree::{build_tree, gen_standard, ChildRule, DegreeSequence, Family, LevelTree};
    use crate::{Rational, Sequence};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// r with a (two leaf children, weight 3) and leaf b.
    fn cherry_and_leaf() -> RootedTree {
        build_tree(&[(1, 0), (2, 0), (3, 1), (4, 1)], 0).unwrap()
    }

    #[test]
    fn greedy_takes_heavy_child() {
        let t = cherry_and_leaf();
        let out = play_game(&t, &Sequence::from_counts(&[1]), &mut Greedy, None).unwrap();
        assert_eq!(out.saved, q(3, 1));
        let out = play_game(&t, &FirefighterSequence::explicit(vec![q(1, 2)]), &mut Greedy, None).unwrap();
        assert_eq!(out.saved, q(3, 2));
        assert_eq!(out.transcript[0].allocation.get(1), q(1, 2));
    }

    #[test]
    fn zero_budget_means_no_move() {
        let t = cherry_and_leaf();
        let out = play_game(&t, &Sequence::from_counts(&[0, 0]), &mut Greedy, None).unwrap();
        assert!(out.transcript.iter().all(|r| r.allocation.is_empty()));
        let out = play_game(&t, &Sequence::from_counts(&[0, 0]), &mut DegreeGreedy, None).unwrap();
        assert!(out.transcript.iter().all(|r| r.allocation.is_empty()));
    }

    #[test]
    fn degree_greedy_matches_greedy_on_star() {
        let t = gen_standard(&Family::Star { leaves: 5 }).unwrap();
        let f = FirefighterSequence::<Rational>::from_counts(&[2]);
        let a = play_game(&t, &f, &mut Greedy, None).unwrap();
        let b = play_game(&t, &f, &mut DegreeGreedy, None).unwrap();
        assert_eq!(a.transcript, b.transcript);
    }

    #[test]
    fn degree_greedy_can_be_fooled() {
        // vertex 1: 3 leaf children (weight 4, degree 4); vertex 2: chain of 10
        let mut edges = vec![(1, 0), (2, 0), (3, 1), (4, 1), (5, 1)];
        let mut prev = 2;
        for v in 6..15 {
            edges.push((v, prev));
            prev = v;
        }
        let t = build_tree(&edges, 0).unwrap();
        let f = FirefighterSequence::<Rational>::from_counts(&[1]);
        let deg = play_game(&t, &f, &mut DegreeGreedy, None).unwrap();
        let gr = play_game(&t, &f, &mut Greedy, None).unwrap();
        assert_eq!(deg.saved, q(4, 1));
        assert_eq!(gr.saved, q(10, 1));
        assert!(deg.saved * q(2, 1) < gr.saved);
    }

    #[test]
    fn even_spread_on_binary_symmetric_tree() {
        let mut lt = LevelTree::spherically_symmetric(DegreeSequence::Constant(2));
        let t = lt.prefix(8).unwrap();
        let f = FirefighterSequence::explicit(vec![q(1, 1), q(2, 1), q(3, 1)]);
        let out = play_game(&t, &f, &mut EvenSpread, None).unwrap();
        assert!(out.contained);
        assert_eq!(out.turns_played, 2);

        let ones = FirefighterSequence::constant(q(1, 1));
        let out = play_game(&t, &ones, &mut EvenSpread, None).unwrap();
        assert!(!out.contained);
        assert_eq!(out.turns_played, 8);
    }

    #[test]
    fn even_spread_full_first_level() {
        let mut lt = LevelTree::new(ChildRule::Spider);
        let t = lt.prefix(5).unwrap();
        let out = play_game(&t, &Sequence::from_counts(&[2]), &mut EvenSpread, None).unwrap();
        assert!(out.contained);
        assert_eq!(out.turns_played, 1);
        let out = play_game(&t, &FirefighterSequence::constant(q(1, 1)), &mut EvenSpread, None).unwrap();
        assert!(out.contained);
        assert_eq!(out.turns_played, 3);
    }
}
