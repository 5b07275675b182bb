use crate::engine::{Allocation, GameState};
use crate::scalar::Scalar;
use crate::tree::RootedTree;

use super::{available, fill_in_order, Strategy, StrategyError};

/// Iteration cap when searching for `N(n)`; beyond it the phase is treated
/// as unbounded.
const PHASE_SEARCH_CAP: u64 = 20_000_000;

/// `N(n)`: the least `N` with `Π_{j=1}^{N} (Cnj − 1)/(Cnj) < 1/(2Cn)`, found
/// by summing logarithms. `None` when it exceeds the search cap.
pub fn phase_length(c: f64, n: u64) -> Option<u64> {
    let cn = c * n as f64;
    let goal = -(2.0 * cn).ln();
    let mut log_prod = 0.0f64;
    for j in 1..=PHASE_SEARCH_CAP {
        log_prod += (-1.0 / (cn * j as f64)).ln_1p();
        if log_prod < goal {
            return Some(j);
        }
    }
    None
}

/// `h(n) = 2n·N(n)`, saturating.
fn phase_end(c: f64, n: u64) -> Option<u64> {
    phase_length(c, n).and_then(|big_n| 2u64.checked_mul(n)?.checked_mul(big_n))
}

/// Online containment strategy for trees with `|T_i| ≤ C·i`.
///
/// It plays as if one firefighter arrived every `n_k` turns, aiming at
/// level `h(n_k)`: each turn, every firefighter on hand goes to the
/// available vertex with the most descendants on that level. If the fire
/// is still burning after turn `h(n_k)`, those turns are written off and
/// the next phase uses `n_{k+1} = h(n_k)·(⌈S_{h(n_k)}⌉ + 1)`.
#[derive(Debug, Clone)]
pub struct LinearGrowth<S> {
    c: S,
    n0: u64,
    phases: Vec<(u64, Option<u64>)>,
    observed_sum: S,
    sum_at_phase_end: Option<S>,
    target_level: usize,
    counts: Vec<u64>,
}

impl<S: Scalar> LinearGrowth<S> {
    pub fn new(c: S, n0: u64) -> Self {
        LinearGrowth {
            c,
            n0,
            phases: Vec::new(),
            observed_sum: S::zero(),
            sum_at_phase_end: None,
            target_level: 0,
            counts: Vec::new(),
        }
    }

    /// `(n_k, h(n_k))` for every phase entered so far.
    pub fn phases(&self) -> &[(u64, Option<u64>)] {
        &self.phases
    }

    fn enter_phase(&mut self, tree: &RootedTree, n: u64) {
        let end = phase_end(self.c.to_f64(), n);
        self.phases.push((n, end));
        self.sum_at_phase_end = None;
        let level = end.map_or(usize::MAX, |e| usize::try_from(e).unwrap_or(usize::MAX));
        self.target_level = level.min(tree.height());
        self.counts = tree.descendants_at_level(self.target_level);
    }
}

impl<S: Scalar> Strategy<S> for LinearGrowth<S> {
    fn name(&self) -> &'static str {
        "linear_growth"
    }

    fn start(&mut self, tree: &RootedTree, _: Option<&[S]>) -> Result<(), StrategyError> {
        if self.c <= S::one() {
            return Err(StrategyError::InvalidConfig("C must exceed 1".into()));
        }
        if self.n0 == 0 {
            return Err(StrategyError::InvalidConfig("n0 must be positive".into()));
        }
        for i in 1..=tree.height() {
            let size = S::from_count(tree.level(i).len() as u64);
            if size > self.c.clone() * S::from_count(i as u64) {
                return Err(StrategyError::WitnessViolation(format!(
                    "|T_{i}| = {} exceeds C·{i}",
                    tree.level(i).len()
                )));
            }
        }
        self.phases.clear();
        self.observed_sum = S::zero();
        self.enter_phase(tree, self.n0);
        Ok(())
    }

    fn observe(&mut self, turn: usize, f_i: &S) {
        self.observed_sum = self.observed_sum.clone() + f_i.clone();
        if let Some((_, Some(end))) = self.phases.last() {
            if turn as u64 == *end {
                self.sum_at_phase_end = Some(self.observed_sum.clone());
            }
        }
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        if let Some(&(_, Some(end))) = self.phases.last() {
            if state.turn() as u64 > end {
                let sum = self.sum_at_phase_end.clone().unwrap_or_else(|| self.observed_sum.clone());
                let ceil = sum.ceil().floor_count().unwrap_or(u64::MAX);
                let next = end.saturating_mul(ceil.saturating_add(1));
                self.enter_phase(tree, next);
            }
        }
        let mut order = available(state, tree);
        order.sort_by(|&a, &b| {
            self.counts[b]
                .cmp(&self.counts[a])
                .then(tree.weight(b).cmp(&tree.weight(a)))
                .then(a.cmp(&b))
        });
        Ok(fill_in_order(state, order, f_i))
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
    use crate::tree::{ChildRule, DegreeSequence, LevelTree};
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    /// The product itself, evaluated term by term in exact arithmetic.
    fn product_below(c: i64, n: i64, big_n: i64) -> bool {
        let mut prod = q(1);
        for j in 1..=big_n {
            prod *= Rational::new((c * n * j - 1).into(), (c * n * j).into());
        }
        prod < Rational::new(1.into(), (2 * c * n).into())
    }

    #[test]
    fn phase_length_is_least() {
        for (c, n) in [(2, 1), (3, 1), (2, 2)] {
            let big_n = phase_length(c as f64, n).unwrap() as i64;
            assert!(product_below(c, n as i64, big_n));
            assert!(!product_below(c, n as i64, big_n - 1));
        }
    }

    #[test]
    fn huge_phases_saturate() {
        assert_eq!(phase_length(2.0, 100), None);
    }

    #[test]
    fn width_two_every_other_turn() {
        let mut lt = LevelTree::new(ChildRule::ConstantWidth(2));
        let t = lt.prefix(30).unwrap();
        let f = FirefighterSequence::periodic(vec![q(1), q(0)]);
        let mut s = LinearGrowth::new(q(2), 2);
        let out = play_game(&t, &f, &mut s, None).unwrap();
        assert!(out.contained);
        assert_eq!(out.turns_played, 3);
        let (_, end) = s.phases()[0];
        assert!(out.turns_played as u64 <= end.unwrap());
    }

    #[test]
    fn spider_every_third_turn() {
        let mut lt = LevelTree::new(ChildRule::Spider);
        let t = lt.prefix(40).unwrap();
        let f = FirefighterSequence::periodic(vec![q(0), q(0), q(1)]);
        let out = play_game(&t, &f, &mut LinearGrowth::new(q(2), 2), None).unwrap();
        assert!(out.contained);
        assert_eq!(out.turns_played, 12);
    }

    #[test]
    fn no_firefighters_no_containment() {
        let mut lt = LevelTree::new(ChildRule::Spider);
        let t = lt.prefix(20).unwrap();
        let f = FirefighterSequence::constant(q(0));
        let out = play_game(&t, &f, &mut LinearGrowth::new(q(2), 2), None).unwrap();
        assert!(!out.contained);
        assert_eq!(out.turns_played, 20);
    }

    #[test]
    fn rejects_fast_growth() {
        let mut lt = LevelTree::spherically_symmetric(DegreeSequence::Constant(2));
        let t = lt.prefix(6).unwrap();
        let f = FirefighterSequence::constant(q(1));
        assert!(play_game(&t, &f, &mut LinearGrowth::new(q(2), 2), None).is_err());
    }
}
