use std::cmp::Ordering;

use crate::engine::{play_game, saved_and_ratio, spread, validate_move, EngineError, GameState};
use crate::scalar::Scalar;
use crate::sequence::FirefighterSequence;
use crate::strategies::Strategy;
use crate::tree::RootedTree;

use super::{integral_optimum, BobTwo, OptError, SearchLimits};

/// Nonzero terms `(turn, count)` of an integral sequence, by turn.
pub type SparseSequence = Vec<(usize, u64)>;

/// Dense form, trimmed after the last nonzero term.
pub fn densify(sparse: &[(usize, u64)]) -> Vec<u64> {
    let len = sparse.last().map_or(0, |&(t, _)| t);
    let mut f = vec![0; len];
    for &(t, c) in sparse {
        f[t - 1] += c;
    }
    f
}

/// Lexicographic order of the zero-padded dense forms.
pub(crate) fn cmp_sparse(a: &[(usize, u64)], b: &[(usize, u64)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x == y {
            continue;
        }
        if x.0 != y.0 {
            // the earlier turn is zero in the other sequence
            return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
        }
        return x.1.cmp(&y.1);
    }
    a.len().cmp(&b.len())
}

/// `C(h + k, k)`: integral sequences of length `h` with total at most `k`.
pub fn count_sequences(k: u64, h: usize) -> Option<u64> {
    let mut c: u128 = 1;
    for j in 1..=k as u128 {
        c = c.checked_mul(h as u128 + j)? / j;
    }
    u64::try_from(c).ok()
}

/// Calls `visit` on every sparse sequence over turns `from..=h` with total
/// at most `k`, the all-zero one first.
pub(crate) fn each_sparse(
    from: usize,
    h: usize,
    k: u64,
    cur: &mut SparseSequence,
    visit: &mut dyn FnMut(&[(usize, u64)]) -> Result<(), OptError>,
) -> Result<(), OptError> {
    visit(cur)?;
    for t in from..=h {
        for c in 1..=k {
            cur.push((t, c));
            each_sparse(t + 1, h, k - c, cur, visit)?;
            cur.pop();
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioLimits {
    pub max_sequences: u64,
    pub search: SearchLimits,
    /// Only sequences with `f_1 > 0`.
    pub first_turn_positive: bool,
}

impl Default for RatioLimits {
    fn default() -> Self {
        RatioLimits { max_sequences: 20_000_000, search: SearchLimits::default(), first_turn_positive: false }
    }
}

/// Source of `β_I` values inside a sweep.
#[derive(Debug, Clone)]
pub enum BetaOracle<'a> {
    Two(BobTwo<'a>),
    Search(&'a RootedTree, SearchLimits),
}

impl<'a> BetaOracle<'a> {
    /// The two-firefighter shortcut when `k ≤ 2`, branch and bound otherwise.
    pub fn for_budget(tree: &'a RootedTree, k: u64, limits: SearchLimits) -> Self {
        if k <= 2 {
            BetaOracle::Two(BobTwo::new(tree))
        } else {
            BetaOracle::Search(tree, limits)
        }
    }

    pub fn value(&self, seq: &[(usize, u64)]) -> Result<u64, OptError> {
        match self {
            BetaOracle::Two(bob) => Ok(bob.solve_sparse(seq)?.0),
            BetaOracle::Search(tree, limits) => Ok(integral_optimum(tree, &densify(seq), limits)?.0),
        }
    }
}

/// One adversary sequence with the strategy's saving and the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCase<S> {
    pub sequence: Vec<u64>,
    pub saved: S,
    pub opt: u64,
    pub ratio: S,
}

/// Plays `strategy` against every integral sequence with total at most `k`
/// over `h(T)` turns and reports `(sequence, λ, β_I)` for each.
///
/// Online strategies are explored as a tree of prefixes: turn `i` is played
/// once per prefix and undone afterwards, and a branch ends as soon as the
/// budget is spent or the game is over (after which only `β_I` still
/// depends on the rest of the sequence). Offline strategies see the whole
/// sequence, so each one is played from scratch.
pub fn for_each_case<S: Scalar>(
    tree: &RootedTree,
    strategy: &dyn Strategy<S>,
    k: u64,
    limits: &RatioLimits,
    visit: &mut dyn FnMut(&[(usize, u64)], &S, u64) -> Result<(), OptError>,
) -> Result<(), OptError> {
    let h = tree.height();
    match count_sequences(k, h) {
        Some(c) if c <= limits.max_sequences => {}
        c => {
            return Err(OptError::TooManySequences {
                count: c.map_or_else(|| "more than 2^64".to_string(), |c| c.to_string()),
                limit: limits.max_sequences,
            })
        }
    }
    let oracle = BetaOracle::for_budget(tree, k, limits.search);
    let first_ok = |s: &[(usize, u64)]| !limits.first_turn_positive || s.first().is_some_and(|x| x.0 == 1);

    if strategy.is_offline() || h == 0 {
        return each_sparse(1, h, k, &mut Vec::new(), &mut |s| {
            if !first_ok(s) {
                return Ok(());
            }
            let seq = FirefighterSequence::<S>::from_counts(&densify(s));
            let out = play_game(tree, &seq, strategy.clone_box().as_mut(), None)?;
            visit(s, &out.saved, oracle.value(s)?)
        });
    }

    struct Frame<S: Scalar> {
        strategy: Box<dyn Strategy<S>>,
        remaining: u64,
        next: u64,
        applied: Option<u64>,
    }
    let mut root = strategy.clone_box();
    root.start(tree, None).map_err(EngineError::from)?;
    let first = if limits.first_turn_positive { 1 } else { 0 };
    let mut stack = vec![Frame { strategy: root, remaining: k, next: first, applied: None }];
    let mut state = GameState::<S>::new(tree);
    let mut prefix: SparseSequence = Vec::new();

    while let Some(top) = stack.last_mut() {
        if let Some(c) = top.applied.take() {
            state.rewind_turn(tree);
            if c > 0 {
                prefix.pop();
            }
        }
        if top.next > top.remaining {
            stack.pop();
            continue;
        }
        let c = top.next;
        top.next += 1;
        let i = state.turn() + 1;
        let f_i = S::from_count(c);
        let mut strat = top.strategy.clone_box();
        state.begin_turn(tree);
        strat.observe(i, &f_i);
        let alloc = strat.allocate(&state, tree, &f_i).map_err(EngineError::from)?;
        validate_move(&state, tree, &alloc, &f_i, true).map_err(|source| EngineError::Move { turn: i, source })?;
        state.apply(tree, &alloc);
        spread(&mut state, tree);
        top.applied = Some(c);
        if c > 0 {
            prefix.push((i, c));
        }
        let r = top.remaining - c;
        if r == 0 || state.contained() || i >= h {
            // the saving is final; enumerate the rest for the optimum
            let saved = state.saved().clone();
            each_sparse(i + 1, h, r, &mut prefix.clone(), &mut |s| visit(s, &saved, oracle.value(s)?))?;
            continue;
        }
        stack.push(Frame { strategy: strat, remaining: r, next: 0, applied: None });
    }
    Ok(())
}

/// `min λ/β_I` over the sequences of [`for_each_case`] (ratio 1 when
/// `β_I = 0`); ties go to the lexicographically smallest sequence.
pub fn worst_ratio<S: Scalar>(tree: &RootedTree, strategy: &dyn Strategy<S>, k: u64) -> Result<RatioCase<S>, OptError> {
    worst_ratio_with(tree, strategy, k, &RatioLimits::default())
}

pub fn worst_ratio_with<S: Scalar>(
    tree: &RootedTree,
    strategy: &dyn Strategy<S>,
    k: u64,
    limits: &RatioLimits,
) -> Result<RatioCase<S>, OptError> {
    let mut best: Option<(SparseSequence, S, u64, S)> = None;
    for_each_case(tree, strategy, k, limits, &mut |s, saved, opt| {
        let ratio = saved_and_ratio(saved, &S::from_count(opt))?;
        let better = match &best {
            None => true,
            Some((bs, _, _, br)) => ratio < *br || (ratio == *br && cmp_sparse(s, bs) == Ordering::Less),
        };
        if better {
            best = Some((s.to_vec(), saved.clone(), opt, ratio));
        }
        Ok(())
    })?;
    let (s, saved, opt, ratio) =
        best.ok_or_else(|| OptError::Precondition("no sequence satisfies the restriction".into()))?;
    Ok(RatioCase { sequence: densify(&s), saved, opt, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{AlgoTwo, Greedy};
    use crate::tree::{gen_standard, gen_w_klm, Family};
    use crate::Rational;

    #[test]
    fn counts_and_order() {
        assert_eq!(count_sequences(2, 2), Some(6));
        assert_eq!(count_sequences(0, 9), Some(1));
        assert_eq!(count_sequences(64, 1_000_000), None);
        let mut all = Vec::new();
        each_sparse(1, 2, 1, &mut Vec::new(), &mut |s| {
            all.push(densify(s));
            Ok(())
        })
        .unwrap();
        assert_eq!(all, vec![vec![], vec![1], vec![0, 1]]);
        assert_eq!(cmp_sparse(&[(2, 1)], &[(1, 1)]), Ordering::Less);
        assert_eq!(cmp_sparse(&[(1, 1)], &[(1, 1), (3, 1)]), Ordering::Less);
        assert_eq!(cmp_sparse(&[(1, 2)], &[(1, 1), (3, 1)]), Ordering::Greater);
    }

    /// Prefix sharing must agree with playing every sequence from scratch.
    #[test]
    fn shared_prefixes_match_full_games() {
        for seed in 0..15 {
            let t = gen_standard(&Family::Random { n: 11, seed }).unwrap();
            for k in 0..=3 {
                let mut shared = Vec::new();
                for_each_case::<Rational>(&t, &Greedy, k, &RatioLimits::default(), &mut |s, saved, opt| {
                    shared.push((densify(s), saved.clone(), opt));
                    Ok(())
                })
                .unwrap();
                shared.sort_by(|a, b| a.0.cmp(&b.0));
                let mut fresh = Vec::new();
                each_sparse(1, t.height(), k, &mut Vec::new(), &mut |s| {
                    let f = crate::Sequence::from_counts(&densify(s));
                    let saved = play_game(&t, &f, &mut Greedy, None).unwrap().saved;
                    let opt = integral_optimum(&t, &densify(s), &SearchLimits::default()).unwrap().0;
                    fresh.push((densify(s), saved, opt));
                    Ok(())
                })
                .unwrap();
                fresh.sort_by(|a, b| a.0.cmp(&b.0));
                assert_eq!(shared, fresh, "seed {seed}, k {k}");
            }
        }
    }

    #[test]
    fn greedy_is_optimal_on_a_path() {
        let t = gen_standard(&Family::Path { n: 4 }).unwrap();
        let w = worst_ratio::<Rational>(&t, &Greedy, 1).unwrap();
        assert_eq!(w.ratio, Rational::from_integer(1.into()));
    }

    #[test]
    fn algo_two_on_small_gadget() {
        let t = gen_w_klm(1, 10, 16).unwrap();
        let w = worst_ratio::<Rational>(&t, &AlgoTwo::new(), 2).unwrap();
        let (l, b) = (w.saved.to_integer(), w.opt);
        let l: u64 = l.try_into().unwrap();
        assert!(l * l + l * b >= b * b, "{w:?}");
    }

    #[test]
    fn guard() {
        let t = gen_standard(&Family::Path { n: 20 }).unwrap();
        let limits = RatioLimits { max_sequences: 100, ..Default::default() };
        assert!(worst_ratio_with::<Rational>(&t, &Greedy, 3, &limits).unwrap_err().is_guard());
    }
}
