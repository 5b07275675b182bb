//! Separating firefighter sequences with spherically symmetric trees.
//!
//! On `T((a_i))` the fire reaching level `i` is `max{0, F_i}` with
//! `F_0 = 1`, `F_i = a_i·F_{i−1} − f_i`, whatever the player does, so the
//! question of whether one sequence contains the fire and another does not
//! becomes arithmetic on `(a_i)`.

mod construct;
mod losing;
mod targeting;

use thiserror::Error;

use crate::scalar::{fraction_string, lt, to_rational, Scalar};
use crate::sequence::FirefighterSequence;
use crate::tree::DegreeSequence;

pub use construct::{construct_separating, separate_integral, IntegralSeparation, SeparationWitness, TargetingUsed};
pub use losing::{losing_sst, LevelGrowth, LosingCertificate, LosingInstance, TailWitness};
pub use targeting::{
    targeting_divergent, targeting_greedy, DivergentWin, GreedyRun, TargetingInstance, TargetingStep,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("the sequences agree on the first {0} terms")]
    Equal(usize),
    #[error("the first sequence is not weaker than the second on the first {0} terms")]
    NotWeaker(usize),
    #[error("A = B: the shift is zero")]
    Degenerate,
    #[error("the prefix already contains the fire under the weaker sequence (B = {0})")]
    InvalidPrefix(String),
    #[error("need A < B, got A = {a}, B = {b}")]
    BadTarget { a: String, b: String },
    #[error("degree a_{0} must be positive")]
    ZeroDegree(usize),
    #[error("need a prefix of {needed} degrees, got {got}")]
    ShortPrefix { needed: usize, got: usize },
    #[error("no winning turn for the targeting game within {0} turns")]
    NoWitness(usize),
    #[error("neither sufficient condition holds within {0} turns")]
    HypothesesUnmet(usize),
    #[error("values must be integers: {0}")]
    NonIntegral(String),
    #[error("the series does not converge: {0}")]
    Divergent(String),
    #[error("no tail bound available: {0}")]
    NeedsWitness(String),
    #[error("level sizes overflow at level {0}")]
    Overflow(usize),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

/// How two sequences compare under `⪯` (prefix sums dominated) on a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    /// `f ≺ f'`
    StrictlyWeaker,
    /// `f' ≺ f`
    StrictlyStronger,
    Incomparable,
}

impl Comparison {
    /// `f ⪯ f'`.
    pub fn is_weaker(self) -> bool {
        matches!(self, Comparison::Equal | Comparison::StrictlyWeaker)
    }
}

pub fn compare_sequences<S: Scalar>(
    f: &FirefighterSequence<S>,
    g: &FirefighterSequence<S>,
    horizon: usize,
) -> Comparison {
    let (mut below, mut above) = (false, false);
    let (mut sf, mut sg) = (S::zero(), S::zero());
    for i in 1..=horizon {
        sf = sf + f.get(i);
        sg = sg + g.get(i);
        if lt(&sf, &sg) {
            below = true;
        } else if lt(&sg, &sf) {
            above = true;
        }
    }
    match (below, above) {
        (false, false) => Comparison::Equal,
        (true, false) => Comparison::StrictlyWeaker,
        (false, true) => Comparison::StrictlyStronger,
        (true, true) => Comparison::Incomparable,
    }
}

/// `[F_0, …, F_n]` for `F_0 = 1`, `F_i = a_i·F_{i−1} − f_i`, without
/// clamping at zero.
pub fn fire_recurrence<S: Scalar>(a: &DegreeSequence, f: &FirefighterSequence<S>, n: usize) -> Vec<S> {
    recurrence(|i| a.get(i), |i| f.get(i), n)
}

pub(crate) fn recurrence<S: Scalar>(a: impl Fn(usize) -> u64, f: impl Fn(usize) -> S, n: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(S::one());
    for i in 1..=n {
        let prev = out[i - 1].clone();
        out.push(S::from_count(a(i)) * prev - f(i));
    }
    out
}

/// First `i ≥ 1` with `F_i ≤ 0`: the turn the fire is contained.
pub fn containment_turn<S: Scalar>(fire: &[S]) -> Option<usize> {
    fire.iter().skip(1).position(|x| !x.is_positive()).map(|p| p + 1)
}

/// `f^{(k,ε)}`: `ε` of turn `k + 1`'s budget moved to turn `k`. Term
/// `k + 1` may go negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSequence<S> {
    pub base: FirefighterSequence<S>,
    pub k: usize,
    pub epsilon: S,
}

impl<S: Scalar> ShiftedSequence<S> {
    pub fn new(base: FirefighterSequence<S>, k: usize, epsilon: S) -> Self {
        ShiftedSequence { base, k, epsilon }
    }

    pub fn get(&self, i: usize) -> S {
        let v = self.base.get(i);
        if i == self.k {
            v + self.epsilon.clone()
        } else if i == self.k + 1 {
            v - self.epsilon.clone()
        } else {
            v
        }
    }

    pub fn prefix_sum(&self, n: usize) -> S {
        let s = self.base.prefix_sum(n);
        if n == self.k {
            s + self.epsilon.clone()
        } else {
            s
        }
    }
}

/// `A = F^{(k,ε)}_{k+1}` and `B = F_{k+1}` on the prefix `a_1..a_{k+1}`.
pub fn compute_ab<S: Scalar>(
    a: &[u64],
    f: &FirefighterSequence<S>,
    k: usize,
    epsilon: &S,
) -> Result<(S, S), SeparationError> {
    if a.len() < k + 1 {
        return Err(SeparationError::ShortPrefix { needed: k + 1, got: a.len() });
    }
    if let Some(i) = a[..=k].iter().position(|&x| x == 0) {
        return Err(SeparationError::ZeroDegree(i + 1));
    }
    if epsilon.is_zero() {
        return Err(SeparationError::Degenerate);
    }
    let shifted = ShiftedSequence::new(f.clone(), k, epsilon.clone());
    let fire = recurrence(|i| a[i - 1], |i| f.get(i), k + 1);
    let moved = recurrence(|i| a[i - 1], |i| shifted.get(i), k + 1);
    let b = fire[k + 1].clone();
    if !b.is_positive() {
        return Err(SeparationError::InvalidPrefix(fraction_string(&to_rational(&b))));
    }
    Ok((moved[k + 1].clone(), b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Sequence};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ones() -> Sequence {
        Sequence::constant(q(1, 1))
    }

    #[test]
    fn comparisons() {
        let mut head = vec![q(3, 2)];
        head.extend(vec![q(1, 1); 11]);
        let g = Sequence::explicit(head);
        assert_eq!(compare_sequences(&ones(), &g, 10), Comparison::StrictlyWeaker);
        assert_eq!(compare_sequences(&ones(), &ones(), 10), Comparison::Equal);
        assert!(Comparison::Equal.is_weaker());
        let a = Sequence::periodic(vec![q(1, 1), q(0, 1)]);
        let b = Sequence::periodic(vec![q(0, 1), q(2, 1)]);
        assert_eq!(compare_sequences(&a, &b, 4), Comparison::Incomparable);
        assert_eq!(compare_sequences(&g, &ones(), 4), Comparison::StrictlyStronger);
    }

    #[test]
    fn recurrence_examples() {
        let f = fire_recurrence(&DegreeSequence::Constant(3), &ones(), 3);
        assert_eq!(f, vec![q(1, 1), q(2, 1), q(5, 1), q(14, 1)]);
        let f = fire_recurrence(&DegreeSequence::Constant(2), &ones(), 20);
        assert!(f.iter().all(|x| *x == q(1, 1)));
        assert_eq!(containment_turn(&f), None);
        let f = fire_recurrence(&DegreeSequence::Constant(3), &Sequence::explicit(vec![q(3, 1)]), 2);
        assert_eq!(f[1], q(0, 1));
        assert_eq!(containment_turn(&f), Some(1));
    }

    #[test]
    fn shifted_terms_and_sums() {
        let s = ShiftedSequence::new(ones(), 2, q(3, 2));
        assert_eq!(s.get(2), q(5, 2));
        assert_eq!(s.get(3), q(-1, 2));
        assert_eq!(s.get(4), q(1, 1));
        assert_eq!(s.prefix_sum(2), q(7, 2));
        assert_eq!(s.prefix_sum(3), q(3, 1));
    }

    #[test]
    fn ab_examples() {
        let (a, b) = compute_ab(&[2, 2], &ones(), 1, &q(1, 2)).unwrap();
        assert_eq!((a, b), (q(1, 2), q(1, 1)));
        assert_eq!(compute_ab(&[2, 2], &ones(), 1, &q(0, 1)), Err(SeparationError::Degenerate));
        let (a, b) = compute_ab(&[2, 2], &ones(), 1, &q(1, 1)).unwrap();
        assert_eq!((a, b), (q(0, 1), q(1, 1)));
        assert!(matches!(compute_ab(&[1, 1], &ones(), 1, &q(1, 2)), Err(SeparationError::InvalidPrefix(_))));
    }

    #[test]
    fn ab_gap_identity() {
        // B − A = (a_{k+1} − 1)·ε
        for (a, k, eps) in [(vec![3, 2, 5], 2, q(1, 3)), (vec![2, 4], 1, q(2, 5)), (vec![2, 2, 2, 7], 3, q(1, 1))] {
            let (lo, hi) = compute_ab(&a, &ones(), k, &eps).unwrap();
            assert_eq!(hi - lo, Rational::from_integer(((a[k] - 1) as i64).into()) * eps);
        }
    }
}
