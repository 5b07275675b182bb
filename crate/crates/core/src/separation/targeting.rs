//! The targeting game: the player picks divisors `a_i ≥ 1`, the position
//! moves by `f_i·δ_i` with `δ_i = δ_{i−1}/a_i`, and the goal is to land in
//! `[A, B)`.

use crate::scalar::{fraction_string, is_positive, le, lt, to_rational, Scalar};
use crate::sequence::FirefighterSequence;

use super::SeparationError;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetingInstance<S> {
    pub a: S,
    pub b: S,
    pub f: FirefighterSequence<S>,
}

impl<S: Scalar> TargetingInstance<S> {
    pub fn new(a: S, b: S, f: FirefighterSequence<S>) -> Result<Self, SeparationError> {
        if !is_positive(&a) || !lt(&a, &b) {
            return Err(SeparationError::BadTarget {
                a: fraction_string(&to_rational(&a)),
                b: fraction_string(&to_rational(&b)),
            });
        }
        Ok(TargetingInstance { a, b, f })
    }

    fn in_target(&self, u: &S) -> bool {
        le(&self.a, u) && lt(u, &self.b)
    }
}

/// State after one turn. `x = (B − u)/δ` is the monitor that greedy keeps
/// positive and non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetingStep<S> {
    pub turn: usize,
    pub f: S,
    pub a: u64,
    pub delta: S,
    pub u: S,
    pub x: S,
}

/// Plays the given divisors and records every turn.
pub fn play_divisors<S: Scalar>(inst: &TargetingInstance<S>, divisors: &[u64]) -> Vec<TargetingStep<S>> {
    let mut delta = S::one();
    let mut u = S::zero();
    let mut out = Vec::with_capacity(divisors.len());
    for (idx, &a) in divisors.iter().enumerate() {
        let turn = idx + 1;
        let f = inst.f.get(turn);
        delta = delta / S::from_count(a);
        u = u + f.clone() * delta.clone();
        let x = (inst.b.clone() - u.clone()) / delta.clone();
        out.push(TargetingStep { turn, f, a, delta: delta.clone(), u: u.clone(), x });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRun<S> {
    pub steps: Vec<TargetingStep<S>>,
    /// First turn with `u ∈ [A, B)`, if reached.
    pub won_at: Option<usize>,
}

impl<S> GreedyRun<S> {
    pub fn divisors(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.a).collect()
    }
}

/// Each turn takes the smallest `a_i` keeping `u_i < B`. Stops at the first
/// win, at `horizon`, or if a divisor no longer fits in a `u64`.
pub fn targeting_greedy<S: Scalar>(inst: &TargetingInstance<S>, horizon: usize) -> GreedyRun<S> {
    let mut steps = Vec::new();
    let mut x = inst.b.clone();
    let mut delta = S::one();
    let mut u = S::zero();
    for turn in 1..=horizon {
        let f = inst.f.get(turn);
        // u_i < B  ⇔  a_i > f_i/x_{i−1}
        let a = if is_positive(&f) {
            match (f.clone() / x.clone()).floor_count().and_then(|q| q.checked_add(1)) {
                Some(a) => a,
                None => break,
            }
        } else {
            1
        };
        delta = delta / S::from_count(a);
        u = u + f.clone() * delta.clone();
        x = S::from_count(a) * x - f.clone();
        steps.push(TargetingStep { turn, f, a, delta: delta.clone(), u: u.clone(), x: x.clone() });
        if inst.in_target(&u) {
            return GreedyRun { steps, won_at: Some(turn) };
        }
    }
    GreedyRun { steps, won_at: None }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergentWin<S> {
    pub n: usize,
    pub k_prime: u64,
    pub steps: Vec<TargetingStep<S>>,
}

impl<S> DivergentWin<S> {
    pub fn divisors(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.a).collect()
    }
}

/// Waits for the least `N` with `S_N ≥ A·⌈A/(B − A)⌉`, then plays
/// `a_1 = ⌊S_N/B⌋ + 1` and `a_i = 1` afterwards, so that `u_N = S_N/a_1`.
pub fn targeting_divergent<S: Scalar>(
    inst: &TargetingInstance<S>,
    horizon: usize,
) -> Result<DivergentWin<S>, SeparationError> {
    let (a, b) = (&inst.a, &inst.b);
    let need = a.clone() * (a.clone() / (b.clone() - a.clone())).ceil();
    let mut sum = S::zero();
    for n in 1..=horizon {
        sum = sum + inst.f.get(n);
        if !le(&need, &sum) {
            continue;
        }
        let k_prime = (sum.clone() / b.clone())
            .floor_count()
            .and_then(|q| q.checked_add(1))
            .ok_or(SeparationError::Overflow(n))?;
        let mut divisors = vec![1; n];
        divisors[0] = k_prime;
        let steps = play_divisors(inst, &divisors);
        let u = &steps[n - 1].u;
        if !inst.in_target(u) {
            return Err(SeparationError::Certificate(format!(
                "u_{n} = {} is outside the target",
                fraction_string(&to_rational(u))
            )));
        }
        return Ok(DivergentWin { n, k_prime, steps });
    }
    Err(SeparationError::NoWitness(horizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Sequence};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn inst(a: Rational, b: Rational, f: Sequence) -> TargetingInstance<Rational> {
        TargetingInstance::new(a, b, f).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let run = targeting_greedy(&inst(q(3, 1), q(4, 1), Sequence::constant(q(4, 1))), 10);
        assert_eq!(run.won_at, Some(2));
        assert_eq!(run.divisors(), vec![2, 2]);
        assert_eq!(run.steps[0].u, q(2, 1));
        assert_eq!(run.steps[1].u, q(3, 1));

        let run = targeting_greedy(&inst(q(1, 1), q(2, 1), Sequence::constant(q(3, 2))), 10);
        assert_eq!((run.won_at, run.divisors()), (Some(1), vec![1]));

        // no term reaches B, so nothing is promised: f ≡ 1 walks in, a
        // summable f never gets there
        let run = targeting_greedy(&inst(q(3, 1), q(4, 1), Sequence::constant(q(1, 1))), 30);
        assert_eq!((run.won_at, run.divisors()), (Some(3), vec![1, 1, 1]));
        let halves = Sequence::new(crate::sequence::SequenceKind::Rule(crate::sequence::Rule::Geometric(q(1, 1), q(1, 2))), false);
        let run = targeting_greedy(&inst(q(3, 1), q(4, 1), halves.unwrap()), 30);
        assert_eq!(run.won_at, None);
        assert_eq!(run.steps.len(), 30);
        assert!(run.steps.iter().all(|s| s.u < q(3, 1)));
    }

    #[test]
    fn greedy_monitor() {
        let f = Sequence::periodic(vec![q(5, 2), q(0, 1), q(7, 3), q(1, 4)]);
        let run = targeting_greedy(&inst(q(9, 10), q(1, 1), f), 60);
        let mut prev_x = q(1, 1);
        let mut prev_gap = q(1, 1);
        for s in &run.steps {
            assert!(s.x > q(0, 1) && s.x <= prev_x);
            assert_eq!(s.x, (q(1, 1) - s.u.clone()) / s.delta.clone());
            let gap = q(1, 1) - s.u.clone();
            if s.f >= q(1, 1) {
                assert!(gap.clone() * q(2, 1) <= prev_gap);
            }
            prev_x = s.x.clone();
            prev_gap = gap;
        }
        assert!(run.won_at.is_some());
    }

    #[test]
    fn divergent_examples() {
        let w = targeting_divergent(&inst(q(1, 1), q(3, 2), Sequence::constant(q(1, 1))), 20).unwrap();
        assert_eq!((w.n, w.k_prime), (2, 2));
        assert_eq!(w.steps[1].u, q(1, 1));
        assert_eq!(w.divisors(), vec![2, 1]);

        let w = targeting_divergent(&inst(q(1, 1), q(3, 1), Sequence::explicit(vec![q(2, 1)])), 5).unwrap();
        assert_eq!((w.n, w.k_prime), (1, 1));

        let err = targeting_divergent(&inst(q(1, 1), q(2, 1), Sequence::constant(q(0, 1))), 50).unwrap_err();
        assert_eq!(err, SeparationError::NoWitness(50));
    }

    #[test]
    fn divergent_hits_target_on_many_instances() {
        for num in 1..12i64 {
            for gap in 1..6i64 {
                let (a, b) = (q(num, 3), q(num, 3) + q(gap, 7));
                let f = Sequence::periodic(vec![q(1, 2), q(2, 5), q(0, 1)]);
                let w = targeting_divergent(&inst(a.clone(), b.clone(), f), 500).unwrap();
                let u = &w.steps[w.n - 1].u;
                assert!(a <= *u && *u < b);
            }
        }
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(TargetingInstance::new(q(0, 1), q(1, 1), Sequence::constant(q(1, 1))).is_err());
        assert!(TargetingInstance::new(q(2, 1), q(1, 1), Sequence::constant(q(1, 1))).is_err());
    }

    #[test]
    fn floats() {
        let i = TargetingInstance::new(3.0f64, 4.0, crate::sequence::FirefighterSequence::constant(4.0)).unwrap();
        let run = targeting_greedy(&i, 5);
        assert_eq!(run.divisors(), vec![2, 2]);
    }
}
