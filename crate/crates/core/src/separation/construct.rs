use serde_json::{json, Value};

use crate::scalar::{fraction_string, is_positive, to_rational, Scalar};
use crate::sequence::FirefighterSequence;

use super::targeting::{targeting_divergent, targeting_greedy, TargetingInstance};
use super::{compare_sequences, compute_ab, containment_turn, recurrence, Comparison, SeparationError};

/// `a_i = ⌊f_i/F_{i−1}⌋ + 1`: the least degree keeping `F_i > 0`.
fn least_degree<S: Scalar>(f_i: &S, fire: &S, rank: usize) -> Result<u64, SeparationError> {
    (f_i.clone() / fire.clone())
        .floor_count()
        .and_then(|q| q.checked_add(1))
        .ok_or(SeparationError::Overflow(rank))
}

/// Degrees `a_1..a_n` of a witness: the prefix, then the least degrees
/// keeping the fire alive under `f`.
fn extend_degrees<S: Scalar>(
    prefix: &[u64],
    f: &FirefighterSequence<S>,
    n: usize,
) -> Result<Vec<u64>, SeparationError> {
    let mut a = prefix[..prefix.len().min(n)].to_vec();
    let mut fire = recurrence(|i| a[i - 1], |i| f.get(i), a.len()).pop().expect("F_0 exists");
    for i in a.len() + 1..=n {
        let d = least_degree(&f.get(i), &fire, i)?;
        fire = S::from_count(d) * fire - f.get(i);
        a.push(d);
    }
    Ok(a)
}

fn first_difference<S: Scalar>(
    f: &FirefighterSequence<S>,
    g: &FirefighterSequence<S>,
    horizon: usize,
) -> Option<usize> {
    (1..=horizon).find(|&i| !crate::scalar::is_zero(&(f.get(i) - g.get(i))))
}

fn q<S: Scalar>(x: &S) -> String {
    fraction_string(&to_rational(x))
}

/// How the degrees after `a_{k+1}` were chosen before the tail rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetingUsed {
    /// `A ≤ 0`: `f'` is contained within the first `k + 1` levels.
    Edge,
    Greedy,
    Divergent,
}

impl TargetingUsed {
    pub fn name(self) -> &'static str {
        match self {
            TargetingUsed::Edge => "edge",
            TargetingUsed::Greedy => "greedy",
            TargetingUsed::Divergent => "divergent",
        }
    }
}

/// A spherically symmetric tree on which the fire survives forever under
/// `f` but is contained under `f'` at turn `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationWitness<S> {
    pub k: usize,
    pub epsilon: S,
    pub a_value: S,
    pub b_value: S,
    pub strategy: TargetingUsed,
    /// Explicit degrees; the tail rule applies after them.
    pub prefix: Vec<u64>,
    /// First turn with `F'_n ≤ 0`.
    pub n: usize,
    pub f_n_prime: S,
    /// `F_i > 0` was checked for every `i` up to here.
    pub checked_to: usize,
    weaker: FirefighterSequence<S>,
}

impl<S: Scalar> SeparationWitness<S> {
    /// `a_1..a_n`.
    pub fn degrees(&self, n: usize) -> Result<Vec<u64>, SeparationError> {
        extend_degrees(&self.prefix, &self.weaker, n)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": {"prefix": self.prefix, "tail_rule": "floor_f_over_F_plus_1"},
            "certificate": {"N": self.n, "F_N_prime": q(&self.f_n_prime), "F_checked_to": self.checked_to},
            "k": self.k,
            "epsilon": q(&self.epsilon),
            "A": q(&self.a_value),
            "B": q(&self.b_value),
            "strategy": self.strategy.name(),
        })
    }
}

/// Builds a tree separating `f ⪯ f'` by shifting `ε = f'_k − f_k` at the
/// first difference `k`, then winning the targeting game on
/// `[A, B) = [F^{(k,ε)}_{k+1}, F_{k+1})` against the rest of `f`.
pub fn construct_separating<S: Scalar>(
    f: &FirefighterSequence<S>,
    f_prime: &FirefighterSequence<S>,
    horizon: usize,
) -> Result<SeparationWitness<S>, SeparationError> {
    match compare_sequences(f, f_prime, horizon) {
        Comparison::Equal => return Err(SeparationError::Equal(horizon)),
        Comparison::StrictlyStronger | Comparison::Incomparable => return Err(SeparationError::NotWeaker(horizon)),
        Comparison::StrictlyWeaker => {}
    }
    let k = first_difference(f, f_prime, horizon).expect("strictly weaker sequences differ");
    let epsilon = f_prime.get(k) - f.get(k);

    let mut prefix = Vec::with_capacity(k + 1);
    let mut fire = S::one();
    for i in 1..=k + 1 {
        let mut d = least_degree(&f.get(i), &fire, i)?;
        if i == k + 1 {
            d = d.max(2);
        }
        fire = S::from_count(d) * fire - f.get(i);
        prefix.push(d);
    }
    let (a_value, b_value) = compute_ab(&prefix, f, k, &epsilon)?;

    let strategy = if !is_positive(&a_value) {
        TargetingUsed::Edge
    } else {
        let rest = horizon.saturating_sub(k + 1);
        let inst = TargetingInstance::new(a_value.clone(), b_value.clone(), f.shifted(k + 1))?;
        let greedy = targeting_greedy(&inst, rest);
        if greedy.won_at.is_some() {
            prefix.extend(greedy.divisors());
            TargetingUsed::Greedy
        } else {
            match targeting_divergent(&inst, rest) {
                Ok(win) => {
                    prefix.extend(win.divisors());
                    TargetingUsed::Divergent
                }
                Err(SeparationError::NoWitness(_)) => return Err(SeparationError::HypothesesUnmet(horizon)),
                Err(e) => return Err(e),
            }
        }
    };

    let under_strong = recurrence(|i| prefix[i - 1], |i| f_prime.get(i), prefix.len());
    let n = containment_turn(&under_strong).ok_or_else(|| {
        SeparationError::Certificate(format!("F' stays positive on the first {} levels", prefix.len()))
    })?;
    let checked_to = (10 * n).max(prefix.len());
    let degrees = extend_degrees(&prefix, f, checked_to)?;
    let under_weak = recurrence(|i| degrees[i - 1], |i| f.get(i), checked_to);
    if let Some(i) = containment_turn(&under_weak) {
        return Err(SeparationError::Certificate(format!("F_{i} = {} under the weaker sequence", q(&under_weak[i]))));
    }
    Ok(SeparationWitness {
        k,
        epsilon,
        a_value,
        b_value,
        strategy,
        prefix,
        n,
        f_n_prime: under_strong[n].clone(),
        checked_to,
        weaker: f.clone(),
    })
}

/// `T((g_i + 1))` for the sequence `g` that is smaller at the first
/// difference: the fire is exactly 1 on every level under `g` and is
/// contained at that rank under the other sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSeparation {
    /// Whether the tree follows the second argument instead of the first.
    pub swapped: bool,
    pub rank: usize,
    pub prefix: Vec<u64>,
    survivor: Vec<u64>,
}

impl IntegralSeparation {
    /// `a_1..a_n`, defined up to the horizon that was inspected.
    pub fn degrees(&self, n: usize) -> Vec<u64> {
        self.survivor.iter().take(n).map(|&g| g + 1).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": {"prefix": self.prefix, "tail_rule": "floor_f_over_F_plus_1"},
            "certificate": {"N": self.rank, "F_N_prime": "0/1", "F_checked_to": self.survivor.len()},
            "rank": self.rank,
            "swapped": self.swapped,
        })
    }
}

pub fn separate_integral<S: Scalar>(
    f: &FirefighterSequence<S>,
    f_prime: &FirefighterSequence<S>,
    horizon: usize,
) -> Result<IntegralSeparation, SeparationError> {
    let counts = |s: &FirefighterSequence<S>| -> Result<Vec<u64>, SeparationError> {
        (1..=horizon)
            .map(|i| {
                let v = s.get(i);
                match v.floor_count() {
                    Some(c) if v.is_integral() => Ok(c),
                    _ => Err(SeparationError::NonIntegral(format!("term {i} is {}", q(&v)))),
                }
            })
            .collect()
    };
    let (g, h) = (counts(f)?, counts(f_prime)?);
    let rank = (0..horizon).find(|&i| g[i] != h[i]).ok_or(SeparationError::Equal(horizon))? + 1;
    let swapped = h[rank - 1] < g[rank - 1];
    let survivor = if swapped { h } else { g };
    let prefix = survivor[..rank].iter().map(|&x| x + 1).collect();
    Ok(IntegralSeparation { swapped, rank, prefix, survivor })
}
