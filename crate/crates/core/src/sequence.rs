//! Firefighter sequences `(f_i)`: how much protection arrives at each turn.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{fraction_string, from_rational, parse_rational, to_rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("f_{index} is negative")]
    Negative { index: usize },
    #[error("f_{index} is not an integer but the sequence is flagged integral")]
    NonIntegral { index: usize },
    #[error("a periodic sequence needs a nonempty pattern")]
    EmptyPeriod,
    #[error("malformed sequence description: {0}")]
    Malformed(String),
}

/// Closed-form sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule<S> {
    /// `f_i = c`
    Constant(S),
    /// `f_i = c·i`
    Linear(S),
    /// `f_i = c·r^(i−1)`
    Geometric(S, S),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind<S> {
    /// The listed values, then zeros forever.
    Explicit(Vec<S>),
    /// The pattern repeated forever.
    Periodic(Vec<S>),
    Rule(Rule<S>),
}

/// A non-negative firefighter sequence, indexed from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FirefighterSequence<S> {
    kind: SequenceKind<S>,
    integral: bool,
}

impl<S: Scalar> FirefighterSequence<S> {
    pub fn new(kind: SequenceKind<S>, integral: bool) -> Result<Self, SequenceError> {
        if let SequenceKind::Periodic(p) = &kind {
            if p.is_empty() {
                return Err(SequenceError::EmptyPeriod);
            }
        }
        let seq = FirefighterSequence { kind, integral };
        seq.check(seq.defining_len())?;
        Ok(seq)
    }

    /// Explicit sequence for the fractional game. Panics on negative values.
    pub fn explicit(values: Vec<S>) -> Self {
        Self::new(SequenceKind::Explicit(values), false).expect("non-negative values")
    }

    /// Periodic sequence for the fractional game.
    pub fn periodic(pattern: Vec<S>) -> Self {
        Self::new(SequenceKind::Periodic(pattern), false).expect("non-negative pattern")
    }

    /// Constant sequence for the fractional game.
    pub fn constant(c: S) -> Self {
        Self::new(SequenceKind::Rule(Rule::Constant(c)), false).expect("non-negative constant")
    }

    /// Integral sequence from counts, zeros afterwards.
    pub fn from_counts(counts: &[u64]) -> Self {
        let values = counts.iter().map(|&c| S::from_count(c)).collect();
        Self::new(SequenceKind::Explicit(values), true).expect("counts are integral")
    }

    /// The same sequence played as the integral game.
    pub fn into_integral(self) -> Result<Self, SequenceError> {
        Self::new(self.kind, true)
    }

    /// The same sequence played as the fractional game.
    pub fn into_fractional(self) -> Self {
        FirefighterSequence { integral: false, ..self }
    }

    /// Whether the first `n` terms are all integers.
    pub fn has_integral_values(&self, n: usize) -> bool {
        (1..=n).all(|i| self.get(i).is_integral())
    }

    pub fn kind(&self) -> &SequenceKind<S> {
        &self.kind
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Number of terms that determine the sequence (explicit length, period,
    /// or a small probe window for rules).
    fn defining_len(&self) -> usize {
        match &self.kind {
            SequenceKind::Explicit(v) => v.len(),
            SequenceKind::Periodic(p) => p.len(),
            SequenceKind::Rule(_) => 64,
        }
    }

    /// Checks non-negativity and the integral flag on `f_1..f_n`.
    pub fn check(&self, n: usize) -> Result<(), SequenceError> {
        for i in 1..=n {
            let f = self.get(i);
            if f.is_negative() {
                return Err(SequenceError::Negative { index: i });
            }
            if self.integral && !f.is_integral() {
                return Err(SequenceError::NonIntegral { index: i });
            }
        }
        Ok(())
    }

    /// `f_i` for `i ≥ 1`.
    pub fn get(&self, i: usize) -> S {
        assert!(i >= 1, "sequences are indexed from 1");
        match &self.kind {
            SequenceKind::Explicit(v) => v.get(i - 1).cloned().unwrap_or_else(S::zero),
            SequenceKind::Periodic(p) => p[(i - 1) % p.len()].clone(),
            SequenceKind::Rule(Rule::Constant(c)) => c.clone(),
            SequenceKind::Rule(Rule::Linear(c)) => c.clone() * S::from_count(i as u64),
            SequenceKind::Rule(Rule::Geometric(c, r)) => {
                let mut v = c.clone();
                for _ in 1..i {
                    v = v * r.clone();
                }
                v
            }
        }
    }

    /// `[f_1, …, f_n]`.
    pub fn prefix(&self, n: usize) -> Vec<S> {
        (1..=n).map(|i| self.get(i)).collect()
    }

    /// `[S_0 = 0, S_1, …, S_n]`.
    pub fn prefix_sums(&self, n: usize) -> Vec<S> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(S::zero());
        let mut acc = S::zero();
        for i in 1..=n {
            acc = acc + self.get(i);
            out.push(acc.clone());
        }
        out
    }

    /// `S_n`.
    pub fn prefix_sum(&self, n: usize) -> S {
        (1..=n).fold(S::zero(), |acc, i| acc + self.get(i))
    }

    /// Whether every term past the explicit list is zero (so the sum is finite
    /// and known).
    pub fn is_finitely_supported(&self) -> bool {
        match &self.kind {
            SequenceKind::Explicit(_) => true,
            SequenceKind::Periodic(p) => p.iter().all(|x| x.is_zero()),
            SequenceKind::Rule(Rule::Constant(c)) | SequenceKind::Rule(Rule::Linear(c)) => c.is_zero(),
            SequenceKind::Rule(Rule::Geometric(c, _)) => c.is_zero(),
        }
    }

    /// Truncation to the first `n` terms as an explicit sequence.
    pub fn truncated(&self, n: usize) -> Self {
        FirefighterSequence { kind: SequenceKind::Explicit(self.prefix(n)), integral: self.integral }
    }

    /// `(f_{k+1}, f_{k+2}, …)`: the sequence seen after `k` turns.
    pub fn shifted(&self, k: usize) -> Self {
        let kind = match &self.kind {
            SequenceKind::Explicit(v) => SequenceKind::Explicit(v.iter().skip(k).cloned().collect()),
            SequenceKind::Periodic(p) => {
                let mut q = p.clone();
                q.rotate_left(k % p.len());
                SequenceKind::Periodic(q)
            }
            SequenceKind::Rule(Rule::Constant(c)) => SequenceKind::Rule(Rule::Constant(c.clone())),
            SequenceKind::Rule(Rule::Linear(_)) => {
                // no closed form kept; materialize a generous window
                SequenceKind::Explicit((k + 1..=k + 4096).map(|i| self.get(i)).collect())
            }
            SequenceKind::Rule(Rule::Geometric(_, r)) => {
                SequenceKind::Rule(Rule::Geometric(self.get(k + 1), r.clone()))
            }
        };
        FirefighterSequence { kind, integral: self.integral }
    }

    /// Exact-rational copy, used for reporting and serialization.
    pub fn to_rational(&self) -> FirefighterSequence<BigRational> {
        let conv = |v: &Vec<S>| v.iter().map(to_rational).collect();
        let kind = match &self.kind {
            SequenceKind::Explicit(v) => SequenceKind::Explicit(conv(v)),
            SequenceKind::Periodic(v) => SequenceKind::Periodic(conv(v)),
            SequenceKind::Rule(Rule::Constant(c)) => SequenceKind::Rule(Rule::Constant(to_rational(c))),
            SequenceKind::Rule(Rule::Linear(c)) => SequenceKind::Rule(Rule::Linear(to_rational(c))),
            SequenceKind::Rule(Rule::Geometric(c, r)) => {
                SequenceKind::Rule(Rule::Geometric(to_rational(c), to_rational(r)))
            }
        };
        FirefighterSequence { kind, integral: self.integral }
    }

    pub fn from_rational_sequence(seq: &FirefighterSequence<BigRational>) -> Self {
        let conv = |v: &Vec<BigRational>| v.iter().map(from_rational::<S>).collect();
        let kind = match &seq.kind {
            SequenceKind::Explicit(v) => SequenceKind::Explicit(conv(v)),
            SequenceKind::Periodic(v) => SequenceKind::Periodic(conv(v)),
            SequenceKind::Rule(Rule::Constant(c)) => SequenceKind::Rule(Rule::Constant(from_rational(c))),
            SequenceKind::Rule(Rule::Linear(c)) => SequenceKind::Rule(Rule::Linear(from_rational(c))),
            SequenceKind::Rule(Rule::Geometric(c, r)) => {
                SequenceKind::Rule(Rule::Geometric(from_rational(c), from_rational(r)))
            }
        };
        FirefighterSequence { kind, integral: seq.integral }
    }
}

/// JSON shape of a sequence. Values are `["num", "den"]` string pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub kind: String,
    pub values: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub integral: bool,
}

fn pair(v: &BigRational) -> [String; 2] {
    [v.numer().to_string(), v.denom().to_string()]
}

fn unpair(p: &[String; 2]) -> Result<BigRational, SequenceError> {
    parse_rational(&format!("{}/{}", p[0], p[1])).map_err(|e| SequenceError::Malformed(e.to_string()))
}

impl FirefighterSequence<BigRational> {
    pub fn to_file(&self) -> SequenceFile {
        let (kind, values, period, rule) = match &self.kind {
            SequenceKind::Explicit(v) => ("explicit", v.iter().map(pair).collect(), None, None),
            SequenceKind::Periodic(v) => ("periodic", v.iter().map(pair).collect(), Some(v.len()), None),
            SequenceKind::Rule(Rule::Constant(c)) => ("rule", vec![pair(c)], None, Some("constant")),
            SequenceKind::Rule(Rule::Linear(c)) => ("rule", vec![pair(c)], None, Some("linear")),
            SequenceKind::Rule(Rule::Geometric(c, r)) => {
                ("rule", vec![pair(c), pair(r)], None, Some("geometric"))
            }
        };
        SequenceFile {
            kind: kind.to_string(),
            values,
            period,
            rule: rule.map(str::to_string),
            integral: self.integral,
        }
    }

    pub fn from_file(file: &SequenceFile) -> Result<Self, SequenceError> {
        let values = file.values.iter().map(unpair).collect::<Result<Vec<_>, _>>()?;
        let kind = match file.kind.as_str() {
            "explicit" => SequenceKind::Explicit(values),
            "periodic" => {
                if let Some(p) = file.period {
                    if p != values.len() {
                        return Err(SequenceError::Malformed(format!(
                            "period {p} does not match {} values",
                            values.len()
                        )));
                    }
                }
                SequenceKind::Periodic(values)
            }
            "rule" => {
                let rule = file.rule.as_deref().unwrap_or("constant");
                match (rule, values.as_slice()) {
                    ("constant", [c]) => SequenceKind::Rule(Rule::Constant(c.clone())),
                    ("linear", [c]) => SequenceKind::Rule(Rule::Linear(c.clone())),
                    ("geometric", [c, r]) => SequenceKind::Rule(Rule::Geometric(c.clone(), r.clone())),
                    _ => return Err(SequenceError::Malformed(format!("bad rule {rule:?}"))),
                }
            }
            other => return Err(SequenceError::Malformed(format!("unknown kind {other:?}"))),
        };
        Self::new(kind, file.integral)
    }

    /// Terms rendered as `"num/den"` strings.
    pub fn prefix_strings(&self, n: usize) -> Vec<String> {
        self.prefix(n).iter().map(fraction_string).collect()
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
    fn explicit_pads_with_zeros() {
        let f = FirefighterSequence::explicit(vec![q(1, 1), q(0, 1), q(1, 1)]);
        assert_eq!(f.prefix(5), vec![q(1, 1), q(0, 1), q(1, 1), q(0, 1), q(0, 1)]);
        assert!(!f.is_integral());
        assert!(f.clone().into_integral().unwrap().is_integral());
        assert_eq!(f.prefix_sum(10), q(2, 1));
    }

    #[test]
    fn periodic_and_rules() {
        let f = FirefighterSequence::periodic(vec![q(1, 1), q(0, 1)]);
        assert_eq!(f.prefix_sums(4), vec![q(0, 1), q(1, 1), q(1, 1), q(2, 1), q(2, 1)]);
        let g = FirefighterSequence::new(SequenceKind::Rule(Rule::Geometric(q(1, 1), q(2, 1))), true).unwrap();
        assert_eq!(g.get(4), q(8, 1));
        let l = FirefighterSequence::new(SequenceKind::Rule(Rule::Linear(q(1, 2))), false).unwrap();
        assert_eq!(l.get(3), q(3, 2));
    }

    #[test]
    fn rejects_negative_and_fake_integral() {
        assert_eq!(
            FirefighterSequence::new(SequenceKind::Explicit(vec![q(1, 1), q(-1, 1)]), false),
            Err(SequenceError::Negative { index: 2 })
        );
        assert_eq!(
            FirefighterSequence::new(SequenceKind::Explicit(vec![q(1, 2)]), true),
            Err(SequenceError::NonIntegral { index: 1 })
        );
    }

    #[test]
    fn shifting() {
        let f = FirefighterSequence::periodic(vec![q(1, 1), q(0, 1), q(2, 1)]);
        assert_eq!(f.shifted(1).prefix(3), vec![q(0, 1), q(2, 1), q(1, 1)]);
        let g = FirefighterSequence::explicit(vec![q(0, 1), q(0, 1), q(3, 1)]);
        assert_eq!(g.shifted(2).prefix(2), vec![q(3, 1), q(0, 1)]);
    }

    #[test]
    fn json_round_trip() {
        for f in [
            FirefighterSequence::explicit(vec![q(3, 2), q(1, 1)]),
            FirefighterSequence::periodic(vec![q(1, 1), q(0, 1)]),
            FirefighterSequence::new(SequenceKind::Rule(Rule::Geometric(q(1, 1), q(2, 1))), true).unwrap(),
        ] {
            let file = f.to_file();
            let text = serde_json::to_string(&file).unwrap();
            let back: SequenceFile = serde_json::from_str(&text).unwrap();
            assert_eq!(FirefighterSequence::from_file(&back).unwrap(), f);
        }
        let text = r#"{"kind":"explicit","values":[["3","2"]],"integral":false}"#;
        let f = FirefighterSequence::from_file(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(f.get(1), q(3, 2));
    }

    #[test]
    fn generic_over_floats() {
        let f: FirefighterSequence<f64> = FirefighterSequence::periodic(vec![0.5, 1.0]);
        assert_eq!(f.prefix_sum(4), 3.0);
        assert!(f.into_integral().is_err());
    }
}
