//! Spherically symmetric trees with prescribed level growth on which a
//! given sequence cannot contain the fire.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::scalar::fraction_string;
use crate::sequence::{FirefighterSequence, Rule, SequenceKind};
use crate::Rational;

use super::SeparationError;

/// Target level sizes `t_i`, non-decreasing and unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelGrowth {
    /// `t_i = base^i`
    Power { base: u64 },
    /// `t_i = coeff·i^degree`
    Polynomial { coeff: u64, degree: u32 },
}

impl LevelGrowth {
    pub fn get(&self, i: usize) -> Option<u128> {
        match *self {
            LevelGrowth::Power { base } => (base as u128).checked_pow(i.try_into().ok()?),
            LevelGrowth::Polynomial { coeff, degree } => (i as u128).checked_pow(degree)?.checked_mul(coeff as u128),
        }
    }

    fn unbounded(&self) -> bool {
        match *self {
            LevelGrowth::Power { base } => base >= 2,
            LevelGrowth::Polynomial { coeff, degree } => coeff >= 1 && degree >= 1,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            LevelGrowth::Power { base } => format!("{base}^i"),
            LevelGrowth::Polynomial { coeff, degree } => format!("{coeff}*i^{degree}"),
        }
    }
}

/// `Σ_{i>m} f_i/t_i ≤ bound`, supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct TailWitness {
    pub m: usize,
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LosingCertificate {
    pub horizon: usize,
    /// `t_i/2 ≤ |T_i| ≤ t_i` held for every `N ≤ i ≤ horizon`.
    pub sizes_within_factor_two: bool,
    /// `max_n Σ_{i≤n} f_i/|T_i|` over the horizon; below 1 means `F_n > 0`.
    pub max_partial_sum: Rational,
    /// `min_n F_n` over the horizon.
    pub min_fire: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LosingInstance {
    pub m: usize,
    pub n: usize,
    pub tail_bound: Rational,
    /// `a_1..a_horizon`.
    pub degrees: Vec<u64>,
    pub level_sizes: Vec<u128>,
    pub certificate: LosingCertificate,
}

impl LosingInstance {
    pub fn to_json(&self) -> Value {
        json!({
            "M": self.m,
            "N": self.n,
            "tail_bound": fraction_string(&self.tail_bound),
            "a": {"prefix": self.degrees, "tail_rule": "floor_t_over_size"},
            "certificate": {
                "horizon": self.certificate.horizon,
                "sizes_within_factor_two": self.certificate.sizes_within_factor_two,
                "max_partial_sum": fraction_string(&self.certificate.max_partial_sum),
                "min_fire": fraction_string(&self.certificate.min_fire),
            },
        })
    }
}

fn int(x: u128) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// Upper bound on `Σ_{i>m} f_i/t_i` as a function of `m`, derived from the
/// rule behind `f` (or `None` when `m` is too small for the bound to apply).
type TailFn = Box<dyn Fn(usize) -> Option<Rational>>;

fn analytic_tail(t: LevelGrowth, f: &FirefighterSequence<Rational>) -> Result<TailFn, SeparationError> {
    let diverges = |why: &str| Err(SeparationError::Divergent(format!("sum of f_i/t_i with t_i = {}: {why}", t.describe())));
    if f.is_finitely_supported() {
        let terms: Vec<Rational> = match f.kind() {
            SequenceKind::Explicit(v) => v.clone(),
            _ => Vec::new(),
        };
        return Ok(Box::new(move |m| {
            let mut s = Rational::zero();
            for (idx, fi) in terms.iter().enumerate().skip(m) {
                s += fi / int(t.get(idx + 1)?);
            }
            Some(s)
        }));
    }
    if !t.unbounded() {
        return diverges("bounded levels");
    }
    let bounded_by = match f.kind() {
        SequenceKind::Rule(Rule::Constant(c)) => Some(c.clone()),
        SequenceKind::Periodic(p) => p.iter().max().cloned(),
        SequenceKind::Rule(Rule::Geometric(c, r)) if r.is_one() => Some(c.clone()),
        _ => None,
    };
    if let Some(c) = bounded_by {
        return match t {
            LevelGrowth::Power { base } => {
                let b = int(base as u128);
                Ok(Box::new(move |m| Some(&c / (pow(&b, m) * (&b - Rational::one())))))
            }
            LevelGrowth::Polynomial { coeff, degree } if degree >= 2 => {
                // Σ_{i>m} 1/i^d ≤ ∫_m^∞ x^{-d} dx
                Ok(Box::new(move |m| {
                    (m >= 1).then(|| &c / (int(coeff as u128) * int(degree as u128 - 1) * pow(&int(m as u128), degree as usize - 1)))
                }))
            }
            LevelGrowth::Polynomial { .. } => diverges("bounded terms over linear levels"),
        };
    }
    match f.kind() {
        SequenceKind::Rule(Rule::Geometric(c, r)) if r < &Rational::one() => {
            // t non-decreasing: Σ_{i>m} c r^{i−1}/t_i ≤ c r^m / ((1 − r) t_{m+1})
            let (c, r) = (c.clone(), r.clone());
            Ok(Box::new(move |m| Some(&c * pow(&r, m) / ((Rational::one() - &r) * int(t.get(m + 1)?)))))
        }
        SequenceKind::Rule(Rule::Geometric(c, r)) => match t {
            LevelGrowth::Power { base } if int(base as u128) > *r => {
                let (c, r, b) = (c.clone(), r.clone(), int(base as u128));
                Ok(Box::new(move |m| Some(&c * pow(&r, m) / (pow(&b, m) * (&b - &r)))))
            }
            _ => diverges("the ratio of f is at least the growth of t"),
        },
        SequenceKind::Rule(Rule::Linear(c)) => match t {
            LevelGrowth::Power { base } => {
                // Σ_{i>m} i x^i = x^{m+1}((m+1) − m x)/(1 − x)² with x = 1/b
                let x = Rational::new(BigInt::one(), BigInt::from(base));
                let c = c.clone();
                Ok(Box::new(move |m| {
                    let mm = int(m as u128);
                    let one = Rational::one();
                    Some(&c * pow(&x, m + 1) * (&mm + &one - &mm * &x) / pow(&(&one - &x), 2))
                }))
            }
            LevelGrowth::Polynomial { coeff, degree } if degree >= 3 => {
                let c = c.clone();
                Ok(Box::new(move |m| {
                    (m >= 1).then(|| &c / (int(coeff as u128) * int(degree as u128 - 2) * pow(&int(m as u128), degree as usize - 2)))
                }))
            }
            LevelGrowth::Polynomial { .. } => diverges("linear terms over at most quadratic levels"),
        },
        _ => Err(SeparationError::NeedsWitness("no closed-form tail for this sequence".into())),
    }
}

const MAX_M: usize = 1 << 20;

/// Builds `a_1 = t_N`, `a_i = 1` for `2 ≤ i ≤ N` and
/// `a_i = ⌊t_i/|T_{i−1}|⌋` afterwards, where `M` is the least index with
/// tail sum below ¼ and `N > M` the least index with `t_N > 4·S_M`. The
/// fire then keeps spreading: `Σ f_i/|T_i| < 1` forever.
pub fn losing_sst(
    t: LevelGrowth,
    f: &FirefighterSequence<Rational>,
    horizon: usize,
    witness: Option<TailWitness>,
) -> Result<LosingInstance, SeparationError> {
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    let (m, tail_bound) = match witness {
        Some(w) => {
            if w.bound >= quarter {
                return Err(SeparationError::NeedsWitness(format!(
                    "witness bound {} is not below 1/4",
                    fraction_string(&w.bound)
                )));
            }
            (w.m, w.bound)
        }
        None => {
            let tail = analytic_tail(t, f)?;
            let mut found = None;
            for m in 0..MAX_M {
                match tail(m) {
                    Some(b) if b < quarter => {
                        found = Some((m, b));
                        break;
                    }
                    Some(_) => {}
                    None if m > 0 => return Err(SeparationError::Overflow(m + 1)),
                    None => {}
                }
            }
            found.ok_or_else(|| SeparationError::NeedsWitness(format!("tail bound not below 1/4 by index {MAX_M}")))?
        }
    };
    if f.prefix(m.max(horizon)).iter().any(Signed::is_negative) {
        return Err(SeparationError::Certificate("negative sequence term".into()));
    }

    let s_m = f.prefix_sum(m);
    let four_s = Rational::from_integer(4.into()) * &s_m;
    let mut n = m + 1;
    loop {
        let tn = t.get(n).ok_or(SeparationError::Overflow(n))?;
        if int(tn) > four_s {
            break;
        }
        n += 1;
    }
    let horizon = horizon.max(n);

    let mut degrees = Vec::with_capacity(horizon);
    let mut sizes = Vec::with_capacity(horizon);
    let mut size: u128 = 1;
    for i in 1..=horizon {
        let a: u128 = match i {
            1 => t.get(n).ok_or(SeparationError::Overflow(n))?,
            i if i <= n => 1,
            i => t.get(i).ok_or(SeparationError::Overflow(i))? / size,
        };
        let a64 = u64::try_from(a).map_err(|_| SeparationError::Overflow(i))?;
        if a64 == 0 {
            return Err(SeparationError::Certificate(format!("a_{i} = 0: level sizes must not decrease")));
        }
        size = size.checked_mul(a).ok_or(SeparationError::Overflow(i))?;
        degrees.push(a64);
        sizes.push(size);
    }

    let mut within = true;
    let mut partial = Rational::zero();
    let mut max_partial = Rational::zero();
    let mut fire = Rational::one();
    let mut min_fire = Rational::one();
    for i in 1..=horizon {
        let ti = t.get(i).ok_or(SeparationError::Overflow(i))?;
        let s = sizes[i - 1];
        if i >= n && !(ti <= 2 * s && s <= ti) {
            within = false;
        }
        partial += f.get(i) / int(s);
        max_partial = max_partial.max(partial.clone());
        fire = int(degrees[i - 1] as u128) * fire - f.get(i);
        min_fire = min_fire.min(fire.clone());
    }
    let certificate =
        LosingCertificate { horizon, sizes_within_factor_two: within, max_partial_sum: max_partial, min_fire };
    if !certificate.sizes_within_factor_two || certificate.max_partial_sum >= Rational::one() {
        return Err(SeparationError::Certificate(format!(
            "size bounds {} and partial sums up to {}",
            certificate.sizes_within_factor_two,
            certificate.max_partial_sum.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(LosingInstance { m, n, tail_bound, degrees, level_sizes: sizes, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Sequence;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn powers_of_two() {
        let r = losing_sst(LevelGrowth::Power { base: 2 }, &Sequence::constant(q(1, 1)), 40, None).unwrap();
        assert_eq!((r.m, r.n), (3, 4));
        assert_eq!(r.tail_bound, q(1, 8));
        assert_eq!(&r.degrees[..7], &[16, 1, 1, 1, 2, 2, 2]);
        for i in 4..=40 {
            assert_eq!(r.level_sizes[i - 1], 1u128 << i);
        }
        assert!(r.certificate.min_fire > q(0, 1));
        assert!(r.certificate.max_partial_sum < q(1, 1));
    }

    #[test]
    fn harmonic_growth_diverges() {
        let t = LevelGrowth::Polynomial { coeff: 1, degree: 1 };
        assert!(matches!(losing_sst(t, &Sequence::constant(q(1, 1)), 20, None), Err(SeparationError::Divergent(_))));
    }

    #[test]
    fn zero_sequence_still_follows_the_rule() {
        let r = losing_sst(LevelGrowth::Power { base: 3 }, &Sequence::explicit(vec![]), 10, None).unwrap();
        assert_eq!((r.m, r.n), (0, 1));
        assert_eq!(r.degrees, vec![3; 10]);
    }

    #[test]
    fn other_rules() {
        let quad = LevelGrowth::Polynomial { coeff: 1, degree: 2 };
        let r = losing_sst(quad, &Sequence::constant(q(1, 1)), 60, None).unwrap();
        assert!(r.certificate.max_partial_sum < q(1, 1));
        let geo = Sequence::new(SequenceKind::Rule(Rule::Geometric(q(1, 1), q(3, 2))), false).unwrap();
        let r = losing_sst(LevelGrowth::Power { base: 2 }, &geo, 60, None).unwrap();
        assert!(r.certificate.min_fire > q(0, 1));
        let lin = Sequence::new(SequenceKind::Rule(Rule::Linear(q(1, 1))), false).unwrap();
        let r = losing_sst(LevelGrowth::Power { base: 2 }, &lin, 60, None).unwrap();
        assert!(r.certificate.max_partial_sum < q(1, 1));
        assert!(matches!(
            losing_sst(LevelGrowth::Power { base: 2 }, &Sequence::new(SequenceKind::Rule(Rule::Geometric(q(1, 1), q(2, 1))), false).unwrap(), 10, None),
            Err(SeparationError::Divergent(_))
        ));
    }

    #[test]
    fn user_witness() {
        let f = Sequence::constant(q(1, 1));
        let t = LevelGrowth::Power { base: 2 };
        let r = losing_sst(t, &f, 20, Some(TailWitness { m: 5, bound: q(1, 32) })).unwrap();
        assert_eq!(r.m, 5);
        assert!(losing_sst(t, &f, 20, Some(TailWitness { m: 1, bound: q(1, 2) })).is_err());
    }

    #[test]
    fn tail_bounds_dominate_partial_sums() {
        let f = Sequence::constant(q(1, 1));
        for t in [LevelGrowth::Power { base: 3 }, LevelGrowth::Polynomial { coeff: 2, degree: 3 }] {
            let tail = analytic_tail(t, &f).unwrap();
            for m in 1..6 {
                let exact: Rational = (m + 1..m + 70).map(|i| q(1, 1) / int(t.get(i).unwrap())).sum();
                assert!(exact <= tail(m).unwrap(), "{t:?} m={m}");
            }
        }
    }
}
