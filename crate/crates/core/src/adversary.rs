//! Oblivious adversaries: every integral sequence under a total budget,
//! worst-case sweeps over instance families, and the experiments on the
//! `W_{k,l,m}` gadgets.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{play_game, saved_and_ratio};
use crate::offline::{
    beta_fractional, count_sequences, each_sparse, integral_optimum, worst_ratio_with, BetaOracle, OptError,
    RatioCase, RatioLimits, SearchLimits,
};
use crate::scalar::{fraction_string, to_rational, Scalar};
use crate::sequence::FirefighterSequence;
use crate::strategies::{FirstMoveFixed, Strategy, StrategyConfig, StrategyError};
use crate::tree::{gen_standard, w_gadget, Family, RootedTree, TreeError};

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("first-move branches need a W instance, got {0}")]
    NotAGadget(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl AdversaryError {
    pub fn is_guard(&self) -> bool {
        matches!(self, AdversaryError::Opt(e) if e.is_guard())
    }
}

/// Every sequence `(f_1, …, f_h)` of non-negative integers with total at
/// most `k`; with `limits.first_turn_positive`, only those with `f_1 > 0`.
pub fn enum_sequences(k: u64, h: usize, limits: &RatioLimits) -> Result<Vec<Vec<u64>>, OptError> {
    let count = count_sequences(k, h).filter(|&c| c <= limits.max_sequences).ok_or_else(|| {
        OptError::TooManySequences {
            count: count_sequences(k, h).map_or_else(|| "more than 2^64".into(), |c| c.to_string()),
            limit: limits.max_sequences,
        }
    })?;
    let mut out = Vec::with_capacity(count as usize);
    each_sparse(1, h, k, &mut Vec::new(), &mut |s| {
        if limits.first_turn_positive && s.first().is_none_or(|x| x.0 != 1) {
            return Ok(());
        }
        let mut f = vec![0; h];
        for &(t, c) in s {
            f[t - 1] = c;
        }
        out.push(f);
        Ok(())
    })?;
    Ok(out)
}

fn trimmed(f: &[u64]) -> Vec<u64> {
    let len = f.iter().rposition(|&c| c > 0).map_or(0, |p| p + 1);
    f[..len].to_vec()
}

fn evaluate<S: Scalar>(
    tree: &RootedTree,
    strategy: &mut dyn Strategy<S>,
    oracle: &BetaOracle,
    f: &[u64],
) -> Result<RatioCase<S>, OptError> {
    let seq = FirefighterSequence::<S>::from_counts(f);
    let saved = play_game(tree, &seq, strategy, None)?.saved;
    let sparse: Vec<(usize, u64)> =
        f.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i + 1, c)).collect();
    let opt = oracle.value(&sparse)?;
    let ratio = saved_and_ratio(&saved, &S::from_count(opt))?;
    Ok(RatioCase { sequence: trimmed(f), saved, opt, ratio })
}

fn worse<S: Scalar>(a: &RatioCase<S>, b: &RatioCase<S>) -> bool {
    match a.ratio.partial_cmp(&b.ratio) {
        Some(Ordering::Less) => true,
        Some(Ordering::Equal) => a.sequence < b.sequence,
        _ => false,
    }
}

fn fold_worst<S: Scalar>(cases: impl IntoIterator<Item = RatioCase<S>>) -> Option<RatioCase<S>> {
    cases.into_iter().fold(None, |best, c| match best {
        Some(b) if !worse(&c, &b) => Some(b),
        _ => Some(c),
    })
}

/// Worst case by playing every sequence from scratch, in parallel. The
/// reduction (smallest ratio, then smallest sequence) does not depend on
/// scheduling.
pub fn worst_ratio_flat<S: Scalar + Sync>(
    tree: &RootedTree,
    strategy: &dyn Strategy<S>,
    k: u64,
    limits: &RatioLimits,
) -> Result<RatioCase<S>, OptError> {
    let seqs = enum_sequences(k, tree.height(), limits)?;
    let oracle = BetaOracle::for_budget(tree, k, limits.search);
    let jobs: Vec<(Vec<u64>, Box<dyn Strategy<S>>)> = seqs.into_iter().map(|f| (f, strategy.clone_box())).collect();
    let cases: Vec<RatioCase<S>> = jobs
        .into_par_iter()
        .map(|(f, mut s)| evaluate(tree, s.as_mut(), &oracle, &f))
        .collect::<Result<_, _>>()?;
    fold_worst(cases).ok_or_else(|| OptError::Precondition("no sequence to try".into()))
}

/// Same minimum, visiting the sequences sequentially in a seeded random
/// order.
pub fn worst_ratio_shuffled<S: Scalar>(
    tree: &RootedTree,
    strategy: &dyn Strategy<S>,
    k: u64,
    limits: &RatioLimits,
    seed: u64,
) -> Result<RatioCase<S>, OptError> {
    let mut seqs = enum_sequences(k, tree.height(), limits)?;
    seqs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let oracle = BetaOracle::for_budget(tree, k, limits.search);
    let mut best: Option<RatioCase<S>> = None;
    for f in &seqs {
        let c = evaluate(tree, strategy.clone_box().as_mut(), &oracle, f)?;
        if best.as_ref().is_none_or(|b| worse(&c, b)) {
            best = Some(c);
        }
    }
    best.ok_or_else(|| OptError::Precondition("no sequence to try".into()))
}

/// Named adversary sequences for the `W` gadgets.
pub fn fixture(name: &str) -> Option<Vec<Vec<u64>>> {
    let pair = vec![1, 1];
    let alternate = vec![1, 0, 1];
    let burst = vec![1, 0, 1, 1, 1];
    match name {
        "w-pair" => Some(vec![pair]),
        "w-alternate" => Some(vec![alternate]),
        "w-burst" => Some(vec![burst]),
        "w" => Some(vec![pair, alternate, burst]),
        _ => None,
    }
}

/// Worst case over an explicit list of sequences; `β_I` by branch and bound
/// without the vertex guard.
pub fn ratio_on_sequences<S: Scalar>(
    tree: &RootedTree,
    strategy: &dyn Strategy<S>,
    seqs: &[Vec<u64>],
    search: &SearchLimits,
) -> Result<RatioCase<S>, OptError> {
    let oracle = BetaOracle::Search(tree, search.unlimited_vertices());
    let cases = seqs
        .iter()
        .map(|f| evaluate(tree, strategy.clone_box().as_mut(), &oracle, f))
        .collect::<Result<Vec<_>, _>>()?;
    fold_worst(cases).ok_or_else(|| OptError::Precondition("no sequence to try".into()))
}

/// Which sequences the adversary may use.
#[derive(Debug, Clone, PartialEq)]
pub enum Adversary {
    Exhaustive { budget: u64 },
    Fixed(Vec<Vec<u64>>),
}

impl Adversary {
    pub fn worst<S: Scalar>(
        &self,
        tree: &RootedTree,
        strategy: &dyn Strategy<S>,
        limits: &RatioLimits,
    ) -> Result<RatioCase<S>, OptError> {
        match self {
            Adversary::Exhaustive { budget } => worst_ratio_with(tree, strategy, *budget, limits),
            Adversary::Fixed(seqs) => ratio_on_sequences(tree, strategy, seqs, &limits.search),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Branch<S> {
    /// `"x"` or `"y"`.
    pub first_move: &'static str,
    pub worst: RatioCase<S>,
}

#[derive(Debug, Clone)]
pub struct AlphaRow<S> {
    pub instance: String,
    pub branches: Vec<Branch<S>>,
    /// Best first move and the worst case it guarantees.
    pub best_first_move: &'static str,
    pub value: S,
}

/// For each `W_{k,l,m}`, fixes the online player's first firefighter on
/// `x`, then on `y`, lets `strategy` play the rest, and records the
/// adversary's best answer to each. The instance value is the better of
/// the two.
pub fn alpha_experiment<S: Scalar>(
    params: &[(usize, usize, usize)],
    strategy: &StrategyConfig,
    adversary: &Adversary,
    limits: &RatioLimits,
) -> Result<Vec<AlphaRow<S>>, AdversaryError> {
    params
        .iter()
        .map(|&(k, l, m)| {
            let tree = gen_standard(&Family::W { k, l, m })?;
            let g = w_gadget(k, l, m);
            let mut branches = Vec::new();
            for (name, v) in [("x", g.x), ("y", g.y)] {
                let fixed = FirstMoveFixed::new(v, strategy.build::<S>()?);
                branches.push(Branch { first_move: name, worst: adversary.worst(&tree, &fixed, limits)? });
            }
            let best = branches
                .iter()
                .fold(&branches[0], |b, c| if c.worst.ratio > b.worst.ratio { c } else { b });
            Ok(AlphaRow {
                instance: Family::W { k, l, m }.label(),
                best_first_move: best.first_move,
                value: best.worst.ratio.clone(),
                branches: branches.clone(),
            })
        })
        .collect()
}

/// One line of a ratio report. Exact values are `"num/den"` strings; the
/// decimal column is for reading only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub strategy: String,
    pub branch: String,
    pub sequence: String,
    pub saved: String,
    pub beta_i: String,
    pub beta_f: String,
    pub ratio: String,
    pub ratio_decimal: String,
}

impl ReportRow {
    pub fn new<S: Scalar>(instance: &str, strategy: &str, branch: &str, case: &RatioCase<S>) -> Self {
        ReportRow {
            instance: instance.to_string(),
            strategy: strategy.to_string(),
            branch: branch.to_string(),
            sequence: sequence_string(&case.sequence),
            saved: fraction_string(&to_rational(&case.saved)),
            beta_i: case.opt.to_string(),
            beta_f: String::new(),
            ratio: fraction_string(&to_rational(&case.ratio)),
            ratio_decimal: format!("{:.6}", case.ratio.to_f64()),
        }
    }
}

/// `1,0,1`; the empty sequence is written `0`.
pub fn sequence_string(f: &[u64]) -> String {
    if f.is_empty() {
        return "0".into();
    }
    f.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String, AdversaryError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| AdversaryError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A reproducible sweep: instances, strategy, adversary budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub instances: Vec<Family>,
    pub strategy: StrategyConfig,
    pub budget: u64,
    /// Use a named fixture instead of exhaustive enumeration.
    #[serde(default)]
    pub fixtures: Option<String>,
    /// Split W instances by the online player's first move.
    #[serde(default)]
    pub first_moves: bool,
    /// Add `β_F` of each worst sequence.
    #[serde(default)]
    pub with_fractional: bool,
    #[serde(default)]
    pub first_turn_positive: bool,
}

pub fn run_manifest(manifest: &Manifest) -> Result<Vec<ReportRow>, AdversaryError> {
    let adversary = match &manifest.fixtures {
        Some(name) => Adversary::Fixed(fixture(name).ok_or_else(|| AdversaryError::UnknownFixture(name.clone()))?),
        None => Adversary::Exhaustive { budget: manifest.budget },
    };
    let limits = RatioLimits { first_turn_positive: manifest.first_turn_positive, ..Default::default() };
    let mut rows = Vec::new();
    for family in &manifest.instances {
        let tree = gen_standard(family)?;
        let base = manifest.strategy.build::<crate::Rational>()?;
        let mut runs: Vec<(&str, Box<dyn Strategy<crate::Rational>>)> = Vec::new();
        if manifest.first_moves {
            let Family::W { k, l, m } = *family else {
                return Err(AdversaryError::NotAGadget(family.label()));
            };
            let g = w_gadget(k, l, m);
            runs.push(("x", Box::new(FirstMoveFixed::new(g.x, base.clone()))));
            runs.push(("y", Box::new(FirstMoveFixed::new(g.y, base))));
        } else {
            runs.push(("", base));
        }
        for (branch, strategy) in runs {
            let case = adversary.worst(&tree, strategy.as_ref(), &limits)?;
            let mut row = ReportRow::new(&family.label(), &manifest.strategy.strategy, branch, &case);
            if manifest.with_fractional {
                let f = FirefighterSequence::from_counts(&case.sequence).into_fractional();
                row.beta_f = fraction_string(&beta_fractional(&tree, &f)?.value);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `β_I` for a dense count vector, without the vertex guard.
pub fn beta_counts(tree: &RootedTree, f: &[u64]) -> Result<u64, OptError> {
    Ok(integral_optimum(tree, f, &SearchLimits::default().unlimited_vertices())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{AlgoTwo, Greedy};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn enumeration_examples() {
        let l = RatioLimits::default();
        assert_eq!(enum_sequences(1, 2, &l).unwrap(), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(enum_sequences(2, 2, &l).unwrap().len(), 6);
        assert_eq!(enum_sequences(0, 4, &l).unwrap(), vec![vec![0; 4]]);
        let first = RatioLimits { first_turn_positive: true, ..l };
        assert_eq!(enum_sequences(2, 2, &first).unwrap(), vec![vec![1, 0], vec![1, 1], vec![2, 0]]);
        let tight = RatioLimits { max_sequences: 5, ..l };
        assert!(enum_sequences(2, 2, &tight).unwrap_err().is_guard());
    }

    #[test]
    fn three_evaluation_orders_agree() {
        let l = RatioLimits::default();
        for seed in 0..10 {
            let t = gen_standard(&Family::Random { n: 10, seed }).unwrap();
            for k in 1..=3 {
                let a = worst_ratio_with::<Rational>(&t, &Greedy, k, &l).unwrap();
                let b = worst_ratio_flat::<Rational>(&t, &Greedy, k, &l).unwrap();
                let c = worst_ratio_shuffled::<Rational>(&t, &Greedy, k, &l, seed).unwrap();
                assert_eq!(a, b);
                assert_eq!(a, c);
            }
        }
    }

    #[test]
    fn w_first_move_fixtures() {
        let t = gen_standard(&Family::W { k: 4, l: 901, m: 1001 }).unwrap();
        let g = w_gadget(4, 901, 1001);
        let x = FirstMoveFixed::new(g.x, Box::new(AlgoTwo::new()));
        let y = FirstMoveFixed::new(g.y, Box::new(AlgoTwo::new()));
        let s = SearchLimits::default();
        let wx = ratio_on_sequences::<Rational>(&t, &x, &fixture("w-pair").unwrap(), &s).unwrap();
        let wy = ratio_on_sequences::<Rational>(&t, &y, &fixture("w-burst").unwrap(), &s).unwrap();
        assert_eq!(wx.ratio, q(1151, 1901));
        assert_eq!(wy.ratio, q(1002, 1645));
    }

    #[test]
    fn report_formats() {
        let case = RatioCase { sequence: vec![1, 0, 1], saved: q(16, 1), opt: 24, ratio: q(2, 3) };
        let row = ReportRow::new("w_1_10_16", "algo2", "", &case);
        assert_eq!(row.ratio, "2/3");
        assert_eq!(row.saved, "16/1");
        assert_eq!(row.ratio_decimal, "0.666667");
        let csv = rows_to_csv(&[row]).unwrap();
        assert!(csv.starts_with("instance,strategy,branch,sequence,saved,beta_i,beta_f,ratio,ratio_decimal\n"));
        assert!(csv.contains("\"1,0,1\""));
    }

    #[test]
    fn manifest_with_fixtures() {
        let m: Manifest = serde_json::from_str(
            r#"{"instances":[{"kind":"w","k":10,"l":10000,"m":10001}],
                "strategy":{"strategy":"algo2"},"budget":2,"fixtures":"w-pair","first_moves":true}"#,
        )
        .unwrap();
        let rows = run_manifest(&m).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].branch, "x");
        assert_eq!(rows[0].ratio, "11/20");
    }
}
