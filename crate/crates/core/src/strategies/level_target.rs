use crate::engine::{Allocation, GameState};
use crate::scalar::{fraction_string, lt, to_rational, Scalar};
use crate::tree::RootedTree;

use super::{available, fill_in_order, Sigma, Strategy, StrategyError};

/// Constants derived from the witnesses and the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTargetPlan {
    /// Least `N` with `Π_{i≤N} (1 + (S_σ(i) − S_σ(i−1)) / (C·S_σ(i))) > 2C`.
    pub n: usize,
    /// Least `h` with `S_σ(h) > 2·S_σ(N)`.
    pub h: usize,
    /// `σ(h)`: the level whose vertices the strategy tries to cut off, and
    /// the turn by which containment is guaranteed.
    pub target_level: usize,
}

/// Offline containment strategy for trees whose levels grow no faster than
/// the prefix sums: given `C` and an increasing `σ` with
/// `|T_σ(i)| ≤ C·S_σ(i)`, every turn it spends its budget on the level
/// vertices with the most unprotected descendants on level `σ(h)`
/// (a fractional knapsack, solved greedily).
#[derive(Debug, Clone)]
pub struct LevelTarget<S> {
    c: S,
    sigma: Sigma,
    plan: Option<LevelTargetPlan>,
    counts: Vec<u64>,
}

impl<S: Scalar> LevelTarget<S> {
    pub fn new(c: S, sigma: Sigma) -> Self {
        LevelTarget { c, sigma, plan: None, counts: Vec::new() }
    }

    pub fn plan(&self) -> Option<&LevelTargetPlan> {
        self.plan.as_ref()
    }

    /// Checks the witnesses on the first `f.len()` levels and derives
    /// `N`, `h` and the target level.
    pub fn compute_plan(&self, tree: &RootedTree, f: &[S]) -> Result<LevelTargetPlan, StrategyError> {
        let horizon = f.len().min(tree.height());
        let mut sums = vec![S::zero()];
        for x in f {
            let last = sums.last().expect("nonempty").clone();
            sums.push(last + x.clone());
        }
        let s_at = |i: usize| sums[i].clone();

        let mut i = 1;
        while let Some(level) = self.sigma.at(i).filter(|&l| l <= horizon) {
            let size = S::from_count(tree.level(level).len() as u64);
            let bound = self.c.clone() * s_at(level);
            if lt(&bound, &size) {
                return Err(StrategyError::WitnessViolation(format!(
                    "|T_{level}| = {} exceeds C·S_{level} = {}",
                    tree.level(level).len(),
                    fraction_string(&to_rational(&bound))
                )));
            }
            i += 1;
        }

        let two_c = self.c.clone() + self.c.clone();
        let mut product = S::one();
        let mut n = None;
        let mut i = 1;
        while let Some(level) = self.sigma.at(i).filter(|&l| l <= horizon) {
            let prev = self.sigma.at(i - 1).expect("σ(0) = 0");
            let s = s_at(level);
            if s.is_positive() {
                let step = (s.clone() - s_at(prev)) / (self.c.clone() * s);
                product = product * (S::one() + step);
            }
            if lt(&two_c, &product) {
                n = Some(i);
                break;
            }
            i += 1;
        }
        let n = n.ok_or_else(|| {
            StrategyError::InvalidConfig(format!("the product never exceeds 2C within {horizon} levels"))
        })?;
        let s_n = s_at(self.sigma.at(n).expect("found above"));
        let twice = s_n.clone() + s_n;
        let mut h = n + 1;
        loop {
            match self.sigma.at(h).filter(|&l| l <= horizon) {
                Some(level) if lt(&twice, &s_at(level)) => break,
                Some(_) => h += 1,
                None => {
                    return Err(StrategyError::InvalidConfig(format!(
                        "S_σ(h) never exceeds 2·S_σ(N) within {horizon} levels"
                    )))
                }
            }
        }
        let target_level = self.sigma.at(h).expect("found above");
        Ok(LevelTargetPlan { n, h, target_level })
    }
}

impl<S: Scalar> Strategy<S> for LevelTarget<S> {
    fn name(&self) -> &'static str {
        "level_target"
    }

    fn is_offline(&self) -> bool {
        true
    }

    fn start(&mut self, tree: &RootedTree, sequence: Option<&[S]>) -> Result<(), StrategyError> {
        let f = sequence.ok_or_else(|| StrategyError::InvalidConfig("needs the whole sequence".into()))?;
        let plan = self.compute_plan(tree, f)?;
        self.counts = tree.descendants_at_level(plan.target_level);
        self.plan = Some(plan);
        Ok(())
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
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
