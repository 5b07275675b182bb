//! Exact offline optima and worst-case ratios.
//!
//! [`beta_integral`] searches 0/1 allocations with branch and bound,
//! [`beta_fractional`] solves the linear relaxation exactly, and
//! [`bob_two`] handles budgets of at most two firefighters in near-linear
//! time. [`worst_ratio`] runs an online strategy against every integral
//! sequence with a bounded total.

mod bob_two;
mod branch_bound;
mod fractional;
pub mod simplex;
mod worst;

use thiserror::Error;

use crate::engine::{play_game, EngineError, RatioError, TurnRecord};
use crate::scalar::{fraction_string, le, to_rational, Scalar};
use crate::sequence::FirefighterSequence;
use crate::strategies::Scripted;
use crate::tree::{RootedTree, VertexId};

pub use bob_two::{bob_two, BobTwo};
pub use branch_bound::{beta_integral, beta_integral_with, integral_optimum, SearchLimits};
pub use fractional::beta_fractional;
pub use worst::{
    count_sequences, densify, for_each_case, worst_ratio, worst_ratio_with, BetaOracle, RatioCase, RatioLimits,
    SparseSequence,
};
pub(crate) use worst::each_sparse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptError {
    #[error("tree has {n} vertices, above the limit of {limit}")]
    TooManyVertices { n: usize, limit: usize },
    #[error("search explored more than {0} nodes")]
    TooManyNodes(u64),
    #[error("{count} sequences to enumerate, above the limit of {limit}")]
    TooManySequences { count: String, limit: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("the witness replays to {replayed}, not {claimed}")]
    Replay { claimed: String, replayed: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ratio(#[from] RatioError),
}

impl OptError {
    /// True for the errors raised by size guards.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            OptError::TooManyVertices { .. } | OptError::TooManyNodes(_) | OptError::TooManySequences { .. }
        )
    }
}

/// An optimum with the allocations achieving it.
#[derive(Debug, Clone)]
pub struct OptResult<S> {
    pub value: S,
    pub witness: Vec<TurnRecord<S>>,
    pub nodes_explored: u64,
}

impl<S: Scalar> OptResult<S> {
    /// Replays the witness through the engine and checks the saved mass.
    pub fn verify(&self, tree: &RootedTree, seq: &FirefighterSequence<S>) -> Result<(), OptError> {
        let mut turns = Vec::new();
        for r in &self.witness {
            if turns.len() < r.turn {
                turns.resize(r.turn, Default::default());
            }
            turns[r.turn - 1] = r.allocation.clone();
        }
        let mut script = Scripted::new(turns);
        let out = play_game(tree, seq, &mut script, None)?;
        if !(le(&out.saved, &self.value) && le(&self.value, &out.saved)) {
            return Err(OptError::Replay {
                claimed: fraction_string(&to_rational(&self.value)),
                replayed: fraction_string(&to_rational(&out.saved)),
            });
        }
        Ok(())
    }
}

/// Integral counts `f_1..f_h` of a sequence over the tree's height.
pub(crate) fn integral_counts<S: Scalar>(
    tree: &RootedTree,
    seq: &FirefighterSequence<S>,
) -> Result<Vec<u64>, OptError> {
    (1..=tree.height())
        .map(|i| {
            let x = seq.get(i);
            if !x.is_integral() {
                return Err(OptError::Precondition(format!(
                    "f_{i} = {} is not an integer",
                    fraction_string(&to_rational(&x))
                )));
            }
            x.floor_count().ok_or_else(|| OptError::Precondition(format!("f_{i} is negative")))
        })
        .collect()
}

/// Turns per-level vertex picks into a transcript with full protection.
pub(crate) fn picks_to_witness<S: Scalar>(picks: &[(usize, Vec<VertexId>)]) -> Vec<TurnRecord<S>> {
    picks
        .iter()
        .filter(|(_, vs)| !vs.is_empty())
        .map(|(turn, vs)| TurnRecord { turn: *turn, allocation: vs.iter().map(|&v| (v, S::one())).collect() })
        .collect()
}
