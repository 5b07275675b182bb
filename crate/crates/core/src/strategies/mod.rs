//! Playing strategies.
//!
//! A strategy is driven by the engine in two phases per turn: it is told
//! `f_i` through [`Strategy::observe`], then asked for an allocation on the
//! current level. Offline strategies additionally receive `f_1..f_h` when
//! the game starts; online ones never see future terms.

mod algo_two;
mod config;
mod greedy;
mod level_target;
mod linear_growth;

use thiserror::Error;

use crate::engine::{Allocation, GameState};
use crate::scalar::{min, Scalar};
use crate::tree::{RootedTree, VertexId};

pub use algo_two::{phi_test, AlgoTwo, PhiTest};
pub use config::{parse_strategy_spec, Sigma, StrategyConfig};
pub use greedy::{DegreeGreedy, EvenSpread, Greedy};
pub use level_target::{LevelTarget, LevelTargetPlan};
pub use linear_growth::{phase_length, LinearGrowth};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("invalid strategy configuration: {0}")]
    InvalidConfig(String),
    #[error("witness violated: {0}")]
    WitnessViolation(String),
    #[error("unknown strategy {0:?}")]
    Unknown(String),
}

pub trait Strategy<S: Scalar>: Send {
    fn name(&self) -> &'static str;

    /// Offline strategies are handed the whole sequence at the start.
    fn is_offline(&self) -> bool {
        false
    }

    fn start(&mut self, _tree: &RootedTree, _sequence: Option<&[S]>) -> Result<(), StrategyError> {
        Ok(())
    }

    fn observe(&mut self, _turn: usize, _f_i: &S) {}

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError>;

    fn clone_box(&self) -> Box<dyn Strategy<S>>;
}

impl<S: Scalar> Clone for Box<dyn Strategy<S>> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Vertices of the current level that can still take protection.
pub fn available<S: Scalar>(state: &GameState<S>, tree: &RootedTree) -> Vec<VertexId> {
    tree.level(state.turn())
        .iter()
        .copied()
        .filter(|&v| state.capacity(v).is_positive())
        .collect()
}

/// Walks `order`, giving each vertex as much as its capacity and the
/// remaining budget allow.
pub fn fill_in_order<S: Scalar>(
    state: &GameState<S>,
    order: impl IntoIterator<Item = VertexId>,
    budget: &S,
) -> Allocation<S> {
    let mut alloc = Allocation::new();
    let mut left = budget.clone();
    for v in order {
        if !left.is_positive() {
            break;
        }
        let cap = state.capacity(v);
        if !cap.is_positive() {
            continue;
        }
        let x = min(left.clone(), cap);
        left = left - x.clone();
        alloc.add(v, x);
    }
    alloc
}

/// Never protects anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Null;

impl<S: Scalar> Strategy<S> for Null {
    fn name(&self) -> &'static str {
        "null"
    }

    fn allocate(&mut self, _: &GameState<S>, _: &RootedTree, _: &S) -> Result<Allocation<S>, StrategyError> {
        Ok(Allocation::new())
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(*self)
    }
}

/// Plays a fixed list of allocations, one per turn; used to replay
/// transcripts and optimal witnesses.
#[derive(Debug, Clone)]
pub struct Scripted<S> {
    turns: Vec<Allocation<S>>,
}

impl<S: Scalar> Scripted<S> {
    pub fn new(turns: Vec<Allocation<S>>) -> Self {
        Scripted { turns }
    }

    /// Full protection on each listed vertex.
    pub fn from_vertices(turns: Vec<Vec<VertexId>>) -> Self {
        Scripted {
            turns: turns.into_iter().map(|vs| vs.into_iter().map(|v| (v, S::one())).collect()).collect(),
        }
    }
}

impl<S: Scalar> Strategy<S> for Scripted<S> {
    fn name(&self) -> &'static str {
        "scripted"
    }

    fn is_offline(&self) -> bool {
        true
    }

    fn allocate(&mut self, state: &GameState<S>, _: &RootedTree, _: &S) -> Result<Allocation<S>, StrategyError> {
        Ok(self.turns.get(state.turn() - 1).cloned().unwrap_or_default())
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(self.clone())
    }
}

/// Puts the very first firefighter on a chosen vertex, then defers to an
/// inner strategy. If the chosen vertex is not available when the first
/// firefighter shows up, the inner strategy decides that move too.
pub struct FirstMoveFixed<S> {
    target: VertexId,
    placed: bool,
    inner: Box<dyn Strategy<S>>,
}

impl<S: Scalar> FirstMoveFixed<S> {
    pub fn new(target: VertexId, inner: Box<dyn Strategy<S>>) -> Self {
        FirstMoveFixed { target, placed: false, inner }
    }
}

impl<S: Scalar> Strategy<S> for FirstMoveFixed<S> {
    fn name(&self) -> &'static str {
        "first_move_fixed"
    }

    fn start(&mut self, tree: &RootedTree, sequence: Option<&[S]>) -> Result<(), StrategyError> {
        self.placed = false;
        self.inner.start(tree, sequence)
    }

    fn observe(&mut self, turn: usize, f_i: &S) {
        self.inner.observe(turn, f_i);
    }

    fn allocate(
        &mut self,
        state: &GameState<S>,
        tree: &RootedTree,
        f_i: &S,
    ) -> Result<Allocation<S>, StrategyError> {
        let one = S::one();
        if self.placed || f_i < &one {
            return self.inner.allocate(state, tree, f_i);
        }
        self.placed = true;
        if tree.level_of(self.target) != state.turn() || !state.capacity(self.target).is_positive() {
            return self.inner.allocate(state, tree, f_i);
        }
        // the inner strategy sees the forced vertex as already gone
        let mut shadow = state.clone();
        shadow.force_protection(self.target, one.clone());
        let rest = self.inner.allocate(&shadow, tree, &(f_i.clone() - one.clone()))?;
        let mut alloc = rest;
        alloc.add(self.target, one);
        Ok(alloc)
    }

    fn clone_box(&self) -> Box<dyn Strategy<S>> {
        Box::new(FirstMoveFixed { target: self.target, placed: self.placed, inner: self.inner.clone_box() })
    }
}
