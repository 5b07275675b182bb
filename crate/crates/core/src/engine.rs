//! Game semantics on rooted trees.
//!
//! The engine works in level normal form: at turn `i` protection may only be
//! placed on `T_i`, after which the fire spreads from `T_{i−1}` to `T_i`
//! following `b(v) = max(0, b(parent v) − p(v))`. On trees the fire can only
//! advance one level per turn, so a game lasts at most `h(T)` turns (on a
//! general graph the bound would be the eccentricity of the root).

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::{fraction_string, le, lt, to_rational, Scalar};
use crate::sequence::FirefighterSequence;
use crate::strategies::{Strategy, StrategyError};
use crate::tree::{RootedTree, VertexId};

/// Protection placed during one turn, kept sorted by vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<S> {
    entries: Vec<(VertexId, S)>,
}

impl<S> Default for Allocation<S> {
    fn default() -> Self {
        Allocation { entries: Vec::new() }
    }
}

impl<S: Scalar> Allocation<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `amount` on `v`, merging with anything already there. Zero
    /// amounts are dropped.
    pub fn add(&mut self, v: VertexId, amount: S) {
        if amount.is_zero() {
            return;
        }
        match self.entries.binary_search_by_key(&v, |e| e.0) {
            Ok(i) => {
                let cur = self.entries[i].1.clone();
                self.entries[i].1 = cur + amount;
            }
            Err(i) => self.entries.insert(i, (v, amount)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VertexId, S)> {
        self.entries.iter()
    }

    pub fn get(&self, v: VertexId) -> S {
        match self.entries.binary_search_by_key(&v, |e| e.0) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn total(&self) -> S {
        self.entries.iter().fold(S::zero(), |acc, (_, a)| acc + a.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

impl<S: Scalar> FromIterator<(VertexId, S)> for Allocation<S> {
    fn from_iter<I: IntoIterator<Item = (VertexId, S)>>(iter: I) -> Self {
        let mut a = Allocation::new();
        for (v, x) in iter {
            a.add(v, x);
        }
        a
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("turn {turn}: placed {used} but only {budget} available")]
    BudgetExceeded { turn: usize, used: String, budget: String },
    #[error("vertex {vertex}: own plus ancestral protection exceeds 1")]
    OverProtection { vertex: VertexId },
    #[error("vertex {vertex} is on level {level}, not on level {turn}")]
    WrongLevel { vertex: VertexId, level: usize, turn: usize },
    #[error("vertex {vertex}: integral game only allows 0 or 1")]
    NonIntegral { vertex: VertexId },
    #[error("vertex {vertex}: negative protection")]
    Negative { vertex: VertexId },
    #[error("vertex {vertex} does not exist")]
    UnknownVertex { vertex: VertexId },
    #[error("the fire is already contained")]
    AfterContainment,
}

/// Per-vertex game state.
///
/// `burning[v]` is `b(v)`, `protection[v]` the amount placed on `v` (its
/// cumulative protection; in normal form a vertex is only touched once) and
/// `ancestral[v]` is `P_p(v)`, the protection sitting on strict ancestors.
/// `ancestral` is filled in for `T_i` when turn `i` begins.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState<S> {
    turn: usize,
    burning: Vec<S>,
    protection: Vec<S>,
    ancestral: Vec<S>,
    contained: bool,
    saved: S,
    saved_before: Vec<S>,
}

impl<S: Scalar> GameState<S> {
    pub fn new(tree: &RootedTree) -> Self {
        let n = tree.n();
        let mut burning = vec![S::zero(); n];
        burning[tree.root()] = S::one();
        GameState {
            turn: 0,
            burning,
            protection: vec![S::zero(); n],
            ancestral: vec![S::zero(); n],
            contained: false,
            saved: S::zero(),
            saved_before: Vec::new(),
        }
    }

    /// Index of the current (or last completed) turn.
    pub fn turn(&self) -> usize {
        self.turn
    }

    pub fn contained(&self) -> bool {
        self.contained
    }

    /// `b(v)`.
    pub fn burning(&self, v: VertexId) -> &S {
        &self.burning[v]
    }

    /// Protection placed on `v` itself.
    pub fn protection(&self, v: VertexId) -> &S {
        &self.protection[v]
    }

    /// `P_p(v)`: protection on the strict ancestors of `v`.
    pub fn ancestral(&self, v: VertexId) -> &S {
        &self.ancestral[v]
    }

    /// How much more protection `v` can take under the ancestor constraint.
    pub fn capacity(&self, v: VertexId) -> S {
        S::one() - self.ancestral[v].clone() - self.protection[v].clone()
    }

    /// `Σ p(v)·w(v)` so far.
    pub fn saved(&self) -> &S {
        &self.saved
    }

    /// `Σ b(v)` over all vertices.
    pub fn burnt_mass(&self) -> S {
        self.burning.iter().fold(S::zero(), |acc, b| acc + b.clone())
    }

    /// Burning mass on level `i`.
    pub fn level_burning(&self, tree: &RootedTree, i: usize) -> S {
        tree.level(i).iter().fold(S::zero(), |acc, &v| acc + self.burning[v].clone())
    }

    /// Starts the next turn and fills `P_p` for the new level.
    pub fn begin_turn(&mut self, tree: &RootedTree) -> usize {
        self.turn += 1;
        self.saved_before.push(self.saved.clone());
        for &v in tree.level(self.turn) {
            let p = tree.parent(v).expect("level ≥ 1 has a parent");
            self.ancestral[v] = self.ancestral[p].clone() + self.protection[p].clone();
        }
        self.turn
    }

    /// Places an already validated allocation.
    pub fn apply(&mut self, tree: &RootedTree, alloc: &Allocation<S>) {
        for (v, a) in alloc.iter() {
            self.protection[*v] = self.protection[*v].clone() + a.clone();
            self.saved = self.saved.clone() + a.clone() * S::from_count(tree.weight(*v));
        }
    }

    /// Adds protection on `v` without scoring it. Strategies use this on a
    /// scratch copy to plan several placements within one turn.
    pub fn force_protection(&mut self, v: VertexId, amount: S) {
        self.protection[v] = self.protection[v].clone() + amount;
    }

    /// Undoes the current turn (its allocation and spread). Used by
    /// prefix-sharing searches.
    pub fn rewind_turn(&mut self, tree: &RootedTree) {
        assert!(self.turn > 0, "nothing to rewind");
        for &v in tree.level(self.turn) {
            self.burning[v] = S::zero();
            self.protection[v] = S::zero();
        }
        if let Some(s) = self.saved_before.pop() {
            self.saved = s;
        }
        self.contained = false;
        self.turn -= 1;
    }
}

/// Checks an allocation against the budget, the level normal form, the
/// ancestor constraint and, for the integral game, 0/1 amounts.
pub fn validate_move<S: Scalar>(
    state: &GameState<S>,
    tree: &RootedTree,
    alloc: &Allocation<S>,
    f_i: &S,
    integral: bool,
) -> Result<(), MoveError> {
    if state.contained {
        return Err(MoveError::AfterContainment);
    }
    let turn = state.turn;
    for (v, a) in alloc.iter() {
        let v = *v;
        if v >= tree.n() {
            return Err(MoveError::UnknownVertex { vertex: v });
        }
        if tree.level_of(v) != turn {
            return Err(MoveError::WrongLevel { vertex: v, level: tree.level_of(v), turn });
        }
        if a.is_negative() {
            return Err(MoveError::Negative { vertex: v });
        }
        if integral && !(a.is_zero() || a.is_one()) {
            return Err(MoveError::NonIntegral { vertex: v });
        }
        let after = a.clone() + state.protection[v].clone() + state.ancestral[v].clone();
        if !le(&after, &S::one()) {
            return Err(MoveError::OverProtection { vertex: v });
        }
    }
    let used = alloc.total();
    if lt(f_i, &used) {
        return Err(MoveError::BudgetExceeded {
            turn,
            used: fraction_string(&to_rational(&used)),
            budget: fraction_string(&to_rational(f_i)),
        });
    }
    Ok(())
}

/// Propagates the fire to the current level. Returns the burning mass that
/// reached it; the state is marked contained when that mass is zero.
pub fn spread<S: Scalar>(state: &mut GameState<S>, tree: &RootedTree) -> S {
    let i = state.turn;
    let mut mass = S::zero();
    for &v in tree.level(i) {
        let p = tree.parent(v).expect("level ≥ 1 has a parent");
        let b = state.burning[p].clone() - state.protection[v].clone();
        let b = if b.is_positive() { b } else { S::zero() };
        mass = mass + b.clone();
        state.burning[v] = b;
    }
    if !mass.is_positive() {
        state.contained = true;
    }
    mass
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnRecord<S> {
    pub turn: usize,
    pub allocation: Allocation<S>,
}

#[derive(Debug, Clone)]
pub struct GameOutcome<S> {
    /// `Σ p(v)·w(v)`.
    pub saved: S,
    pub turns_played: usize,
    pub contained: bool,
    pub transcript: Vec<TurnRecord<S>>,
    pub state: GameState<S>,
}

impl<S: Scalar> GameOutcome<S> {
    /// Saved mass computed the other way round, `n − Σ b(v)`.
    pub fn unburnt_mass(&self, tree: &RootedTree) -> S {
        S::from_count(tree.n() as u64) - self.state.burnt_mass()
    }

    /// Transcript as JSON: `[{turn, allocations: [[v, "num/den"], …]}, …]`.
    pub fn transcript_json(&self) -> Value {
        transcript_json(&self.transcript)
    }
}

pub fn transcript_json<S: Scalar>(transcript: &[TurnRecord<S>]) -> Value {
    Value::Array(
        transcript
            .iter()
            .map(|r| {
                let allocs: Vec<Value> = r
                    .allocation
                    .iter()
                    .map(|(v, a)| json!([v, fraction_string(&to_rational(a))]))
                    .collect();
                json!({ "turn": r.turn, "allocations": allocs })
            })
            .collect(),
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid move at turn {turn}: {source}")]
    Move { turn: usize, source: MoveError },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Plays `strategy` on `tree` against `seq` for at most `horizon` turns
/// (default `h(T)`).
///
/// Online strategies never see more than `f_1..f_i` at turn `i`; offline
/// ones receive `f_1..f_horizon` up front.
pub fn play_game<S: Scalar>(
    tree: &RootedTree,
    seq: &FirefighterSequence<S>,
    strategy: &mut dyn Strategy<S>,
    horizon: Option<usize>,
) -> Result<GameOutcome<S>, EngineError> {
    let horizon = horizon.unwrap_or(tree.height());
    let full = strategy.is_offline().then(|| seq.prefix(horizon));
    strategy.start(tree, full.as_deref())?;

    let integral = seq.is_integral();
    let mut state = GameState::new(tree);
    let mut transcript = Vec::new();
    for i in 1..=horizon {
        if tree.level(i).is_empty() {
            break;
        }
        state.begin_turn(tree);
        let f_i = seq.get(i);
        strategy.observe(i, &f_i);
        let alloc = strategy.allocate(&state, tree, &f_i)?;
        validate_move(&state, tree, &alloc, &f_i, integral)
            .map_err(|source| EngineError::Move { turn: i, source })?;
        state.apply(tree, &alloc);
        spread(&mut state, tree);
        transcript.push(TurnRecord { turn: i, allocation: alloc });
        if state.contained {
            break;
        }
    }
    let turns_played = state.turn;
    debug_assert!(turns_played <= tree.height());
    Ok(GameOutcome {
        saved: state.saved.clone(),
        turns_played,
        contained: state.contained,
        transcript,
        state,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("saved {saved} exceeds the claimed optimum {opt}")]
pub struct RatioError {
    pub saved: String,
    pub opt: String,
}

/// `saved / opt`, with ratio 1 when both are zero.
pub fn saved_and_ratio<S: Scalar>(saved: &S, opt: &S) -> Result<S, RatioError> {
    if lt(opt, saved) {
        return Err(RatioError {
            saved: fraction_string(&to_rational(saved)),
            opt: fraction_string(&to_rational(opt)),
        });
    }
    if opt.is_zero() {
        return Ok(S::one());
    }
    Ok(saved.clone() / opt.clone())
}

/// Replays an integral transcript under a stronger sequence, protecting
/// each recorded vertex as soon as enough firefighters have arrived. A
/// vertex due deeper than the current level is covered through its
/// ancestor on the current level, which saves a superset.
pub fn replay_under_stronger<S: Scalar>(
    tree: &RootedTree,
    transcript: &[TurnRecord<S>],
    stronger: &FirefighterSequence<S>,
) -> Result<GameOutcome<S>, EngineError> {
    let pending: Vec<VertexId> =
        transcript.iter().flat_map(|r| r.allocation.iter().map(|(v, _)| *v)).collect();
    let mut script: Vec<Vec<VertexId>> = Vec::new();
    let mut next = 0;
    let mut covered: Vec<VertexId> = Vec::new();
    for i in 1..=tree.height() {
        let mut budget = stronger.get(i).floor_count().unwrap_or(0);
        let mut turn = Vec::new();
        while budget > 0 && next < pending.len() {
            let v = pending[next];
            if tree.level_of(v) < i {
                // the stronger schedule never lags, so this cannot happen
                break;
            }
            next += 1;
            if covered.iter().any(|&c| tree.is_ancestor_or_self(c, v)) {
                continue;
            }
            let u = tree.ancestor_at_level(v, i).expect("v is at least as deep as level i");
            covered.push(u);
            turn.push(u);
            budget -= 1;
        }
        script.push(turn);
    }
    let mut strategy = crate::strategies::Scripted::from_vertices(script);
    play_game(tree, stronger, &mut strategy, None)
}
