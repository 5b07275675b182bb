//! Firefighter and fractional firefighter games on rooted trees.
//!
//! The crate is organised bottom-up: [`tree`] holds finite and lazily
//! generated trees, [`engine`] the game rules, [`strategies`] the playing
//! strategies, [`offline`] the exact optima, [`adversary`] the worst-case
//! sweeps and [`separation`] the constructions on spherically symmetric
//! trees. Numeric code is generic over [`Scalar`]; exact rationals are the
//! default.

pub mod adversary;
pub mod engine;
pub mod offline;
pub mod scalar;
pub mod separation;
pub mod sequence;
pub mod strategies;
pub mod tree;

pub use num_rational::BigRational;
pub use scalar::Scalar;

/// Exact rational scalar used by default throughout.
pub type Rational = BigRational;

pub type Sequence = sequence::FirefighterSequence<Rational>;
pub type State = engine::GameState<Rational>;
pub type Outcome = engine::GameOutcome<Rational>;
