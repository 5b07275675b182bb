//! Rooted trees: finite trees with precomputed levels and weights, the
//! generated instance families, and lazily generated infinite trees.

mod families;
mod io;
mod level;
mod rooted;

use thiserror::Error;

pub use families::{gen_standard, gen_w_klm, w_gadget, Family, WGadget};
pub use io::TreeFile;
pub use level::{
    gen_spherically_symmetric, prune_to_leafless, ChildRule, DegreeSequence, LevelTree,
    DEFAULT_VERTEX_CAP,
};
pub use rooted::{build_tree, RootedTree};

pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a tree on {n} vertices")]
    OutOfRange { vertex: VertexId, n: usize },
    #[error("the root {0} cannot have a parent")]
    RootHasParent(VertexId),
    #[error("vertex {0} has two parents")]
    DuplicateParent(VertexId),
    #[error("vertex {0} is not connected to the root")]
    Disconnected(VertexId),
    #[error("cycle through vertex {0}")]
    Cycle(VertexId),
    #[error("cannot contract {k} levels of a tree of height {height}")]
    ContractionTooDeep { k: usize, height: usize },
    #[error("vertex {vertex} sits on level {vertex_level}, above requested level {level}")]
    LevelAboveVertex { vertex: VertexId, vertex_level: usize, level: usize },
    #[error("W_{{{k},{l},{m}}} needs k >= 1, l >= 2 and k | m-1")]
    InvalidGadget { k: usize, l: usize, m: usize },
    #[error("degree a_{level} must be positive")]
    NonPositiveDegree { level: usize },
    #[error("level {level} size differs from the degree product")]
    LevelSizeMismatch { level: usize },
    #[error("materialization would exceed {cap} vertices")]
    TooLarge { cap: usize },
    #[error("the tree is only defined down to level {depth}")]
    PrefixExhausted { depth: usize },
    #[error("no branch reaches level {depth}")]
    NoInfiniteBranch { depth: usize },
}
