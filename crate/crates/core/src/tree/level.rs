use std::fmt;
use std::sync::Arc;

use super::{RootedTree, TreeError, VertexId};

/// Default cap on the number of vertices a [`LevelTree`] may materialize.
pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

/// The child counts `a_1, a_2, …` of a spherically symmetric tree.
#[derive(Clone)]
pub enum DegreeSequence {
    Constant(u64),
    /// Explicit prefix; the last entry repeats forever.
    Explicit(Vec<u64>),
    /// `a_i` as a function of `i ≥ 1`.
    Computed(Arc<dyn Fn(usize) -> u64 + Send + Sync>),
}

impl DegreeSequence {
    /// `a_i` for `i ≥ 1`.
    pub fn get(&self, i: usize) -> u64 {
        match self {
            DegreeSequence::Constant(a) => *a,
            DegreeSequence::Explicit(v) => match v.get(i - 1).or(v.last()) {
                Some(a) => *a,
                None => 0,
            },
            DegreeSequence::Computed(f) => f(i),
        }
    }
}

impl fmt::Debug for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeSequence::Constant(a) => write!(f, "Constant({a})"),
            DegreeSequence::Explicit(v) => write!(f, "Explicit({v:?})"),
            DegreeSequence::Computed(_) => write!(f, "Computed(..)"),
        }
    }
}

/// How many children each vertex gets. Arguments of `Custom` are the level
/// `i` of the children being created, the index of the parent inside level
/// `i − 1`, and the size of level `i − 1`.
#[derive(Clone)]
pub enum ChildRule {
    SphericallySymmetric(DegreeSequence),
    /// The first vertex of each level has two children, every other one.
    Spider,
    /// `w` children at the root, one child everywhere else: `|T_i| = w`.
    ConstantWidth(u64),
    Custom(Arc<dyn Fn(usize, usize, usize) -> u64 + Send + Sync>),
    /// A fixed prefix; `counts[i − 1][j]` is the number of children of the
    /// `j`-th vertex of level `i − 1`. Nothing exists past its depth.
    Frozen(Arc<Vec<Vec<u64>>>),
}

impl fmt::Debug for ChildRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChildRule::SphericallySymmetric(a) => write!(f, "SphericallySymmetric({a:?})"),
            ChildRule::Spider => write!(f, "Spider"),
            ChildRule::ConstantWidth(w) => write!(f, "ConstantWidth({w})"),
            ChildRule::Custom(_) => write!(f, "Custom(..)"),
            ChildRule::Frozen(c) => write!(f, "Frozen(depth {})", c.len()),
        }
    }
}

/// A locally finite, possibly infinite rooted tree generated level by level.
///
/// Vertices get ids in breadth-first order, so every level is a contiguous
/// id range listed in ascending order and children of earlier parents come
/// first. Materializing deeper only appends.
#[derive(Debug, Clone)]
pub struct LevelTree {
    rule: ChildRule,
    parent: Vec<Option<VertexId>>,
    level_start: Vec<usize>,
    cap: usize,
}

impl LevelTree {
    pub fn new(rule: ChildRule) -> Self {
        LevelTree { rule, parent: vec![None], level_start: vec![0, 1], cap: DEFAULT_VERTEX_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn spherically_symmetric(a: DegreeSequence) -> Self {
        Self::new(ChildRule::SphericallySymmetric(a))
    }

    pub fn rule(&self) -> &ChildRule {
        &self.rule
    }

    /// The degree sequence when the tree is spherically symmetric.
    pub fn degrees(&self) -> Option<&DegreeSequence> {
        match &self.rule {
            ChildRule::SphericallySymmetric(a) => Some(a),
            _ => None,
        }
    }

    /// Deepest level generated so far.
    pub fn materialized_depth(&self) -> usize {
        self.level_start.len() - 2
    }

    fn children_count(&self, level: usize, idx: usize, width: usize) -> Result<u64, TreeError> {
        let count = match &self.rule {
            ChildRule::SphericallySymmetric(a) => {
                let ai = a.get(level);
                if ai == 0 {
                    return Err(TreeError::NonPositiveDegree { level });
                }
                ai
            }
            ChildRule::Spider => {
                if idx == 0 {
                    2
                } else {
                    1
                }
            }
            ChildRule::ConstantWidth(w) => {
                if level == 1 {
                    *w
                } else {
                    1
                }
            }
            ChildRule::Custom(f) => f(level, idx, width),
            ChildRule::Frozen(counts) => match counts.get(level - 1) {
                Some(row) => row.get(idx).copied().unwrap_or(0),
                None => return Err(TreeError::PrefixExhausted { depth: counts.len() }),
            },
        };
        Ok(count)
    }

    /// Generates every level up to and including `depth`.
    pub fn materialize(&mut self, depth: usize) -> Result<(), TreeError> {
        while self.materialized_depth() < depth {
            let level = self.materialized_depth() + 1;
            let (lo, hi) = self.level_range(level - 1);
            let width = hi - lo;
            for (idx, v) in (lo..hi).enumerate() {
                let k = self.children_count(level, idx, width)? as usize;
                if self.parent.len() + k > self.cap {
                    return Err(TreeError::TooLarge { cap: self.cap });
                }
                self.parent.extend(std::iter::repeat_n(Some(v), k));
            }
            self.level_start.push(self.parent.len());
        }
        Ok(())
    }

    fn level_range(&self, i: usize) -> (usize, usize) {
        (self.level_start[i], self.level_start[i + 1])
    }

    /// `|T_i|`, materializing as needed.
    pub fn level_size(&mut self, i: usize) -> Result<usize, TreeError> {
        self.materialize(i)?;
        let (lo, hi) = self.level_range(i);
        Ok(hi - lo)
    }

    /// `|T_i|` from the degree product, without materializing. Only for
    /// spherically symmetric trees; `None` on overflow or other rules.
    pub fn analytic_level_size(&self, i: usize) -> Option<u128> {
        let a = self.degrees()?;
        (1..=i).try_fold(1u128, |acc, j| acc.checked_mul(a.get(j) as u128))
    }

    /// The finite tree made of levels `0..=depth`.
    pub fn prefix(&mut self, depth: usize) -> Result<RootedTree, TreeError> {
        self.materialize(depth)?;
        let end = self.level_start[depth + 1];
        RootedTree::from_parent_array(0, self.parent[..end].to_vec())
    }

    /// Child counts of the first `depth` levels, in the layout of
    /// [`ChildRule::Frozen`].
    fn child_counts(&mut self, depth: usize) -> Result<Vec<Vec<u64>>, TreeError> {
        self.materialize(depth)?;
        let mut counts = Vec::with_capacity(depth);
        for i in 1..=depth {
            let (plo, phi) = self.level_range(i - 1);
            let mut row = vec![0u64; phi - plo];
            let (lo, hi) = self.level_range(i);
            for v in lo..hi {
                row[self.parent[v].expect("non-root") - plo] += 1;
            }
            counts.push(row);
        }
        Ok(counts)
    }
}

/// `T((a_i))` with its first `depth` levels generated and `|T_i| = Π a_j`
/// checked on them.
pub fn gen_spherically_symmetric(a: DegreeSequence, depth: usize) -> Result<LevelTree, TreeError> {
    let mut t = LevelTree::spherically_symmetric(a);
    t.materialize(depth)?;
    for i in 0..=depth {
        let expected = t.analytic_level_size(i);
        let actual = t.level_size(i)? as u128;
        if expected != Some(actual) {
            return Err(TreeError::LevelSizeMismatch { level: i });
        }
    }
    Ok(t)
}

/// Removes, inside the first `depth` levels, every vertex with no
/// descendant on level `depth`. The result is frozen at that depth.
pub fn prune_to_leafless(t: &mut LevelTree, depth: usize) -> Result<LevelTree, TreeError> {
    let counts = t.child_counts(depth)?;
    // alive[i][j]: vertex j of level i reaches level `depth`
    let mut alive: Vec<Vec<bool>> = vec![Vec::new(); depth + 1];
    alive[depth] = vec![true; t.level_size(depth)?];
    for i in (0..depth).rev() {
        let mut next = 0;
        alive[i] = counts[i]
            .iter()
            .map(|&k| {
                let k = k as usize;
                let any = alive[i + 1][next..next + k].iter().any(|&a| a);
                next += k;
                any
            })
            .collect();
    }
    if !alive[0][0] {
        return Err(TreeError::NoInfiniteBranch { depth });
    }
    let mut pruned = Vec::with_capacity(depth);
    for i in 0..depth {
        let mut next = 0;
        let mut row = Vec::new();
        for (j, &k) in counts[i].iter().enumerate() {
            let k = k as usize;
            if alive[i][j] {
                row.push(alive[i + 1][next..next + k].iter().filter(|&&a| a).count() as u64);
            }
            next += k;
        }
        pruned.push(row);
    }
    let mut out = LevelTree::new(ChildRule::Frozen(Arc::new(pruned))).with_cap(t.cap);
    out.materialize(depth)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(t: &mut LevelTree, depth: usize) -> Vec<usize> {
        (0..=depth).map(|i| t.level_size(i).unwrap()).collect()
    }

    #[test]
    fn binary_prefix() {
        let mut t = gen_spherically_symmetric(DegreeSequence::Constant(2), 3).unwrap();
        assert_eq!(t.level_size(3).unwrap(), 8);
        assert_eq!(t.prefix(3).unwrap().n(), 15);
    }

    #[test]
    fn explicit_degrees_repeat_last() {
        let a = DegreeSequence::Explicit(vec![16, 1, 1, 1, 2]);
        let mut t = gen_spherically_symmetric(a, 5).unwrap();
        assert_eq!(t.level_size(5).unwrap(), 32);
        assert_eq!(t.level_size(6).unwrap(), 64);
    }

    #[test]
    fn f_plus_one_degrees() {
        // f ≡ 1 gives a_i = 2
        let a = DegreeSequence::Computed(Arc::new(|_| 1 + 1));
        let t = gen_spherically_symmetric(a, 6).unwrap();
        for i in 0..=6 {
            assert_eq!(t.analytic_level_size(i), Some(1 << i));
        }
    }

    #[test]
    fn zero_degree_rejected() {
        let a = DegreeSequence::Explicit(vec![2, 0]);
        assert_eq!(gen_spherically_symmetric(a, 3).unwrap_err(), TreeError::NonPositiveDegree { level: 2 });
    }

    #[test]
    fn materialization_only_extends() {
        let mut t = LevelTree::new(ChildRule::Spider);
        let shallow = t.prefix(3).unwrap();
        let deep = t.prefix(6).unwrap();
        assert_eq!(deep.levels()[..4].iter().flatten().count(), shallow.n());
        for v in 0..shallow.n() {
            assert_eq!(shallow.parent(v), deep.parent(v));
        }
        assert_eq!(sizes(&mut t, 6), vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn constant_width() {
        let mut t = LevelTree::new(ChildRule::ConstantWidth(2));
        assert_eq!(sizes(&mut t, 4), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn cap_guards_runaway_growth() {
        let mut t = LevelTree::spherically_symmetric(DegreeSequence::Constant(10)).with_cap(1000);
        assert_eq!(t.materialize(5), Err(TreeError::TooLarge { cap: 1000 }));
    }

    #[test]
    fn pruning_leaves_symmetric_trees_alone() {
        let mut t = LevelTree::spherically_symmetric(DegreeSequence::Constant(2));
        let mut p = prune_to_leafless(&mut t, 4).unwrap();
        assert_eq!(p.prefix(4).unwrap(), t.prefix(4).unwrap());
        let mut path = LevelTree::new(ChildRule::ConstantWidth(1));
        let mut q = prune_to_leafless(&mut path, 5).unwrap();
        assert_eq!(q.prefix(5).unwrap(), path.prefix(5).unwrap());
    }

    #[test]
    fn pruning_removes_graft() {
        // binary tree plus one extra leaf under the first level-1 vertex
        let rule = ChildRule::Custom(Arc::new(|level, idx, _| match (level, idx) {
            (2, 0) => 3,
            (3, 2) => 0,
            _ => 2,
        }));
        let mut t = LevelTree::new(rule);
        assert_eq!(sizes(&mut t, 2), vec![1, 2, 5]);
        let mut p = prune_to_leafless(&mut t, 4).unwrap();
        assert_eq!(sizes(&mut p, 4), vec![1, 2, 4, 8, 16]);
        assert!(matches!(p.materialize(5), Err(TreeError::PrefixExhausted { .. })));
    }

    #[test]
    fn pruning_needs_a_deep_branch() {
        let rule = ChildRule::Custom(Arc::new(|level, _, _| if level < 3 { 1 } else { 0 }));
        let mut t = LevelTree::new(rule);
        assert_eq!(prune_to_leafless(&mut t, 4).unwrap_err(), TreeError::NoInfiniteBranch { depth: 4 });
    }
}
