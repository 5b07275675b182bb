use std::collections::HashMap;

use super::{Family, TreeError, VertexId};

/// A finite rooted tree with every structural quantity the games need
/// precomputed: levels, subtree weights, subtree heights and a preorder
/// numbering for O(1) ancestor tests.
///
/// Vertex ids are dense (`0..n`). Within a level vertices are listed in
/// ascending id order, which is the tie-break used everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
    levels: Vec<Vec<VertexId>>,
    weight: Vec<u64>,
    subtree_height: Vec<usize>,
    enter: Vec<usize>,
    exit: Vec<usize>,
    family: Option<Family>,
}

impl RootedTree {
    /// Builds a tree on `0..n` from `(child, parent)` pairs.
    pub fn from_edges(
        n: usize,
        root: VertexId,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root >= n {
            return Err(TreeError::OutOfRange { vertex: root, n });
        }
        let mut parent = vec![None; n];
        for &(child, p) in edges {
            for v in [child, p] {
                if v >= n {
                    return Err(TreeError::OutOfRange { vertex: v, n });
                }
            }
            if child == root {
                return Err(TreeError::RootHasParent(root));
            }
            if child == p {
                return Err(TreeError::Cycle(child));
            }
            if parent[child].replace(p).is_some() {
                return Err(TreeError::DuplicateParent(child));
            }
        }
        Self::from_parent_array(root, parent)
    }

    /// Builds a tree from a parent array (`None` exactly at the root).
    pub fn from_parent_array(
        root: VertexId,
        parent: Vec<Option<VertexId>>,
    ) -> Result<Self, TreeError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root >= n {
            return Err(TreeError::OutOfRange { vertex: root, n });
        }
        if parent[root].is_some() {
            return Err(TreeError::RootHasParent(root));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if v != root => return Err(TreeError::Disconnected(v)),
                None => {}
                Some(p) if *p >= n => return Err(TreeError::OutOfRange { vertex: *p, n }),
                Some(p) => children[*p].push(v),
            }
        }

        // breadth-first from the root; anything left unreached sits on a cycle
        let mut depth = vec![usize::MAX; n];
        let mut levels: Vec<Vec<VertexId>> = vec![vec![root]];
        depth[root] = 0;
        loop {
            let last = levels.last().expect("at least the root level");
            let mut next: Vec<VertexId> =
                last.iter().flat_map(|&v| children[v].iter().copied()).collect();
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            let d = levels.len();
            for &v in &next {
                depth[v] = d;
            }
            levels.push(next);
        }
        if let Some(v) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(TreeError::Cycle(v));
        }

        let mut weight = vec![1u64; n];
        let mut subtree_height = vec![0usize; n];
        for level in levels.iter().rev() {
            for &v in level {
                if let Some(p) = parent[v] {
                    weight[p] += weight[v];
                    subtree_height[p] = subtree_height[p].max(subtree_height[v] + 1);
                }
            }
        }

        let (enter, exit) = preorder_intervals(root, &children);

        Ok(Self {
            root,
            parent,
            children,
            depth,
            levels,
            weight,
            subtree_height,
            enter,
            exit,
            family: None,
        })
    }

    pub(crate) fn with_family(mut self, family: Family) -> Self {
        self.family = Some(family);
        self
    }

    /// The generator parameters this tree came from, if any.
    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn level_of(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// `T_i`, empty past the height.
    pub fn level(&self, i: usize) -> &[VertexId] {
        self.levels.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn levels(&self) -> &[Vec<VertexId>] {
        &self.levels
    }

    /// `h(T)`: the deepest nonempty level.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    /// Number of vertices of `T[v]`.
    pub fn weight(&self, v: VertexId) -> u64 {
        self.weight[v]
    }

    /// `h(T[v])`.
    pub fn subtree_height(&self, v: VertexId) -> usize {
        self.subtree_height[v]
    }

    /// Graph degree: children plus the parent edge.
    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    /// `u ⊴ v`: `u` is `v` or one of its ancestors.
    pub fn is_ancestor_or_self(&self, u: VertexId, v: VertexId) -> bool {
        self.enter[u] <= self.enter[v] && self.enter[v] < self.exit[u]
    }

    /// The ancestor of `v` sitting on level `i` (`v` itself when `i` is its level).
    pub fn ancestor_at_level(&self, v: VertexId, i: usize) -> Option<VertexId> {
        let mut cur = v;
        if self.depth[cur] < i {
            return None;
        }
        while self.depth[cur] > i {
            cur = self.parent[cur]?;
        }
        Some(cur)
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n()).filter(move |&v| self.children[v].is_empty())
    }

    /// `(child, parent)` pairs in ascending child order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect()
    }

    /// Largest weight among the descendants of `v` on level `j` (`v` itself
    /// when `j` is its own level), and 0 once `j` runs past `T[v]`.
    pub fn max_level_weight(&self, v: VertexId, j: usize) -> Result<u64, TreeError> {
        let i = self.depth[v];
        if j < i {
            return Err(TreeError::LevelAboveVertex { vertex: v, vertex_level: i, level: j });
        }
        Ok(self.level_weight_profile(v).get(j - i).copied().unwrap_or(0))
    }

    /// `profile[d]` is the largest weight among descendants of `v` at
    /// relative depth `d`; the vector has length `h(T[v]) + 1`.
    pub fn level_weight_profile(&self, v: VertexId) -> Vec<u64> {
        let mut profile = vec![0u64; self.subtree_height[v] + 1];
        let base = self.depth[v];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let d = self.depth[u] - base;
            profile[d] = profile[d].max(self.weight[u]);
            stack.extend_from_slice(&self.children[u]);
        }
        profile
    }

    /// For every vertex, the number of its descendants (itself included)
    /// on level `target`. Vertices deeper than `target` get 0.
    pub fn descendants_at_level(&self, target: usize) -> Vec<u64> {
        let mut count = vec![0u64; self.n()];
        for &v in self.level(target) {
            count[v] = 1;
        }
        for i in (1..=target.min(self.height())).rev() {
            for &v in self.level(i) {
                if let Some(p) = self.parent[v] {
                    count[p] += count[v];
                }
            }
        }
        count
    }

    /// `B^k(T)`: levels `0..=k` merged into a fresh root.
    pub fn contract_prefix(&self, k: usize) -> Result<RootedTree, TreeError> {
        self.contract_prefix_with_map(k).map(|(t, _)| t)
    }

    /// Like [`contract_prefix`](Self::contract_prefix), also returning the
    /// old-to-new vertex map (`None` for absorbed vertices). Survivors keep
    /// their relative id order; the new root is vertex 0.
    pub fn contract_prefix_with_map(
        &self,
        k: usize,
    ) -> Result<(RootedTree, Vec<Option<VertexId>>), TreeError> {
        if k > self.height() {
            return Err(TreeError::ContractionTooDeep { k, height: self.height() });
        }
        let mut map = vec![None; self.n()];
        let mut next = 1;
        for v in 0..self.n() {
            if self.depth[v] > k {
                map[v] = Some(next);
                next += 1;
            }
        }
        let mut parent = vec![None; next];
        for v in 0..self.n() {
            if let Some(nv) = map[v] {
                let p = self.parent[v].expect("non-root survivor");
                parent[nv] = Some(map[p].unwrap_or(0));
            }
        }
        let tree = RootedTree::from_parent_array(0, parent)?;
        Ok((tree, map))
    }

    /// Canonical isomorphism class of every rooted subtree `T[v]`: two
    /// vertices share a class iff their subtrees are isomorphic.
    pub fn isomorphism_classes(&self) -> Vec<u32> {
        let mut class = vec![0u32; self.n()];
        let mut table: HashMap<Vec<u32>, u32> = HashMap::new();
        for level in self.levels.iter().rev() {
            for &v in level {
                let mut key: Vec<u32> = self.children[v].iter().map(|&c| class[c]).collect();
                key.sort_unstable();
                let fresh = table.len() as u32;
                class[v] = *table.entry(key).or_insert(fresh);
            }
        }
        class
    }
}

fn preorder_intervals(root: VertexId, children: &[Vec<VertexId>]) -> (Vec<usize>, Vec<usize>) {
    let n = children.len();
    let mut enter = vec![0; n];
    let mut exit = vec![0; n];
    let mut clock = 0;
    // (vertex, next child index)
    let mut stack = vec![(root, 0usize)];
    enter[root] = clock;
    clock += 1;
    while let Some(top) = stack.last_mut() {
        let (v, idx) = *top;
        if idx < children[v].len() {
            top.1 += 1;
            let c = children[v][idx];
            enter[c] = clock;
            clock += 1;
            stack.push((c, 0));
        } else {
            exit[v] = clock;
            stack.pop();
        }
    }
    (enter, exit)
}

/// Builds a tree from `(child, parent)` pairs, inferring `n` from the
/// largest id mentioned.
pub fn build_tree(parents: &[(VertexId, VertexId)], root: VertexId) -> Result<RootedTree, TreeError> {
    let n = parents
        .iter()
        .flat_map(|&(c, p)| [c, p])
        .chain(std::iter::once(root))
        .max()
        .map_or(1, |m| m + 1);
    RootedTree::from_edges(n, root, parents)
}
