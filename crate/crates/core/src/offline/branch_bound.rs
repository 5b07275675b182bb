use crate::scalar::Scalar;
use crate::sequence::FirefighterSequence;
use crate::tree::{RootedTree, VertexId};

use super::{integral_counts, picks_to_witness, OptError, OptResult};

/// Size guards for the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_vertices: 25, max_nodes: 50_000_000 }
    }
}

impl SearchLimits {
    pub fn unlimited_vertices(self) -> Self {
        SearchLimits { max_vertices: usize::MAX, ..self }
    }
}

/// `β_I` under the default guards.
pub fn beta_integral<S: Scalar>(tree: &RootedTree, seq: &FirefighterSequence<S>) -> Result<OptResult<S>, OptError> {
    beta_integral_with(tree, seq, &SearchLimits::default())
}

pub fn beta_integral_with<S: Scalar>(
    tree: &RootedTree,
    seq: &FirefighterSequence<S>,
    limits: &SearchLimits,
) -> Result<OptResult<S>, OptError> {
    let f = integral_counts(tree, seq)?;
    let (value, picks, nodes) = integral_optimum(tree, &f, limits)?;
    let result = OptResult { value: S::from_count(value), witness: picks_to_witness(&picks), nodes_explored: nodes };
    result.verify(tree, seq)?;
    Ok(result)
}

/// Best integral saving for counts `f[0] = f_1, f[1] = f_2, …` (missing
/// terms are zero). Returns the value, the protected vertices per level
/// and the number of search nodes.
///
/// Each level with firefighters is a branching point. Protecting as many
/// available vertices as the budget allows is never worse, and vertices
/// with isomorphic subtrees are interchangeable, so a branch picks how
/// many vertices to take from each isomorphism class. The bound is the
/// smaller of the unprotected mass and `Σ_{j≥i} f_j·max_{T_j} w`.
pub fn integral_optimum(
    tree: &RootedTree,
    f: &[u64],
    limits: &SearchLimits,
) -> Result<(u64, Vec<(usize, Vec<VertexId>)>, u64), OptError> {
    if tree.n() > limits.max_vertices {
        return Err(OptError::TooManyVertices { n: tree.n(), limit: limits.max_vertices });
    }
    let h = tree.height();
    let mut counts = vec![0u64; h + 2];
    for i in 1..=h {
        counts[i] = f.get(i - 1).copied().unwrap_or(0).min(tree.level(i).len() as u64);
    }
    let mut suffix = vec![0u64; h + 2];
    for i in (1..=h).rev() {
        let heaviest = tree.level(i).iter().map(|&v| tree.weight(v)).max().unwrap_or(0);
        suffix[i] = suffix[i + 1].saturating_add(counts[i].saturating_mul(heaviest));
    }
    let mut search = Search {
        tree,
        counts,
        suffix,
        class: tree.isomorphism_classes(),
        protected: Vec::new(),
        picks: Vec::new(),
        best: 0,
        best_picks: Vec::new(),
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    search.run(1, 0)?;
    Ok((search.best, search.best_picks, search.nodes))
}

struct Search<'a> {
    tree: &'a RootedTree,
    counts: Vec<u64>,
    suffix: Vec<u64>,
    class: Vec<u32>,
    protected: Vec<VertexId>,
    picks: Vec<(usize, Vec<VertexId>)>,
    best: u64,
    best_picks: Vec<(usize, Vec<VertexId>)>,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn record(&mut self, value: u64) {
        if value > self.best {
            self.best = value;
            self.best_picks = self.picks.clone();
        }
    }

    fn run(&mut self, from: usize, current: u64) -> Result<(), OptError> {
        let h = self.tree.height();
        let mut i = from;
        while i <= h && self.counts[i] == 0 {
            i += 1;
        }
        if i > h {
            self.record(current);
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(OptError::TooManyNodes(self.max_nodes));
        }
        let tree = self.tree;
        let avail: Vec<VertexId> = tree
            .level(i)
            .iter()
            .copied()
            .filter(|&v| !self.protected.iter().any(|&p| tree.is_ancestor_or_self(p, v)))
            .collect();
        let open: u64 = avail.iter().map(|&v| tree.weight(v)).sum();
        if current + open.min(self.suffix[i]) <= self.best {
            return Ok(());
        }
        let k = (self.counts[i] as usize).min(avail.len());
        if k == avail.len() {
            self.picks.push((i, avail));
            self.record(current + open);
            self.picks.pop();
            return Ok(());
        }

        // classes, heaviest first, each with its members in id order
        let mut groups: Vec<(u64, Vec<VertexId>)> = Vec::new();
        let mut seen: Vec<u32> = Vec::new();
        for &v in &avail {
            match seen.iter().position(|&c| c == self.class[v]) {
                Some(g) => groups[g].1.push(v),
                None => {
                    seen.push(self.class[v]);
                    groups.push((tree.weight(v), vec![v]));
                }
            }
        }
        groups.sort_by(|a, b| b.0.cmp(&a.0).then(a.1[0].cmp(&b.1[0])));
        let sizes: Vec<usize> = groups.iter().map(|g| g.1.len()).collect();
        let mut choices = Vec::new();
        splits(&sizes, k, &mut Vec::new(), &mut choices);

        for take in choices {
            let chosen: Vec<VertexId> =
                take.iter().zip(&groups).flat_map(|(&t, g)| g.1[..t].iter().copied()).collect();
            let gain: u64 = chosen.iter().map(|&v| tree.weight(v)).sum();
            if current + gain + (open - gain).min(self.suffix[i + 1]) <= self.best {
                continue;
            }
            let before = self.protected.len();
            self.protected.extend_from_slice(&chosen);
            self.picks.push((i, chosen));
            self.run(i + 1, current + gain)?;
            self.picks.pop();
            self.protected.truncate(before);
        }
        Ok(())
    }
}

/// Every way to take exactly `k` items from groups of the given sizes,
/// front-loaded choices first.
fn splits(sizes: &[usize], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let g = cur.len();
    if g == sizes.len() {
        if k == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let room: usize = sizes[g + 1..].iter().sum();
    let lo = k.saturating_sub(room);
    for t in (lo..=sizes[g].min(k)).rev() {
        cur.push(t);
        splits(sizes, k - t, cur, out);
        cur.pop();
    }
}
