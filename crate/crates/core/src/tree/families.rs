use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{RootedTree, TreeError, VertexId};

/// Parameters of every generated finite instance family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Perfect binary tree of the given height (`2^(h+1) − 1` vertices).
    PerfectBinary { height: usize },
    /// Path on `n` vertices rooted at one end.
    Path { n: usize },
    /// Root with `leaves` leaf children.
    Star { leaves: usize },
    /// Uniform attachment: vertex `i` picks its parent uniformly in `0..i`.
    Random { n: usize, seed: u64 },
    /// Leafless prefix of `levels + 1` levels where the first vertex of each
    /// level has two children and every other vertex one (`|T_i| = i + 1`).
    Spider { levels: usize },
    /// The two-branch gadget `W_{k,l,m}`.
    W { k: usize, l: usize, m: usize },
}

impl Family {
    /// Short identifier such as `w_4_901_1001` or `random_10_s3`.
    pub fn label(&self) -> String {
        match *self {
            Family::PerfectBinary { height } => format!("binary_{height}"),
            Family::Path { n } => format!("path_{n}"),
            Family::Star { leaves } => format!("star_{leaves}"),
            Family::Random { n, seed } => format!("random_{n}_s{seed}"),
            Family::Spider { levels } => format!("spider_{levels}"),
            Family::W { k, l, m } => format!("w_{k}_{l}_{m}"),
        }
    }

    /// Parses `binary:3`, `path:5`, `star:4`, `random:10,7`, `spider:20`,
    /// `w:4,901,1001`, or the JSON object form.
    pub fn parse(spec: &str) -> Result<Family, String> {
        let spec = spec.trim();
        if spec.starts_with('{') {
            return serde_json::from_str(spec).map_err(|e| e.to_string());
        }
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let nums: Vec<u64> = args
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<u64>().map_err(|_| format!("bad number {s:?} in {spec:?}")))
            .collect::<Result<_, _>>()?;
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(format!("{name} takes {k} argument(s), got {}", nums.len()))
            }
        };
        let u = |i: usize| nums[i] as usize;
        match name {
            "binary" | "perfect_binary" => want(1).map(|_| Family::PerfectBinary { height: u(0) }),
            "path" => want(1).map(|_| Family::Path { n: u(0) }),
            "star" => want(1).map(|_| Family::Star { leaves: u(0) }),
            "random" => want(2).map(|_| Family::Random { n: u(0), seed: nums[1] }),
            "spider" => want(1).map(|_| Family::Spider { levels: u(0) }),
            "w" => want(3).map(|_| Family::W { k: u(0), l: u(1), m: u(2) }),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

/// Builds a member of a standard family.
pub fn gen_standard(family: &Family) -> Result<RootedTree, TreeError> {
    let tree = match *family {
        Family::PerfectBinary { height } => {
            let n = (1usize << (height + 1)) - 1;
            let parent = (0..n).map(|v| (v > 0).then(|| (v - 1) / 2)).collect();
            RootedTree::from_parent_array(0, parent)?
        }
        Family::Path { n } => {
            if n == 0 {
                return Err(TreeError::Empty);
            }
            let parent = (0..n).map(|v| v.checked_sub(1)).collect();
            RootedTree::from_parent_array(0, parent)?
        }
        Family::Star { leaves } => {
            let parent = (0..=leaves).map(|v| (v > 0).then_some(0)).collect();
            RootedTree::from_parent_array(0, parent)?
        }
        Family::Random { n, seed } => {
            if n == 0 {
                return Err(TreeError::Empty);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let parent = (0..n).map(|v| (v > 0).then(|| rng.gen_range(0..v))).collect();
            RootedTree::from_parent_array(0, parent)?
        }
        Family::Spider { levels } => spider(levels)?,
        Family::W { k, l, m } => return gen_w_klm(k, l, m),
    };
    Ok(tree.with_family(family.clone()))
}

fn spider(levels: usize) -> Result<RootedTree, TreeError> {
    let mut parent: Vec<Option<VertexId>> = vec![None];
    let mut prev: Vec<VertexId> = vec![0];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(prev.len() + 1);
        for (idx, &v) in prev.iter().enumerate() {
            let kids = if idx == 0 { 2 } else { 1 };
            for _ in 0..kids {
                next.push(parent.len());
                parent.push(Some(v));
            }
        }
        prev = next;
    }
    RootedTree::from_parent_array(0, parent)
}

/// Vertex ids of the named parts of a `W_{k,l,m}` gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WGadget {
    pub root: VertexId,
    pub x: VertexId,
    pub star_center: VertexId,
    pub y: VertexId,
    pub chains: usize,
    pub chain_len: usize,
}

/// `W_{k,l,m}`: root `r` with children `x` and `y`. The `x` branch is
/// `x → s → (l−2 leaves)` for `l` vertices in total; the `y` branch is `y`
/// followed by `k` disjoint chains of `(m−1)/k` vertices, `m` in total.
///
/// Ids: `r = 0`, `x = 1`, `s = 2`, leaves `3..=l`, `y = l+1`, then the
/// chains one after the other, each listed top-down.
pub fn gen_w_klm(k: usize, l: usize, m: usize) -> Result<RootedTree, TreeError> {
    if k == 0 || l < 2 || m == 0 || !(m - 1).is_multiple_of(k) {
        return Err(TreeError::InvalidGadget { k, l, m });
    }
    let chain_len = (m - 1) / k;
    let n = 1 + l + m;
    let mut parent: Vec<Option<VertexId>> = Vec::with_capacity(n);
    parent.push(None);
    parent.push(Some(0)); // x
    parent.push(Some(1)); // star center
    parent.extend((3..=l).map(|_| Some(2)));
    let y = l + 1;
    parent.push(Some(0));
    for _ in 0..k {
        let mut above = y;
        for _ in 0..chain_len {
            let v = parent.len();
            parent.push(Some(above));
            above = v;
        }
    }
    debug_assert_eq!(parent.len(), n);
    Ok(RootedTree::from_parent_array(0, parent)?.with_family(Family::W { k, l, m }))
}

/// Locates `x`, `s` and `y` in a tree produced by [`gen_w_klm`].
pub fn w_gadget(k: usize, l: usize, m: usize) -> WGadget {
    WGadget { root: 0, x: 1, star_center: 2, y: l + 1, chains: k, chain_len: (m - 1) / k.max(1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level_sizes(t: &RootedTree) -> Vec<usize> {
        t.levels().iter().map(Vec::len).collect()
    }

    /// Counts maximal chains hanging below `y`: children of `y` whose
    /// subtrees are paths.
    fn chains_below(t: &RootedTree, y: VertexId) -> Vec<u64> {
        t.children(y)
            .iter()
            .map(|&c| {
                let mut len = 1;
                let mut cur = c;
                while let [only] = t.children(cur) {
                    cur = *only;
                    len += 1;
                }
                assert!(t.children(cur).is_empty(), "chain must end in a leaf");
                len
            })
            .collect()
    }

    #[test]
    fn perfect_binary_three() {
        let t = gen_standard(&Family::PerfectBinary { height: 3 }).unwrap();
        assert_eq!(t.n(), 15);
        assert_eq!(t.height(), 3);
    }

    #[test]
    fn spider_level_sizes() {
        let t = gen_standard(&Family::Spider { levels: 4 }).unwrap();
        assert_eq!(level_sizes(&t), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn random_is_reproducible() {
        let a = gen_standard(&Family::Random { n: 12, seed: 7 }).unwrap();
        let b = gen_standard(&Family::Random { n: 12, seed: 7 }).unwrap();
        assert_eq!(a, b);
        let c = gen_standard(&Family::Random { n: 12, seed: 8 }).unwrap();
        assert_eq!(c.n(), 12);
    }

    #[test]
    fn w_1_10_16() {
        let t = gen_w_klm(1, 10, 16).unwrap();
        let g = w_gadget(1, 10, 16);
        assert_eq!(t.n(), 27);
        assert_eq!(t.weight(g.x), 10);
        assert_eq!(t.weight(g.y), 16);
        assert_eq!(chains_below(&t, g.y), vec![15]);
        // the x-branch child on level 2 is the star center
        assert_eq!(t.max_level_weight(g.x, 2).unwrap(), 9);
        assert_eq!(t.weight(g.star_center), 9);
    }

    #[test]
    fn w_4_901_1001() {
        let t = gen_w_klm(4, 901, 1001).unwrap();
        let g = w_gadget(4, 901, 1001);
        assert_eq!(t.weight(g.x), 901);
        assert_eq!(t.weight(g.y), 1001);
        assert_eq!(chains_below(&t, g.y), vec![250; 4]);
    }

    #[test]
    fn w_10_10000_10001() {
        let t = gen_w_klm(10, 10000, 10001).unwrap();
        assert_eq!(t.n(), 20002);
        assert_eq!(chains_below(&t, w_gadget(10, 10000, 10001).y), vec![1000; 10]);
    }

    #[test]
    fn text_specs_round_trip_through_labels() {
        for (spec, label) in [
            ("binary:3", "binary_3"),
            ("path:5", "path_5"),
            ("random:10,7", "random_10_s7"),
            ("w:4,901,1001", "w_4_901_1001"),
            (r#"{"kind":"star","leaves":4}"#, "star_4"),
        ] {
            assert_eq!(Family::parse(spec).unwrap().label(), label);
        }
        assert!(Family::parse("w:1,2").is_err());
        assert!(Family::parse("tree:3").is_err());
    }

    #[test]
    fn w_rejects_non_divisor() {
        assert_eq!(gen_w_klm(4, 10, 16), Err(TreeError::InvalidGadget { k: 4, l: 10, m: 16 }));
    }
}
