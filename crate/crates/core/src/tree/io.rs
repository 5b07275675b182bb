use serde::{Deserialize, Serialize};

use super::{Family, RootedTree, TreeError};

/// JSON shape of a finite tree: `parents` lists `[child, parent]` pairs in
/// ascending child order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub n: usize,
    pub root: usize,
    pub parents: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

impl RootedTree {
    pub fn to_file(&self) -> TreeFile {
        TreeFile {
            n: self.n(),
            root: self.root(),
            parents: self.edges().into_iter().map(|(c, p)| [c, p]).collect(),
            family: self.family().cloned(),
        }
    }

    pub fn from_file(file: &TreeFile) -> Result<RootedTree, TreeError> {
        let edges: Vec<(usize, usize)> = file.parents.iter().map(|&[c, p]| (c, p)).collect();
        let tree = RootedTree::from_edges(file.n, file.root, &edges)?;
        Ok(match &file.family {
            Some(f) => tree.with_family(f.clone()),
            None => tree,
        })
    }
}
