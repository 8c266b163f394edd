//! Truncated spherically homogeneous rooted trees.
//!
//! A [`TreeSignature`] `(l_1, ..., l_N)` describes a tree whose vertices at
//! depth `n` are words `w_1 ... w_n` with `0 <= w_i < l_i`. Everything beyond
//! depth `N` (the horizon) is cut off; a leaf of the truncated tree stands for
//! the cylinder of all infinite paths through it.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Branching degrees of a truncated tree, one per level.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TreeSignature {
    degrees: Vec<usize>,
    // level_sizes[n] = l_1 * ... * l_n
    level_sizes: Vec<u64>,
}

impl TreeSignature {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidSignature("horizon must be at least 1".into()));
        }
        if let Some(bad) = degrees.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidSignature(format!(
                "every degree must be at least 2, found {bad}"
            )));
        }
        if let Some(big) = degrees.iter().find(|&&l| l > u16::MAX as usize) {
            return Err(Error::InvalidSignature(format!("degree {big} too large")));
        }
        let mut level_sizes = Vec::with_capacity(degrees.len() + 1);
        level_sizes.push(1u64);
        for &l in &degrees {
            let last = *level_sizes.last().unwrap();
            let next = last
                .checked_mul(l as u64)
                .ok_or_else(|| Error::Overflow("level size exceeds u64".into()))?;
            level_sizes.push(next);
        }
        Ok(Self {
            degrees,
            level_sizes,
        })
    }

    /// The constant `d`-ary signature of depth `horizon`.
    pub fn constant(d: usize, horizon: usize) -> Result<Self> {
        Self::new(vec![d; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Degree `l_n` of the edges between levels `n - 1` and `n` (1-based).
    pub fn degree(&self, n: usize) -> usize {
        self.degrees[n - 1]
    }

    pub fn is_constant(&self) -> bool {
        self.degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// Number of vertices at depth `n`.
    pub fn level_size(&self, n: usize) -> Result<u64> {
        self.level_sizes
            .get(n)
            .copied()
            .ok_or(Error::DepthOutOfRange {
                depth: n,
                horizon: self.horizon(),
            })
    }

    /// Signature truncated to its first `n` levels.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.horizon() {
            return Err(Error::DepthOutOfRange {
                depth: n,
                horizon: self.horizon(),
            });
        }
        Self::new(self.degrees[..n].to_vec())
    }

    /// Signature of the subtree hanging below a vertex at depth `n`.
    pub fn below(&self, n: usize) -> Result<Self> {
        if n >= self.horizon() {
            return Err(Error::DepthOutOfRange {
                depth: n,
                horizon: self.horizon(),
            });
        }
        Self::new(self.degrees[n..].to_vec())
    }

    pub fn check_address(&self, v: &VertexAddress) -> Result<()> {
        if v.depth() > self.horizon() {
            return Err(Error::DepthOutOfRange {
                depth: v.depth(),
                horizon: self.horizon(),
            });
        }
        for (i, (&w, &l)) in v.word.iter().zip(&self.degrees).enumerate() {
            if w >= l {
                return Err(Error::InvalidAddress(format!(
                    "letter {w} at position {} exceeds degree {l}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Lexicographic index of `v` within its level.
    pub fn index_of(&self, v: &VertexAddress) -> usize {
        v.word
            .iter()
            .zip(&self.degrees)
            .fold(0usize, |acc, (&w, &l)| acc * l + w)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn vertex_at(&self, depth: usize, mut index: usize) -> VertexAddress {
        let mut word = vec![0; depth];
        for i in (0..depth).rev() {
            let l = self.degrees[i];
            word[i] = index % l;
            index /= l;
        }
        VertexAddress { word }
    }

    /// All vertices at depth `n` in lexicographic order.
    pub fn level(&self, n: usize) -> Result<Vec<VertexAddress>> {
        let size = self.level_size(n)? as usize;
        Ok((0..size).map(|i| self.vertex_at(n, i)).collect())
    }

    /// Total number of internal vertices, `|V_0| + ... + |V_{N-1}|`.
    pub fn internal_vertex_count(&self) -> usize {
        self.level_sizes[..self.horizon()]
            .iter()
            .map(|&s| s as usize)
            .sum()
    }

    /// Leaves (depth-`N` prefixes) lying in the cylinder below `w`.
    pub fn cylinder(self: &Arc<Self>, w: &VertexAddress) -> Result<Vec<PathPrefix>> {
        self.check_address(w)?;
        let depth = w.depth();
        let below = (depth..self.horizon())
            .map(|i| self.degrees[i])
            .product::<usize>();
        let base = self.index_of(w) * below;
        Ok((base..base + below)
            .map(|i| PathPrefix {
                sig: Arc::clone(self),
                leaf: self.vertex_at(self.horizon(), i),
            })
            .collect())
    }

    /// Every leaf of the truncated tree.
    pub fn leaves(self: &Arc<Self>) -> Vec<PathPrefix> {
        self.cylinder(&VertexAddress::root())
            .expect("root is always a valid address")
    }
}

impl fmt::Debug for TreeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeSignature{:?}", self.degrees)
    }
}

impl TryFrom<Vec<usize>> for TreeSignature {
    type Error = Error;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<TreeSignature> for Vec<usize> {
    fn from(sig: TreeSignature) -> Self {
        sig.degrees
    }
}

/// A vertex of the tree, addressed by its word from the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexAddress {
    word: Vec<usize>,
}

impl VertexAddress {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn new(word: Vec<usize>) -> Self {
        Self { word }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self {
            word: self.word[..n.min(self.word.len())].to_vec(),
        }
    }

    pub fn child(&self, letter: usize) -> Self {
        let mut word = self.word.clone();
        word.push(letter);
        Self { word }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.word.is_empty() {
            None
        } else {
            Some(self.truncate(self.depth() - 1))
        }
    }

    /// Whether `self` lies on the path from the root to `other`.
    pub fn is_prefix_of(&self, other: &VertexAddress) -> bool {
        other.word.starts_with(&self.word)
    }
}

impl fmt::Debug for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{:?}", self.word)
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A leaf of the truncated tree, standing for the cylinder of infinite paths
/// through it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PathPrefix {
    sig: Arc<TreeSignature>,
    leaf: VertexAddress,
}

impl PathPrefix {
    pub fn new(sig: Arc<TreeSignature>, leaf: VertexAddress) -> Result<Self> {
        sig.check_address(&leaf)?;
        if leaf.depth() != sig.horizon() {
            return Err(Error::InvalidAddress(format!(
                "path prefix must have depth {}, got {}",
                sig.horizon(),
                leaf.depth()
            )));
        }
        Ok(Self { sig, leaf })
    }

    /// The leftmost path `0 0 ... 0`.
    pub fn leftmost(sig: Arc<TreeSignature>) -> Self {
        let leaf = VertexAddress::new(vec![0; sig.horizon()]);
        Self { sig, leaf }
    }

    pub fn signature(&self) -> &Arc<TreeSignature> {
        &self.sig
    }

    pub fn leaf(&self) -> &VertexAddress {
        &self.leaf
    }

    /// The vertex of this path at depth `n`.
    pub fn vertex(&self, n: usize) -> VertexAddress {
        self.leaf.truncate(n)
    }
}

impl fmt::Debug for PathPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PathPrefix({:?})", self.leaf.word())
    }
}

/// Largest depth at which the two paths still agree.
pub fn common_prefix_depth(x: &PathPrefix, y: &PathPrefix) -> Result<usize> {
    if x.sig != y.sig {
        return Err(Error::SignatureMismatch);
    }
    Ok(x.leaf
        .word
        .iter()
        .zip(&y.leaf.word)
        .take_while(|(a, b)| a == b)
        .count())
}

/// The path ultrametric `1 / |V_m|`, `m` the common prefix depth, with
/// identical truncated paths at distance zero.
pub fn path_metric(x: &PathPrefix, y: &PathPrefix) -> Result<Ratio<u64>> {
    let m = common_prefix_depth(x, y)?;
    if m == x.sig.horizon() {
        return Ok(Ratio::from_integer(0));
    }
    Ok(Ratio::new(1, x.sig.level_size(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(sig: &Arc<TreeSignature>, word: &[usize]) -> PathPrefix {
        PathPrefix::new(Arc::clone(sig), VertexAddress::new(word.to_vec())).unwrap()
    }

    #[test]
    fn level_sizes() {
        let sig = TreeSignature::constant(2, 3).unwrap();
        assert_eq!(sig.level_size(3).unwrap(), 8);
        assert_eq!(sig.level_size(0).unwrap(), 1);
        let mixed = TreeSignature::new(vec![2, 3, 2]).unwrap();
        assert_eq!(mixed.level_size(3).unwrap(), 12);
        assert!(matches!(
            mixed.level_size(4),
            Err(Error::DepthOutOfRange { depth: 4, .. })
        ));
    }

    #[test]
    fn rejects_degenerate_signatures() {
        assert!(TreeSignature::new(vec![]).is_err());
        assert!(TreeSignature::new(vec![2, 1, 2]).is_err());
        assert!(TreeSignature::try_from(vec![3, 0]).is_err());
    }

    #[test]
    fn index_round_trip() {
        let sig = TreeSignature::new(vec![2, 3, 2]).unwrap();
        for (i, v) in sig.level(3).unwrap().iter().enumerate() {
            assert_eq!(sig.index_of(v), i);
        }
        assert_eq!(sig.level(0).unwrap(), vec![VertexAddress::root()]);
    }

    #[test]
    fn common_prefix_examples() {
        let sig = Arc::new(TreeSignature::constant(2, 3).unwrap());
        let x = path(&sig, &[0, 0, 0]);
        assert_eq!(common_prefix_depth(&x, &x).unwrap(), 3);
        assert_eq!(common_prefix_depth(&x, &path(&sig, &[0, 1, 0])).unwrap(), 1);
        assert_eq!(common_prefix_depth(&path(&sig, &[1, 0, 0]), &x).unwrap(), 0);
    }

    #[test]
    fn metric_examples() {
        let sig = Arc::new(TreeSignature::constant(2, 3).unwrap());
        let x = path(&sig, &[0, 1, 1]);
        assert_eq!(
            path_metric(&x, &path(&sig, &[1, 1, 1])).unwrap(),
            Ratio::from_integer(1)
        );
        assert_eq!(path_metric(&x, &x).unwrap(), Ratio::from_integer(0));

        let sig3 = Arc::new(TreeSignature::constant(3, 3).unwrap());
        let d = path_metric(&path(&sig3, &[2, 1, 0]), &path(&sig3, &[2, 1, 2])).unwrap();
        assert_eq!(d, Ratio::new(1, 9));
    }

    #[test]
    fn metric_rejects_mismatched_signatures() {
        let a = Arc::new(TreeSignature::constant(2, 2).unwrap());
        let b = Arc::new(TreeSignature::constant(3, 2).unwrap());
        let err = path_metric(&path(&a, &[0, 0]), &path(&b, &[0, 0])).unwrap_err();
        assert_eq!(err, Error::SignatureMismatch);
    }

    #[test]
    fn ultrametric_exhaustive_binary() {
        for n in 1..=4 {
            let sig = Arc::new(TreeSignature::constant(2, n).unwrap());
            let leaves = sig.leaves();
            for x in &leaves {
                for y in &leaves {
                    let dxy = path_metric(x, y).unwrap();
                    for z in &leaves {
                        let dxz = path_metric(x, z).unwrap();
                        let dyz = path_metric(y, z).unwrap();
                        assert!(dxz <= dxy.max(dyz));
                    }
                }
            }
        }
    }

    #[test]
    fn cylinders_partition_leaves() {
        let sig = Arc::new(TreeSignature::new(vec![2, 3, 2]).unwrap());
        let total = sig.leaves().len();
        for n in 0..=3 {
            let mut seen = std::collections::HashSet::new();
            let mut sizes = Vec::new();
            for w in sig.level(n).unwrap() {
                let cyl = sig.cylinder(&w).unwrap();
                sizes.push(cyl.len());
                for leaf in cyl {
                    assert!(w.is_prefix_of(leaf.leaf()));
                    assert!(seen.insert(leaf));
                }
            }
            assert_eq!(seen.len(), total);
            assert!(sizes.windows(2).all(|s| s[0] == s[1]));
        }
    }

    #[test]
    fn path_prefix_requires_full_depth() {
        let sig = Arc::new(TreeSignature::constant(2, 3).unwrap());
        assert!(PathPrefix::new(Arc::clone(&sig), VertexAddress::new(vec![0, 1])).is_err());
        assert!(PathPrefix::new(sig, VertexAddress::new(vec![0, 2, 0])).is_err());
    }
}
