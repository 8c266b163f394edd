//! Tree automorphisms as portraits.
//!
//! A portrait assigns to every internal vertex `u` a permutation `pi_u` of
//! its children. Permutations are indexed by the *image* vertex: if `g` maps
//! `x` to `u`, then `g` maps the child `x.c` to `u.pi_u(c)`. This is the
//! semidirect-product action `(f, s)(v, w) = (s(v), f(s(v)) w)` applied level
//! by level.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::{Backend, GroupElement, Permutation};
use crate::error::{Error, Result};
use crate::tree::{TreeSignature, VertexAddress};

/// Serialized portrait: vertex word (letters joined by `.`, root is the empty
/// string) to the image array of its child permutation. Vertices carrying
/// the identity are omitted.
pub type PortraitJson = BTreeMap<String, Vec<usize>>;

#[derive(Clone)]
pub struct Portrait {
    sig: Arc<TreeSignature>,
    // Child permutations flattened level by level. The entry for child `c` of
    // the depth-`k` vertex with index `u` sits at `offsets[k] + u * l_{k+1} + c`.
    perms: Vec<u16>,
}

fn offsets(sig: &TreeSignature) -> Vec<usize> {
    let mut off = Vec::with_capacity(sig.horizon() + 1);
    let mut acc = 0usize;
    off.push(0);
    for k in 1..=sig.horizon() {
        acc += sig.level_size(k).unwrap() as usize;
        off.push(acc);
    }
    off
}

impl Portrait {
    pub fn identity(sig: Arc<TreeSignature>) -> Self {
        let mut perms = Vec::with_capacity(offsets(&sig)[sig.horizon()]);
        for k in 0..sig.horizon() {
            let l = sig.degree(k + 1);
            let count = sig.level_size(k).unwrap() as usize;
            for _ in 0..count {
                perms.extend(0..l as u16);
            }
        }
        Self { sig, perms }
    }

    /// Identity everywhere except at the listed vertices.
    pub fn from_vertex_perms<I>(sig: Arc<TreeSignature>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexAddress, Permutation)>,
    {
        let mut p = Self::identity(sig);
        for (v, perm) in entries {
            p.set_vertex_perm(&v, &perm)?;
        }
        Ok(p)
    }

    pub fn signature(&self) -> &Arc<TreeSignature> {
        &self.sig
    }

    fn slot(&self, v: &VertexAddress) -> Result<(usize, usize)> {
        self.sig.check_address(v)?;
        if v.depth() >= self.sig.horizon() {
            return Err(Error::DepthOutOfRange {
                depth: v.depth(),
                horizon: self.sig.horizon(),
            });
        }
        let l = self.sig.degree(v.depth() + 1);
        let start = offsets(&self.sig)[v.depth()] + self.sig.index_of(v) * l;
        Ok((start, l))
    }

    /// Child permutation at internal vertex `v`.
    pub fn vertex_perm(&self, v: &VertexAddress) -> Result<Permutation> {
        let (start, l) = self.slot(v)?;
        Permutation::from_images(
            self.perms[start..start + l]
                .iter()
                .map(|&x| x as u32)
                .collect(),
        )
    }

    pub fn set_vertex_perm(&mut self, v: &VertexAddress, perm: &Permutation) -> Result<()> {
        let (start, l) = self.slot(v)?;
        if perm.degree() != l {
            return Err(Error::InvalidAddress(format!(
                "vertex {v} has {l} children, permutation has degree {}",
                perm.degree()
            )));
        }
        for (slot, &img) in self.perms[start..start + l].iter_mut().zip(perm.images()) {
            *slot = img as u16;
        }
        Ok(())
    }

    /// Image of a vertex.
    pub fn apply(&self, v: &VertexAddress) -> Result<VertexAddress> {
        self.sig.check_address(v)?;
        let off = offsets(&self.sig);
        let mut u = 0usize;
        let mut word = Vec::with_capacity(v.depth());
        for (k, &w) in v.word().iter().enumerate() {
            let l = self.sig.degree(k + 1);
            let img = self.perms[off[k] + u * l + w] as usize;
            word.push(img);
            u = u * l + img;
        }
        Ok(VertexAddress::new(word))
    }

    /// Index maps `V_k -> V_k` for every `k <= n`.
    fn level_maps(&self, n: usize) -> Vec<Vec<u32>> {
        let off = offsets(&self.sig);
        let mut maps = Vec::with_capacity(n + 1);
        maps.push(vec![0u32]);
        for k in 0..n {
            let l = self.sig.degree(k + 1);
            let prev = &maps[k];
            let mut next = vec![0u32; prev.len() * l];
            for (x, &u) in prev.iter().enumerate() {
                let u = u as usize;
                for c in 0..l {
                    next[x * l + c] = (u * l + self.perms[off[k] + u * l + c] as usize) as u32;
                }
            }
            maps.push(next);
        }
        maps
    }

    /// The permutation induced on the vertices of level `n`, in lexicographic
    /// index order.
    pub fn level_image(&self, n: usize) -> Result<Permutation> {
        if n > self.sig.horizon() {
            return Err(Error::DepthOutOfRange {
                depth: n,
                horizon: self.sig.horizon(),
            });
        }
        let mut maps = self.level_maps(n);
        Permutation::from_images(maps.pop().unwrap())
    }

    /// Whether every vertex of level `n` is fixed.
    pub fn acts_trivially_on_level(&self, n: usize) -> Result<bool> {
        Ok(self.level_image(n)?.is_identity())
    }

    /// Restriction to the top `n` levels.
    pub fn truncate(&self, n: usize) -> Result<Portrait> {
        let sig = Arc::new(self.sig.truncate(n)?);
        let end = offsets(&self.sig)[n];
        Ok(Portrait {
            sig,
            perms: self.perms[..end].to_vec(),
        })
    }

    /// The same automorphism on a deeper tree, acting trivially below the
    /// current horizon.
    pub fn extend_to(&self, sig: Arc<TreeSignature>) -> Result<Portrait> {
        let h = self.sig.horizon();
        if sig.horizon() < h || sig.degrees()[..h] != *self.sig.degrees() {
            return Err(Error::SignatureMismatch);
        }
        let mut p = Portrait::identity(sig);
        p.perms[..self.perms.len()].copy_from_slice(&self.perms);
        Ok(p)
    }

    /// Recovers the portrait of a tree automorphism from its action on leaves.
    /// Fails if the leaf permutation does not preserve the tree.
    pub fn from_leaf_action(sig: Arc<TreeSignature>, leaves: &Permutation) -> Result<Portrait> {
        let n = sig.horizon();
        if leaves.degree() != sig.level_size(n)? as usize {
            return Err(Error::SignatureMismatch);
        }
        // Level maps from the bottom up: the image of a vertex is the parent of
        // the image of any of its children.
        let mut maps: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        maps[n] = leaves.images().to_vec();
        for k in (0..n).rev() {
            let l = sig.degree(k + 1);
            let size = sig.level_size(k)? as usize;
            let mut map = vec![0u32; size];
            for x in 0..size {
                let img = maps[k + 1][x * l] as usize / l;
                for c in 1..l {
                    if maps[k + 1][x * l + c] as usize / l != img {
                        return Err(Error::InvalidAddress(
                            "leaf permutation does not preserve the tree".into(),
                        ));
                    }
                }
                map[x] = img as u32;
            }
            maps[k] = map;
        }
        let off = offsets(&sig);
        let mut p = Portrait::identity(Arc::clone(&sig));
        for k in 0..n {
            let l = sig.degree(k + 1);
            for (x, &u) in maps[k].iter().enumerate() {
                for c in 0..l {
                    let img = maps[k + 1][x * l + c] as usize % l;
                    p.perms[off[k] + u as usize * l + c] = img as u16;
                }
            }
        }
        Ok(p)
    }

    /// Exhaustive check that parents of images are images of parents.
    pub fn preserves_edges(&self) -> bool {
        (1..=self.sig.horizon()).all(|n| {
            self.sig.level(n).unwrap().iter().all(|v| {
                let img = self.apply(v).unwrap();
                img.parent() == self.apply(&v.parent().unwrap()).ok()
            })
        })
    }

    pub fn to_json(&self) -> PortraitJson {
        let mut out = PortraitJson::new();
        for k in 0..self.sig.horizon() {
            for v in self.sig.level(k).unwrap() {
                let perm = self.vertex_perm(&v).unwrap();
                if !perm.is_identity() {
                    out.insert(
                        v.to_string(),
                        perm.images().iter().map(|&i| i as usize).collect(),
                    );
                }
            }
        }
        out
    }

    pub fn from_json(sig: Arc<TreeSignature>, json: &PortraitJson) -> Result<Portrait> {
        let mut p = Portrait::identity(sig);
        for (key, images) in json {
            let word = if key.is_empty() {
                Vec::new()
            } else {
                key.split('.')
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::InvalidAddress(format!("bad vertex key {key:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let perm = Permutation::from_images(images.iter().map(|&i| i as u32).collect())?;
            p.set_vertex_perm(&VertexAddress::new(word), &perm)?;
        }
        Ok(p)
    }
}

impl PartialEq for Portrait {
    fn eq(&self, other: &Self) -> bool {
        self.perms == other.perms && (Arc::ptr_eq(&self.sig, &other.sig) || self.sig == other.sig)
    }
}

impl Eq for Portrait {}

impl Hash for Portrait {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.perms.hash(state);
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait{:?}", self.to_json())
    }
}

impl GroupElement for Portrait {
    const BACKEND: Backend = Backend::Portrait;

    fn compose(&self, rhs: &Self) -> Self {
        debug_assert!(*self.sig == *rhs.sig);
        let off = offsets(&self.sig);
        let mut perms = vec![0u16; self.perms.len()];
        // Track where each depth-k vertex x goes: y = rhs(x), u = self(y).
        let mut rhs_map = vec![0u32];
        let mut self_map = vec![0u32];
        for k in 0..self.sig.horizon() {
            let l = self.sig.degree(k + 1);
            let mut rhs_next = vec![0u32; rhs_map.len() * l];
            let mut self_next = vec![0u32; self_map.len() * l];
            for &y in &rhs_map {
                let y = y as usize;
                let u = self_map[y] as usize;
                for c in 0..l {
                    let mid = rhs.perms[off[k] + y * l + c] as usize;
                    perms[off[k] + u * l + c] = self.perms[off[k] + u * l + mid];
                }
            }
            for (x, &y) in rhs_map.iter().enumerate() {
                let y = y as usize;
                for c in 0..l {
                    rhs_next[x * l + c] = (y * l + rhs.perms[off[k] + y * l + c] as usize) as u32;
                }
            }
            for (y, &u) in self_map.iter().enumerate() {
                let u = u as usize;
                for c in 0..l {
                    self_next[y * l + c] = (u * l + self.perms[off[k] + u * l + c] as usize) as u32;
                }
            }
            rhs_map = rhs_next;
            self_map = self_next;
        }
        Portrait {
            sig: Arc::clone(&self.sig),
            perms,
        }
    }

    fn inverse(&self) -> Self {
        let off = offsets(&self.sig);
        let maps = self.level_maps(self.sig.horizon() - 1);
        let mut perms = vec![0u16; self.perms.len()];
        for k in 0..self.sig.horizon() {
            let l = self.sig.degree(k + 1);
            for (x, &u) in maps[k].iter().enumerate() {
                let u = u as usize;
                for c in 0..l {
                    let img = self.perms[off[k] + u * l + c] as usize;
                    perms[off[k] + x * l + img] = c as u16;
                }
            }
        }
        Portrait {
            sig: Arc::clone(&self.sig),
            perms,
        }
    }

    fn identity_like(&self) -> Self {
        Portrait::identity(Arc::clone(&self.sig))
    }

    fn is_identity(&self) -> bool {
        let mut i = 0;
        for k in 0..self.sig.horizon() {
            let l = self.sig.degree(k + 1);
            let count = self.sig.level_size(k).unwrap() as usize;
            for _ in 0..count {
                for c in 0..l {
                    if self.perms[i] as usize != c {
                        return false;
                    }
                    i += 1;
                }
            }
        }
        true
    }
}

/// Generators of the full automorphism group of the top `n` levels of `sig`,
/// as portraits on `sig` acting trivially below level `n`.
///
/// For every level `k < n` the vertex `0^k` receives a transposition and, when
/// the degree exceeds two, a full cycle. Level transitivity spreads these to
/// every vertex of the level.
pub fn wreath_generators(sig: &Arc<TreeSignature>, n: usize) -> Result<Vec<Portrait>> {
    if n > sig.horizon() {
        return Err(Error::DepthOutOfRange {
            depth: n,
            horizon: sig.horizon(),
        });
    }
    let mut gens = Vec::new();
    for k in 0..n {
        let l = sig.degree(k + 1);
        let v = VertexAddress::new(vec![0; k]);
        gens.push(Portrait::from_vertex_perms(
            Arc::clone(sig),
            [(v.clone(), Permutation::transposition(l, 0, 1))],
        )?);
        if l > 2 {
            gens.push(Portrait::from_vertex_perms(
                Arc::clone(sig),
                [(v, Permutation::cycle(l))],
            )?);
        }
    }
    Ok(gens)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `prod_{k=1..n} (l_k!)^{|V_{k-1}|}` for the first `n` degrees.
pub fn wreath_order(degrees: &[usize]) -> BigUint {
    let mut order = BigUint::one();
    let mut level = 1u64;
    for &l in degrees {
        order *= factorial(l).pow(level as u32);
        level *= l as u64;
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::GeneratedGroup;

    fn binary(n: usize) -> Arc<TreeSignature> {
        Arc::new(TreeSignature::constant(2, n).unwrap())
    }

    fn swap() -> Permutation {
        Permutation::transposition(2, 0, 1)
    }

    #[test]
    fn identity_fixes_everything() {
        let sig = binary(3);
        let id = Portrait::identity(Arc::clone(&sig));
        for n in 0..=3 {
            for v in sig.level(n).unwrap() {
                assert_eq!(id.apply(&v).unwrap(), v);
            }
        }
        assert!(id.is_identity());
        assert!(id.level_image(0).unwrap().is_identity());
    }

    #[test]
    fn root_swap_changes_only_first_letter() {
        let sig = binary(2);
        let g = Portrait::from_vertex_perms(Arc::clone(&sig), [(VertexAddress::root(), swap())])
            .unwrap();
        let v = VertexAddress::new(vec![0, 1]);
        assert_eq!(g.apply(&v).unwrap(), VertexAddress::new(vec![1, 1]));
        assert_eq!(
            g.level_image(1).unwrap(),
            Permutation::transposition(2, 0, 1)
        );
    }

    #[test]
    fn permutation_applies_at_image_vertex() {
        let sig = binary(2);
        let g = Portrait::from_vertex_perms(
            Arc::clone(&sig),
            [
                (VertexAddress::root(), swap()),
                (VertexAddress::new(vec![1]), swap()),
            ],
        )
        .unwrap();
        assert_eq!(
            g.apply(&VertexAddress::new(vec![0, 0])).unwrap(),
            VertexAddress::new(vec![1, 1])
        );
    }

    #[test]
    fn apply_rejects_deep_vertices() {
        let sig = binary(2);
        let id = Portrait::identity(sig);
        assert!(id.apply(&VertexAddress::new(vec![0, 0, 0])).is_err());
    }

    #[test]
    fn from_leaf_action_round_trips() {
        let sig = binary(3);
        let gens = wreath_generators(&sig, 3).unwrap();
        let g = gens[0].compose(&gens[2]).compose(&gens[1]);
        let leaves = g.level_image(3).unwrap();
        let back = Portrait::from_leaf_action(Arc::clone(&sig), &leaves).unwrap();
        assert_eq!(back, g);
        let bad = Permutation::from_images(vec![0, 2, 1, 3, 4, 5, 6, 7]).unwrap();
        assert!(Portrait::from_leaf_action(sig, &bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let sig = Arc::new(TreeSignature::new(vec![3, 2]).unwrap());
        let g = Portrait::from_vertex_perms(
            Arc::clone(&sig),
            [
                (VertexAddress::root(), Permutation::cycle(3)),
                (VertexAddress::new(vec![2]), swap()),
            ],
        )
        .unwrap();
        let json = g.to_json();
        assert_eq!(json.len(), 2);
        assert_eq!(json[""], vec![1, 2, 0]);
        assert_eq!(Portrait::from_json(sig, &json).unwrap(), g);
    }

    #[test]
    fn truncate_and_extend() {
        let sig = binary(3);
        let gens = wreath_generators(&sig, 3).unwrap();
        let g = gens[1].compose(&gens[0]);
        let top = g.truncate(2).unwrap();
        for v in top.signature().level(2).unwrap() {
            assert_eq!(top.apply(&v).unwrap(), g.apply(&v).unwrap());
        }
        let back = top.extend_to(Arc::clone(&sig)).unwrap();
        assert!(back.acts_trivially_on_level(0).unwrap());
        assert_eq!(back.truncate(2).unwrap(), top);
    }

    #[test]
    fn wreath_orders_by_enumeration() {
        for (d, n, expected) in [
            (2usize, 1usize, 2usize),
            (2, 2, 8),
            (2, 3, 128),
            (2, 4, 32768),
            (3, 1, 6),
            (3, 2, 1296),
        ] {
            let sig = Arc::new(TreeSignature::constant(d, n).unwrap());
            let gens = wreath_generators(&sig, n).unwrap();
            let id = Portrait::identity(Arc::clone(&sig));
            let group = GeneratedGroup::new(id, gens);
            assert_eq!(group.order().unwrap(), expected, "d={d} n={n}");
            assert_eq!(wreath_order(sig.degrees()), BigUint::from(expected));
        }
    }

    #[test]
    fn wreath_order_mixed_signature() {
        let sig = Arc::new(TreeSignature::new(vec![3, 2]).unwrap());
        let group = GeneratedGroup::new(
            Portrait::identity(Arc::clone(&sig)),
            wreath_generators(&sig, 2).unwrap(),
        );
        // 3! * (2!)^3
        assert_eq!(group.order().unwrap(), 48);
        assert_eq!(wreath_order(&[3, 2]), BigUint::from(48u32));
    }
}
