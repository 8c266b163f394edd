//! The full iterated wreath product `Aut(T_N)`: level kernels, subtree
//! groups, and witnesses that elements trivial on a clopen subset need not be
//! trivial on a larger one.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::chain::{Certificate, DiscriminantTower};
use crate::error::{Error, Result};
use crate::perm::{
    abelianization_order, wreath_generators, wreath_order, GeneratedGroup, Permutation, Portrait,
    PortraitJson, DEFAULT_CAP,
};
use crate::tree::{PathPrefix, TreeSignature, VertexAddress};

/// `Aut(T_N)` together with a base path.
#[derive(Debug, Clone)]
pub struct WreathChainSpec {
    sig: Arc<TreeSignature>,
    base: PathPrefix,
    ambient: GeneratedGroup<Portrait>,
}

impl WreathChainSpec {
    pub fn new(base: PathPrefix, cap: usize) -> Result<Self> {
        let sig = Arc::clone(base.signature());
        let gens = wreath_generators(&sig, sig.horizon())?;
        let ambient = GeneratedGroup::with_cap(Portrait::identity(Arc::clone(&sig)), gens, cap);
        Ok(Self { sig, base, ambient })
    }

    pub fn leftmost(sig: Arc<TreeSignature>) -> Result<Self> {
        Self::new(PathPrefix::leftmost(sig), DEFAULT_CAP)
    }

    pub fn signature(&self) -> &Arc<TreeSignature> {
        &self.sig
    }

    pub fn base(&self) -> &PathPrefix {
        &self.base
    }

    pub fn ambient(&self) -> &GeneratedGroup<Portrait> {
        &self.ambient
    }

    pub fn ambient_order(&self) -> BigUint {
        wreath_order(self.sig.degrees())
    }
}

/// A subgroup of `Aut(T_N)` known by generators and a closed-form order.
#[derive(Debug, Clone)]
pub struct StructuralSubgroup {
    pub generators: Vec<Portrait>,
    pub order: BigUint,
}

impl StructuralSubgroup {
    pub fn to_group(&self, sig: &Arc<TreeSignature>, cap: usize) -> GeneratedGroup<Portrait> {
        GeneratedGroup::with_cap(
            Portrait::identity(Arc::clone(sig)),
            self.generators.clone(),
            cap,
        )
    }
}

fn check_depth(sig: &TreeSignature, depth: usize) -> Result<()> {
    if depth > sig.horizon() {
        return Err(Error::DepthOutOfRange {
            depth,
            horizon: sig.horizon(),
        });
    }
    Ok(())
}

/// A transposition and, for degree above two, a cycle at each vertex
/// `w 0^j` strictly above the leaves.
fn subtree_generators(sig: &Arc<TreeSignature>, w: &VertexAddress) -> Result<Vec<Portrait>> {
    let mut gens = Vec::new();
    let mut v = w.clone();
    while v.depth() < sig.horizon() {
        let l = sig.degree(v.depth() + 1);
        gens.push(Portrait::from_vertex_perms(
            Arc::clone(sig),
            [(v.clone(), Permutation::transposition(l, 0, 1))],
        )?);
        if l > 2 {
            gens.push(Portrait::from_vertex_perms(
                Arc::clone(sig),
                [(v.clone(), Permutation::cycle(l))],
            )?);
        }
        v = v.child(0);
    }
    Ok(gens)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `|Aut|` of the levels `depth + 1 ..= N` of a subtree rooted at `depth`.
fn subtree_order(sig: &TreeSignature, depth: usize) -> BigUint {
    let mut order = BigUint::one();
    let mut count = 1u32;
    for k in depth + 1..=sig.horizon() {
        let l = sig.degree(k);
        order *= factorial(l).pow(count);
        count *= l as u32;
    }
    order
}

/// `Aut(T_{≥w})`: automorphisms supported on the cylinder of `w`.
pub fn subtree_support_group(
    spec: &WreathChainSpec,
    w: &VertexAddress,
) -> Result<StructuralSubgroup> {
    spec.sig.check_address(w)?;
    if w.depth() >= spec.sig.horizon() {
        return Err(Error::DepthOutOfRange {
            depth: w.depth(),
            horizon: spec.sig.horizon() - 1,
        });
    }
    Ok(StructuralSubgroup {
        generators: subtree_generators(&spec.sig, w)?,
        order: subtree_order(&spec.sig, w.depth()),
    })
}

/// `W_n`, the pointwise stabilizer of level `n`, as the direct product of the
/// subtree groups below the vertices of level `n`.
pub fn level_kernel(spec: &WreathChainSpec, n: usize) -> Result<StructuralSubgroup> {
    check_depth(&spec.sig, n)?;
    if n == spec.sig.horizon() {
        return Ok(StructuralSubgroup {
            generators: Vec::new(),
            order: BigUint::one(),
        });
    }
    let mut generators = Vec::new();
    let mut order = BigUint::one();
    for v in spec.sig.level(n)? {
        let sub = subtree_support_group(spec, &v)?;
        generators.extend(sub.generators);
        order *= sub.order;
    }
    Ok(StructuralSubgroup { generators, order })
}

/// `g` is the identity on the inner cylinder's complement but moves a leaf
/// inside it; in particular it is trivial on `U_k(v) \ U_m(w)` and not on
/// `U_k(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WildnessWitness {
    pub outer: VertexAddress,
    pub inner: VertexAddress,
    pub element: Portrait,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub outer_depth: usize,
    pub outer: String,
    pub inner_depth: usize,
    pub inner: String,
    pub portrait: PortraitJson,
}

impl WildnessWitness {
    pub fn record(&self) -> WitnessRecord {
        WitnessRecord {
            outer_depth: self.outer.depth(),
            outer: self.outer.to_string(),
            inner_depth: self.inner.depth(),
            inner: self.inner.to_string(),
            portrait: self.element.to_json(),
        }
    }

    /// Exhaustive check over the leaves.
    pub fn verify(&self) -> Result<bool> {
        let sig = self.element.signature();
        let mut moved_inside = false;
        for leaf in sig.leaves() {
            let x = leaf.vertex(sig.horizon());
            let moves = self.element.apply(&x)? != x;
            if self.inner.is_prefix_of(&x) {
                moved_inside |= moves;
            } else if moves {
                return Ok(false);
            }
        }
        let level_trivial = self.element.acts_trivially_on_level(self.inner.depth())?;
        Ok(moved_inside && level_trivial && self.outer.is_prefix_of(&self.inner))
    }
}

/// A transposition at the bottom vertex `w 0^{N-1-m}` below the inner
/// cylinder, checked against every leaf.
pub fn find_wildness_witness(
    spec: &WreathChainSpec,
    outer: &VertexAddress,
    inner: &VertexAddress,
) -> Result<WildnessWitness> {
    let sig = &spec.sig;
    sig.check_address(outer)?;
    sig.check_address(inner)?;
    let (k, m) = (outer.depth(), inner.depth());
    if m >= sig.horizon() {
        return Err(Error::NoRoom {
            level: m,
            horizon: sig.horizon(),
        });
    }
    if k >= m || !outer.is_prefix_of(inner) {
        return Err(Error::InvalidCylinders(format!(
            "U({inner}) at depth {m} is not strictly inside U({outer}) at depth {k}"
        )));
    }
    let mut bottom = inner.clone();
    while bottom.depth() + 1 < sig.horizon() {
        bottom = bottom.child(0);
    }
    let l = sig.degree(sig.horizon());
    let element = Portrait::from_vertex_perms(
        Arc::clone(sig),
        [(bottom, Permutation::transposition(l, 0, 1))],
    )?;
    let witness = WildnessWitness {
        outer: outer.clone(),
        inner: inner.clone(),
        element,
    };
    if !witness.verify()? {
        return Err(Error::HypothesisFailed(format!(
            "witness for U({inner}) inside U({outer}) failed the leaf check"
        )));
    }
    Ok(witness)
}

/// Witnesses for every nested pair `U_m(w) ⊂ U_k(v)` with `k < m < N`.
pub fn all_wildness_witnesses(spec: &WreathChainSpec) -> Result<Vec<WildnessWitness>> {
    let mut out = Vec::new();
    for m in 1..spec.sig.horizon() {
        for w in spec.sig.level(m)? {
            for k in 0..m {
                out.push(find_wildness_witness(spec, &w.truncate(k), &w)?);
            }
        }
    }
    Ok(out)
}

/// Issues the witness-schema certificate once every nested pair has a
/// verified witness.
pub fn wild_certificate(spec: &WreathChainSpec) -> Result<(Certificate, Vec<WildnessWitness>)> {
    let witnesses = all_wildness_witnesses(spec)?;
    let horizon = spec.sig.horizon();
    if witnesses.is_empty() {
        return Err(Error::NoRoom {
            level: horizon,
            horizon,
        });
    }
    let cert = Certificate::wild(
        "wreath-witness-schema",
        horizon,
        format!(
            "{} nested cylinder pairs with room below each carry an element trivial on the \
             inner complement and nontrivial on the outer cylinder",
            witnesses.len()
        ),
    );
    Ok((cert, witnesses))
}

/// `|G_n : C_n^m| = A(m, n) |V_m| / |V_n|` for the stabilizer chain of any
/// path in `Aut(T_N)`, where `A(m, n)` is the order of the automorphism
/// group of levels `m+1..=n` below a vertex of level `m`.
pub fn structural_tower(sig: &TreeSignature) -> Result<DiscriminantTower> {
    let horizon = sig.horizon();
    let total = wreath_order(sig.degrees());
    let sizes = (0..=horizon)
        .map(|n| sig.level_size(n).map(BigUint::from))
        .collect::<Result<Vec<_>>>()?;
    let level_orders = sizes.iter().map(|v| &total / v).collect();
    let mut core_indices = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        let mut row = Vec::with_capacity(horizon + 1 - m);
        let mut below = BigUint::one();
        let mut count = 1u32;
        row.push(BigUint::one());
        for n in m + 1..=horizon {
            let l = sig.degree(n);
            below *= factorial(l).pow(count);
            count *= l as u32;
            row.push(&below * &sizes[m] / &sizes[n]);
        }
        core_indices.push(row);
    }
    DiscriminantTower::from_core_indices(Some(level_orders), sizes, core_indices)
}

pub fn abelianization_check(sig: &TreeSignature, n: usize, cap: usize) -> Result<usize> {
    let sig = Arc::new(sig.truncate(n)?);
    let group = GeneratedGroup::with_cap(
        Portrait::identity(Arc::clone(&sig)),
        wreath_generators(&sig, n)?,
        cap,
    );
    abelianization_order(&group)
}

/// `H_n` for `n = 1..=N` as the truncations of a group acting on `T_N`.
pub fn truncated_level_groups(
    group: &GeneratedGroup<Portrait>,
) -> Result<Vec<GeneratedGroup<Portrait>>> {
    let sig = group.identity().signature();
    (1..=sig.horizon())
        .map(|n| {
            let id = group.identity().truncate(n)?;
            let gens = group
                .generators()
                .iter()
                .map(|g| g.truncate(n))
                .collect::<Result<Vec<_>>>()?;
            Ok(GeneratedGroup::with_cap(id, gens, group.cap()))
        })
        .collect()
}

/// Kernel of the sign of the root permutation.
pub fn root_parity_kernel(
    sig: &Arc<TreeSignature>,
    cap: usize,
) -> Result<GeneratedGroup<Portrait>> {
    let root = VertexAddress::root();
    let l = sig.degree(1);
    let mut gens = Vec::new();
    for c in 2..l {
        let mut images: Vec<u32> = (0..l as u32).collect();
        images[0] = 1;
        images[1] = c as u32;
        images[c] = 0;
        gens.push(Portrait::from_vertex_perms(
            Arc::clone(sig),
            [(root.clone(), Permutation::from_images(images)?)],
        )?);
    }
    if sig.horizon() > 1 {
        for c in 0..l {
            gens.extend(subtree_generators(sig, &root.child(c))?);
        }
    }
    Ok(GeneratedGroup::with_cap(
        Portrait::identity(Arc::clone(sig)),
        gens,
        cap,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WildnessEvidence {
    /// `[Aut(T_n) : H_n]` for `n = 1..=N`.
    pub indices: Vec<String>,
    pub stabilized: bool,
    /// Smallest `n < N` with `W_n ⊆ H_N`, when the indices stabilize.
    pub kernel_level: Option<usize>,
    pub witness: Option<WitnessRecord>,
    pub summary: String,
}

/// Reports the index sequence of compatible level groups `H_1, ..., H_N` and,
/// if it has stabilized, a level kernel inside `H_N` with a witness in it.
pub fn finite_index_wildness_evidence(
    level_groups: &[GeneratedGroup<Portrait>],
) -> Result<WildnessEvidence> {
    if level_groups.is_empty() {
        return Err(Error::IncompatibleLevels { level: 0 });
    }
    for (i, g) in level_groups.iter().enumerate() {
        if g.identity().signature().horizon() != i + 1 {
            return Err(Error::IncompatibleLevels { level: i + 1 });
        }
    }
    for n in 1..level_groups.len() {
        let (upper, lower) = (&level_groups[n], &level_groups[n - 1]);
        let image: Vec<Portrait> = upper
            .generators()
            .iter()
            .map(|g| g.truncate(n))
            .collect::<Result<_>>()?;
        let image = lower.subgroup(image);
        if image.order()? != lower.order()? || !image.is_subgroup_of(lower)? {
            return Err(Error::IncompatibleLevels { level: n + 1 });
        }
    }
    let indices = level_groups
        .iter()
        .map(|g| {
            let sig = g.identity().signature();
            Ok(wreath_order(sig.degrees()) / BigUint::from(g.order()?))
        })
        .collect::<Result<Vec<_>>>()?;
    let horizon = level_groups.len();
    let stabilized = horizon >= 2 && indices[horizon - 1] == indices[horizon - 2];
    let mut kernel_level = None;
    let mut witness = None;
    if stabilized {
        let top = &level_groups[horizon - 1];
        let spec = WreathChainSpec::new(
            PathPrefix::leftmost(Arc::clone(top.identity().signature())),
            top.cap(),
        )?;
        for n in 0..horizon {
            let kernel = level_kernel(&spec, n)?;
            let mut inside = true;
            for g in &kernel.generators {
                if !top.contains(g)? {
                    inside = false;
                    break;
                }
            }
            if inside {
                kernel_level = Some(n);
                let inner = VertexAddress::new(vec![0; n.max(1)]);
                witness =
                    Some(find_wildness_witness(&spec, &VertexAddress::root(), &inner)?.record());
                break;
            }
        }
    }
    let shown: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    let summary = match kernel_level {
        Some(n) => format!(
            "indices [{}] stabilize and W_{n} lies in H_N: finite-index evidence -> wild",
            shown.join(", ")
        ),
        None if stabilized => format!(
            "indices [{}] stabilize but no level kernel lies in H_N",
            shown.join(", ")
        ),
        None => format!(
            "indices [{}] do not stabilize: no finite-index evidence",
            shown.join(", ")
        ),
    };
    Ok(WildnessEvidence {
        indices: shown,
        stabilized,
        kernel_level,
        witness,
        summary,
    })
}
