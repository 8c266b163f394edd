//! Group chains at a finite horizon.
//!
//! A chain `G = G_0 ⊇ G_1 ⊇ ... ⊇ G_N` is analyzed through its relative cores
//! `C_n^m = core_{G_m}(G_n)` and the truncated discriminants
//! `D_{m,N} = G_N / C_N^m`. The bonding maps of the finite inverse system
//! `{G_n / C_n^m}` are induced by coset inclusion, so a thread is determined
//! by its deepest entry and the truncation of the discriminant at horizon `N`
//! is exactly `G_N / C_N^m`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{normal_core, GeneratedGroup, GroupElement, Portrait};
use crate::tree::{PathPrefix, VertexAddress};

/// Where a chain came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Vertex stabilizers along a base path.
    BasePath(Vec<usize>),
    /// A closed-form family, named.
    Family(String),
}

/// `G_0 ⊇ G_1 ⊇ ... ⊇ G_N` with `G_0` the ambient group.
#[derive(Debug, Clone)]
pub struct GroupChainHorizon<E: GroupElement> {
    levels: Vec<GeneratedGroup<E>>,
    // indices[n] = |G_{n-1} : G_n|, indices[0] = 1
    indices: Vec<u64>,
    provenance: Provenance,
}

impl<E: GroupElement> GroupChainHorizon<E> {
    /// Checks nesting by membership of generators and records the relative
    /// indices from the enumerated orders.
    pub fn new(levels: Vec<GeneratedGroup<E>>, provenance: Provenance) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::NotSubgroup("a chain needs at least G_0".into()));
        }
        let mut indices = vec![1u64];
        for n in 1..levels.len() {
            if !levels[n].is_subgroup_of(&levels[n - 1])? {
                return Err(Error::NotSubgroup(format!(
                    "G_{n} is not contained in G_{}",
                    n - 1
                )));
            }
            let (big, small) = (levels[n - 1].order()?, levels[n].order()?);
            indices.push((big / small) as u64);
        }
        Ok(Self {
            levels,
            indices,
            provenance,
        })
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn ambient(&self) -> &GeneratedGroup<E> {
        &self.levels[0]
    }

    pub fn level(&self, n: usize) -> &GeneratedGroup<E> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[GeneratedGroup<E>] {
        &self.levels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `|G_{n-1} : G_n|` for `n >= 1`, and 1 at `n = 0`.
    pub fn relative_index(&self, n: usize) -> u64 {
        self.indices[n]
    }

    /// `|G : G_n|`.
    pub fn index(&self, n: usize) -> u64 {
        self.indices[..=n].iter().product()
    }

    /// The chain `G_0 ⊇ G_k ⊇ G_{2k} ⊇ ...` restricted to levels `0, k, 2k, ...`.
    pub fn subchain(&self, step: usize) -> Result<Self> {
        let levels = self.levels.iter().step_by(step.max(1)).cloned().collect();
        Self::new(levels, self.provenance.clone())
    }
}

fn orbit_with_transversal(
    group: &GeneratedGroup<Portrait>,
    base: &VertexAddress,
) -> Result<Vec<(VertexAddress, Portrait)>> {
    let mut orbit = vec![(base.clone(), group.identity().clone())];
    let mut index = std::collections::HashMap::new();
    index.insert(base.clone(), 0usize);
    let mut i = 0;
    while i < orbit.len() {
        let (point, rep) = orbit[i].clone();
        for s in group.generators() {
            let image = s.apply(&point)?;
            if !index.contains_key(&image) {
                index.insert(image.clone(), orbit.len());
                orbit.push((image, s.compose(&rep)));
            }
        }
        i += 1;
    }
    Ok(orbit)
}

/// Stabilizer chain of a base path: `G_n` is the stabilizer of the depth-`n`
/// vertex of `path`. The action must be transitive on every level.
pub fn build_chain_from_path(
    action: &GeneratedGroup<Portrait>,
    path: &PathPrefix,
) -> Result<GroupChainHorizon<Portrait>> {
    let sig = action.identity().signature();
    if **sig != **path.signature() {
        return Err(Error::SignatureMismatch);
    }
    for n in 1..=sig.horizon() {
        let orbit = orbit_with_transversal(action, &path.vertex(n))?;
        if orbit.len() as u64 != sig.level_size(n)? {
            return Err(Error::NotTransitive { level: n });
        }
    }

    let mut levels = vec![action.clone()];
    for n in 1..=sig.horizon() {
        let parent = &levels[n - 1];
        let base = path.vertex(n);
        // Schreier generators of the stabilizer of `base` inside G_{n-1}.
        let orbit = orbit_with_transversal(parent, &base)?;
        let lookup: std::collections::HashMap<_, _> = orbit
            .iter()
            .map(|(p, rep)| (p.clone(), rep.clone()))
            .collect();
        let mut candidates = Vec::new();
        for (point, rep) in &orbit {
            for s in parent.generators() {
                let image = s.apply(point)?;
                let back = lookup[&image].inverse();
                let schreier = back.compose(s).compose(rep);
                if !schreier.is_identity() && !candidates.contains(&schreier) {
                    candidates.push(schreier);
                }
            }
        }
        let stab = GeneratedGroup::reduced(action.identity().clone(), &candidates, action.cap())?;
        levels.push(stab);
    }
    GroupChainHorizon::new(levels, Provenance::BasePath(path.leaf().word().to_vec()))
}

/// The relative cores `C_n^m` for `0 <= m <= n <= N`.
#[derive(Debug, Clone)]
pub struct CoreTable<E: GroupElement> {
    // rows[m][n - m] = C_n^m
    rows: Vec<Vec<GeneratedGroup<E>>>,
}

impl<E: GroupElement> CoreTable<E> {
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C_n^m`, the core of `G_n` in `G_m`.
    pub fn core(&self, m: usize, n: usize) -> &GeneratedGroup<E> {
        assert!(
            m <= n && n <= self.horizon(),
            "core index ({m}, {n}) out of range"
        );
        &self.rows[m][n - m]
    }

    /// `|C_n^m|` as a triangular table, row `m` listing `n = m..=N`.
    pub fn orders(&self) -> Result<Vec<Vec<BigUint>>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.order().map(BigUint::from))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }
}

pub fn core_table<E: GroupElement>(chain: &GroupChainHorizon<E>) -> Result<CoreTable<E>> {
    let horizon = chain.horizon();
    let mut rows = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        let mut row = Vec::with_capacity(horizon + 1 - m);
        row.push(chain.level(m).clone());
        for n in m + 1..=horizon {
            row.push(normal_core(chain.level(m), chain.level(n))?);
        }
        rows.push(row);
    }
    Ok(CoreTable { rows })
}

/// Orders describing the discriminant tower at a horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantTower {
    pub horizon: usize,
    /// `|G_n|` for `n = 0..=N`, when known.
    pub level_orders: Option<Vec<BigUint>>,
    /// `|G : G_n|` for `n = 0..=N`.
    pub indices: Vec<BigUint>,
    /// `|G_n : C_n^m|`, row `m` listing `n = m..=N`.
    pub core_indices: Vec<Vec<BigUint>>,
    /// `|D_{m,N}| = |G_N : C_N^m|` for `m = 0..=N`.
    pub discriminant_orders: Vec<BigUint>,
    /// Kernel order of `D_{m,N} -> D_{m+1,N}` for `m = 0..N`.
    pub psi_kernel_orders: Vec<BigUint>,
}

impl DiscriminantTower {
    /// Builds the tower from `|G : G_n|` and the core indices `|G_n : C_n^m|`.
    pub fn from_core_indices(
        level_orders: Option<Vec<BigUint>>,
        indices: Vec<BigUint>,
        core_indices: Vec<Vec<BigUint>>,
    ) -> Result<Self> {
        let horizon = indices.len() - 1;
        if core_indices.len() != horizon + 1
            || core_indices
                .iter()
                .enumerate()
                .any(|(m, row)| row.len() != horizon + 1 - m)
        {
            return Err(Error::InvalidAddress(
                "core index table has wrong shape".into(),
            ));
        }
        let discriminant_orders: Vec<BigUint> = core_indices
            .iter()
            .map(|row| row.last().unwrap().clone())
            .collect();
        let mut psi_kernel_orders = Vec::with_capacity(horizon);
        for m in 0..horizon {
            let (q, r) = discriminant_orders[m].div_rem(&discriminant_orders[m + 1]);
            if !r.is_zero() {
                return Err(Error::HypothesisFailed(format!(
                    "|D_{{{m},N}}| is not divisible by |D_{{{},N}}|",
                    m + 1
                )));
            }
            psi_kernel_orders.push(q);
        }
        Ok(Self {
            horizon,
            level_orders,
            indices,
            core_indices,
            discriminant_orders,
            psi_kernel_orders,
        })
    }

    /// Kernel orders for bases `m <= N - 2`. The last map `D_{N-1,N} -> D_{N,N}`
    /// always has the whole of `D_{N-1,N}` as kernel since `D_{N,N}` is
    /// trivial by construction, so it carries no information.
    pub fn informative_kernels(&self) -> &[BigUint] {
        let end = self.horizon.saturating_sub(1);
        &self.psi_kernel_orders[..end]
    }

    pub fn all_discriminants_trivial(&self) -> bool {
        self.discriminant_orders.iter().all(|d| d.is_one())
    }
}

pub fn discriminant_tower<E: GroupElement>(
    chain: &GroupChainHorizon<E>,
    table: &CoreTable<E>,
) -> Result<DiscriminantTower> {
    let horizon = chain.horizon();
    let level_orders = chain
        .levels()
        .iter()
        .map(|g| g.order().map(BigUint::from))
        .collect::<Result<Vec<_>>>()?;
    let indices = (0..=horizon)
        .map(|n| BigUint::from(chain.index(n)))
        .collect();
    let mut core_indices = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        let row = (m..=horizon)
            .map(|n| Ok(&level_orders[n] / BigUint::from(table.core(m, n).order()?)))
            .collect::<Result<Vec<_>>>()?;
        core_indices.push(row);
    }
    DiscriminantTower::from_core_indices(Some(level_orders), indices, core_indices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    StableCertified,
    WildCertified,
    Evidence,
}

/// A family-specific proof obligation discharged at some horizon.
///
/// Only the family modules of this crate can mint certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    kind: VerdictKind,
    name: String,
    horizon: usize,
    argument: String,
}

impl Certificate {
    pub(crate) fn stable(name: &str, horizon: usize, argument: String) -> Self {
        Self {
            kind: VerdictKind::StableCertified,
            name: name.to_string(),
            horizon,
            argument,
        }
    }

    pub(crate) fn wild(name: &str, horizon: usize, argument: String) -> Self {
        Self {
            kind: VerdictKind::WildCertified,
            name: name.to_string(),
            horizon,
            argument,
        }
    }

    pub fn kind(&self) -> VerdictKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn argument(&self) -> &str {
        &self.argument
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub reason: String,
    pub horizon: usize,
    pub certificate: Option<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at N={}: {}", self.kind, self.horizon, self.reason)
    }
}

/// Certified verdicts come only from certificates issued for this horizon;
/// anything else is reported as evidence carrying the kernel orders.
pub fn stability_verdict(tower: &DiscriminantTower, certificates: &[Certificate]) -> Verdict {
    if let Some(cert) = certificates.iter().find(|c| c.horizon == tower.horizon) {
        return Verdict {
            kind: cert.kind,
            reason: cert.argument.clone(),
            horizon: tower.horizon,
            certificate: Some(cert.name.clone()),
        };
    }
    let kernels: Vec<String> = tower
        .informative_kernels()
        .iter()
        .map(|k| k.to_string())
        .collect();
    let nontrivial = tower.informative_kernels().iter().any(|k| !k.is_one());
    let reason = if nontrivial {
        format!(
            "kernels nontrivial up to N={}: psi kernel orders [{}]",
            tower.horizon,
            kernels.join(", ")
        )
    } else {
        format!(
            "kernels trivial up to N={}: psi kernel orders [{}]",
            tower.horizon,
            kernels.join(", ")
        )
    };
    Verdict {
        kind: VerdictKind::Evidence,
        reason,
        horizon: tower.horizon,
        certificate: None,
    }
}

/// Outcome of the interleaving check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interleaving {
    pub interleavable: bool,
    /// Alternating indices `n_1, j_1, n_2, j_2, ...` with
    /// `G_{n_1} ⊇ H_{j_1} ⊇ G_{n_2} ⊇ ...`.
    pub schedule: Vec<usize>,
}

/// Greedy alternating containment: each step takes the smallest admissible
/// next index in the other chain. The chains interleave at this horizon when
/// the alternation runs until one of them is exhausted.
pub fn chains_interleavable<E: GroupElement>(
    a: &GroupChainHorizon<E>,
    b: &GroupChainHorizon<E>,
) -> Result<Interleaving> {
    let same_ambient =
        a.ambient().is_subgroup_of(b.ambient())? && b.ambient().is_subgroup_of(a.ambient())?;
    if !same_ambient {
        return Ok(Interleaving {
            interleavable: false,
            schedule: Vec::new(),
        });
    }
    let chains = [a, b];
    let mut schedule = vec![0usize];
    let mut next = [1usize, 0usize];
    let mut side = 1usize;
    loop {
        let current = &chains[1 - side].levels[*schedule.last().unwrap()];
        let target = chains[side];
        let mut found = None;
        for j in next[side]..=target.horizon() {
            if target.level(j).is_subgroup_of(current)? {
                found = Some(j);
                break;
            }
        }
        match found {
            Some(j) => {
                schedule.push(j);
                next[side] = j + 1;
                side = 1 - side;
            }
            None => break,
        }
    }
    // Reaching the deepest level of either chain means the alternation only
    // stopped because the horizon ran out.
    let last_a = schedule.iter().step_by(2).next_back().copied().unwrap_or(0);
    let last_b = schedule.iter().skip(1).step_by(2).next_back().copied();
    let interleavable = last_a == a.horizon() || last_b.is_some_and(|j| j == b.horizon());
    Ok(Interleaving {
        interleavable,
        schedule,
    })
}

/// A compatible sequence of cosets `g_n G_n`, `n = 0..=N`, stored by
/// representatives.
#[derive(Debug, Clone)]
pub struct CosetThread<E> {
    reps: Vec<E>,
}

impl<E: GroupElement> CosetThread<E> {
    pub fn new(chain: &GroupChainHorizon<E>, reps: Vec<E>) -> Result<Self> {
        if reps.len() != chain.horizon() + 1 {
            return Err(Error::IncompatibleThread { level: reps.len() });
        }
        for n in 0..chain.horizon() {
            let step = reps[n].inverse().compose(&reps[n + 1]);
            if !chain.level(n).contains(&step)? {
                return Err(Error::IncompatibleThread { level: n + 1 });
            }
        }
        Ok(Self { reps })
    }

    /// The thread `(x G_n)_n`.
    pub fn constant(chain: &GroupChainHorizon<E>, x: E) -> Self {
        Self {
            reps: vec![x; chain.horizon() + 1],
        }
    }

    pub fn representatives(&self) -> &[E] {
        &self.reps
    }

    /// Whether the two threads name the same coset at level `n`.
    pub fn agrees_at(&self, other: &Self, chain: &GroupChainHorizon<E>, n: usize) -> Result<bool> {
        chain
            .level(n)
            .contains(&self.reps[n].inverse().compose(&other.reps[n]))
    }

    /// Whether the two threads agree at every level.
    pub fn same_thread(&self, other: &Self, chain: &GroupChainHorizon<E>) -> Result<bool> {
        for n in 0..=chain.horizon() {
            if !self.agrees_at(other, chain, n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Left multiplication of a coset thread by `g`.
pub fn left_coset_dynamics<E: GroupElement>(
    chain: &GroupChainHorizon<E>,
    g: &E,
    thread: &CosetThread<E>,
) -> Result<CosetThread<E>> {
    let checked = CosetThread::new(chain, thread.reps.clone())?;
    CosetThread::new(chain, checked.reps.iter().map(|x| g.compose(x)).collect())
}

/// `φ_n(g G_n) = g · v_n`, identifying cosets of a stabilizer with vertices.
pub fn coset_to_vertex(rep: &Portrait, path: &PathPrefix, n: usize) -> Result<VertexAddress> {
    rep.apply(&path.vertex(n))
}

/// Convenience: the full automorphism group of a tree as a generated group.
pub fn full_tree_group(sig: &Arc<crate::tree::TreeSignature>) -> Result<GeneratedGroup<Portrait>> {
    Ok(GeneratedGroup::new(
        Portrait::identity(Arc::clone(sig)),
        crate::perm::wreath_generators(sig, sig.horizon())?,
    ))
}
