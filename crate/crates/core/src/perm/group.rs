use std::fmt;
use std::sync::{Arc, OnceLock};

use indexmap::IndexSet;

use super::{Backend, GroupElement};
use crate::error::{Error, Result};

/// Default bound on the number of elements any single enumeration may reach.
pub const DEFAULT_CAP: usize = 1_000_000;

/// A finite group given by generators.
///
/// The element list is produced on first use by breadth-first closure and
/// cached; clones share the cache.
#[derive(Clone)]
pub struct GeneratedGroup<E> {
    identity: E,
    generators: Vec<E>,
    cap: usize,
    elements: Arc<OnceLock<Arc<IndexSet<E>>>>,
}

impl<E: GroupElement> GeneratedGroup<E> {
    pub fn new(identity: E, generators: Vec<E>) -> Self {
        Self::with_cap(identity, generators, DEFAULT_CAP)
    }

    pub fn with_cap(identity: E, generators: Vec<E>, cap: usize) -> Self {
        Self {
            identity,
            generators,
            cap,
            elements: Arc::new(OnceLock::new()),
        }
    }

    pub fn trivial(identity: E) -> Self {
        Self::new(identity, Vec::new())
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn backend(&self) -> Backend {
        E::BACKEND
    }

    /// Another group over the same identity and cap.
    pub fn subgroup(&self, generators: Vec<E>) -> Self {
        Self::with_cap(self.identity.clone(), generators, self.cap)
    }

    /// All elements, identity first, then breadth-first over right
    /// multiplication by the generators in order.
    pub fn elements(&self) -> Result<&IndexSet<E>> {
        if let Some(set) = self.elements.get() {
            return Ok(set);
        }
        let set = close(&self.identity, &self.generators, self.cap)?;
        Ok(self.elements.get_or_init(|| Arc::new(set)))
    }

    pub fn enumerate(&self) -> Result<Vec<E>> {
        Ok(self.elements()?.iter().cloned().collect())
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, x: &E) -> Result<bool> {
        Ok(self.elements()?.contains(x))
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &GeneratedGroup<E>) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether conjugation by every generator of `ambient` preserves `self`.
    pub fn is_normal_in(&self, ambient: &GeneratedGroup<E>) -> Result<bool> {
        for a in ambient.generators() {
            for x in &self.generators {
                if !self.contains(&a.conjugate(x))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_trivial(&self) -> Result<bool> {
        Ok(self.order()? == 1)
    }

    /// The group generated by `candidates`, keeping only those candidates not
    /// already generated by the ones kept before them.
    pub fn reduced(identity: E, candidates: &[E], cap: usize) -> Result<Self> {
        let mut gens: Vec<E> = Vec::new();
        let mut current: IndexSet<E> = IndexSet::from([identity.clone()]);
        for x in candidates {
            if current.contains(x) {
                continue;
            }
            gens.push(x.clone());
            current = close(&identity, &gens, cap)?;
        }
        let group = Self::with_cap(identity, gens, cap);
        let _ = group.elements.set(Arc::new(current));
        Ok(group)
    }

    /// The subgroup consisting of exactly `elements` (which must already be
    /// closed under multiplication), with a greedily chosen generating set.
    pub fn from_closed_elements(identity: E, elements: &[E], cap: usize) -> Result<Self> {
        let group = Self::reduced(identity, elements, cap)?;
        let order = group.order()?;
        if order != elements.len() {
            return Err(Error::NotSubgroup(format!(
                "{} elements generate a group of order {order}",
                elements.len()
            )));
        }
        Ok(group)
    }
}

fn close<E: GroupElement>(identity: &E, generators: &[E], cap: usize) -> Result<IndexSet<E>> {
    let mut set = IndexSet::new();
    set.insert(identity.clone());
    let mut i = 0;
    while i < set.len() {
        let x = set[i].clone();
        for s in generators {
            let y = x.compose(s);
            if set.insert(y) && set.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        i += 1;
    }
    Ok(set)
}

impl<E: GroupElement> fmt::Debug for GeneratedGroup<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratedGroup")
            .field("backend", &E::BACKEND)
            .field("generators", &self.generators.len())
            .field("order", &self.elements.get().map(|s| s.len()))
            .finish()
    }
}
