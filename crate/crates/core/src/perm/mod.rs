//! Finite group engine.
//!
//! Groups are given by generators over one of three element backends
//! ([`Permutation`], [`Portrait`] and the metacyclic pairs of
//! [`crate::bs::Metacyclic`]). Everything is computed by closure under the
//! generators, bounded by an enumeration cap, so the engine only answers
//! questions about groups small enough to list.

mod coset;
mod group;
pub mod oracle;
mod permutation;
mod portrait;

use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

pub use coset::{
    abelianization_order, coset_action, derived_subgroup, normal_closure, normal_core,
    quotient_group, CosetTable, Quotient,
};
pub use group::{GeneratedGroup, DEFAULT_CAP};
pub use permutation::Permutation;
pub use portrait::{wreath_generators, wreath_order, Portrait, PortraitJson};

/// Which element representation a group is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Permutation,
    Portrait,
    Metacyclic,
}

/// An element of a finite group with decidable equality.
///
/// `compose(g, h)` is the product `gh`; for actions this means `h` acts first.
pub trait GroupElement: Clone + Eq + Hash + Debug + Send + Sync {
    const BACKEND: Backend;

    fn compose(&self, rhs: &Self) -> Self;

    fn inverse(&self) -> Self;

    /// The identity of the group this element lives in.
    fn identity_like(&self) -> Self;

    fn is_identity(&self) -> bool;

    /// `self * x * self^{-1}`.
    fn conjugate(&self, x: &Self) -> Self {
        self.compose(x).compose(&self.inverse())
    }

    /// `self^{-1} rhs^{-1} self rhs`.
    fn commutator(&self, rhs: &Self) -> Self {
        self.inverse()
            .compose(&rhs.inverse())
            .compose(self)
            .compose(rhs)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.identity_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }
}
