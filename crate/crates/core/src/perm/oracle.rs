//! Brute-force reference computations.
//!
//! These go straight from the definitions (intersections of all conjugates,
//! conjugation by every element) and share nothing with the coset-table
//! machinery, so they can be used to cross-check it.

use std::collections::HashSet;

use super::{GeneratedGroup, GroupElement};
use crate::error::Result;

/// `∩_{g in G} g H g^{-1}` as an element set.
pub fn brute_force_core<E: GroupElement>(
    g: &GeneratedGroup<E>,
    h: &GeneratedGroup<E>,
) -> Result<HashSet<E>> {
    let h_set: HashSet<E> = h.enumerate()?.into_iter().collect();
    let mut core = h_set.clone();
    for x in g.enumerate()? {
        let x_inv = x.inverse();
        core.retain(|s| h_set.contains(&x_inv.compose(s).compose(&x)));
    }
    Ok(core)
}

/// Whether `g s g^{-1}` lies in `S` for every `g` in `G` and `s` in `S`.
pub fn brute_force_is_normal<E: GroupElement>(
    g: &GeneratedGroup<E>,
    s: &GeneratedGroup<E>,
) -> Result<bool> {
    let s_set: HashSet<E> = s.enumerate()?.into_iter().collect();
    for x in g.enumerate()? {
        for y in &s_set {
            if !s_set.contains(&x.conjugate(y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `g s g^{-1}` lies in `S` for every generator `g` of `G` and every
/// element `s` of `S`. Sufficient for normality in a finite group and far
/// cheaper than [`brute_force_is_normal`] when `G` is large.
pub fn is_normal_by_generators<E: GroupElement>(
    g: &GeneratedGroup<E>,
    s: &GeneratedGroup<E>,
) -> Result<bool> {
    let s_elems = s.elements()?;
    for x in g.generators() {
        let x_inv = x.inverse();
        for y in s_elems {
            if !s_elems.contains(&x.compose(y).compose(&x_inv)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
