use std::collections::HashMap;

use super::{GeneratedGroup, GroupElement, Permutation};
use crate::error::{Error, Result};

/// Left cosets `G/H` with a label for every element of `G`.
#[derive(Debug, Clone)]
pub struct CosetTable<E> {
    reps: Vec<E>,
    label: HashMap<E, usize>,
    generator_images: Vec<Permutation>,
}

impl<E: GroupElement> CosetTable<E> {
    pub fn build(g: &GeneratedGroup<E>, h: &GeneratedGroup<E>) -> Result<Self> {
        if !h.is_subgroup_of(g)? {
            return Err(Error::NotSubgroup(
                "a generator of H does not lie in G".into(),
            ));
        }
        let g_elems = g.elements()?;
        let h_elems = h.elements()?;
        let mut reps = Vec::with_capacity(g_elems.len() / h_elems.len());
        let mut label = HashMap::with_capacity(g_elems.len());
        for x in g_elems {
            if label.contains_key(x) {
                continue;
            }
            let idx = reps.len();
            for y in h_elems {
                label.insert(x.compose(y), idx);
            }
            reps.push(x.clone());
        }
        let generator_images = g
            .generators()
            .iter()
            .map(|s| {
                let images = reps.iter().map(|t| label[&s.compose(t)] as u32).collect();
                Permutation::from_images(images)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            reps,
            label,
            generator_images,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representatives(&self) -> &[E] {
        &self.reps
    }

    /// Index of the coset containing `x`, if `x` lies in `G`.
    pub fn coset_of(&self, x: &E) -> Option<usize> {
        self.label.get(x).copied()
    }

    /// Permutation of the cosets induced by each generator of `G`, in order.
    pub fn generator_images(&self) -> &[Permutation] {
        &self.generator_images
    }

    /// Permutation of the cosets induced by left multiplication with `x`.
    pub fn action_of(&self, x: &E) -> Option<Permutation> {
        let images = self
            .reps
            .iter()
            .map(|t| self.coset_of(&x.compose(t)).map(|i| i as u32))
            .collect::<Option<Vec<_>>>()?;
        Permutation::from_images(images).ok()
    }

    /// Whether `x` fixes every coset.
    pub fn acts_trivially(&self, x: &E) -> bool {
        self.reps
            .iter()
            .enumerate()
            .all(|(i, t)| self.label.get(&x.compose(t)) == Some(&i))
    }
}

/// Coset count `|G : H|` and the permutation action of each generator of `G`
/// on `G/H`.
pub fn coset_action<E: GroupElement>(
    g: &GeneratedGroup<E>,
    h: &GeneratedGroup<E>,
) -> Result<(usize, Vec<Permutation>)> {
    let table = CosetTable::build(g, h)?;
    Ok((table.len(), table.generator_images.clone()))
}

/// The largest subgroup of `H` normal in `G`, extracted as the kernel of the
/// action of `G` on `G/H`.
pub fn normal_core<E: GroupElement>(
    g: &GeneratedGroup<E>,
    h: &GeneratedGroup<E>,
) -> Result<GeneratedGroup<E>> {
    let table = CosetTable::build(g, h)?;
    let kernel: Vec<E> = h
        .elements()?
        .iter()
        .filter(|x| table.acts_trivially(x))
        .cloned()
        .collect();
    GeneratedGroup::from_closed_elements(g.identity().clone(), &kernel, g.cap())
}

/// `G/N` realized as the regular permutation action on cosets of `N`.
#[derive(Debug, Clone)]
pub struct Quotient<E> {
    group: GeneratedGroup<Permutation>,
    table: CosetTable<E>,
}

impl<E: GroupElement> Quotient<E> {
    pub fn group(&self) -> &GeneratedGroup<Permutation> {
        &self.group
    }

    /// Image of `x` under the quotient map.
    pub fn map(&self, x: &E) -> Option<Permutation> {
        self.table.action_of(x)
    }
}

pub fn quotient_group<E: GroupElement>(
    g: &GeneratedGroup<E>,
    n: &GeneratedGroup<E>,
) -> Result<Quotient<E>> {
    if !n.is_subgroup_of(g)? {
        return Err(Error::NotSubgroup("N is not contained in G".into()));
    }
    if !n.is_normal_in(g)? {
        return Err(Error::NotNormal(
            "conjugate of a generator of N leaves N".into(),
        ));
    }
    let table = CosetTable::build(g, n)?;
    let group = GeneratedGroup::with_cap(
        Permutation::identity(table.len()),
        table.generator_images.clone(),
        g.cap(),
    );
    Ok(Quotient { group, table })
}

/// Smallest normal subgroup of `g` containing `seeds`.
pub fn normal_closure<E: GroupElement>(
    g: &GeneratedGroup<E>,
    seeds: Vec<E>,
) -> Result<GeneratedGroup<E>> {
    let mut gens: Vec<E> = seeds.into_iter().filter(|x| !x.is_identity()).collect();
    'grow: loop {
        let k = g.subgroup(gens.clone());
        k.elements()?;
        for a in g.generators() {
            for x in &gens {
                let c = a.conjugate(x);
                if !k.contains(&c)? {
                    gens.push(c);
                    continue 'grow;
                }
            }
        }
        return Ok(k);
    }
}

/// Commutator subgroup `[G, G]`: the normal closure of the commutators of
/// pairs of generators.
pub fn derived_subgroup<E: GroupElement>(g: &GeneratedGroup<E>) -> Result<GeneratedGroup<E>> {
    let gens = g.generators();
    let mut seeds = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            seeds.push(a.commutator(b));
        }
    }
    normal_closure(g, seeds)
}

/// `|G / [G, G]|`.
pub fn abelianization_order<E: GroupElement>(g: &GeneratedGroup<E>) -> Result<usize> {
    Ok(g.order()? / derived_subgroup(g)?.order()?)
}
