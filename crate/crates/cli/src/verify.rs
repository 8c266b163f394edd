//! Closed forms against brute-force oracles.

use std::collections::HashSet;
use std::sync::Arc;

use cantorchain_core::bs::{
    appendix_normality, bs_chain, closed_form_core, k_table, level_data, normality_fixtures,
    power_subgroup, quotient_context, BsParams, Metacyclic,
};
use cantorchain_core::chain::{build_chain_from_path, core_table, discriminant_tower};
use cantorchain_core::odometer::odometer;
use cantorchain_core::perm::{
    oracle, wreath_generators, wreath_order, GeneratedGroup, GroupElement, Portrait,
};
use cantorchain_core::tree::{path_metric, PathPrefix, TreeSignature, VertexAddress};
use cantorchain_core::wreath::{
    all_wildness_witnesses, level_kernel, structural_tower, WreathChainSpec,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, Family};
use crate::error::CliError;

/// Largest subgroup index enumerated for the divisibility criterion.
pub const FIXTURE_MAX_INDEX: u64 = 2000;
/// Largest quotient in which every criterion fixture is checked by conjugation.
const FIXTURE_GROUP_LIMIT: u64 = 100_000;
const ISOMETRY_SAMPLES: usize = 200;
const WORD_LENGTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

pub fn verify(config: &ExperimentConfig) -> Result<Vec<Check>, CliError> {
    config.validate()?;
    let cap = config.enumeration_cap();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &config.family {
        Family::Bs { q, d } => verify_bs(BsParams::new(*q, *d, config.horizon)?, cap, &mut rng),
        Family::Wreath { d } => {
            let sig = Arc::new(TreeSignature::constant(*d, config.horizon)?);
            verify_wreath(sig, cap, &mut rng)
        }
        Family::Odometer { d } => {
            let sig = Arc::new(TreeSignature::constant(*d, config.horizon)?);
            let a = odometer(&sig);
            let group = GeneratedGroup::with_cap(a.identity_like(), vec![a], cap);
            verify_chain(&group, &PathPrefix::leftmost(sig), &mut rng)
        }
        Family::Custom {
            degrees,
            generators,
            base_path,
        } => {
            let sig = Arc::new(TreeSignature::new(degrees.clone())?);
            let gens = generators
                .iter()
                .map(|g| Portrait::from_json(Arc::clone(&sig), g))
                .collect::<Result<Vec<_>, _>>()?;
            let group = GeneratedGroup::with_cap(Portrait::identity(Arc::clone(&sig)), gens, cap);
            let path = match base_path {
                Some(w) => PathPrefix::new(Arc::clone(&sig), VertexAddress::new(w.clone()))?,
                None => PathPrefix::leftmost(sig),
            };
            verify_chain(&group, &path, &mut rng)
        }
    }
}

/// A product of `WORD_LENGTH` random generators.
pub fn random_element<E: GroupElement>(group: &GeneratedGroup<E>, rng: &mut ChaCha8Rng) -> E {
    let gens = group.generators();
    let mut x = group.identity().clone();
    if gens.is_empty() {
        return x;
    }
    for _ in 0..WORD_LENGTH {
        let g = &gens[rng.gen_range(0..gens.len())];
        x = if rng.gen_bool(0.5) {
            x.compose(g)
        } else {
            x.compose(&g.inverse())
        };
    }
    x
}

pub fn random_leaf(sig: &Arc<TreeSignature>, rng: &mut ChaCha8Rng) -> PathPrefix {
    let word = (1..=sig.horizon())
        .map(|k| rng.gen_range(0..sig.degree(k)))
        .collect();
    PathPrefix::new(Arc::clone(sig), VertexAddress::new(word)).expect("letters are in range")
}

fn isometry_check(
    group: &GeneratedGroup<Portrait>,
    rng: &mut ChaCha8Rng,
) -> Result<Check, CliError> {
    let sig = Arc::clone(group.identity().signature());
    let mut check = Check::new("isometry of the path metric");
    for _ in 0..ISOMETRY_SAMPLES {
        let g = random_element(group, rng);
        let (x, y) = (random_leaf(&sig, rng), random_leaf(&sig, rng));
        let gx = PathPrefix::new(Arc::clone(&sig), g.apply(x.leaf())?)?;
        let gy = PathPrefix::new(Arc::clone(&sig), g.apply(y.leaf())?)?;
        let ok = path_metric(&gx, &gy)? == path_metric(&x, &y)?;
        check.record(ok, || {
            format!("x={} y={} g={:?}", x.leaf(), y.leaf(), g.to_json())
        });
    }
    Ok(check)
}

fn verify_chain(
    group: &GeneratedGroup<Portrait>,
    path: &PathPrefix,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>, CliError> {
    let chain = build_chain_from_path(group, path)?;
    let table = core_table(&chain)?;
    let mut cores = Check::new("normal core against intersection of conjugates");
    for m in 0..=chain.horizon() {
        for n in m..=chain.horizon() {
            let got: HashSet<Portrait> = table.core(m, n).elements()?.iter().cloned().collect();
            let want = oracle::brute_force_core(chain.level(m), chain.level(n))?;
            cores.record(got == want, || {
                format!("C_{n}^{m}: {} vs {}", got.len(), want.len())
            });
        }
    }
    Ok(vec![cores, isometry_check(group, rng)?])
}

fn verify_wreath(
    sig: Arc<TreeSignature>,
    cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>, CliError> {
    let spec = WreathChainSpec::new(PathPrefix::leftmost(Arc::clone(&sig)), cap)?;
    let total = spec.ambient_order();
    let fits = |x: &BigUint| *x <= BigUint::from(cap);

    let mut orders = Check::new("wreath order law");
    for n in 1..=sig.horizon() {
        let closed = wreath_order(&sig.degrees()[..n]);
        if !fits(&closed) {
            break;
        }
        let sub = Arc::new(sig.truncate(n)?);
        let g = GeneratedGroup::with_cap(
            Portrait::identity(Arc::clone(&sub)),
            wreath_generators(&sub, n)?,
            cap,
        );
        let got = BigUint::from(g.order()?);
        orders.record(got == closed, || {
            format!("n={n}: enumerated {got}, closed form {closed}")
        });
    }

    let mut kernels = Check::new("level kernel orders");
    for n in 0..=sig.horizon() {
        let w = level_kernel(&spec, n)?;
        let law = &w.order * wreath_order(&sig.degrees()[..n]) == total;
        let enumerated = if fits(&w.order) {
            BigUint::from(w.to_group(&sig, cap).order()?) == w.order
        } else {
            true
        };
        kernels.record(law && enumerated, || format!("W_{n} has order {}", w.order));
    }

    let mut tower = Check::new("structural tower against enumerated cores");
    if fits(&total) {
        let chain = build_chain_from_path(spec.ambient(), spec.base())?;
        let enumerated = discriminant_tower(&chain, &core_table(&chain)?)?;
        let closed = structural_tower(&sig)?;
        tower.record(enumerated == closed, || {
            format!(
                "discriminant orders {:?} vs {:?}",
                enumerated.discriminant_orders, closed.discriminant_orders
            )
        });
    }

    let mut witnesses = Check::new("wildness witnesses");
    for w in all_wildness_witnesses(&spec)? {
        let ok = w.verify()?;
        witnesses.record(ok, || format!("U({}) inside U({})", w.inner, w.outer));
    }

    Ok(vec![
        orders,
        kernels,
        tower,
        witnesses,
        isometry_check(spec.ambient(), rng)?,
    ])
}

fn verify_bs(params: BsParams, cap: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>, CliError> {
    let levels = level_data(&params)?;
    let k = k_table(&params, &levels)?;
    let horizon = params.horizon();

    let mut ladder = Check::new("divisibility ladder");
    for n in 1..=horizon {
        for m in 0..n {
            let ok = (&levels.s[n] % &levels.s[m]) == BigUint::ZERO
                && (&levels.modulus[n] % &levels.modulus[m]) == BigUint::ZERO
                && (k.get(m, n) % k.get(m + 1, n)) == BigUint::ZERO;
            ladder.record(ok, || format!("m={m} n={n}"));
        }
    }

    let mut relations = Check::new("relation audit");
    for n in 1..=horizon {
        let Ok(ctx) = quotient_context(&params, &levels, n) else {
            break;
        };
        let tau = Metacyclic::tau(&ctx);
        let sigma = Metacyclic::sigma(&ctx);
        relations.record(sigma.conjugate(&tau) == tau.pow(params.q()), || {
            format!("sigma tau sigma^-1 != tau^q in H_{n}")
        });
        for _ in 0..100 {
            let u: u64 = rng.gen_range(0..4 * ctx.exponent());
            let beta: i64 = rng.gen_range(-10_000..10_000);
            let lhs = sigma
                .pow(u)
                .compose(&Metacyclic::new(&ctx, beta as i128, 0));
            let rhs = Metacyclic::new(&ctx, beta as i128 * ctx.q_pow(u as i64) as i128, 0)
                .compose(&sigma.pow(u));
            relations.record(lhs == rhs, || format!("u={u} beta={beta} in H_{n}"));
        }
    }

    let enumerable = (1..=horizon)
        .rev()
        .find(|&n| levels.quotient_order(n) <= BigUint::from(cap));
    let mut cores = Check::new("core formula against enumerated cores");
    if let Some(top) = enumerable {
        let chain = bs_chain(&params.with_horizon(top), cap)?;
        let table = core_table(&chain)?;
        let ctx = chain.ambient().identity().context().clone();
        for m in 0..=top {
            for n in m..=top {
                let want: HashSet<Metacyclic> = closed_form_core(&ctx, &levels, &k, m, n)
                    .elements()?
                    .iter()
                    .cloned()
                    .collect();
                let got: HashSet<Metacyclic> =
                    table.core(m, n).elements()?.iter().cloned().collect();
                cores.record(got == want, || {
                    format!(
                        "C_{n}^{m}: enumerated {} elements, closed form {}",
                        got.len(),
                        want.len()
                    )
                });
            }
        }
    }

    let mut criterion = Check::new("divisibility criterion against conjugation");
    let fixture_level = (1..=horizon)
        .rev()
        .find(|&n| levels.quotient_order(n) <= BigUint::from(FIXTURE_GROUP_LIMIT.min(cap as u64)));
    if let Some(n) = fixture_level {
        let ctx = quotient_context(&params, &levels, n)?;
        for f in normality_fixtures(&ctx, FIXTURE_MAX_INDEX) {
            let (r, alpha) = f.ambient;
            let h = power_subgroup(&ctx, &BigUint::from(r), &BigUint::from(alpha), cap);
            let s = f.sub.image_in(&ctx, cap);
            let brute = oracle::is_normal_by_generators(&h, &s)?;
            let formula = appendix_normality(f.ambient, &f.sub, params.q())?;
            criterion.record(brute == formula, || {
                format!("{f:?} in H_{n}: criterion {formula}, conjugation {brute}")
            });
        }
    }

    Ok(vec![ladder, relations, cores, criterion])
}
