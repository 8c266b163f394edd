//! The Baumslag–Solitar family `BS(1, q) = ⟨σ, τ | στσ⁻¹ = τ^q⟩` acting
//! through its metacyclic quotients `H_n = Z/M_n ⋊ Z/s_n`.
//!
//! Level data: `s_n` is the order of `q` modulo `d^n` and
//! `M_n = q^{s_n} - 1 = c_n d^n`. The chain is `G_0 = G` and
//! `G_n = ⟨τ^{M_n}, σ⟩`, with relative cores `C_n^m = ⟨τ^{M_n}, σ^{k_{m,n}}⟩`
//! where `k_{m,n}` is the order of `q` modulo `M_n / M_m`.

mod arith;
mod metacyclic;

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

pub use arith::{factor, multiplicative_order, order_dividing};
pub use metacyclic::{Metacyclic, MetacyclicContext};

use crate::chain::{Certificate, DiscriminantTower, GroupChainHorizon, Provenance};
use crate::error::{Error, Result};
use crate::perm::{GeneratedGroup, GroupElement, DEFAULT_CAP};

/// Trial-division bound and iteration cap for orders modulo `d^n`.
pub const ORDER_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BsParams {
    q: u64,
    d: u64,
    horizon: usize,
}

impl BsParams {
    pub fn new(q: u64, d: u64, horizon: usize) -> Result<Self> {
        if q < 2 || d < 2 {
            return Err(Error::InvalidSignature(format!(
                "q={q} and d={d} must be at least 2"
            )));
        }
        if q.gcd(&d) != 1 {
            return Err(Error::NotCoprime {
                a: q.to_string(),
                m: d.to_string(),
            });
        }
        Ok(Self { q, d, horizon })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        Self { horizon, ..*self }
    }

    /// `d` an odd prime and `q` a power of an odd prime other than `d`.
    pub fn odd_prime_regime(&self) -> bool {
        let odd_prime = |p: u64| p > 2 && is_prime(p);
        if !odd_prime(self.d) {
            return false;
        }
        let p = smallest_prime_factor(self.q);
        let mut rest = self.q;
        while rest.is_multiple_of(p) {
            rest /= p;
        }
        rest == 1 && odd_prime(p) && p != self.d
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// `s_n`, `c_n` and `M_n = c_n d^n` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelData {
    pub s: Vec<BigUint>,
    pub c: Vec<BigUint>,
    pub modulus: Vec<BigUint>,
}

impl LevelData {
    pub fn horizon(&self) -> usize {
        self.s.len() - 1
    }

    /// `|H_n| = M_n s_n` for `n >= 1`; `H_0` is trivial.
    pub fn quotient_order(&self, n: usize) -> BigUint {
        if n == 0 {
            BigUint::one()
        } else {
            &self.modulus[n] * &self.s[n]
        }
    }

    /// `|G : G_n|`, which is `M_n` for `n >= 1`.
    pub fn index(&self, n: usize) -> BigUint {
        if n == 0 {
            BigUint::one()
        } else {
            self.modulus[n].clone()
        }
    }
}

pub fn level_data(params: &BsParams) -> Result<LevelData> {
    let q = BigUint::from(params.q);
    let d = BigUint::from(params.d);
    let mut s = Vec::with_capacity(params.horizon + 1);
    let mut c = Vec::with_capacity(params.horizon + 1);
    let mut modulus = Vec::with_capacity(params.horizon + 1);
    for n in 0..=params.horizon {
        let dn = d.pow(n as u32);
        let sn = multiplicative_order(&q, &dn, ORDER_CAP)?;
        let exp = sn
            .to_u32()
            .ok_or_else(|| Error::Overflow(format!("s_{n} = {sn} is too large")))?;
        let mn = q.pow(exp) - 1u32;
        let (cn, rem) = mn.div_rem(&dn);
        if !rem.is_zero() {
            return Err(Error::HypothesisFailed(format!(
                "d^{n} does not divide q^s_{n} - 1"
            )));
        }
        s.push(sn);
        c.push(cn);
        modulus.push(mn);
    }
    for n in 1..s.len() {
        if !(&s[n] % &s[n - 1]).is_zero() || !(&modulus[n] % &modulus[n - 1]).is_zero() {
            return Err(Error::HypothesisFailed(format!(
                "divisibility ladder fails at level {n}"
            )));
        }
    }
    Ok(LevelData { s, c, modulus })
}

/// `k_{m,n}` for `0 <= m <= n <= N`, stored by rows: `rows[m][n - m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTable {
    pub rows: Vec<Vec<BigUint>>,
}

impl KTable {
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, m: usize, n: usize) -> &BigUint {
        &self.rows[m][n - m]
    }
}

pub fn k_table(params: &BsParams, levels: &LevelData) -> Result<KTable> {
    let q = BigUint::from(params.q);
    let horizon = levels.horizon();
    let mut rows = Vec::with_capacity(horizon + 1);
    for m in 0..=horizon {
        let row = (m..=horizon)
            .map(|n| {
                let ratio = &levels.modulus[n] / &levels.modulus[m];
                order_dividing(&q, &ratio, &levels.s[n])
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(KTable { rows })
}

fn small(x: &BigUint, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::Overflow(format!("{what} = {x} does not fit a machine word")))
}

/// The ring data `(M_n, s_n, q)` of `H_n`.
pub fn quotient_context(
    params: &BsParams,
    levels: &LevelData,
    n: usize,
) -> Result<Arc<MetacyclicContext>> {
    if n > levels.horizon() {
        return Err(Error::DepthOutOfRange {
            depth: n,
            horizon: levels.horizon(),
        });
    }
    if n == 0 {
        return MetacyclicContext::new(1, 1, params.q);
    }
    MetacyclicContext::new(
        small(&levels.modulus[n], "M_n")?,
        small(&levels.s[n], "s_n")?,
        params.q,
    )
}

/// `H_n` generated by `τ` and `σ`.
pub fn galois_group(params: &BsParams, n: usize) -> Result<GeneratedGroup<Metacyclic>> {
    let levels = level_data(&params.with_horizon(n))?;
    let ctx = quotient_context(params, &levels, n)?;
    if n == 0 {
        return Ok(GeneratedGroup::trivial(Metacyclic::identity(&ctx)));
    }
    Ok(GeneratedGroup::new(
        Metacyclic::identity(&ctx),
        vec![Metacyclic::tau(&ctx), Metacyclic::sigma(&ctx)],
    ))
}

/// `⟨τ^a, σ^b⟩` inside the given quotient.
pub fn power_subgroup(
    ctx: &Arc<MetacyclicContext>,
    a: &BigUint,
    b: &BigUint,
    cap: usize,
) -> GeneratedGroup<Metacyclic> {
    let a = (a % ctx.modulus()).to_u64().unwrap() as i128;
    let b = (b % ctx.exponent()).to_u64().unwrap() as i128;
    GeneratedGroup::with_cap(
        Metacyclic::identity(ctx),
        vec![Metacyclic::new(ctx, a, 0), Metacyclic::new(ctx, 0, b)],
        cap,
    )
}

/// The chain `G_0 ⊇ ... ⊇ G_N` realized inside `H_N`.
pub fn bs_chain(params: &BsParams, cap: usize) -> Result<GroupChainHorizon<Metacyclic>> {
    let levels = level_data(params)?;
    let horizon = params.horizon;
    if horizon == 0 {
        let ctx = quotient_context(params, &levels, 0)?;
        return GroupChainHorizon::new(
            vec![GeneratedGroup::trivial(Metacyclic::identity(&ctx))],
            family_provenance(params),
        );
    }
    if levels.quotient_order(horizon) > BigUint::from(cap) {
        return Err(Error::CapExceeded { cap });
    }
    let ctx = quotient_context(params, &levels, horizon)?;
    let mut chain = vec![power_subgroup(&ctx, &BigUint::one(), &BigUint::one(), cap)];
    for n in 1..=horizon {
        chain.push(power_subgroup(
            &ctx,
            &levels.modulus[n],
            &BigUint::one(),
            cap,
        ));
    }
    GroupChainHorizon::new(chain, family_provenance(params))
}

fn family_provenance(params: &BsParams) -> Provenance {
    Provenance::Family(format!("bs(q={}, d={})", params.q, params.d))
}

/// `C_n^m = ⟨τ^{M_n}, σ^{k_{m,n}}⟩` inside the quotient `ctx`.
pub fn closed_form_core(
    ctx: &Arc<MetacyclicContext>,
    levels: &LevelData,
    k: &KTable,
    m: usize,
    n: usize,
) -> GeneratedGroup<Metacyclic> {
    let a = if n == 0 {
        BigUint::one()
    } else {
        levels.modulus[n].clone()
    };
    power_subgroup(ctx, &a, k.get(m, n), DEFAULT_CAP)
}

/// The discriminant tower from the closed forms `|G : G_n| = M_n` and
/// `|G_n : C_n^m| = k_{m,n}`.
pub fn closed_form_tower(levels: &LevelData, k: &KTable) -> Result<DiscriminantTower> {
    let horizon = levels.horizon();
    let indices = (0..=horizon).map(|n| levels.index(n)).collect();
    let level_orders = if horizon == 0 {
        Some(vec![BigUint::one()])
    } else {
        let total = levels.quotient_order(horizon);
        Some((0..=horizon).map(|n| &total / levels.index(n)).collect())
    };
    DiscriminantTower::from_core_indices(level_orders, indices, k.rows.clone())
}

/// `⟨τ^ℓ, σ^m τ^s⟩`, a subgroup of index `mℓ` in `BS(1, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DudkinTriple {
    pub ell: u64,
    pub m: u64,
    pub s: u64,
}

impl DudkinTriple {
    pub fn new(ell: u64, m: u64, s: u64, q: u64) -> Result<Self> {
        if ell == 0 || m == 0 || s >= ell {
            return Err(Error::NotSubgroup(format!(
                "({ell}, {m}, {s}) is not a valid triple"
            )));
        }
        if ell.gcd(&q) != 1 {
            return Err(Error::NotCoprime {
                a: q.to_string(),
                m: ell.to_string(),
            });
        }
        Ok(Self { ell, m, s })
    }

    pub fn index(&self) -> u64 {
        self.ell * self.m
    }

    /// Generators `τ^ℓ` and `σ^m τ^s` in the quotient.
    pub fn generators_in(&self, ctx: &Arc<MetacyclicContext>) -> Vec<Metacyclic> {
        let twist =
            Metacyclic::sigma(ctx)
                .pow(self.m)
                .compose(&Metacyclic::new(ctx, self.s as i128, 0));
        vec![Metacyclic::new(ctx, self.ell as i128, 0), twist]
    }

    pub fn image_in(&self, ctx: &Arc<MetacyclicContext>, cap: usize) -> GeneratedGroup<Metacyclic> {
        GeneratedGroup::with_cap(Metacyclic::identity(ctx), self.generators_in(ctx), cap)
    }

    /// Whether the subgroup contains the kernel `⟨τ^M, σ^S⟩` of the quotient,
    /// so that its image there has the same index: `ℓ | M`, `m | S`, and the
    /// `τ`-part of `(σ^m τ^s)^{S/m}` is a multiple of `ℓ`.
    pub fn contains_kernel(&self, ctx: &MetacyclicContext) -> bool {
        let (modulus, exponent) = (ctx.modulus(), ctx.exponent());
        if modulus % self.ell != 0 || exponent % self.m != 0 {
            return false;
        }
        let step = ctx.q_pow(self.m as i64) % self.ell;
        let mut geometric = 0u64;
        let mut power = 1u64;
        for _ in 0..exponent / self.m {
            geometric = (geometric + power) % self.ell;
            power = (power as u128 * step as u128 % self.ell as u128) as u64;
        }
        let tail = self.s as u128 * step as u128 % self.ell as u128 * geometric as u128;
        tail.is_multiple_of(self.ell as u128)
    }
}

/// Divisibility test for normality of `S = ⟨τ^t, σ^m τ^s⟩` in `H = ⟨τ^r, σ^α⟩`:
/// `t/r` divides `q^m - 1` and `t` divides `s(q^α - 1)`.
pub fn appendix_normality(ambient: (u64, u64), sub: &DudkinTriple, q: u64) -> Result<bool> {
    let (r, alpha) = ambient;
    if r == 0 || alpha == 0 || r.gcd(&q) != 1 {
        return Err(Error::NotSubgroup(format!(
            "⟨τ^{r}, σ^{alpha}⟩ is not a valid ambient"
        )));
    }
    if !sub.ell.is_multiple_of(r) || !sub.m.is_multiple_of(alpha) || !sub.s.is_multiple_of(r) {
        return Err(Error::NotSubgroup(format!(
            "⟨τ^{}, σ^{}τ^{}⟩ is not contained in ⟨τ^{r}, σ^{alpha}⟩",
            sub.ell, sub.m, sub.s
        )));
    }
    let q = BigUint::from(q);
    let t = BigUint::from(sub.ell);
    let first = (q.pow(sub.m as u32) - 1u32) % BigUint::from(sub.ell / r);
    let second = (BigUint::from(sub.s) * (q.pow(alpha as u32) - 1u32)) % t;
    Ok(first.is_zero() && second.is_zero())
}

/// A normality test case inside `H_n`: an ambient `⟨τ^r, σ^α⟩` and a triple
/// contained in it, both containing the kernel of the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormalityFixture {
    pub ambient: (u64, u64),
    pub sub: DudkinTriple,
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|k| n.is_multiple_of(*k)).collect()
}

/// Every fixture with subgroup index at most `max_index` inside the quotient.
pub fn normality_fixtures(ctx: &MetacyclicContext, max_index: u64) -> Vec<NormalityFixture> {
    let q = ctx.q();
    let mut out = Vec::new();
    let ells: Vec<u64> = divisors(ctx.modulus())
        .into_iter()
        .filter(|&l| l <= max_index)
        .collect();
    for &ell in &ells {
        for m in divisors(ctx.exponent()) {
            if ell * m > max_index {
                continue;
            }
            for s in 0..ell {
                let sub = DudkinTriple { ell, m, s };
                if !sub.contains_kernel(ctx) {
                    continue;
                }
                for r in divisors(ell) {
                    if s % r != 0 || r.gcd(&q) != 1 {
                        continue;
                    }
                    for alpha in divisors(m) {
                        out.push(NormalityFixture {
                            ambient: (r, alpha),
                            sub,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Checks the monotonicity and divisibility of the `k`-table and issues a
/// stability certificate for the horizon.
pub fn stability_certificate(params: &BsParams) -> Result<Certificate> {
    let levels = level_data(params)?;
    let k = k_table(params, &levels)?;
    let horizon = params.horizon;
    for m in 0..=horizon {
        for n in m + 1..=horizon {
            if k.get(m, n) < k.get(m, n - 1) {
                return Err(Error::HypothesisFailed(format!(
                    "k_{{{m},{n}}} = {} decreases from {}",
                    k.get(m, n),
                    k.get(m, n - 1)
                )));
            }
            for j in m..=n {
                if !(k.get(m, n) % k.get(j, n)).is_zero() {
                    return Err(Error::HypothesisFailed(format!(
                        "k_{{{j},{n}}} does not divide k_{{{m},{n}}}"
                    )));
                }
            }
        }
        if m < horizon && k.get(m, horizon) <= k.get(m, m) {
            return Err(Error::HypothesisFailed(format!(
                "k_{{{m},n}} never grows beyond its base up to N={horizon}"
            )));
        }
    }
    let regime = if params.odd_prime_regime() {
        ""
    } else {
        "; parameters outside the odd prime regime"
    };
    Ok(Certificate::stable(
        "bs-closed-form",
        horizon,
        format!(
            "k_{{m,n}} non-decreasing and growing in every column up to N={horizon}, \
             so sigma-coset maps G_n/C_n -> G_n/C_n^m are eventually injective{regime}"
        ),
    ))
}
