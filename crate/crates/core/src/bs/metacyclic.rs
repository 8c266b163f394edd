//! Finite metacyclic quotients `Z/M ⋊ Z/S` of `BS(1, q)`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::perm::{Backend, GroupElement};

/// `(M, S, q)` with `q^S ≡ 1 (mod M)`, so that `σ: a ↦ q a` has order
/// dividing `S` on `Z/M`.
#[derive(Debug, PartialEq, Eq)]
pub struct MetacyclicContext {
    modulus: u64,
    exponent: u64,
    q: u64,
    // q^b mod M for 0 <= b < S
    powers: Vec<u64>,
}

impl MetacyclicContext {
    pub fn new(modulus: u64, exponent: u64, q: u64) -> Result<Arc<Self>> {
        if modulus == 0 || exponent == 0 {
            return Err(Error::InvalidAddress(
                "modulus and exponent must be positive".into(),
            ));
        }
        if exponent > 1 << 24 {
            return Err(Error::Overflow(format!(
                "exponent {exponent} too large to tabulate"
            )));
        }
        let mut powers = Vec::with_capacity(exponent as usize);
        let mut acc = 1 % modulus;
        for _ in 0..exponent {
            powers.push(acc);
            acc = mul_mod(acc, q % modulus, modulus);
        }
        if acc != 1 % modulus {
            return Err(Error::HypothesisFailed(format!(
                "{q}^{exponent} is not 1 modulo {modulus}"
            )));
        }
        Ok(Arc::new(Self {
            modulus,
            exponent,
            q,
            powers,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^b mod M` for any integer exponent `b`.
    pub fn q_pow(&self, b: i64) -> u64 {
        self.powers[b.rem_euclid(self.exponent as i64) as usize]
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The element `τ^a σ^b`, written as the pair `(a mod M, b mod S)` with
/// product `(a, b)(a', b') = (a + q^b a', b + b')`.
#[derive(Clone)]
pub struct Metacyclic {
    a: u64,
    b: u64,
    ctx: Arc<MetacyclicContext>,
}

impl Metacyclic {
    pub fn new(ctx: &Arc<MetacyclicContext>, a: i128, b: i128) -> Self {
        Self {
            a: a.rem_euclid(ctx.modulus as i128) as u64,
            b: b.rem_euclid(ctx.exponent as i128) as u64,
            ctx: Arc::clone(ctx),
        }
    }

    pub fn identity(ctx: &Arc<MetacyclicContext>) -> Self {
        Self::new(ctx, 0, 0)
    }

    /// `τ = (1, 0)`.
    pub fn tau(ctx: &Arc<MetacyclicContext>) -> Self {
        Self::new(ctx, 1, 0)
    }

    /// `σ = (0, 1)`.
    pub fn sigma(ctx: &Arc<MetacyclicContext>) -> Self {
        Self::new(ctx, 0, 1)
    }

    pub fn parts(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn context(&self) -> &Arc<MetacyclicContext> {
        &self.ctx
    }
}

impl PartialEq for Metacyclic {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for Metacyclic {}

impl Hash for Metacyclic {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.a);
        state.write_u64(self.b);
    }
}

impl fmt::Debug for Metacyclic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl GroupElement for Metacyclic {
    const BACKEND: Backend = Backend::Metacyclic;

    fn compose(&self, rhs: &Self) -> Self {
        let m = self.ctx.modulus;
        let twisted = mul_mod(self.ctx.powers[self.b as usize], rhs.a, m);
        let a = (self.a as u128 + twisted as u128) % m as u128;
        let b = (self.b + rhs.b) % self.ctx.exponent;
        Self {
            a: a as u64,
            b,
            ctx: Arc::clone(&self.ctx),
        }
    }

    fn inverse(&self) -> Self {
        let m = self.ctx.modulus;
        let s = self.ctx.exponent;
        let back = (s - self.b) % s;
        let a = mul_mod(self.ctx.powers[back as usize], self.a, m);
        Self {
            a: (m - a) % m,
            b: back,
            ctx: Arc::clone(&self.ctx),
        }
    }

    fn identity_like(&self) -> Self {
        Self::identity(&self.ctx)
    }

    fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}
