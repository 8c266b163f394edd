//! Multiplicative orders modulo arbitrary-precision integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division by every integer in `2..=bound`. Returns the prime
/// factorization if the leftover cofactor is provably prime (below
/// `(bound + 1)^2`), otherwise `None`.
pub fn factor(n: &BigUint, bound: u64) -> Option<Vec<(BigUint, u32)>> {
    let mut rest = n.clone();
    let mut factors = Vec::new();
    let mut complete = false;
    let mut p = 2u64;
    while p <= bound {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            complete = true;
            break;
        }
        let mut e = 0;
        loop {
            let (quo, rem) = rest.div_rem(&bp);
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some(factors);
    }
    // No factor up to `bound` remains, so a cofactor below (bound + 1)^2 is prime.
    let b = BigUint::from(bound) + 1u32;
    if complete || rest < &b * &b {
        factors.push((rest, 1));
        return Some(factors);
    }
    None
}

/// Carmichael function of a factored integer.
fn carmichael(factors: &[(BigUint, u32)]) -> BigUint {
    let two = BigUint::from(2u32);
    factors.iter().fold(BigUint::one(), |acc, (p, e)| {
        let lam = if *p == two {
            match e {
                1 => BigUint::one(),
                2 => two.clone(),
                _ => two.pow(e - 2),
            }
        } else {
            p.pow(e - 1) * (p - 1u32)
        };
        acc.lcm(&lam)
    })
}

fn check_coprime(q: &BigUint, m: &BigUint) -> Result<()> {
    if !q.gcd(m).is_one() {
        return Err(Error::NotCoprime {
            a: q.to_string(),
            m: m.to_string(),
        });
    }
    Ok(())
}

/// Smallest divisor `x` of `multiple` with `q^x ≡ 1 (mod m)`, given that
/// `q^multiple ≡ 1 (mod m)` and the factorization of `multiple`.
fn reduce_order(q: &BigUint, m: &BigUint, multiple: BigUint, primes: &[BigUint]) -> BigUint {
    let mut order = multiple;
    for p in primes {
        while (&order % p).is_zero() {
            let candidate = &order / p;
            if q.modpow(&candidate, m).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    order
}

/// Order of `q` in `(Z/m)^*`.
///
/// Factors `m` by trial division up to `cap` and works through the divisors
/// of the Carmichael exponent. When `m` does not factor within the bound,
/// falls back to stepping through `q, q^2, ...` for at most `cap` steps.
pub fn multiplicative_order(q: &BigUint, m: &BigUint, cap: u64) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::NotCoprime {
            a: q.to_string(),
            m: "0".into(),
        });
    }
    check_coprime(q, m)?;
    if m.is_one() {
        return Ok(BigUint::one());
    }
    if let Some(factors) = factor(m, cap) {
        let lambda = carmichael(&factors);
        if let Some(lambda_factors) = factor(&lambda, cap) {
            let primes: Vec<BigUint> = lambda_factors.into_iter().map(|(p, _)| p).collect();
            return Ok(reduce_order(q, m, lambda, &primes));
        }
    }
    let step = q % m;
    let mut power = step.clone();
    for x in 1..=cap {
        if power.is_one() {
            return Ok(BigUint::from(x));
        }
        power = (&power * &step) % m;
    }
    Err(Error::CapExceeded {
        cap: cap.to_usize().unwrap_or(usize::MAX),
    })
}

/// Order of `q` modulo `m` when a multiple of it is already known, as for
/// divisors `m` of `q^s - 1`.
pub fn order_dividing(q: &BigUint, m: &BigUint, multiple: &BigUint) -> Result<BigUint> {
    check_coprime(q, m)?;
    if m.is_one() {
        return Ok(BigUint::one());
    }
    if !q.modpow(multiple, m).is_one() {
        return Err(Error::HypothesisFailed(format!(
            "{q}^{multiple} is not 1 modulo {m}"
        )));
    }
    let bound = multiple.sqrt().to_u64().unwrap_or(u64::MAX).max(2);
    let primes: Vec<BigUint> = factor(multiple, bound)
        .ok_or_else(|| Error::Overflow(format!("cannot factor exponent {multiple}")))?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    Ok(reduce_order(q, m, multiple.clone(), &primes))
}
