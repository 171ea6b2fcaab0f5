//! The arithmetic frame: a prime `p` and the invariants of the base field
//! `K/Q_p` (residue degree `f`, ramification index `e`) together with the
//! dimension `n`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parameters `(p, f, e, n)` from which all other objects are built.
///
/// The residue field is `k = F_{p^f}` with `f` embeddings into an algebraic
/// closure; `K` itself has `e·f` embeddings into `\bar Q_p`, grouped `e` at a
/// time above each residue embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context {
    /// The residue characteristic (a prime).
    pub p: u64,
    /// Residue degree of `K/Q_p`.
    pub f: u32,
    /// Ramification index of `K/Q_p`.
    pub e: u32,
    /// Dimension of the representations considered.
    pub n: u32,
}

/// Errors raised while validating a [`Context`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    /// `p` is not a prime number.
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    /// One of `f`, `e`, `n` is zero.
    #[error("f, e and n must all be at least 1 (got f={f}, e={e}, n={n})")]
    ZeroParameter { f: u32, e: u32, n: u32 },
}

impl Context {
    /// Builds a validated context.
    pub fn new(p: u64, f: u32, e: u32, n: u32) -> Result<Self, ContextError> {
        if f == 0 || e == 0 || n == 0 {
            return Err(ContextError::ZeroParameter { f, e, n });
        }
        if !is_prime(p) {
            return Err(ContextError::NotPrime(p));
        }
        Ok(Context { p, f, e, n })
    }

    /// The residue field cardinality `q = p^f`.
    pub fn q(&self) -> BigUint {
        BigUint::from(self.p).pow(self.f)
    }

    /// `q^d − 1 = p^{fd} − 1`, the modulus for exponents of niveau-`d` pieces.
    pub fn qd_minus_1(&self, d: u32) -> BigUint {
        self.q().pow(d) - 1u32
    }

    /// `p^f − 1` as an `i64`; callers only use this where `p^f` is small
    /// (weight canonicalization sweeps). Panics on overflow.
    pub fn pf_minus_1_i64(&self) -> i64 {
        self.p
            .checked_pow(self.f)
            .and_then(|v| i64::try_from(v).ok())
            .expect("p^f does not fit in i64")
            - 1
    }

    /// Number of embeddings of `K`, namely `e·f`.
    pub fn num_embeddings(&self) -> u32 {
        self.e * self.f
    }

    /// The twisting vector `η = (n−1, n−2, …, 0)` for this dimension.
    pub fn eta(&self) -> Vec<i64> {
        eta(self.n)
    }

    /// The same context with a different dimension, used for Levi blocks.
    pub fn with_n(&self, n: u32) -> Context {
        Context { n, ..*self }
    }
}

/// `η = (m−1, m−2, …, 0)` in dimension `m`.
pub fn eta(m: u32) -> Vec<i64> {
    (0..m).rev().map(|i| i as i64).collect()
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_primality_and_positivity() {
        assert!(Context::new(5, 1, 1, 3).is_ok());
        assert_eq!(Context::new(6, 1, 1, 3), Err(ContextError::NotPrime(6)));
        assert!(matches!(
            Context::new(5, 0, 1, 3),
            Err(ContextError::ZeroParameter { .. })
        ));
    }

    #[test]
    fn q_and_eta() {
        let ctx = Context::new(3, 2, 2, 3).unwrap();
        assert_eq!(ctx.q(), BigUint::from(9u32));
        assert_eq!(ctx.qd_minus_1(2), BigUint::from(80u32));
        assert_eq!(ctx.pf_minus_1_i64(), 8);
        assert_eq!(ctx.num_embeddings(), 4);
        assert_eq!(ctx.eta(), vec![2, 1, 0]);
    }
}
