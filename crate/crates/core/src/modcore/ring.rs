use std::fmt;

use crate::error::{Error, Result};

/// Largest supported modulus p^k.
pub const MAX_MODULUS: u64 = 1 << 16;

/// Largest supported ambient rank.
pub const MAX_RANK: usize = 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The coefficient ring Z/p^k.
///
/// Residues are `u32` values kept in `[0, p^k)`. Since `p^k <= 2^16`, every
/// product of two residues fits in a `u64` without overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModulusContext {
    p: u32,
    k: u32,
    modulus: u32,
}

impl ModulusContext {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        let mut modulus: u64 = 1;
        for _ in 0..k {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(Error::ModulusTooLarge { p, k })?;
        }
        Ok(Self {
            p: p as u32,
            k,
            modulus: modulus as u32,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// `p^t` as an integer, for `t <= k`.
    pub fn p_pow(&self, t: u32) -> u32 {
        debug_assert!(t <= self.k);
        self.p.pow(t)
    }

    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.modulus as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.modulus as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.modulus as u64 - b as u64) % self.modulus as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.modulus as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// Largest `t <= k` with `p^t | a`; zero has valuation `k`.
    pub fn valuation(&self, a: u32) -> u32 {
        let mut a = a % self.modulus;
        if a == 0 {
            return self.k;
        }
        let mut t = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            t += 1;
        }
        t
    }

    pub fn is_unit(&self, a: u32) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// Inverse of a unit modulo p^k (extended Euclid).
    pub fn inv_unit(&self, a: u32) -> Result<u32> {
        let a = a % self.modulus;
        if !self.is_unit(a) {
            return Err(Error::NonUnit(a));
        }
        let (mut r0, mut r1) = (self.modulus as i64, a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(s0))
    }

    /// Splits a nonzero residue as `p^t * u` with `u` a unit; returns `(t, u)`.
    pub fn split_unit(&self, a: u32) -> (u32, u32) {
        let t = self.valuation(a);
        if t == self.k {
            return (t, 0);
        }
        (t, a / self.p.pow(t))
    }
}

impl fmt::Display for ModulusContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.k)
    }
}

/// An element of (Z/p^k)^m.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueVector {
    ctx: ModulusContext,
    entries: Vec<u32>,
}

impl ResidueVector {
    pub fn new(ctx: ModulusContext, entries: &[i64]) -> Self {
        Self {
            ctx,
            entries: entries.iter().map(|&x| ctx.reduce(x)).collect(),
        }
    }

    pub fn zero(ctx: ModulusContext, len: usize) -> Self {
        Self {
            ctx,
            entries: vec![0; len],
        }
    }

    pub fn ctx(&self) -> ModulusContext {
        self.ctx
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, k: u32) -> ModulusContext {
        ModulusContext::new(p, k).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ctx(2, 2).valuation(2), 1);
        assert_eq!(ctx(2, 2).valuation(0), 2);
        assert_eq!(ctx(3, 2).valuation(1), 0);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(ctx(2, 2).inv_unit(3), Ok(3));
        assert_eq!(ctx(5, 2).inv_unit(1), Ok(1));
        assert_eq!(ctx(2, 2).inv_unit(2), Err(Error::NonUnit(2)));
    }

    #[test]
    fn rejects_bad_contexts() {
        assert_eq!(ModulusContext::new(4, 1), Err(Error::NotPrime(4)));
        assert_eq!(ModulusContext::new(2, 0), Err(Error::ZeroExponent));
        assert!(ModulusContext::new(2, 16).is_ok());
        assert!(matches!(
            ModulusContext::new(2, 17),
            Err(Error::ModulusTooLarge { .. })
        ));
        assert!(matches!(
            ModulusContext::new(257, 2),
            Err(Error::ModulusTooLarge { .. })
        ));
    }

    fn small_contexts() -> Vec<ModulusContext> {
        let mut out = Vec::new();
        for p in [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
        ] {
            for k in 1..=6 {
                if let Ok(c) = ModulusContext::new(p, k) {
                    if c.modulus() <= 81 {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn every_unit_inverts() {
        for c in small_contexts() {
            for a in 0..c.modulus() {
                if c.is_unit(a) {
                    let b = c.inv_unit(a).unwrap();
                    assert_eq!(c.mul(a, b), 1, "{c} a={a}");
                } else {
                    assert!(c.inv_unit(a).is_err());
                }
            }
        }
    }

    #[test]
    fn valuation_is_additive_up_to_k() {
        for c in small_contexts() {
            for a in 0..c.modulus() {
                for b in 0..c.modulus() {
                    let expected = (c.valuation(a) + c.valuation(b)).min(c.k());
                    assert_eq!(c.valuation(c.mul(a, b)), expected, "{c} {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn split_unit_recombines() {
        let c = ctx(3, 3);
        for a in 1..c.modulus() {
            let (t, u) = c.split_unit(a);
            assert!(c.is_unit(u));
            assert_eq!(c.mul(c.p_pow(t), u), a);
        }
    }
}
