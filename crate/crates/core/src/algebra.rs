use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A commutative ring in which p is the distinguished prime.
///
/// Elements are plain values; the ring object carries the structure. All
/// operations are total except `inv` and `div_p_pow`.
pub trait CRing: Clone {
    type E: Clone + PartialEq + Eq + Hash + Ord + Debug;

    fn prime(&self) -> u64;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn from_bigint(&self, n: &BigInt) -> Self::E;
    fn inv(&self, a: &Self::E) -> Option<Self::E>;

    fn from_i64(&self, n: i64) -> Self::E {
        self.from_bigint(&BigInt::from(n))
    }

    fn is_zero(&self, a: &Self::E) -> bool {
        *a == self.zero()
    }

    fn pow(&self, a: &Self::E, mut e: u64) -> Self::E {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn scale(&self, n: i64, a: &Self::E) -> Self::E {
        self.mul(&self.from_i64(n), a)
    }

    /// A ring of the same presentation in which ghost inversion up to
    /// `extra` divisions by p stays exact after reduction back to `self`.
    fn cover(&self, _extra: u32) -> Option<Self> {
        None
    }

    fn lift_into(&self, _cover: &Self, a: &Self::E) -> Self::E {
        a.clone()
    }

    fn reduce_from(&self, _cover: &Self, a: &Self::E) -> Self::E {
        a.clone()
    }

    /// Divides by p^k; the quotient is only meaningful to the precision left.
    fn div_p_pow(&self, _a: &Self::E, _k: u32) -> Result<Self::E> {
        Err(Error::PrecisionExhausted)
    }
}

/// The integers with a marked prime; torsion free, so ghost maps are injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Integers {
    p: u64,
}

impl Integers {
    pub fn new(p: u64) -> Self {
        Integers { p }
    }
}

impl CRing for Integers {
    type E = BigInt;

    fn prime(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        if a.abs().is_one() {
            Some(a.clone())
        } else {
            None
        }
    }
    fn cover(&self, _extra: u32) -> Option<Self> {
        Some(self.clone())
    }
    fn div_p_pow(&self, a: &BigInt, k: u32) -> Result<BigInt> {
        let d = BigInt::from(self.p).pow(k);
        let (q, r) = a.div_rem(&d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn vp_factorial(n: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut q = n / p;
    while q > 0 {
        v += q as u32;
        q /= p;
    }
    v
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
