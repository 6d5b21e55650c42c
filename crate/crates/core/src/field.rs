//! Exact fields: the rationals and prime fields `F_p` with `p` an odd prime
//! below 2⁶⁴.
//!
//! Elements do not carry their field; every operation goes through a field
//! value, which keeps `F_p` elements a plain `u64`.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Which field a configuration lives over; this is also its JSON form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldDescriptor {
    Rational,
    Prime(u64),
}

pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn descriptor(&self) -> FieldDescriptor;

    /// A random element; for the rationals a small integer.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Integer coordinates of the projective point spanned by `coords`:
    /// primitive for the rationals, residues in `[0, p)` for `F_p`.
    fn integer_representative(&self, coords: &[Self::Elem]) -> Vec<BigInt>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = 1u64;
        let mut b = base % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                result = mul_mod(result, b, self.p);
            }
            b = mul_mod(b, b, self.p);
            exp >>= 1;
        }
        result
    }

    /// Parses a decimal integer and reduces it.
    pub fn parse(&self, text: &str) -> Result<u64, FieldError> {
        let v: BigInt = text.trim().parse().map_err(|_| FieldError::Parse(text.to_string()))?;
        Ok(self.from_bigint(&v))
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().expect("reduced below p")
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            (self.p - b) + a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if (*a).is_multiple_of(self.p) {
            return Err(FieldError::DivisionByZero);
        }
        // extended Euclid on i128
        let (mut old_r, mut r) = (*a as i128, self.p as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        Ok(old_s.rem_euclid(self.p as i128) as u64)
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime(self.p)
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }

    fn integer_representative(&self, coords: &[u64]) -> Vec<BigInt> {
        coords.iter().map(|&c| BigInt::from(c)).collect()
    }
}

/// The rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

/// Range of the integers drawn by [`Rationals::random`].
const RATIONAL_SAMPLE_RANGE: i64 = 1000;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Rational
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.random_range(-RATIONAL_SAMPLE_RANGE..=RATIONAL_SAMPLE_RANGE))
    }

    fn integer_representative(&self, coords: &[BigRational]) -> Vec<BigInt> {
        let lcm = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = coords.iter().map(|c| (c * &lcm).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !gcd.is_zero() {
            for c in &mut ints {
                *c /= &gcd;
            }
        }
        if ints.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative) {
            for c in &mut ints {
                *c = -&*c;
            }
        }
        ints
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality() {
        assert!(is_prime(10007));
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(1));
        assert!(!is_prime(10007 * 10009));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(PrimeField::new(2), Err(FieldError::NotPrime(2)));
        assert_eq!(PrimeField::new(15), Err(FieldError::NotPrime(15)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let f = PrimeField::new(10007).unwrap();
        assert_eq!(f.inv(&0), Err(FieldError::DivisionByZero));
        assert_eq!(Rationals.inv(&BigRational::zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn negative_reduction() {
        let f = PrimeField::new(10007).unwrap();
        assert_eq!(f.from_i64(-1), 10006);
        assert_eq!(f.from_bigint(&BigInt::from(-10008)), 10006);
        assert_eq!(f.parse("-3").unwrap(), 10004);
        assert!(f.parse("x").is_err());
    }

    #[test]
    fn rational_representative_is_primitive() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let rep = Rationals.integer_representative(&[q(1, 1), q(1, 2), q(1, 3), q(1, 4)]);
        assert_eq!(rep, [12, 6, 4, 3].map(BigInt::from).to_vec());
        let rep = Rationals.integer_representative(&[q(0, 1), q(-2, 3), q(4, 3), q(0, 1)]);
        assert_eq!(rep, [0, 1, -2, 0].map(BigInt::from).to_vec());
    }

    proptest! {
        #[test]
        fn prime_field_axioms(a in 0u64..1_000_000_007, b in 0u64..1_000_000_007, c in 1u64..1_000_000_007) {
            let f = PrimeField::new(1_000_000_007).unwrap();
            prop_assert_eq!(f.add(&a, &f.neg(&a)), 0);
            prop_assert_eq!(f.sub(&f.add(&a, &b), &b), a);
            prop_assert_eq!(f.mul(&c, &f.inv(&c).unwrap()), 1);
            prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            prop_assert_eq!(f.pow(c, 1_000_000_006), 1);
        }
    }
}
