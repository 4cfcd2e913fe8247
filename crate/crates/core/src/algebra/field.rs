//! Prime-field arithmetic.
//!
//! A [`PrimeField`] is a copyable handle carrying the modulus `q`; every
//! [`FieldElement`] remembers the field it lives in so that the usual
//! operators can be used directly. Mixing elements of different fields is a
//! logic error and panics.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rand::Rng;

use super::AlgebraError;

/// Default modulus: the Mersenne prime 2^31 - 1.
pub const DEFAULT_MODULUS: u64 = (1 << 31) - 1;

/// Largest modulus accepted. Products are formed in `u128`, so this only
/// bounds the cost of the primality check.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    /// Creates the field of integers modulo `q`, checking that `q` is prime.
    pub fn new(q: u64) -> Result<Self, AlgebraError> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        Ok(Self { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Embeds an unsigned integer, reducing it modulo `q`.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.q,
            field: *self,
        }
    }

    /// Embeds a signed integer, so that `-1` maps to `q - 1`.
    pub fn from_i64(&self, value: i64) -> FieldElement {
        let q = self.q as i128;
        let v = (value as i128).rem_euclid(q);
        self.elem(v as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.elem(rng.gen_range(0..self.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.elem(rng.gen_range(1..self.q))
    }

    /// Iterates over every element `0, 1, ..., q-1`. Only sensible for tiny fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    /// The canonical residue in `[0, q)`.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Self, AlgebraError> {
        if self.value == 0 {
            return Err(AlgebraError::DivisionByZero);
        }
        let q = self.field.q as i128;
        let (mut old_r, mut r) = (self.value as i128, q);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(self.field.elem(old_s.rem_euclid(q) as u64))
    }

    #[inline]
    fn check_same_field(&self, other: &Self) {
        assert_eq!(
            self.field, other.field,
            "field elements from different fields"
        );
    }
}

/// Field inverse as a free function.
pub fn ff_inv(x: FieldElement) -> Result<FieldElement, AlgebraError> {
    x.inv()
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        let q = self.field.q;
        let s = self.value + rhs.value;
        let value = if s >= q { s - q } else { s };
        Self { value, ..self }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.field.q - rhs.value
        };
        Self { value, ..self }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        let value = ((self.value as u128 * rhs.value as u128) % self.field.q as u128) as u64;
        Self { value, ..self }
    }
}

/// Panics on division by zero; use [`FieldElement::inv`] for a fallible form.
impl Div for FieldElement {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in prime field")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let value = if self.value == 0 {
            0
        } else {
            self.field.q - self.value
        };
        Self { value, ..self }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Sums an iterator of elements of `field`; the field is needed for the empty sum.
pub fn sum_in<I: IntoIterator<Item = FieldElement>>(field: PrimeField, items: I) -> FieldElement {
    items.into_iter().fold(field.zero(), |acc, x| acc + x)
}

impl Sum for FieldElement {
    /// Panics on an empty iterator, which has no field to live in.
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("empty sum has no field; use sum_in");
        iter.fold(first, |acc, x| acc + x)
    }
}

impl Product for FieldElement {
    /// Panics on an empty iterator, which has no field to live in.
    fn product<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let first = iter.next().expect("empty product has no field");
        iter.fold(first, |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn inverse_small_cases() {
        let f7 = f(7);
        assert_eq!(ff_inv(f7.elem(3)).unwrap(), f7.elem(5));
        assert_eq!(ff_inv(f7.elem(1)).unwrap(), f7.elem(1));
    }

    #[test]
    fn inverse_matches_brute_force_scan() {
        let f101 = f(101);
        let x = f101.elem(17);
        let scanned = f101.elements().find(|y| (x * *y).value() == 1).unwrap();
        assert_eq!(scanned, f101.elem(6));
        assert_eq!(ff_inv(x).unwrap(), scanned);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(ff_inv(f(7).zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn inverse_agrees_with_fermat() {
        let fq = f(DEFAULT_MODULUS);
        for v in [1u64, 2, 3, 12345, DEFAULT_MODULUS - 1] {
            let x = fq.elem(v);
            assert_eq!(x.inv().unwrap(), x.pow(DEFAULT_MODULUS - 2));
        }
    }

    #[test]
    fn rejects_composite_moduli() {
        for q in [0u64, 1, 4, 9, 15, 91, 1 << 20] {
            assert!(PrimeField::new(q).is_err(), "{q}");
        }
        for q in [2u64, 3, 7, 11, 101, 10007, DEFAULT_MODULUS] {
            assert!(PrimeField::new(q).is_ok(), "{q}");
        }
    }

    #[test]
    fn signed_embedding() {
        let f7 = f(7);
        assert_eq!(f7.from_i64(-1), f7.elem(6));
        assert_eq!(f7.from_i64(-15), f7.elem(6));
        assert_eq!(-f7.elem(2), f7.elem(5));
    }

    proptest::proptest! {
        #[test]
        fn inverse_is_an_involution(v in 1u64..DEFAULT_MODULUS) {
            let x = f(DEFAULT_MODULUS).elem(v);
            let y = x.inv().unwrap();
            proptest::prop_assert_eq!((x * y).value(), 1);
            proptest::prop_assert_eq!(y.inv().unwrap(), x);
        }
    }
}
