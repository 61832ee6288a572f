//! Arithmetic in GF(p) for the small primes this crate supports.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field GF(p). Elements are plain `u8` residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub const SUPPORTED: [u8; 3] = [2, 3, 5];

    pub fn new(p: u32) -> Result<Self> {
        if Self::SUPPORTED.iter().any(|&q| u32::from(q) == p) {
            Ok(PrimeField { p: p as u8 })
        } else {
            Err(Error::UnsupportedPrime(p))
        }
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn order(self) -> usize {
        self.p as usize
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(i64::from(self.p)) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(a % self.p != 0, "zero has no inverse");
        // a^(p-2) by repeated multiplication; p <= 5.
        let mut r = 1u8;
        for _ in 0..self.p - 2 {
            r = self.mul(r, a);
        }
        r
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.p
    }

    pub fn nonzero(self) -> impl Iterator<Item = u8> {
        1..self.p
    }

    pub fn element(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            field: self,
        }
    }
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        u32::from(f.p)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// A residue together with its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    field: PrimeField,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    #[inline]
    pub fn field(self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Option<FieldElement> {
        (!self.is_zero()).then(|| FieldElement {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.field, rhs.field);
        FieldElement {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.field, rhs.field);
        FieldElement {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.field, rhs.field);
        FieldElement {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
