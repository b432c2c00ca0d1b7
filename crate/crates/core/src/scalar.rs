//! The coefficient abstraction shared by the generic linear algebra and the
//! generic cyclotomic ring.
//!
//! Values of p-adic type carry their own prime and precision, so the
//! context-free `Zero::zero()` of `num-traits` is not enough here; the
//! `*_like` constructors build constants in the same context as an existing
//! element.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Ordering key for pivot selection. Smaller is preferred.
    type Weight: PartialOrd + Clone + Debug;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// True when the value cannot be distinguished from zero.
    fn is_zero(&self) -> bool;
    fn try_inv(&self) -> Result<Self>;
    /// `None` for zero.
    fn pivot_weight(&self) -> Option<Self::Weight>;

    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    #[allow(clippy::wrong_self_convention)]
    fn from_i64_like(&self, n: i64) -> Self {
        let one = self.one_like();
        let mut acc = self.zero_like();
        let mut base = if n < 0 { -one } else { one };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.add_ref(&base);
            }
            base = base.add_ref(&base);
            k >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    type Weight = f64;

    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn try_inv(&self) -> Result<Self> {
        if *self == 0.0 {
            Err(Error::NotInvertible)
        } else {
            Ok(1.0 / self)
        }
    }
    fn pivot_weight(&self) -> Option<f64> {
        if *self == 0.0 {
            None
        } else {
            Some(-self.abs())
        }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    type Weight = u8;

    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::NotInvertible)
        } else {
            Ok(self.recip())
        }
    }
    fn pivot_weight(&self) -> Option<u8> {
        if Zero::is_zero(self) {
            None
        } else if self.abs().is_one() {
            Some(0)
        } else {
            Some(1)
        }
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}
