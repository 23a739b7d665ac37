//! Integer scalars for the elimination kernels.
//!
//! Machine-word implementations report overflow instead of wrapping so the
//! caller can restart the computation at a wider type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) trait Scalar: Clone + Debug + PartialEq {
    /// False for types whose arithmetic never reports `Overflow`.
    const BOUNDED: bool = true;
    fn zero() -> Self;
    fn one() -> Self;
    fn try_from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// `|self| < |other|`
    fn abs_lt(&self, other: &Self) -> bool;
    /// Quotient rounded to nearest, so the remainder has absolute value at
    /// most `|d| / 2`.
    fn round_div(&self, d: &Self) -> Result<Self, Overflow>;
    /// `self - q * b`
    fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow>;
    fn add(&self, b: &Self) -> Result<Self, Overflow>;
    fn neg(&self) -> Result<Self, Overflow>;
    /// `self | x`
    fn divides(&self, x: &Self) -> bool;
}

macro_rules! impl_machine_scalar {
    ($t:ty, $wide:ty) => {
        impl Scalar for $t {
            fn zero() -> Self {
                0
            }
            fn one() -> Self {
                1
            }
            fn try_from_big(x: &BigInt) -> Option<Self> {
                <$t as TryFrom<&BigInt>>::try_from(x).ok()
            }
            fn to_big(&self) -> BigInt {
                BigInt::from(*self)
            }
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn is_unit(&self) -> bool {
                *self == 1 || *self == -1
            }
            fn is_negative(&self) -> bool {
                *self < 0
            }
            fn abs_lt(&self, other: &Self) -> bool {
                self.unsigned_abs() < other.unsigned_abs()
            }
            fn round_div(&self, d: &Self) -> Result<Self, Overflow> {
                let q = self.checked_div(*d).ok_or(Overflow)?;
                let r = self.checked_rem(*d).ok_or(Overflow)?;
                if (r.unsigned_abs() as $wide) * 2 > d.unsigned_abs() as $wide {
                    let step = if (r < 0) == (*d < 0) { 1 } else { -1 };
                    q.checked_add(step).ok_or(Overflow)
                } else {
                    Ok(q)
                }
            }
            fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow> {
                q.checked_mul(*b)
                    .and_then(|p| self.checked_sub(p))
                    .ok_or(Overflow)
            }
            fn add(&self, b: &Self) -> Result<Self, Overflow> {
                self.checked_add(*b).ok_or(Overflow)
            }
            fn neg(&self) -> Result<Self, Overflow> {
                self.checked_neg().ok_or(Overflow)
            }
            fn divides(&self, x: &Self) -> bool {
                match x.checked_rem(*self) {
                    Some(r) => r == 0,
                    // MIN % -1
                    None => true,
                }
            }
        }
    };
}

impl_machine_scalar!(i64, u128);
// |i128| fits in u128, and doubling a remainder below |d| cannot overflow
// because the remainder is at most |d| - 1 <= 2^127.
impl_machine_scalar!(i128, u128);

impl Scalar for BigInt {
    const BOUNDED: bool = false;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn try_from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn round_div(&self, d: &Self) -> Result<Self, Overflow> {
        let (q, r) = self.div_rem(d);
        if r.magnitude() * 2u32 > *d.magnitude() {
            let step = if Signed::is_negative(&r) == Signed::is_negative(d) { 1 } else { -1 };
            Ok(q + step)
        } else {
            Ok(q)
        }
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Result<Self, Overflow> {
        Ok(self - q * b)
    }
    fn add(&self, b: &Self) -> Result<Self, Overflow> {
        Ok(self + b)
    }
    fn neg(&self) -> Result<Self, Overflow> {
        Ok(-self)
    }
    fn divides(&self, x: &Self) -> bool {
        Zero::is_zero(&(x % self))
    }
}

/// Converts entries, or `None` if one does not fit `B`.
pub(crate) fn widen<A: Scalar, B: Scalar>(v: &[A]) -> Option<Vec<B>> {
    v.iter().map(|x| B::try_from_big(&x.to_big())).collect()
}
