//! Scalar abstraction shared by the exact evaluators.
//!
//! Block sums, distribution functions and urn probabilities are written once
//! against [`Scalar`] and instantiated with `f64`, `f32` or the exact
//! [`BigRational`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Exact (for rationals) or nearest (for floats) image of an integer count.
    fn from_count(c: u128) -> Self;

    /// Image of an `f64`. Exact for rationals: every finite double is a dyadic rational.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// `floor(self)` as an index, `None` for negative values.
    fn floor_index(&self) -> Option<usize>;

    fn ratio(num: u128, den: u128) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_count(c: u128) -> Self {
                c as $t
            }

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn floor_index(&self) -> Option<usize> {
                if *self < 0.0 {
                    None
                } else {
                    Some(self.floor() as usize)
                }
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_count(c: u128) -> Self {
        BigRational::from_integer(BigInt::from(c))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_index(&self) -> Option<usize> {
        self.floor().to_integer().to_usize()
    }
}
