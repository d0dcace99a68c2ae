use crate::error::{Error, Result};
use crate::scalar::Scalar;

const SUM_TOLERANCE: f64 = 1e-12;

/// Distribution function on `[0, 1]` together with its right-continuous
/// generalised inverse `u -> inf{x : F(x) > u}`.
pub trait DistributionFunction<T: Scalar> {
    fn cdf(&self, x: &T) -> Result<T>;

    /// For `u >= 1` this returns the left limit `lim_{v -> 1-} inv(v)`.
    fn generalized_inverse(&self, u: &T) -> T;
}

/// Lebesgue measure on `[0, 1]`: `F(x) = x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UniformCdf;

impl<T: Scalar> DistributionFunction<T> for UniformCdf {
    fn cdf(&self, x: &T) -> Result<T> {
        check_unit("x", x)?;
        Ok(x.clone())
    }

    fn generalized_inverse(&self, u: &T) -> T {
        if *u < T::zero() {
            T::zero()
        } else if *u > T::one() {
            T::one()
        } else {
            u.clone()
        }
    }
}

/// Probability measure with atoms at the type points `l / (m + 1)`, `l = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeMeasure<T: Scalar = f64> {
    weights: Vec<T>,
    /// Partial sums capped at one, last entry pinned to exactly one.
    cumulative: Vec<T>,
}

impl<T: Scalar> TypeMeasure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::config("a type measure needs at least two types (m >= 1)"));
        }
        let mut total = T::zero();
        let mut cumulative = Vec::with_capacity(weights.len());
        for (l, w) in weights.iter().enumerate() {
            if *w < T::zero() {
                return Err(Error::config(format!("type weight {l} is negative")));
            }
            total = total + w.clone();
            cumulative.push(total.clone());
        }
        if (total.to_f64() - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::config(format!(
                "type weights sum to {} instead of 1",
                total.to_f64()
            )));
        }
        for c in cumulative.iter_mut() {
            if *c > T::one() {
                *c = T::one();
            }
        }
        *cumulative.last_mut().expect("non-empty") = T::one();
        Ok(Self {
            weights,
            cumulative,
        })
    }

    /// Point mass on type `l` of `m + 1` types.
    pub fn point_mass(m: usize, l: usize) -> Result<Self> {
        if l > m {
            return Err(Error::config(format!("type {l} out of range 0..={m}")));
        }
        let mut w = vec![T::zero(); m + 1];
        w[l] = T::one();
        Self::new(w)
    }

    /// Empirical measure of a count vector `X`: weights `X_l / n`.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::config("count vector is empty"));
        }
        Self::new(
            counts
                .iter()
                .map(|&c| T::ratio(c as u128, n as u128))
                .collect(),
        )
    }

    /// `m`, the number of types minus one.
    pub fn m(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn num_types(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, l: usize) -> &T {
        &self.weights[l]
    }

    /// `F(l / (m + 1))`, i.e. the mass of types `0..=l`.
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    pub fn atom(&self, l: usize) -> T {
        T::ratio(l as u128, self.num_types() as u128)
    }

    /// Type label selected by the generalised inverse at `u`.
    pub fn inverse_index(&self, u: &T) -> usize {
        if *u >= T::one() {
            return self
                .weights
                .iter()
                .rposition(|w| *w > T::zero())
                .expect("weights sum to one");
        }
        let idx = self.cumulative.partition_point(|c| c <= u);
        idx.min(self.m())
    }
}

impl<T: Scalar> DistributionFunction<T> for TypeMeasure<T> {
    fn cdf(&self, x: &T) -> Result<T> {
        check_unit("x", x)?;
        if *x >= T::one() {
            return Ok(T::one());
        }
        let scaled = x.clone() * T::from_count(self.num_types() as u128);
        let idx = scaled.floor_index().unwrap_or(0).min(self.m());
        Ok(self.cumulative[idx].clone())
    }

    fn generalized_inverse(&self, u: &T) -> T {
        self.atom(self.inverse_index(u))
    }
}

fn check_unit<T: Scalar>(what: &'static str, x: &T) -> Result<()> {
    if *x < T::zero() || *x > T::one() {
        Err(Error::Domain {
            what,
            value: x.to_f64(),
        })
    } else {
        Ok(())
    }
}
