//! Truncated power series in one variable with rational coefficients.
//!
//! A series of length `len` is known modulo `t^len`; binary operations
//! truncate to the shorter operand.

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::exact::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatSeries {
    coeffs: Vec<Rational>,
}

impl RatSeries {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        RatSeries { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Self::from_coeffs(vec![Rational::zero(); len])
    }

    pub fn constant(c: Rational, len: usize) -> Self {
        let mut s = Self::zero(len);
        s.coeffs[0] = c;
        s
    }

    /// `t^k` modulo `t^len`.
    pub fn monomial(k: usize, len: usize) -> Self {
        let mut s = Self::zero(len);
        if k < len {
            s.coeffs[k] = Rational::one();
        }
        s
    }

    /// `(1 + a t)^e` for rational `e`, by the generalized binomial series.
    pub fn binomial_power(a: &Rational, e: &Rational, len: usize) -> Self {
        let mut coeffs = Vec::with_capacity(len);
        let mut binom = Rational::one();
        let mut a_pow = Rational::one();
        for k in 0..len {
            coeffs.push(&binom * &a_pow);
            binom = binom * (e - rat(k as i64)) / rat(k as i64 + 1);
            a_pow *= a;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self::from_coeffs(self.coeffs[..len.min(self.len())].to_vec())
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `d/dt`; known to one order less.
    pub fn derivative(&self) -> Self {
        if self.len() == 1 {
            return Self::zero(1);
        }
        Self::from_coeffs(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect())
    }

    /// `t · self`; known to one order more.
    pub fn times_t(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(invalid("cannot invert a series with zero constant term"));
        }
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.len());
        out.push(inv0.clone());
        for n in 1..self.len() {
            let mut acc = Rational::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out.push(-acc * &inv0);
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn divide(&self, den: &RatSeries) -> Result<Self> {
        Ok(self * &den.inverse()?)
    }
}

impl Add<&RatSeries> for &RatSeries {
    type Output = RatSeries;
    fn add(self, rhs: &RatSeries) -> RatSeries {
        let len = self.len().min(rhs.len());
        RatSeries::from_coeffs((0..len).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect())
    }
}

impl Sub<&RatSeries> for &RatSeries {
    type Output = RatSeries;
    fn sub(self, rhs: &RatSeries) -> RatSeries {
        let len = self.len().min(rhs.len());
        RatSeries::from_coeffs((0..len).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect())
    }
}

impl Mul<&RatSeries> for &RatSeries {
    type Output = RatSeries;
    fn mul(self, rhs: &RatSeries) -> RatSeries {
        let len = self.len().min(rhs.len());
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        RatSeries::from_coeffs(out)
    }
}
