//! Dense square matrices and vectors over the rationals.

use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatVector(pub Vec<Rational>);

impl RatVector {
    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        RatVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl Add<&RatVector> for &RatVector {
    type Output = RatVector;
    fn add(self, rhs: &RatVector) -> RatVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        RatVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

/// Row-major `d × d` rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    dim: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(dim: usize) -> Self {
        RatMatrix { dim, data: vec![Rational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(invalid("matrix rows must form a square"));
        }
        Ok(RatMatrix { dim, data: rows.into_iter().flatten().collect() })
    }

    /// Builds the matrix with entries `f(i, j)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        RatMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.dim + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        RatMatrix { dim: self.dim, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn apply(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.dim, v.dim(), "matrix/vector dimension mismatch");
        RatVector(
            (0..self.dim)
                .map(|i| {
                    let row = &self.data[i * self.dim..(i + 1) * self.dim];
                    row.iter().zip(&v.0).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    pub fn column(&self, j: usize) -> RatVector {
        RatVector((0..self.dim).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn from_columns(cols: &[RatVector]) -> Self {
        let dim = cols.len();
        Self::from_fn(dim, |i, j| cols[j].0[i].clone())
    }
}

impl Add<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        RatMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Mul<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let d = self.dim;
        let mut out = RatMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self.data[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &rhs.data[k * d + j];
                    if !b.is_zero() {
                        out.data[i * d + j] += a * b;
                    }
                }
            }
        }
        out
    }
}
