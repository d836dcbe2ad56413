//! Noncommutative polynomials over the rationals in generators `x_1, x_2, …`.
//!
//! A monomial is a [`Word`]; multiplication concatenates words, so a word
//! `(i_1, …, i_r)` stands for the operator composition `x_{i_1} ∘ ⋯ ∘ x_{i_r}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{Composition, Rational};
use crate::matrix::RatMatrix;

/// Sequence of generator indices; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(invalid(format!("generator indices start at 1: {letters:?}")));
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u32) -> Self {
        assert!(i >= 1, "generator indices start at 1");
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the letters.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn reversed(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Composition> for Word {
    fn from(c: Composition) -> Self {
        Word(c.into_parts())
    }
}

impl From<&Composition> for Word {
    fn from(c: &Composition) -> Self {
        Word(c.parts().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("x{i}")).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Finite map from words to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(Word::empty(), Rational::one())
    }

    pub fn generator(i: u32) -> Self {
        Self::monomial(Word::letter(i), Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Word::empty(), c)
    }

    pub fn monomial(word: Word, coeff: Rational) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Rational)>) -> Self {
        let mut p = NCPoly::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Adds `coeff · word` in place, pruning a coefficient that cancels to zero.
    pub fn add_term(&mut self, word: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &NCPoly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), v * c);
        }
    }

    pub fn coeff(&self, word: &Word) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &Rational) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    /// Applies `f` to every word, merging coefficients that land on the same word.
    pub fn map_words(&self, mut f: impl FnMut(&Word) -> Word) -> NCPoly {
        NCPoly::from_terms(self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }

    pub fn reversed(&self) -> NCPoly {
        self.map_words(Word::reversed)
    }

    /// Distinct word weights present.
    pub fn weights(&self) -> Vec<u32> {
        let mut ws: Vec<u32> = self.terms.keys().map(Word::weight).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    pub fn sum_of_coefficients(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{w}")?;
        }
        Ok(())
    }
}

pub fn nc_add(p: &NCPoly, q: &NCPoly) -> NCPoly {
    let mut out = p.clone();
    out.add_assign_scaled(q, &Rational::one());
    out
}

pub fn nc_mul(p: &NCPoly, q: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for (wp, cp) in &p.terms {
        for (wq, cq) in &q.terms {
            out.add_term(wp.concat(wq), cp * cq);
        }
    }
    out
}

impl Add<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        nc_add(self, rhs)
    }
}

impl Sub<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul<&NCPoly> for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        nc_mul(self, rhs)
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scaled(&-Rational::one())
    }
}

/// Substitutes a `dim × dim` matrix for each generator. Concatenation becomes
/// the matrix product and the empty word becomes the identity.
pub fn nc_eval_matrices(p: &NCPoly, assign: &BTreeMap<u32, RatMatrix>, dim: usize) -> Result<RatMatrix> {
    for (g, m) in assign {
        if m.dim() != dim {
            return Err(invalid(format!("matrix for x_{g} is {0}x{0}, expected {dim}x{dim}", m.dim())));
        }
    }
    let mut total = RatMatrix::zeros(dim);
    for (word, c) in p.terms() {
        let mut prod = RatMatrix::identity(dim);
        for g in word.letters() {
            let m = assign.get(g).ok_or(Error::UnboundGenerator(*g))?;
            prod = &prod * m;
        }
        total = &total + &prod.scaled(c);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn x(i: u32) -> NCPoly {
        NCPoly::generator(i)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(&x(1) + &x(1), x(1).scaled(&rat(2)));
        let p = &(&x(1) * &x(2)) + &x(3);
        assert_eq!(&p + &NCPoly::zero(), p);
        let w = &x(1) * &x(2);
        let cancelled = &w + &w.scaled(&rat(-1));
        assert!(cancelled.is_zero());
        assert_eq!(cancelled.num_terms(), 0);
    }

    #[test]
    fn multiplication_examples() {
        let p = &x(1) * &x(2);
        assert_eq!(p, NCPoly::monomial(Word::new(vec![1, 2]).unwrap(), rat(1)));
        assert_ne!(&x(1) * &x(2), &x(2) * &x(1));
        let lhs = &(&x(1) + &x(2)) * &x(1);
        let rhs = &(&x(1) * &x(1)) + &(&x(2) * &x(1));
        assert_eq!(lhs, rhs);
        assert_eq!(&NCPoly::one() * &p, p);
    }

    #[test]
    fn words_order_by_length_then_lex() {
        let p = NCPoly::from_terms([
            (Word::new(vec![1, 1]).unwrap(), rat(1)),
            (Word::new(vec![3]).unwrap(), rat(1)),
            (Word::empty(), rat(1)),
            (Word::new(vec![2]).unwrap(), rat(1)),
        ]);
        let order: Vec<Vec<u32>> = p.terms().map(|(w, _)| w.letters().to_vec()).collect();
        assert_eq!(order, vec![vec![], vec![2], vec![3], vec![1, 1]]);
    }

    #[test]
    fn eval_single_generator_and_identity() {
        let a = RatMatrix::from_rows(vec![vec![rat(1), ratio(1, 2)], vec![ratio(1, 2), rat(-3)]]).unwrap();
        let assign = BTreeMap::from([(1, a.clone())]);
        assert_eq!(nc_eval_matrices(&x(1), &assign, 2).unwrap(), a);

        let p = &(&x(1) * &x(2)).scaled(&rat(3)) + &NCPoly::constant(ratio(-1, 2));
        let ids = BTreeMap::from([(1, RatMatrix::identity(3)), (2, RatMatrix::identity(3))]);
        let got = nc_eval_matrices(&p, &ids, 3).unwrap();
        assert_eq!(got, RatMatrix::identity(3).scaled(&p.sum_of_coefficients()));
    }

    #[test]
    fn eval_errors() {
        let assign = BTreeMap::from([(1, RatMatrix::identity(2))]);
        assert_eq!(nc_eval_matrices(&x(2), &assign, 2), Err(Error::UnboundGenerator(2)));
        assert!(matches!(nc_eval_matrices(&x(1), &assign, 3), Err(Error::InvalidArgument(_))));
    }
}
