//! Truncated power series in `s` with noncommutative polynomial coefficients,
//! and the second-order operators
//!
//! ```text
//! L_k = s d²/ds² − k d/ds + X(s),    X(s) = Σ_{j≥0} x_{j+1} s^j
//! ```
//!
//! whose iterated product, evaluated at `s = 0`, generates the coefficients
//! `n̄_I`.
//!
//! The generators commute with `s`. `X(s)` multiplies from the left, so in an
//! iterated product the most recently applied factor contributes the leftmost
//! letter and a word `(I_1, …, I_r)` reads in operator-composition order.

use crate::error::{invalid, Error, Result};
use crate::exact::{compositions_of, nbar_coeff, rat, Composition};
use crate::free_algebra::{NCPoly, Word};

/// Coefficients `c_0, …, c_cap` of a series known modulo `s^{cap+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCSeries {
    coeffs: Vec<NCPoly>,
}

impl NCSeries {
    pub fn zero(cap: usize) -> Self {
        NCSeries { coeffs: vec![NCPoly::zero(); cap + 1] }
    }

    /// `s^k` modulo `s^{cap+1}`.
    pub fn s_power(k: usize, cap: usize) -> Self {
        let mut out = Self::zero(cap);
        if k <= cap {
            out.coeffs[k] = NCPoly::one();
        }
        out
    }

    pub fn one(cap: usize) -> Self {
        Self::s_power(0, cap)
    }

    /// `X(s)` modulo `s^{cap+1}`.
    pub fn x_series(cap: usize) -> Self {
        NCSeries { coeffs: (0..=cap).map(|j| NCPoly::generator(j as u32 + 1)).collect() }
    }

    pub fn from_coeffs(coeffs: Vec<NCPoly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a series needs at least one coefficient"));
        }
        Ok(NCSeries { coeffs })
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &NCPoly {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[NCPoly] {
        &self.coeffs
    }

    /// Value at `s = 0`.
    pub fn constant_term(&self) -> &NCPoly {
        &self.coeffs[0]
    }
}

/// `L_k u`.
///
/// The `s d²/ds²` and `d/ds` terms read the coefficient one degree above the
/// one they produce, so the result is known modulo `s^{cap}`: its cap is one
/// less than the input's. A cap-0 input is rejected as truncated.
#[allow(non_snake_case)]
pub fn apply_L(k: i64, u: &NCSeries) -> Result<NCSeries> {
    let cap = u.cap();
    if cap == 0 {
        return Err(Error::Truncated(1));
    }
    let out_cap = cap - 1;
    let mut out = Vec::with_capacity(out_cap + 1);
    for j in 0..=out_cap {
        // (j+1) j u_{j+1} − k (j+1) u_{j+1}
        let factor = rat((j as i64 + 1) * (j as i64 - k));
        let mut c = u.coeffs[j + 1].scaled(&factor);
        for i in 0..=j {
            let source = &u.coeffs[j - i];
            let letter = Word::letter(i as u32 + 1);
            for (w, v) in source.terms() {
                c.add_term(letter.concat(w), v.clone());
            }
        }
        out.push(c);
    }
    Ok(NCSeries { coeffs: out })
}

/// Applies the factors `L_{N+1−2j}` for `j` in `steps`, in increasing `j`.
///
/// `j = 1` is `L_{N−1}`, the factor applied first in the full product, and
/// `steps = 1..=j` gives `L_{N+1−2j} ⋯ L_{N−3} L_{N−1} u`.
pub fn apply_chain(n: u32, steps: std::ops::RangeInclusive<u32>, u: NCSeries) -> Result<NCSeries> {
    let mut u = u;
    for step in steps {
        let k = n as i64 + 1 - 2 * step as i64;
        u = apply_L(k, &u)?;
    }
    Ok(u)
}

/// `L_{1−N} L_{3−N} ⋯ L_{N−3} L_{N−1} 1` evaluated at `s = 0`.
pub fn iterate_l_full(n: u32) -> Result<NCPoly> {
    if n < 1 {
        return Err(invalid("iterate_l_full needs N >= 1"));
    }
    // Each factor lowers the cap by one; N factors from cap N leave exactly s^0.
    let out = apply_chain(n, 1..=n, NCSeries::one(n as usize))?;
    debug_assert_eq!(out.cap(), 0);
    Ok(out.constant_term().clone())
}

/// `L_{1−N} ⋯ L_{N−3} (s^{a−1})` evaluated at `s = 0`; the last factor
/// `L_{N−1}` of the full product is omitted.
pub fn iterate_l_partial(n: u32, a: u32) -> Result<NCPoly> {
    if n < 1 {
        return Err(invalid("iterate_l_partial needs N >= 1"));
    }
    if a < 1 || a > n {
        return Err(invalid(format!("iterate_l_partial needs 1 <= a <= N, got a = {a}, N = {n}")));
    }
    let cap = n as usize - 1;
    let u = apply_chain(n, 2..=n, NCSeries::s_power(a as usize - 1, cap))?;
    debug_assert_eq!(u.cap(), 0);
    Ok(u.constant_term().clone())
}

/// `Σ_{|I|=N} n̄_I x_{I_1} ⋯ x_{I_r}` from the closed form.
pub fn nbar_polynomial(n: u32) -> Result<NCPoly> {
    Ok(NCPoly::from_terms(compositions_of(n as i64)?.into_iter().map(|c| {
        let v = nbar_coeff(&c);
        (Word::from(c), v)
    })))
}

/// `Σ_{|I|=N−a} n̄_{(I,a)} x_I` from the closed form, with the empty `I`
/// contributing `n̄_{(N)} = (N−1)!²` on the empty word.
pub fn nbar_partial_polynomial(n: u32, a: u32) -> Result<NCPoly> {
    if a < 1 || a > n {
        return Err(invalid(format!("need 1 <= a <= N, got a = {a}, N = {n}")));
    }
    let mut out = NCPoly::zero();
    let head = n - a;
    let prefixes: Vec<Vec<u32>> = if head == 0 {
        vec![Vec::new()]
    } else {
        compositions_of(head as i64)?.into_iter().map(|c| c.into_parts()).collect()
    };
    for prefix in prefixes {
        let full = Composition::with_last(&prefix, a)?;
        out.add_term(Word::new(prefix)?, nbar_coeff(&full));
    }
    Ok(out)
}

#[cfg(test)]
fn is_one(p: &NCPoly) -> bool {
    use num_traits::One;
    p.num_terms() == 1 && p.coeff(&Word::empty()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn word(l: &[u32]) -> Word {
        Word::new(l.to_vec()).unwrap()
    }

    #[test]
    fn l0_on_one_is_x() {
        let out = apply_L(0, &NCSeries::one(4)).unwrap();
        assert_eq!(out, NCSeries::x_series(3));
        let out = apply_L(1, &NCSeries::one(4)).unwrap();
        assert_eq!(out, NCSeries::x_series(3));
    }

    #[test]
    fn l_minus_one_on_x_at_zero() {
        let out = apply_L(-1, &NCSeries::x_series(3)).unwrap();
        let expected = NCPoly::from_terms([(word(&[2]), rat(1)), (word(&[1, 1]), rat(1))]);
        assert_eq!(out.constant_term(), &expected);
    }

    #[test]
    fn cap_zero_is_truncated() {
        assert_eq!(apply_L(0, &NCSeries::one(0)), Err(Error::Truncated(1)));
    }

    #[test]
    fn full_iteration_small_cases() {
        assert_eq!(iterate_l_full(1).unwrap(), NCPoly::generator(1));
        let two = NCPoly::from_terms([(word(&[2]), rat(1)), (word(&[1, 1]), rat(1))]);
        assert_eq!(iterate_l_full(2).unwrap(), two);
        assert!(iterate_l_full(0).is_err());
    }

    #[test]
    fn partial_iteration_small_cases() {
        assert!(is_one(&iterate_l_partial(2, 2).unwrap()));
        assert_eq!(iterate_l_partial(2, 1).unwrap(), NCPoly::generator(1));
        assert!(is_one(&iterate_l_partial(1, 1).unwrap()));
        // a = N gives n̄_(N) = (N−1)!² on the empty word
        assert_eq!(iterate_l_partial(3, 3).unwrap(), NCPoly::constant(rat(4)));
        assert!(iterate_l_partial(3, 0).is_err());
        assert!(iterate_l_partial(3, 4).is_err());
    }
}
