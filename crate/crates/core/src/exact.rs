//! Exact rationals, integer compositions, and the closed-form coefficient
//! families `n_I`, `m_I` and `n̄_I`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p / q`; panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| invalid(format!("not a rational: {s:?}")));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// `true` iff `q` is an integer.
pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

pub const DEFAULT_FACTORIAL_CAP: usize = 64;

/// Cached table of `0!, 1!, …, cap!`.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    table: Vec<BigInt>,
}

impl FactorialTable {
    pub fn with_cap(cap: usize) -> Self {
        let mut table = Vec::with_capacity(cap + 1);
        table.push(BigInt::one());
        for k in 1..=cap {
            let next = &table[k - 1] * BigInt::from(k);
            table.push(next);
        }
        FactorialTable { table }
    }

    pub fn cap(&self) -> usize {
        self.table.len() - 1
    }

    /// `k!`, computed directly when `k` exceeds the cached range.
    pub fn get(&self, k: usize) -> BigInt {
        match self.table.get(k) {
            Some(v) => v.clone(),
            None => (self.cap() + 1..=k).fold(self.table[self.cap()].clone(), |acc, i| acc * BigInt::from(i)),
        }
    }
}

fn default_table() -> &'static FactorialTable {
    static TABLE: OnceLock<FactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| FactorialTable::with_cap(DEFAULT_FACTORIAL_CAP))
}

pub fn factorial(k: usize) -> BigInt {
    default_table().get(k)
}

pub fn factorial_q(k: usize) -> Rational {
    Rational::from_integer(factorial(k))
}

/// Ordered nonempty list of positive integers.
///
/// Compositions order by length first, then lexicographically; every table
/// and serialized expansion relies on this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("a composition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(invalid(format!("composition parts must be positive: {parts:?}")));
        }
        Ok(Composition(parts))
    }

    pub fn single(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<u32> {
        self.0
    }

    /// Number of parts `r`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `|I|`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("compositions are nonempty")
    }

    pub fn reversed(&self) -> Self {
        Composition(self.0.iter().rev().copied().collect())
    }

    /// `m_l = I_1 + ⋯ + I_l` for `l = 1..=r`.
    pub fn partial_sums(&self) -> Vec<u32> {
        self.0
            .iter()
            .scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// `(I, a)`: `prefix` may be empty, `a` must be positive.
    pub fn with_last(prefix: &[u32], a: u32) -> Result<Self> {
        let mut parts = prefix.to_vec();
        parts.push(a);
        Self::new(parts)
    }
}

impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All `2^(n-1)` compositions of `n`, by length and then lexicographically.
pub fn compositions_of(n: i64) -> Result<Vec<Composition>> {
    if n < 1 {
        return Err(invalid(format!("compositions_of needs n >= 1, got {n}")));
    }
    let n = n as u32;
    let mut out = Vec::with_capacity(1usize << (n - 1));
    for len in 1..=n {
        let mut current = Vec::with_capacity(len as usize);
        push_compositions(n, len, &mut current, &mut out);
    }
    Ok(out)
}

// Lexicographic enumeration of compositions of `remaining` into exactly `parts` pieces.
fn push_compositions(remaining: u32, parts: u32, current: &mut Vec<u32>, out: &mut Vec<Composition>) {
    if parts == 1 {
        current.push(remaining);
        out.push(Composition(current.clone()));
        current.pop();
        return;
    }
    for first in 1..=remaining - (parts - 1) {
        current.push(first);
        push_compositions(remaining - first, parts - 1, current, out);
        current.pop();
    }
}

/// Every composition of every total in `1..=max_total`.
pub fn compositions_up_to(max_total: u32) -> Vec<Composition> {
    (1..=max_total as i64).flat_map(|n| compositions_of(n).expect("n >= 1")).collect()
}

// ∏_{j=1}^{r-1} (m_j)(|I| - m_j), the split-product shared by n_I and n̄_I.
fn split_product(parts: &[u32]) -> BigInt {
    let total: u32 = parts.iter().sum();
    let mut acc = 0u32;
    let mut prod = BigInt::one();
    for &p in &parts[..parts.len() - 1] {
        acc += p;
        prod *= BigInt::from(acc) * BigInt::from(total - acc);
    }
    prod
}

/// `n_I`, the coefficient of `M_{2I}` in the explicit GJMS formula.
pub fn n_coeff(i: &Composition) -> Rational {
    let parts = i.parts();
    let total = i.total() as usize;
    let top = factorial(total - 1);
    let mut den = split_product(parts);
    for &p in parts {
        let f = factorial(p as usize - 1);
        den *= &f * &f;
    }
    Rational::new(&top * &top, den)
}

/// `m_I`, the coefficient of `P_{2I}` in the recursive GJMS formula.
pub fn m_coeff(i: &Composition) -> Rational {
    let parts = i.parts();
    let total = i.total() as usize;
    let num = factorial(total) * factorial(total - 1);
    let mut den = BigInt::one();
    for &p in parts {
        den *= factorial(p as usize) * factorial(p as usize - 1);
    }
    for w in parts.windows(2) {
        den *= BigInt::from(w[0] + w[1]);
    }
    let value = Rational::new(num, den);
    if parts.len().is_multiple_of(2) {
        -value
    } else {
        value
    }
}

/// `n̄_I = (N-1)!² / ∏ m_k (N - m_k)`.
pub fn nbar_coeff(i: &Composition) -> Rational {
    let top = factorial(i.total() as usize - 1);
    Rational::new(&top * &top, split_product(i.parts()))
}

/// `∏_j (I_j - 1)!²`, the factor relating `n̄_I` and `n_I`.
pub fn shifted_factorial_square_product(i: &Composition) -> Rational {
    let mut prod = BigInt::one();
    for &p in i.parts() {
        let f = factorial(p as usize - 1);
        prod *= &f * &f;
    }
    Rational::from_integer(prod)
}

pub(crate) fn minus_one_pow(exp: usize) -> Rational {
    if exp.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}
