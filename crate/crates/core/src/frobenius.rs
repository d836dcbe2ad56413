//! Series solutions of the regular-singular operators
//!
//! ```text
//! D_m = y(1+y) d²/dy² + [1 − (N−1)y] d/dy + m(N−m)
//! ```
//!
//! Series are held in normalized form: a [`ScalarSeries`] stores `u_j`, and
//! the coefficient of `y^j` is `u_j / (j!)²`. In that form `D_m u = f`
//! becomes the first-order recursion `u_{j+1} = −(m−j)(N−m−j) u_j + f_j`,
//! which keeps integer inputs integral.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{factorial, rat, Composition, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarSeries {
    normalized: Vec<Rational>,
}

impl ScalarSeries {
    pub fn zero(cap: usize) -> Self {
        ScalarSeries { normalized: vec![Rational::zero(); cap + 1] }
    }

    pub fn constant(c: Rational, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        s.normalized[0] = c;
        s
    }

    pub fn from_normalized(normalized: Vec<Rational>) -> Result<Self> {
        if normalized.is_empty() {
            return Err(invalid("a series needs at least one coefficient"));
        }
        Ok(ScalarSeries { normalized })
    }

    /// Builds a series from plain `y^j` coefficients.
    pub fn from_coefficients(coeffs: &[Rational]) -> Result<Self> {
        Self::from_normalized(coeffs.iter().enumerate().map(|(j, c)| c * fact_sq(j)).collect())
    }

    pub fn cap(&self) -> usize {
        self.normalized.len() - 1
    }

    /// `u_j`.
    pub fn normalized(&self, j: usize) -> &Rational {
        &self.normalized[j]
    }

    /// Coefficient of `y^j`, i.e. `u_j / (j!)²`.
    pub fn coefficient(&self, j: usize) -> Rational {
        &self.normalized[j] / fact_sq(j)
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        (0..=self.cap()).map(|j| self.coefficient(j)).collect()
    }

    /// Highest `j ≤ cap` with a nonzero coefficient; `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.normalized.iter().rposition(|c| !c.is_zero())
    }

    /// Lowest `j` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.normalized.iter().position(|c| !c.is_zero())
    }

    pub fn truncated(&self, cap: usize) -> Self {
        ScalarSeries { normalized: self.normalized[..=cap.min(self.cap())].to_vec() }
    }
}

fn fact_sq(j: usize) -> Rational {
    let f = factorial(j);
    Rational::from_integer(&f * &f)
}

/// Unique series `u` with `D_m u = f` and `u(0) = u0`, to the cap of `f`.
pub fn solve_dm(m: i64, n: u32, f: &ScalarSeries, u0: Rational) -> ScalarSeries {
    let n = n as i64;
    let cap = f.cap();
    let mut u = Vec::with_capacity(cap + 1);
    u.push(u0);
    for j in 0..cap {
        let jj = j as i64;
        let factor = rat(-(m - jj) * (n - m - jj));
        let next = &u[j] * factor + &f.normalized[j];
        u.push(next);
    }
    ScalarSeries { normalized: u }
}

/// `D_m u` applied coefficient-wise to the plain `y^j` coefficients; the result
/// is known one degree below the input's cap.
pub fn apply_dm(m: i64, n: u32, u: &ScalarSeries) -> Result<ScalarSeries> {
    if u.cap() == 0 {
        return Err(Error::Truncated(1));
    }
    let n = n as i64;
    let a = u.coefficients();
    let cap = u.cap();
    let out: Vec<Rational> = (0..cap)
        .map(|j| {
            let jj = j as i64;
            let lead = rat((jj + 1) * (jj + 1)) * &a[j + 1];
            let diag = rat(jj * (jj - 1) - (n - 1) * jj + m * (n - m)) * &a[j];
            lead + diag
        })
        .collect();
    ScalarSeries::from_coefficients(&out)
}

/// Working cap for this module.
pub fn default_cap(n: u32) -> usize {
    n as usize + 2
}

fn check_m(m: i64, n: u32) -> Result<()> {
    if n < 1 {
        return Err(invalid("N must be at least 1"));
    }
    if m < 0 || m > n as i64 {
        return Err(invalid(format!("need 0 <= m <= N, got m = {m}, N = {n}")));
    }
    Ok(())
}

/// `P_m`: `D_m P_m = 0`, `P_m(0) = 1`. A polynomial of degree `min(m, N−m)`.
pub fn jacobi_p(m: i64, n: u32) -> Result<ScalarSeries> {
    check_m(m, n)?;
    let p = solve_dm(m, n, &ScalarSeries::zero(default_cap(n)), Rational::one());
    debug_assert_eq!(p.degree(), Some(m.min(n as i64 - m) as usize));
    Ok(p)
}

/// `Q_m`: `D_m Q_m = P_m`, `Q_m(0) = 0`, for `m ≠ N/2`.
pub fn jacobi_q(m: i64, n: u32) -> Result<ScalarSeries> {
    check_m(m, n)?;
    if 2 * m == n as i64 {
        return Err(Error::SingularCase { m, n: n as i64 });
    }
    let p = jacobi_p(m, n)?;
    let q = solve_dm(m, n, &p, Rational::zero());
    debug_assert!(q.degree().unwrap_or(0) <= m.max(n as i64 - m) as usize);
    Ok(q)
}

/// `1 ≤ m_1 < m_2 < ⋯ < m_r = N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSequence {
    n: u32,
    ms: Vec<u32>,
}

impl MSequence {
    pub fn new(ms: Vec<u32>) -> Result<Self> {
        let Some(&n) = ms.last() else {
            return Err(invalid("an m-sequence needs at least one entry"));
        };
        if ms[0] < 1 || ms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("m-sequence must be positive and strictly increasing: {ms:?}")));
        }
        Ok(MSequence { n, ms })
    }

    /// Partial sums of a composition.
    pub fn from_composition(c: &Composition) -> Self {
        MSequence { n: c.total(), ms: c.partial_sums() }
    }

    pub fn to_composition(&self) -> Composition {
        let mut prev = 0;
        let parts = self
            .ms
            .iter()
            .map(|&m| {
                let p = m - prev;
                prev = m;
                p
            })
            .collect();
        Composition::new(parts).expect("strictly increasing positive sequence")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `m_1, …, m_r`.
    pub fn entries(&self) -> &[u32] {
        &self.ms
    }

    pub fn r(&self) -> usize {
        self.ms.len()
    }
}

/// `F_0 = 1` and `D_{m_l} F_l = F_{l−1}`, `F_l(0) = 0`, for `l = 1..=r`.
pub fn compute_f(seq: &MSequence) -> Vec<ScalarSeries> {
    let n = seq.n();
    let cap = default_cap(n);
    let mut fs = vec![ScalarSeries::constant(Rational::one(), cap)];
    for &m in seq.entries() {
        let next = solve_dm(m as i64, n, fs.last().expect("F_0 present"), Rational::zero());
        fs.push(next);
    }
    fs
}

/// `c_{j,l}` for `0 ≤ j ≤ jmax`, `0 ≤ l ≤ r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CTable {
    rows: Vec<Vec<Rational>>,
}

impl CTable {
    pub fn get(&self, j: usize, l: usize) -> &Rational {
        &self.rows[j][l]
    }

    pub fn jmax(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn r(&self) -> usize {
        self.rows[0].len() - 1
    }
}

/// `c_{j+1,l} = −(m_l−j)(N−m_l−j) c_{j,l} + c_{j,l−1}` from `c_{0,0} = 1`,
/// `c_{j,0} = 0` for `j ≥ 1` and `c_{0,l} = 0` for `l ≥ 1`.
pub fn c_table(seq: &MSequence, jmax: usize) -> Result<CTable> {
    let n = seq.n() as i64;
    if jmax < n as usize {
        return Err(invalid(format!("c_table needs jmax >= N = {n}, got {jmax}")));
    }
    let r = seq.r();
    let mut rows = Vec::with_capacity(jmax + 1);
    let mut first = vec![Rational::zero(); r + 1];
    first[0] = Rational::one();
    rows.push(first);
    for j in 0..jmax {
        let jj = j as i64;
        let prev: &Vec<Rational> = &rows[j];
        let mut next = vec![Rational::zero(); r + 1];
        for l in 1..=r {
            let m = seq.entries()[l - 1] as i64;
            next[l] = rat(-(m - jj) * (n - m - jj)) * &prev[l] + &prev[l - 1];
        }
        rows.push(next);
    }
    Ok(CTable { rows })
}

/// `[N² ∏_{l<r} m_l (N − m_l)]^{-1}`.
pub fn expected_top_coefficient(seq: &MSequence) -> Rational {
    let n = seq.n() as i64;
    let mut den = BigInt::from(n * n);
    for &m in &seq.entries()[..seq.r() - 1] {
        den *= BigInt::from(m as i64 * (n - m as i64));
    }
    Rational::new(BigInt::one(), den)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecusolveReport {
    pub sequence: Vec<u32>,
    pub degree: Option<usize>,
    pub top_coefficient: Rational,
    pub expected_top_coefficient: Rational,
    /// Degrees of `F_0, …, F_r` within the working cap.
    pub observed_degrees: Vec<Option<usize>>,
    pub passed: bool,
}

/// Checks that `F_r` has degree exactly `N` with the closed-form top coefficient.
pub fn verify_recusolve(seq: &MSequence) -> RecusolveReport {
    let n = seq.n() as usize;
    let fs = compute_f(seq);
    let last = fs.last().expect("r >= 1");
    let degree = last.degree();
    let top = last.coefficient(n);
    let expected = expected_top_coefficient(seq);
    let bounds_hold = fs.iter().skip(1).zip(seq.entries()).all(|(f, &m)| f.degree().is_none_or(|d| d <= m as usize));
    RecusolveReport {
        sequence: seq.entries().to_vec(),
        degree,
        passed: degree == Some(n) && top == expected && bounds_hold,
        top_coefficient: top,
        expected_top_coefficient: expected,
        observed_degrees: fs.iter().map(ScalarSeries::degree).collect(),
    }
}

/// Every m-sequence ending at `n`.
pub fn msequences_ending_at(n: u32) -> Result<Vec<MSequence>> {
    Ok(crate::exact::compositions_of(n as i64)?.iter().map(MSequence::from_composition).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn homogeneous_solution_is_p_m() {
        for n in 1..=6u32 {
            for m in 0..=n as i64 {
                let cap = default_cap(n);
                let via_solve = solve_dm(m, n, &ScalarSeries::zero(cap), Rational::one());
                assert_eq!(via_solve, jacobi_p(m, n).unwrap());
            }
        }
    }

    #[test]
    fn constant_forcing_for_m_zero() {
        for n in 1..=8u32 {
            let f = ScalarSeries::constant(Rational::one(), default_cap(n));
            let u = solve_dm(0, n, &f, Rational::zero());
            for j in 1..=n as usize {
                // u_j = (j−1)! (N−j+1)(N−j+2)⋯(N−1)
                let mut expected = Rational::from_integer(factorial(j - 1));
                for k in (n as usize + 1 - j)..n as usize {
                    expected *= rat(k as i64);
                }
                assert_eq!(u.normalized(j), &expected, "n={n} j={j}");
            }
            let f = factorial(n as usize - 1);
            assert_eq!(u.normalized(n as usize), &Rational::from_integer(&f * &f));
        }
    }

    #[test]
    fn degree_one_when_recursion_vanishes() {
        let u = solve_dm(1, 2, &ScalarSeries::zero(4), Rational::one());
        assert_eq!(u.degree(), Some(1));
    }

    #[test]
    fn p_examples() {
        assert_eq!(jacobi_p(0, 5).unwrap().degree(), Some(0));
        let p = jacobi_p(1, 4).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.coefficient(1), rat(-3));
        assert!(jacobi_p(5, 4).is_err());
        assert!(jacobi_p(-1, 4).is_err());
    }

    #[test]
    fn q_examples() {
        for n in 1..=8u32 {
            let q0 = jacobi_q(0, n).unwrap();
            assert_eq!(q0.coefficient(n as usize), ratio(1, (n * n) as i64));
            let qn = jacobi_q(n as i64, n).unwrap();
            assert_eq!(qn.coefficient(1), rat(1));
        }
        assert_eq!(jacobi_q(2, 4), Err(Error::SingularCase { m: 2, n: 4 }));
    }

    #[test]
    fn msequence_validation() {
        assert!(MSequence::new(vec![]).is_err());
        assert!(MSequence::new(vec![2, 2]).is_err());
        assert!(MSequence::new(vec![0, 2]).is_err());
        let s = MSequence::new(vec![1, 3, 4]).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.to_composition().parts(), &[1, 2, 1]);
    }

    #[test]
    fn f_examples() {
        let single = MSequence::new(vec![5]).unwrap();
        let fs = compute_f(&single);
        assert_eq!(fs[1].coefficient(5), ratio(1, 25));
        assert_eq!(fs[1], jacobi_q(0, 5).unwrap());

        let seq = MSequence::new(vec![1, 2]).unwrap();
        let fs = compute_f(&seq);
        assert_eq!(fs[2].coefficient(2), ratio(1, 4));
        for (l, f) in fs.iter().enumerate().skip(1) {
            // c_{l,l} = 1, i.e. the y^l coefficient is 1/(l!)²
            assert_eq!(f.valuation(), Some(l));
            assert_eq!(f.normalized(l), &rat(1));
        }
    }

    #[test]
    fn c_table_examples() {
        let seq = MSequence::new(vec![1, 3, 4]).unwrap();
        let t = c_table(&seq, 6).unwrap();
        assert_eq!(t.get(1, 1), &rat(1));
        for (l, &m) in seq.entries().iter().enumerate() {
            for j in (m as usize + 1)..=seq.n() as usize {
                assert!(t.get(j, l + 1).is_zero(), "c_{{{j},{}}}", l + 1);
            }
        }
        assert!(c_table(&seq, 3).is_err());
    }

    #[test]
    fn recusolve_examples() {
        let r = verify_recusolve(&MSequence::new(vec![4]).unwrap());
        assert!(r.passed);
        assert_eq!(r.top_coefficient, ratio(1, 16));
        let r = verify_recusolve(&MSequence::new(vec![1, 2]).unwrap());
        assert!(r.passed);
        assert_eq!(r.top_coefficient, ratio(1, 4));
    }

    #[test]
    fn apply_dm_kills_p() {
        for n in 1..=6u32 {
            for m in 0..=n as i64 {
                let out = apply_dm(m, n, &jacobi_p(m, n).unwrap()).unwrap();
                assert!(out.degree().is_none());
            }
        }
    }
}
