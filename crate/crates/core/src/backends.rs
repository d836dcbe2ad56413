//! Concrete realizations of the building blocks `M_{2N}` and the scalars
//! `W_{2a}`, and direct iteration of
//!
//! ```text
//! R_k = −2ρ ∂_ρ² + 2k ∂_ρ + M̃(ρ),    M̃(ρ) = Σ_{N≥1} M_{2N} (−ρ/2)^{N−1} / (N−1)!²
//! ```
//!
//! Two backends are provided: random symmetric rational matrices acting on
//! vectors ([`MatrixBackend`]), and the scalar shadow of the Einstein family
//! `g_ρ = (1 + cρ)² g` ([`EinsteinBackend`]), in which every `M_{2N}` acts on
//! constants as multiplication by `M_{2N}(1)`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::exact::{factorial, minus_one_pow, rat, ratio, Rational};
use crate::formulae::{MExpansion, QExpansion};
use crate::free_algebra::{nc_eval_matrices, NCPoly};
use crate::matrix::{RatMatrix, RatVector};
use crate::series::RatSeries;

/// Values the building blocks act on: scalars or vectors.
pub trait LinearValue: Clone + PartialEq + Debug {
    fn plus(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Rational) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl LinearValue for Rational {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn scaled(&self, c: &Rational) -> Self {
        self * c
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl LinearValue for RatVector {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn scaled(&self, c: &Rational) -> Self {
        RatVector::scaled(self, c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

pub trait Backend {
    type Value: LinearValue;

    /// The zero of the value space.
    fn zero(&self) -> Self::Value;

    /// `M_{2·order}` applied to `v`.
    fn apply_m(&self, order: usize, v: &Self::Value) -> Result<Self::Value>;

    /// `W_{2a}`.
    fn w(&self, a: usize) -> Result<Self::Value>;
}

/// Polynomial in `ρ` with backend-valued coefficients, known modulo `ρ^{cap+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoPolynomial<V> {
    coeffs: Vec<V>,
}

impl<V: LinearValue> RhoPolynomial<V> {
    pub fn from_coeffs(coeffs: Vec<V>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a rho-polynomial needs at least one coefficient"));
        }
        Ok(RhoPolynomial { coeffs })
    }

    /// `v · ρ^k` modulo `ρ^{cap+1}`.
    pub fn monomial(v: V, zero: V, k: usize, cap: usize) -> Self {
        let mut coeffs = vec![zero; cap + 1];
        if k <= cap {
            coeffs[k] = v;
        }
        RhoPolynomial { coeffs }
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &V {
        &self.coeffs[j]
    }

    /// Value at `ρ = 0`.
    pub fn at_zero(&self) -> &V {
        &self.coeffs[0]
    }
}

/// `(−1/2)^i / (i!)²`, the weight of `M_{2(i+1)}` at `ρ^i` in `M̃(ρ)`.
fn m_tilde_weight(i: usize) -> Rational {
    let f = factorial(i);
    minus_one_pow(i) / Rational::from_integer(&f * &f * (BigInt::one() << i))
}

/// `R_k u`. The derivative terms read one degree above the one they produce,
/// so the result's cap is one less than the input's.
pub fn apply_r<B: Backend>(k: i64, u: &RhoPolynomial<B::Value>, backend: &B) -> Result<RhoPolynomial<B::Value>> {
    let cap = u.cap();
    if cap == 0 {
        return Err(Error::Truncated(1));
    }
    let mut out = Vec::with_capacity(cap);
    for j in 0..cap {
        let jj = j as i64;
        let mut c = u.coeffs[j + 1].scaled(&rat(2 * (jj + 1) * (k - jj)));
        for i in 0..=j {
            let source = &u.coeffs[j - i];
            if source.is_zero_value() {
                continue;
            }
            let term = backend.apply_m(i + 1, source)?.scaled(&m_tilde_weight(i));
            c = c.plus(&term);
        }
        out.push(c);
    }
    Ok(RhoPolynomial { coeffs: out })
}

// R_{1−N} ⋯ R_{N+1−2·last} ⋯ R_{N+1−2·first} u, applied for j = first..=last.
fn apply_r_chain<B: Backend>(
    n: u32,
    steps: std::ops::RangeInclusive<u32>,
    u: RhoPolynomial<B::Value>,
    backend: &B,
) -> Result<RhoPolynomial<B::Value>> {
    let mut u = u;
    for step in steps {
        u = apply_r(n as i64 + 1 - 2 * step as i64, &u, backend)?;
    }
    Ok(u)
}

fn check_order(n: u32) -> Result<()> {
    if n < 1 {
        return Err(invalid("order N must be at least 1"));
    }
    Ok(())
}

/// `R_{1−N} R_{3−N} ⋯ R_{N−1} f` at `ρ = 0`, for `f` independent of `ρ`.
pub fn oracle_p<B: Backend>(backend: &B, n: u32, f: &B::Value) -> Result<B::Value> {
    check_order(n)?;
    let start = RhoPolynomial::monomial(f.clone(), backend.zero(), 0, n as usize);
    Ok(apply_r_chain(n, 1..=n, start, backend)?.at_zero().clone())
}

/// `R_{1−N} ⋯ R_{N−3} (f ρ^{a−1})` at `ρ = 0`.
pub fn oracle_partial<B: Backend>(backend: &B, n: u32, a: u32, f: &B::Value) -> Result<B::Value> {
    check_order(n)?;
    if a < 1 || a > n {
        return Err(invalid(format!("need 1 <= a <= N, got a = {a}, N = {n}")));
    }
    let start = RhoPolynomial::monomial(f.clone(), backend.zero(), a as usize - 1, n as usize - 1);
    Ok(apply_r_chain(n, 2..=n, start, backend)?.at_zero().clone())
}

/// `w′ = Σ_{a≥1} a (−2)^a W_{2a} ρ^{a−1}` modulo `ρ^{cap+1}`.
pub fn w_prime<B: Backend>(backend: &B, cap: usize) -> Result<RhoPolynomial<B::Value>> {
    let coeffs = (1..=cap + 1)
        .map(|a| {
            let weight = rat(a as i64) * minus_one_pow(a) * Rational::from_integer(BigInt::one() << a);
            backend.w(a).map(|w| w.scaled(&weight))
        })
        .collect::<Result<Vec<_>>>()?;
    RhoPolynomial::from_coeffs(coeffs)
}

/// `(−1)^N Q_{2N} = −2 R_{1−N} ⋯ R_{N−3} (w′)` at `ρ = 0`.
pub fn oracle_q<B: Backend>(backend: &B, n: u32) -> Result<B::Value> {
    check_order(n)?;
    let start = w_prime(backend, n as usize - 1)?;
    Ok(apply_r_chain(n, 2..=n, start, backend)?.at_zero().scaled(&rat(-2)))
}

/// `Σ c · M_{2I_1}(M_{2I_2}(⋯ M_{2I_r}(f)))`.
pub fn evaluate_m_poly<B: Backend>(poly: &NCPoly, backend: &B, f: &B::Value) -> Result<B::Value> {
    let mut total = backend.zero();
    for (word, c) in poly.terms() {
        let mut v = f.clone();
        for &letter in word.letters().iter().rev() {
            v = backend.apply_m(letter as usize, &v)?;
        }
        total = total.plus(&v.scaled(c));
    }
    Ok(total)
}

pub fn evaluate_p<B: Backend>(p: &MExpansion, backend: &B, f: &B::Value) -> Result<B::Value> {
    evaluate_m_poly(&p.poly, backend, f)
}

/// `Σ c · M_{2I}(W_{2a})`, i.e. `(−1)^N Q_{2N}` in the backend.
pub fn evaluate_q<B: Backend>(q: &QExpansion, backend: &B) -> Result<B::Value> {
    let mut total = backend.zero();
    for (key, c) in q.terms() {
        let mut v = backend.w(key.a as usize)?;
        for &letter in key.word.letters().iter().rev() {
            v = backend.apply_m(letter as usize, &v)?;
        }
        total = total.plus(&v.scaled(c));
    }
    Ok(total)
}

/// Symmetric rational matrices standing in for `M_2, …, M_{2·max_order}` and
/// vectors standing in for the functions `W_2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAssignment {
    pub dim: usize,
    pub ms: Vec<RatMatrix>,
    pub ws: Vec<RatVector>,
    pub seed: Option<u64>,
}

pub type MatrixBackend = MatrixAssignment;

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-2..=2), rng.gen_range(1..=3))
}

impl MatrixAssignment {
    pub fn new(dim: usize, ms: Vec<RatMatrix>, ws: Vec<RatVector>) -> Result<Self> {
        if ms.iter().any(|m| m.dim() != dim) || ws.iter().any(|w| w.dim() != dim) {
            return Err(invalid(format!("every matrix and vector must have dimension {dim}")));
        }
        if ms.iter().any(|m| !m.is_symmetric()) {
            return Err(invalid("building-block matrices must be symmetric"));
        }
        Ok(MatrixAssignment { dim, ms, ws, seed: None })
    }

    /// Entries from `{−2,…,2}/{1,2,3}`, symmetrized as `(A + Aᵀ)/2`.
    pub fn random(dim: usize, max_order: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = ratio(1, 2);
        let ms = (0..max_order)
            .map(|_| {
                let a = RatMatrix::from_fn(dim, |_, _| small_rational(&mut rng));
                (&a + &a.transpose()).scaled(&half)
            })
            .collect();
        let ws = (0..max_order).map(|_| RatVector((0..dim).map(|_| small_rational(&mut rng)).collect())).collect();
        MatrixAssignment { dim, ms, ws, seed: Some(seed) }
    }

    pub fn max_order(&self) -> usize {
        self.ms.len()
    }

    pub fn generator_map(&self) -> BTreeMap<u32, RatMatrix> {
        self.ms.iter().enumerate().map(|(i, m)| (i as u32 + 1, m.clone())).collect()
    }

    /// The matrix of an `M`-expansion.
    pub fn p_matrix(&self, p: &MExpansion) -> Result<RatMatrix> {
        nc_eval_matrices(&p.poly, &self.generator_map(), self.dim)
    }

    /// The matrix of `R_{1−N} ⋯ R_{N−1}|_{ρ=0}`, column by column.
    pub fn oracle_p_matrix(&self, n: u32) -> Result<RatMatrix> {
        let cols =
            (0..self.dim).map(|i| oracle_p(self, n, &RatVector::unit(self.dim, i))).collect::<Result<Vec<_>>>()?;
        Ok(RatMatrix::from_columns(&cols))
    }
}

impl Backend for MatrixAssignment {
    type Value = RatVector;

    fn zero(&self) -> RatVector {
        RatVector::zeros(self.dim)
    }

    fn apply_m(&self, order: usize, v: &RatVector) -> Result<RatVector> {
        let m = order.checked_sub(1).and_then(|i| self.ms.get(i)).ok_or(Error::UnboundOrder(order))?;
        Ok(m.apply(v))
    }

    fn w(&self, a: usize) -> Result<RatVector> {
        a.checked_sub(1).and_then(|i| self.ws.get(i)).cloned().ok_or(Error::UnboundW(a))
    }
}

/// `g_ρ = (1 + cρ)² g`; `n` may be any rational. `c = 0` is flat and the
/// round unit sphere is `c = 1/2` (hyperbolic normal form `h_r = (1 − r²/4)² g`
/// with `ρ = −r²/2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EinsteinModel {
    pub n: Rational,
    pub c: Rational,
}

impl EinsteinModel {
    pub fn new(n: Rational, c: Rational) -> Self {
        EinsteinModel { n, c }
    }

    pub fn flat(n: Rational) -> Self {
        Self::new(n, Rational::zero())
    }

    pub fn unit_sphere(n: Rational) -> Self {
        Self::new(n, ratio(1, 2))
    }

    /// `v(ρ) = (1 + cρ)^n` modulo `ρ^len`.
    pub fn v_series(&self, len: usize) -> RatSeries {
        RatSeries::binomial_power(&self.c, &self.n, len)
    }

    /// `w(ρ) = (1 + cρ)^{n/2}` modulo `ρ^len`.
    pub fn w_series(&self, len: usize) -> RatSeries {
        RatSeries::binomial_power(&self.c, &(&self.n / rat(2)), len)
    }
}

/// `W_2, …, W_{2N}` and the constants `M_2(1), …, M_{2N}(1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EinsteinInvariants {
    pub w: Vec<Rational>,
    pub m: Vec<Rational>,
}

/// Works in `r`: `W(r) = (1 − c r²/2)^{n/2}` and
/// `U(r) = [∂_r² − (n−1) r⁻¹ ∂_r] W / W` (the divergence term vanishes on
/// spatially constant `W`), then reads `M_{2N}(1)` off `M(r)·1 = −U(r)`.
pub fn einstein_invariants(model: &EinsteinModel, nmax: usize) -> Result<EinsteinInvariants> {
    if nmax < 1 {
        return Err(invalid("nmax must be at least 1"));
    }
    // Series in u = r².
    let w_of_u = RatSeries::binomial_power(&(-&model.c / rat(2)), &(&model.n / rat(2)), nmax + 1);
    // [∂_r² − (n−1) r⁻¹ ∂_r] r^{2a} = 2a(2a − n) r^{2a−2}
    let numerator = RatSeries::from_coeffs(
        (1..=nmax)
            .map(|a| {
                let a = a as i64;
                rat(2 * a) * (rat(2 * a) - &model.n) * w_of_u.coeff(a as usize)
            })
            .collect(),
    );
    let u_of_u = numerator.divide(&w_of_u.truncated(nmax))?;
    let w = (1..=nmax).map(|a| w_of_u.coeff(a).clone()).collect();
    // M(r)·1 = Σ M_{2N}(1) (r²/4)^{N−1} / (N−1)!²
    let m = (1..=nmax)
        .map(|big_n| {
            let f = factorial(big_n - 1);
            -u_of_u.coeff(big_n - 1) * Rational::from_integer(&f * &f * (BigInt::one() << (2 * (big_n - 1))))
        })
        .collect();
    Ok(EinsteinInvariants { w, m })
}

/// `M_{2N}(1)` recomputed in `ρ`: `M̃(ρ)·1 = −[−2ρ ∂_ρ² + (n−2) ∂_ρ] w / w`.
pub fn m_constants_via_rho(model: &EinsteinModel, nmax: usize) -> Result<Vec<Rational>> {
    let w = model.w_series(nmax + 2);
    let w1 = w.derivative();
    let w2 = w1.derivative();
    let numerator = &w2.times_t().scaled(&rat(-2)) + &w1.scaled(&(&model.n - rat(2)));
    let u_tilde = numerator.truncated(nmax).divide(&w.truncated(nmax))?;
    // M̃(ρ)·1 = Σ M_{2N}(1) (−ρ/2)^{N−1} / (N−1)!², so M_{2N}(1) = −(N−1)!² (−2)^{N−1} [ρ^{N−1}] Ũ
    Ok((1..=nmax)
        .map(|big_n| {
            let f = factorial(big_n - 1);
            let scale = Rational::from_integer(&f * &f * (BigInt::one() << (big_n - 1))) * minus_one_pow(big_n - 1);
            -u_tilde.coeff(big_n - 1) * scale
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EinsteinBackend {
    pub model: EinsteinModel,
    pub invariants: EinsteinInvariants,
}

impl EinsteinBackend {
    pub fn new(model: EinsteinModel, max_order: usize) -> Result<Self> {
        let invariants = einstein_invariants(&model, max_order)?;
        Ok(EinsteinBackend { model, invariants })
    }

    pub fn max_order(&self) -> usize {
        self.invariants.m.len()
    }
}

impl Backend for EinsteinBackend {
    type Value = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn apply_m(&self, order: usize, v: &Rational) -> Result<Rational> {
        let m = order.checked_sub(1).and_then(|i| self.invariants.m.get(i)).ok_or(Error::UnboundOrder(order))?;
        Ok(m * v)
    }

    fn w(&self, a: usize) -> Result<Rational> {
        a.checked_sub(1).and_then(|i| self.invariants.w.get(i)).cloned().ok_or(Error::UnboundW(a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvRow {
    pub k: usize,
    pub lhs: Vec<Rational>,
    pub rhs: Vec<Rational>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvReport {
    pub gamma: Rational,
    pub rows: Vec<DvRow>,
    pub passed: bool,
}

/// Scalar check of the conjugated ambient Laplacian identity on `ψ = ρ^k`:
///
/// ```text
/// w [−2ρφ″ + (2γ+n−2 − 2ρ v′/v) φ′ + γ (v′/v) φ]  with φ = ψ / w
///   = −2ρψ″ + (2γ+n−2) ψ′ + M̃(ρ) ψ
/// ```
///
/// The left side is built from `v` and `w` directly; the right side uses the
/// constants from [`einstein_invariants`]. Both are compared modulo `ρ^{cap+1}`.
pub fn verify_dv_identity(model: &EinsteinModel, gamma: &Rational, kmax: usize, cap: usize) -> Result<DvReport> {
    let len = cap + 4;
    let v = model.v_series(len);
    let w = model.w_series(len);
    let w_inv = w.inverse()?;
    let log_dv = v.derivative().divide(&v.truncated(len - 1))?;
    let first_order = &gamma.scaled(&rat(2)) + &(&model.n - rat(2));

    let inv = einstein_invariants(model, cap + 1)?;
    let m_tilde = RatSeries::from_coeffs(inv.m.iter().enumerate().map(|(i, m)| m * m_tilde_weight(i)).collect());

    let mut rows = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let psi = RatSeries::monomial(k, len);
        let phi = &w_inv * &psi;
        let phi1 = phi.derivative();
        let phi2 = phi1.derivative();
        let drift = &RatSeries::constant(first_order.clone(), len) - &log_dv.times_t().scaled(&rat(2));
        let inner = &(&phi2.times_t().scaled(&rat(-2)) + &(&drift * &phi1)) + &(&log_dv * &phi).scaled(gamma);
        let lhs = &w * &inner;

        let psi1 = psi.derivative();
        let psi2 = psi1.derivative();
        let rhs = &(&psi2.times_t().scaled(&rat(-2)) + &psi1.scaled(&first_order)) + &(&m_tilde * &psi);

        let lhs: Vec<Rational> = lhs.coeffs()[..=cap].to_vec();
        let rhs: Vec<Rational> = rhs.coeffs()[..=cap].to_vec();
        let passed = lhs == rhs;
        rows.push(DvRow { k, lhs, rhs, passed });
    }
    let passed = rows.iter().all(|r| r.passed);
    Ok(DvReport { gamma: gamma.clone(), rows, passed })
}

/// `Q_{2N}` of the round unit sphere: `∏_{j=1}^{N} (n/2 + j − 1) · ∏_{j=1}^{N−1} (n/2 − j)`,
/// from the factorization of its GJMS operators.
pub fn sphere_q_closed_form(n: &Rational, order: u32) -> Rational {
    let half = n / rat(2);
    let mut out = Rational::one();
    for j in 1..=order as i64 {
        out *= &half + rat(j - 1);
    }
    for j in 1..order as i64 {
        out *= &half - rat(j);
    }
    out
}
