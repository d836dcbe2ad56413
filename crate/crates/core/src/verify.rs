//! Verification suites. Every instance is an exact comparison; instances run
//! on the rayon pool and are reported in enumeration order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::backends::{
    einstein_invariants, evaluate_p, evaluate_q, m_constants_via_rho, oracle_p, oracle_partial, oracle_q,
    sphere_q_closed_form, verify_dv_identity, Backend, EinsteinBackend, EinsteinModel, MatrixBackend,
};
use crate::error::{invalid, Result};
use crate::exact::{
    compositions_of, compositions_up_to, factorial, n_coeff, nbar_coeff, rat, ratio, Composition, Rational,
};
use crate::formulae::{
    expand_p_explicit, expand_p_recursive_all, expand_q_explicit, expand_q_recursive, kcoeff, kcoeff_closed_form,
    two_variable_identity, telescope_check, verify_kidenb,
};
use crate::free_algebra::NCPoly;
use crate::frobenius::{
    apply_dm, c_table, compute_f, jacobi_p, jacobi_q, msequences_ending_at, verify_recusolve, MSequence,
};
use crate::matrix::{RatMatrix, RatVector};
use crate::nc_series::{iterate_l_full, iterate_l_partial, nbar_partial_polynomial, nbar_polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Combinatorial,
    Inversion,
    Summation,
    Frobenius,
    Backends,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Combinatorial, Suite::Inversion, Suite::Summation, Suite::Frobenius, Suite::Backends];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Combinatorial => "combinatorial",
            Suite::Inversion => "inversion",
            Suite::Summation => "krattenthaler",
            Suite::Frobenius => "frobenius",
            Suite::Backends => "backends",
        }
    }

    /// Order used when none is requested.
    pub fn default_max_order(self) -> u32 {
        match self {
            Suite::Combinatorial => 10,
            Suite::Inversion => 10,
            Suite::Summation => 7,
            Suite::Frobenius => 9,
            Suite::Backends => 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| invalid(format!("unknown suite '{s}'")))
    }
}

/// Expands `all` and removes duplicates, keeping the canonical order.
pub fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(name.parse()?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(invalid("no suite selected"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub instance: String,
    pub computed: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_order: u32,
    pub seed: u64,
    pub instances: usize,
    pub failures: Vec<Failure>,
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Overrides every suite's default order.
    pub max_order: Option<u32>,
    pub seed: u64,
    /// Perturbs one computed coefficient in the first instance of the run.
    pub inject_fault: bool,
}

struct Outcome {
    computed: String,
    expected: String,
    passed: bool,
}

trait Perturb {
    fn perturbed(self) -> Self;
}

impl Perturb for Rational {
    fn perturbed(self) -> Self {
        self + Rational::one()
    }
}

impl Perturb for NCPoly {
    fn perturbed(self) -> Self {
        let word = self.terms().next().map(|(w, _)| w.clone()).unwrap_or_else(crate::free_algebra::Word::empty);
        let mut out = self;
        out.add_term(word, Rational::one());
        out
    }
}

impl Perturb for RatVector {
    fn perturbed(mut self) -> Self {
        if let Some(first) = self.0.first_mut() {
            *first += Rational::one();
        }
        self
    }
}

impl Perturb for RatMatrix {
    fn perturbed(self) -> Self {
        let n = self.dim();
        let mut rows: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        if n > 0 {
            rows[0][0] += Rational::one();
        }
        RatMatrix::from_rows(rows).expect("square")
    }
}

impl Perturb for Vec<Rational> {
    fn perturbed(mut self) -> Self {
        match self.first_mut() {
            Some(first) => *first += Rational::one(),
            None => self.push(Rational::one()),
        }
        self
    }
}

impl Perturb for crate::formulae::MExpansion {
    fn perturbed(mut self) -> Self {
        self.poly = self.poly.perturbed();
        self
    }
}

impl Perturb for crate::formulae::QExpansion {
    fn perturbed(self) -> Self {
        let mut out = crate::formulae::QExpansion::new(self.n);
        let mut first = true;
        for (key, c) in self.terms() {
            let c = if first { c + Rational::one() } else { c.clone() };
            first = false;
            out.add_term(key.clone(), c);
        }
        out
    }
}

trait Render {
    fn render(&self) -> String;
}

impl Render for Rational {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Render for NCPoly {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Render for Vec<Rational> {
    fn render(&self) -> String {
        let parts: Vec<String> = self.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(", "))
    }
}

impl Render for RatVector {
    fn render(&self) -> String {
        self.0.render()
    }
}

impl Render for RatMatrix {
    fn render(&self) -> String {
        let rows: Vec<String> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j).clone()).collect::<Vec<_>>().render())
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl Render for crate::formulae::MExpansion {
    fn render(&self) -> String {
        self.poly.render()
    }
}

impl Render for crate::formulae::QExpansion {
    fn render(&self) -> String {
        let terms: Vec<String> = self.terms().map(|(k, c)| format!("{c}*{}", k.as_composition())).collect();
        terms.join(" + ")
    }
}

fn compare<T: PartialEq + Perturb + Render>(computed: T, expected: T, fault: bool) -> Outcome {
    let computed = if fault { computed.perturbed() } else { computed };
    Outcome { passed: computed == expected, computed: computed.render(), expected: expected.render() }
}

fn holds(computed: bool, fault: bool) -> Outcome {
    let computed = computed != fault;
    Outcome { computed: computed.to_string(), expected: "true".into(), passed: computed }
}

type Check = Box<dyn Fn(bool) -> Result<Outcome> + Send + Sync>;

struct Task {
    instance: String,
    check: Check,
}

fn task(instance: impl Into<String>, check: impl Fn(bool) -> Result<Outcome> + Send + Sync + 'static) -> Task {
    Task { instance: instance.into(), check: Box::new(check) }
}

fn run_tasks(suite: Suite, max_order: u32, seed: u64, tasks: Vec<Task>, fault_first: bool) -> SuiteReport {
    let start = Instant::now();
    let failures: Vec<Failure> = tasks
        .par_iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let outcome = (t.check)(fault_first && i == 0);
            match outcome {
                Ok(o) if o.passed => None,
                Ok(o) => Some(Failure { instance: t.instance.clone(), computed: o.computed, expected: o.expected }),
                Err(e) => Some(Failure {
                    instance: t.instance.clone(),
                    computed: format!("error: {e}"),
                    expected: "a value".into(),
                }),
            }
        })
        .collect();
    SuiteReport { suite, max_order, seed, instances: tasks.len(), failures, wall_time: start.elapsed() }
}

/// Runs the selected suites in order.
pub fn run_suites(suites: &[Suite], options: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    if options.max_order == Some(0) {
        return Err(invalid("max order must be at least 1"));
    }
    let mut reports = Vec::with_capacity(suites.len());
    for (i, &suite) in suites.iter().enumerate() {
        let max_order = options.max_order.unwrap_or_else(|| suite.default_max_order());
        let tasks = suite_tasks(suite, max_order, options.seed);
        reports.push(run_tasks(suite, max_order, options.seed, tasks, options.inject_fault && i == 0));
    }
    Ok(reports)
}

pub fn run_suite(suite: Suite, max_order: u32, seed: u64) -> Result<SuiteReport> {
    let options = VerifyOptions { max_order: Some(max_order), seed, inject_fault: false };
    Ok(run_suites(&[suite], &options)?.remove(0))
}

fn suite_tasks(suite: Suite, max_order: u32, seed: u64) -> Vec<Task> {
    match suite {
        Suite::Combinatorial => combinatorial_tasks(max_order),
        Suite::Inversion => inversion_tasks(max_order, max_order.min(Q_INVERSION_CAP)),
        Suite::Summation => summation_tasks(max_order, seed),
        Suite::Frobenius => frobenius_tasks(max_order),
        Suite::Backends => backend_tasks(max_order, seed),
    }
}

/// Largest Q order checked by the inversion suite.
pub const Q_INVERSION_CAP: u32 = 8;

fn combinatorial_tasks(max_order: u32) -> Vec<Task> {
    let mut tasks = Vec::new();
    for n in 1..=max_order {
        tasks.push(task(format!("full N={n}"), move |fault| {
            Ok(compare(iterate_l_full(n)?, nbar_polynomial(n)?, fault))
        }));
        for a in 1..=n {
            tasks.push(task(format!("partial N={n} a={a}"), move |fault| {
                Ok(compare(iterate_l_partial(n, a)?, nbar_partial_polynomial(n, a)?, fault))
            }));
        }
        tasks.push(task(format!("composition count N={n}"), move |fault| {
            let count = compositions_of(n as i64)?.len() as i64;
            Ok(compare(rat(count), Rational::from_integer(BigInt::one() << (n - 1)), fault))
        }));
    }
    tasks
}

fn inversion_tasks(max_p: u32, max_q: u32) -> Vec<Task> {
    let mut tasks = Vec::new();
    tasks.push(task(format!("P explicit = recursive, N<={max_p}"), move |fault| {
        let recursive = expand_p_recursive_all(max_p)?;
        for (i, rec) in recursive.into_iter().enumerate() {
            let explicit = expand_p_explicit(i as u32 + 1)?;
            let outcome = compare(rec, explicit, fault && i == 0);
            if !outcome.passed {
                return Ok(outcome);
            }
        }
        Ok(holds(true, false))
    }));
    for n in 1..=max_q {
        tasks.push(task(format!("Q explicit = recursive N={n}"), move |fault| {
            Ok(compare(expand_q_recursive(n)?, expand_q_explicit(n)?, fault))
        }));
    }
    tasks
}

fn grid() -> Vec<Rational> {
    vec![Rational::zero(), rat(1), ratio(-3, 2), ratio(5, 7)]
}

fn multi_part_compositions(max_total: u32) -> Vec<Composition> {
    compositions_up_to(max_total).into_iter().filter(|k| k.len() >= 2).collect()
}

fn summation_tasks(max_order: u32, seed: u64) -> Vec<Task> {
    let mut tasks = Vec::new();
    for k in multi_part_compositions(max_order) {
        for x in grid() {
            for y in grid() {
                let k = k.clone();
                let x = x.clone();
                tasks.push(task(format!("two-variable K={k} X={x} Y={y}"), move |fault| {
                    let (lhs, rhs) = two_variable_identity(&k, &x, &y)?;
                    Ok(compare(lhs, rhs, fault))
                }));
            }
        }
    }
    for k in compositions_up_to(max_order + 1) {
        for b in 1..=10u32 {
            let k = k.clone();
            tasks.push(task(format!("single-variable K={k} b={b}"), move |fault| {
                let report = verify_kidenb(&k, b)?;
                Ok(compare(report.lhs, report.rhs, fault))
            }));
        }
    }
    for k in multi_part_compositions(max_order) {
        for b in 1..=5u32 {
            let literal_k = k.clone();
            tasks.push(task(format!("kcoeff literal K={k} b={b}"), move |fault| {
                Ok(compare(kcoeff(&literal_k, b)?, Rational::zero(), fault))
            }));
            let closed_k = k.clone();
            tasks.push(task(format!("kcoeff closed K={k} b={b}"), move |fault| {
                Ok(compare(kcoeff_closed_form(&closed_k, b)?, Rational::zero(), fault))
            }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let s = rng.gen_range(1..=max_order.max(1) as usize + 1);
        let k: Vec<u32> = (0..=s).map(|_| rng.gen_range(1..=6)).collect();
        let label = k.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        tasks.push(task(format!("telescope K=({label})"), move |fault| {
            let report = telescope_check(&k)?;
            Ok(compare(report.lhs, report.rhs, fault))
        }));
    }
    tasks
}

fn frobenius_tasks(max_order: u32) -> Vec<Task> {
    let mut tasks = Vec::new();
    for n in 1..=max_order {
        for m in 0..=n as i64 {
            tasks.push(task(format!("P_m degree N={n} m={m}"), move |fault| {
                let p = jacobi_p(m, n)?;
                let degree = p.degree().map(|d| rat(d as i64)).unwrap_or_else(|| rat(-1));
                Ok(compare(degree, rat(m.min(n as i64 - m)), fault))
            }));
            tasks.push(task(format!("P_m = P_(N-m) N={n} m={m}"), move |fault| {
                Ok(compare(jacobi_p(m, n)?.coefficients(), jacobi_p(n as i64 - m, n)?.coefficients(), fault))
            }));
            tasks.push(task(format!("D_m P_m = 0 N={n} m={m}"), move |fault| {
                let out = apply_dm(m, n, &jacobi_p(m, n)?)?;
                Ok(holds(out.degree().is_none(), fault))
            }));
        }
        tasks.push(task(format!("Q_0 top coefficient N={n}"), move |fault| {
            let q0 = jacobi_q(0, n)?;
            let top = q0.coefficient(n as usize);
            let ok_degree = q0.degree() == Some(n as usize);
            let top = if ok_degree { top } else { rat(0) };
            Ok(compare(top, ratio(1, (n * n) as i64), fault))
        }));
        for comp in compositions_of(n as i64).expect("n >= 1") {
            let seq = MSequence::from_composition(&comp);
            let c_seq = seq.clone();
            tasks.push(task(format!("c_(N,r) = nbar I={comp}"), move |fault| {
                let table = c_table(&c_seq, n as usize)?;
                let expected = nbar_coeff(&c_seq.to_composition());
                Ok(compare(table.get(n as usize, c_seq.r()).clone(), expected, fault))
            }));
        }
        for seq in msequences_ending_at(n).expect("n >= 1") {
            let label = seq.entries().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            let chain_seq = seq.clone();
            tasks.push(task(format!("F-chain m=({label})"), move |fault| {
                let fs = compute_f(&chain_seq);
                let table = c_table(&chain_seq, fs[0].cap())?;
                let mut ok = true;
                for (l, &m) in chain_seq.entries().iter().enumerate() {
                    let image = apply_dm(m as i64, n, &fs[l + 1])?;
                    ok &= image == fs[l].truncated(image.cap());
                    ok &= (0..=fs[l + 1].cap()).all(|j| fs[l + 1].normalized(j) == table.get(j, l + 1));
                }
                Ok(holds(ok, fault))
            }));
            tasks.push(task(format!("degree/top m=({label})"), move |fault| {
                let report = verify_recusolve(&seq);
                let mut outcome = compare(report.top_coefficient, report.expected_top_coefficient, fault);
                outcome.passed &= report.passed;
                Ok(outcome)
            }));
        }
    }
    tasks
}

const MATRIX_DIM: usize = 4;
const MATRIX_SEEDS: u64 = 5;

fn matrix_backend_tasks(max_order: u32, seed: u64, tasks: &mut Vec<Task>) {
    for offset in 0..MATRIX_SEEDS {
        let s = seed.wrapping_add(offset);
        for n in 1..=max_order {
            tasks.push(task(format!("matrix P d={MATRIX_DIM} seed={s} N={n}"), move |fault| {
                let backend = MatrixBackend::random(MATRIX_DIM, n as usize, s);
                let explicit = backend.p_matrix(&expand_p_explicit(n)?)?;
                Ok(compare(backend.oracle_p_matrix(n)?, explicit, fault))
            }));
            tasks.push(task(format!("matrix P symmetric d={MATRIX_DIM} seed={s} N={n}"), move |fault| {
                let backend = MatrixBackend::random(MATRIX_DIM, n as usize, s);
                Ok(holds(backend.p_matrix(&expand_p_explicit(n)?)?.is_symmetric(), fault))
            }));
            tasks.push(task(format!("matrix Q d={MATRIX_DIM} seed={s} N={n}"), move |fault| {
                let backend = MatrixBackend::random(MATRIX_DIM, n as usize, s);
                Ok(compare(oracle_q(&backend, n)?, evaluate_q(&expand_q_explicit(n)?, &backend)?, fault))
            }));
            for a in 1..=n {
                tasks.push(task(format!("matrix partial d={MATRIX_DIM} seed={s} N={n} a={a}"), move |fault| {
                    let backend = MatrixBackend::random(MATRIX_DIM, n as usize, s);
                    let f = RatVector::unit(MATRIX_DIM, (a as usize - 1) % MATRIX_DIM);
                    Ok(compare(oracle_partial(&backend, n, a, &f)?, partial_expected(&backend, n, a, &f)?, fault))
                }));
            }
        }
    }
}

// Σ_{|I| = N−a} n_{(I,a)} (a−1)!² (−2)^{a−1} M_{2I} f
fn partial_expected(backend: &MatrixBackend, n: u32, a: u32, f: &RatVector) -> Result<RatVector> {
    let fa = factorial(a as usize - 1);
    let scale = Rational::from_integer(&fa * &fa * BigInt::from(-2).pow(a - 1));
    let prefixes: Vec<Vec<u32>> = if n == a {
        vec![Vec::new()]
    } else {
        compositions_of((n - a) as i64)?.into_iter().map(Composition::into_parts).collect()
    };
    let mut total = RatVector::zeros(backend.dim);
    for prefix in prefixes {
        let c = n_coeff(&Composition::with_last(&prefix, a)?) * &scale;
        let mut v = f.clone();
        for &l in prefix.iter().rev() {
            v = backend.apply_m(l as usize, &v)?;
        }
        total = &total + &v.scaled(&c);
    }
    Ok(total)
}

/// Dimensions and `c` values used by the Einstein checks.
pub fn einstein_grid() -> (Vec<Rational>, Vec<Rational>) {
    (vec![rat(3), rat(4), rat(5), rat(6), rat(8), ratio(7, 2)], vec![Rational::zero(), ratio(1, 2), ratio(-1, 3)])
}

fn einstein_tasks(max_order: u32, tasks: &mut Vec<Task>) {
    let (dims, cs) = einstein_grid();
    for n in &dims {
        for c in &cs {
            let model = EinsteinModel::new(n.clone(), c.clone());
            let label = format!("n={n} c={c}");
            let m = model.clone();
            tasks.push(task(format!("w*w = v {label}"), move |fault| {
                let w = m.w_series(max_order as usize + 2);
                Ok(compare((&w * &w).coeffs().to_vec(), m.v_series(max_order as usize + 2).coeffs().to_vec(), fault))
            }));
            let m = model.clone();
            tasks.push(task(format!("M constants r/rho {label}"), move |fault| {
                let inv = einstein_invariants(&m, max_order as usize)?;
                Ok(compare(inv.m, m_constants_via_rho(&m, max_order as usize)?, fault))
            }));
            for order in 1..=max_order {
                let m = model.clone();
                tasks.push(task(format!("Einstein Q {label} N={order}"), move |fault| {
                    let backend = EinsteinBackend::new(m.clone(), order as usize)?;
                    Ok(compare(oracle_q(&backend, order)?, evaluate_q(&expand_q_explicit(order)?, &backend)?, fault))
                }));
                let m = model.clone();
                tasks.push(task(format!("Einstein P(1) {label} N={order}"), move |fault| {
                    let backend = EinsteinBackend::new(m.clone(), order as usize)?;
                    let one = Rational::one();
                    let p = expand_p_explicit(order)?;
                    Ok(compare(oracle_p(&backend, order, &one)?, evaluate_p(&p, &backend, &one)?, fault))
                }));
            }
        }
        let flat = EinsteinModel::flat(n.clone());
        tasks.push(task(format!("flat Q = 0 n={n}"), move |fault| {
            let backend = EinsteinBackend::new(flat.clone(), max_order as usize)?;
            let qs = (1..=max_order).map(|o| oracle_q(&backend, o)).collect::<Result<Vec<_>>>()?;
            Ok(compare(qs, vec![Rational::zero(); max_order as usize], fault))
        }));
        let sphere = EinsteinModel::unit_sphere(n.clone());
        let n2 = n.clone();
        tasks.push(task(format!("sphere Q_2 = n/2 n={n}"), move |fault| {
            let backend = EinsteinBackend::new(sphere.clone(), 1)?;
            Ok(compare(-oracle_q(&backend, 1)?, &n2 / rat(2), fault))
        }));
        let sphere = EinsteinModel::unit_sphere(n.clone());
        let n2 = n.clone();
        tasks.push(task(format!("sphere Q closed form n={n}"), move |fault| {
            let backend = EinsteinBackend::new(sphere.clone(), max_order as usize)?;
            let computed = (1..=max_order)
                .map(|o| oracle_q(&backend, o).map(|q| if o % 2 == 0 { q } else { -q }))
                .collect::<Result<Vec<_>>>()?;
            let expected = (1..=max_order).map(|o| sphere_q_closed_form(&n2, o)).collect();
            Ok(compare(computed, expected, fault))
        }));
        for model in [EinsteinModel::flat(n.clone()), EinsteinModel::unit_sphere(n.clone())] {
            for gamma in [Rational::zero(), rat(1) - n / rat(2)] {
                let model = model.clone();
                tasks.push(task(format!("key identity n={n} c={} gamma={gamma}", model.c), move |fault| {
                    let report = verify_dv_identity(&model, &gamma, 4, 8)?;
                    Ok(holds(report.passed, fault))
                }));
            }
        }
    }
}

fn backend_tasks(max_order: u32, seed: u64) -> Vec<Task> {
    let mut tasks = Vec::new();
    matrix_backend_tasks(max_order, seed, &mut tasks);
    einstein_tasks(max_order, &mut tasks);
    tasks
}
