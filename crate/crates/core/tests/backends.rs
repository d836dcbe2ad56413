use juhl_kit::backends::{
    apply_r, einstein_invariants, evaluate_p, evaluate_q, m_constants_via_rho, oracle_p, oracle_partial, oracle_q,
    sphere_q_closed_form, verify_dv_identity, Backend, EinsteinBackend, EinsteinModel, MatrixBackend, RhoPolynomial,
};
use juhl_kit::exact::{factorial, rat, ratio};
use juhl_kit::series::RatSeries;
use juhl_kit::{
    compositions_of, expand_p_explicit, expand_q_explicit, n_coeff, Composition, Error, RatMatrix, RatVector, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

fn sample_vector(dim: usize, salt: i64) -> RatVector {
    RatVector((0..dim as i64).map(|i| ratio((i * 7 + salt) % 5 - 2, 1 + (i + salt) % 3)).collect())
}

#[test]
fn r_step_examples() {
    let backend = MatrixBackend::random(3, 2, 11);
    let f = sample_vector(3, 1);
    let u = RhoPolynomial::monomial(f.clone(), backend.zero(), 0, 1);
    let out = apply_r(0, &u, &backend).unwrap();
    assert_eq!(out.cap(), 0);
    assert_eq!(out.at_zero(), &backend.ms[0].apply(&f));

    let flat = EinsteinBackend::new(EinsteinModel::flat(rat(4)), 3).unwrap();
    let rho = RhoPolynomial::monomial(Rational::one(), Rational::zero(), 1, 3);
    let out = apply_r(5, &rho, &flat).unwrap();
    assert_eq!(out.at_zero(), &rat(10));
    let one = RhoPolynomial::monomial(rat(3), Rational::zero(), 0, 2);
    let out = apply_r(-2, &one, &flat).unwrap();
    assert!((0..=out.cap()).all(|j| out.coeff(j).is_zero()));
}

#[test]
fn truncation_and_unbound_orders() {
    let backend = MatrixBackend::random(2, 2, 3);
    let u = RhoPolynomial::monomial(sample_vector(2, 0), backend.zero(), 0, 0);
    assert!(matches!(apply_r(0, &u, &backend), Err(Error::Truncated(_))));
    let f = sample_vector(2, 4);
    assert!(matches!(oracle_p(&backend, 3, &f), Err(Error::UnboundOrder(3))));
    assert!(matches!(oracle_q(&backend, 3), Err(Error::UnboundOrder(3)) | Err(Error::UnboundW(3))));
    assert!(oracle_p(&backend, 0, &f).is_err());
    assert!(oracle_partial(&backend, 2, 3, &f).is_err());
}

#[test]
fn paneitz_shadow_and_linearity() {
    let backend = MatrixBackend::random(4, 2, 5);
    let f = sample_vector(4, 2);
    let m2 = &backend.ms[0];
    let m4 = &backend.ms[1];
    let expected = &m2.apply(&m2.apply(&f)) + &m4.apply(&f);
    assert_eq!(oracle_p(&backend, 2, &f).unwrap(), expected);
    assert!(oracle_p(&backend, 2, &RatVector::zeros(4)).unwrap().is_zero());
}

#[test]
fn matrix_cross_paths() {
    for dim in [1usize, 2, 4, 5] {
        for seed in 0..3u64 {
            let backend = MatrixBackend::random(dim, 6, seed);
            for n in 1..=6u32 {
                let p = expand_p_explicit(n).unwrap();
                let pm = backend.p_matrix(&p).unwrap();
                assert!(pm.is_symmetric(), "d={dim} seed={seed} N={n}");
                assert_eq!(backend.oracle_p_matrix(n).unwrap(), pm, "d={dim} seed={seed} N={n}");
                let f = sample_vector(dim, seed as i64 + n as i64);
                assert_eq!(oracle_p(&backend, n, &f).unwrap(), evaluate_p(&p, &backend, &f).unwrap());
                let q = expand_q_explicit(n).unwrap();
                assert_eq!(oracle_q(&backend, n).unwrap(), evaluate_q(&q, &backend).unwrap(), "Q d={dim} N={n}");
            }
        }
    }
}

#[test]
fn partial_iteration_matches_n_coefficients() {
    let backend = MatrixBackend::random(3, 6, 17);
    let f = sample_vector(3, 9);
    for n in 1..=6u32 {
        for a in 1..=n {
            let mut expected = RatVector::zeros(3);
            let scale = {
                let fa = factorial(a as usize - 1);
                Rational::from_integer(&fa * &fa) * Rational::from_integer(BigInt::from(-2).pow(a - 1))
            };
            let prefixes: Vec<Vec<u32>> = if n == a {
                vec![vec![]]
            } else {
                compositions_of((n - a) as i64).unwrap().into_iter().map(Composition::into_parts).collect()
            };
            for prefix in prefixes {
                let c = n_coeff(&Composition::with_last(&prefix, a).unwrap()) * &scale;
                let mut v = f.clone();
                for &l in prefix.iter().rev() {
                    v = backend.apply_m(l as usize, &v).unwrap();
                }
                expected = &expected + &v.scaled(&c);
            }
            assert_eq!(oracle_partial(&backend, n, a, &f).unwrap(), expected, "N={n} a={a}");
        }
    }
}

#[test]
fn einstein_w_squared_is_v() {
    for (n, c) in [(rat(4), ratio(1, 2)), (ratio(7, 3), ratio(-1, 3)), (rat(5), rat(2))] {
        let model = EinsteinModel::new(n.clone(), c.clone());
        let len = 9;
        let w = model.w_series(len);
        assert_eq!(&w * &w, model.v_series(len));
        // W_{2a} are the r²-coefficients of w at ρ = −r²/2
        let inv = einstein_invariants(&model, len - 1).unwrap();
        for (i, wa) in inv.w.iter().enumerate() {
            let a = i + 1;
            let scale = Rational::from_integer(BigInt::from(-2).pow(a as u32));
            assert_eq!(wa * scale, w.coeff(a).clone());
        }
    }
    let inv = einstein_invariants(&EinsteinModel::unit_sphere(rat(6)), 2).unwrap();
    assert_eq!(inv.w[0], ratio(-6, 8));
    let n = ratio(5, 2);
    let c = ratio(3, 7);
    let inv = einstein_invariants(&EinsteinModel::new(n.clone(), c.clone()), 1).unwrap();
    assert_eq!(inv.w[0], -(&n * &c) / rat(4));
}

#[test]
fn einstein_m_constants_two_routes() {
    for n in [rat(3), rat(4), ratio(9, 2), rat(10)] {
        for c in [Rational::zero(), ratio(1, 2), ratio(-1, 3), rat(3)] {
            let model = EinsteinModel::new(n.clone(), c.clone());
            let inv = einstein_invariants(&model, 8).unwrap();
            assert_eq!(inv.m, m_constants_via_rho(&model, 8).unwrap());
            if c.is_zero() {
                assert!(inv.m.iter().chain(&inv.w).all(Zero::is_zero));
            }
        }
    }
}

#[test]
fn einstein_cross_paths_and_anchors() {
    for n in [rat(3), rat(4), rat(5), rat(6), rat(8), ratio(11, 3)] {
        for c in [Rational::zero(), ratio(1, 2), ratio(-1, 3)] {
            let backend = EinsteinBackend::new(EinsteinModel::new(n.clone(), c.clone()), 8).unwrap();
            for order in 1..=8u32 {
                let q = expand_q_explicit(order).unwrap();
                let oracle = oracle_q(&backend, order).unwrap();
                assert_eq!(oracle, evaluate_q(&q, &backend).unwrap(), "n={n} c={c} N={order}");
                let p = expand_p_explicit(order).unwrap();
                let p1 = oracle_p(&backend, order, &Rational::one()).unwrap();
                assert_eq!(p1, evaluate_p(&p, &backend, &Rational::one()).unwrap());
                // P_{2N}(1) = (n/2 − N)(−1)^N Q_{2N}
                assert_eq!(p1, (&n / rat(2) - rat(order as i64)) * &oracle);
                if c.is_zero() {
                    assert!(oracle.is_zero());
                }
                if c == ratio(1, 2) {
                    let sign = if order % 2 == 0 { rat(1) } else { rat(-1) };
                    assert_eq!(oracle * sign, sphere_q_closed_form(&n, order), "n={n} N={order}");
                }
            }
        }
        let sphere = EinsteinBackend::new(EinsteinModel::unit_sphere(n.clone()), 1).unwrap();
        assert_eq!(-oracle_q(&sphere, 1).unwrap(), &n / rat(2));
    }
}

#[test]
fn dv_identity_examples() {
    let n = rat(5);
    let flat = EinsteinModel::flat(n.clone());
    let report = verify_dv_identity(&flat, &Rational::zero(), 4, 8).unwrap();
    assert!(report.passed);
    assert!(report.rows[0].lhs.iter().all(Zero::is_zero));
    let gamma = ratio(2, 3);
    let report = verify_dv_identity(&flat, &gamma, 1, 8).unwrap();
    let expected = &gamma * rat(2) + &n - rat(2);
    assert_eq!(report.rows[1].lhs[0], expected);
    assert!(report.rows[1].lhs[1..].iter().all(Zero::is_zero));

    for n in [rat(3), rat(4), ratio(7, 2), rat(6)] {
        for c in [Rational::zero(), ratio(1, 2), ratio(-1, 3)] {
            let model = EinsteinModel::new(n.clone(), c);
            for gamma in [Rational::zero(), rat(1) - &n / rat(2), ratio(5, 4)] {
                assert!(verify_dv_identity(&model, &gamma, 4, 8).unwrap().passed);
            }
        }
    }
}

#[test]
fn dv_identity_rows_are_not_vacuous() {
    let model = EinsteinModel::unit_sphere(rat(4));
    let report = verify_dv_identity(&model, &rat(-1), 2, 6).unwrap();
    assert!(report.passed);
    for row in &report.rows {
        let s = RatSeries::from_coeffs(row.rhs.clone());
        assert_ne!(s, RatSeries::zero(row.rhs.len()), "k={}", row.k);
    }
}

#[test]
fn matrix_assignment_validation() {
    let sym = RatMatrix::from_rows(vec![vec![rat(1), rat(2)], vec![rat(2), rat(0)]]).unwrap();
    let asym = RatMatrix::from_rows(vec![vec![rat(1), rat(2)], vec![rat(3), rat(0)]]).unwrap();
    assert!(MatrixBackend::new(2, vec![sym.clone()], vec![RatVector::zeros(2)]).is_ok());
    assert!(MatrixBackend::new(2, vec![asym], vec![]).is_err());
    assert!(MatrixBackend::new(3, vec![sym], vec![]).is_err());
    assert_eq!(MatrixBackend::random(3, 4, 9), MatrixBackend::random(3, 4, 9));
    assert_ne!(MatrixBackend::random(3, 4, 9), MatrixBackend::random(3, 4, 10));
}
