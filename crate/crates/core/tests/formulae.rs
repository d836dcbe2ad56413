use juhl_kit::exact::{compositions_of, compositions_up_to, factorial, rat, ratio, Rational};
use juhl_kit::formulae::{
    expand_p_explicit, expand_p_recursive_all, expand_q_explicit, expand_q_recursive, kcoeff, kcoeff_closed_form,
    two_variable_identity, telescope_check, verify_kidenb,
};
use juhl_kit::nc_series::iterate_l_full;
use juhl_kit::Composition;
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn p_inversion_up_to_eight() {
    let recursive = expand_p_recursive_all(8).unwrap();
    for (k, rec) in (1..=8).zip(recursive) {
        let explicit = expand_p_explicit(k).unwrap();
        assert_eq!(rec, explicit, "N = {k}");
        assert!(explicit.is_homogeneous());
        assert_eq!(explicit.poly.num_terms(), 1 << (k - 1));
    }
}

#[test]
fn q_inversion_up_to_six() {
    for n in 1..=6 {
        let explicit = expand_q_explicit(n).unwrap();
        assert_eq!(expand_q_recursive(n).unwrap(), explicit, "N = {n}");
        assert!(explicit.is_homogeneous());
    }
}

#[test]
fn m_expansion_reversal_symmetry() {
    for n in 1..=9 {
        let p = expand_p_explicit(n).unwrap();
        assert_eq!(p.poly.reversed(), p.poly);
    }
}

// x_M = M_{2M}/(M−1)!²: rescaling the series iteration recovers the n_I.
#[test]
fn series_iteration_rescales_to_explicit_p() {
    for n in 1..=7 {
        let brute = iterate_l_full(n).unwrap();
        let mut rescaled = juhl_kit::NCPoly::zero();
        for (w, c) in brute.terms() {
            let mut v = c.clone();
            for &letter in w.letters() {
                let f = factorial(letter as usize - 1);
                v /= Rational::from_integer(&f * &f);
            }
            rescaled.add_term(w.clone(), v);
        }
        assert_eq!(rescaled, expand_p_explicit(n).unwrap().poly, "N = {n}");
    }
}

fn grid() -> Vec<Rational> {
    vec![rat(0), rat(1), ratio(-3, 2), ratio(5, 7)]
}

#[test]
fn two_variable_identity_on_grid() {
    for k in compositions_up_to(6).into_iter().filter(|c| c.len() > 1) {
        for x in grid() {
            for y in grid() {
                let (l, r) = two_variable_identity(&k, &x, &y).unwrap();
                assert_eq!(l, r, "K={k} X={x} Y={y}");
            }
        }
    }
}

#[test]
fn single_variable_identity() {
    for k in compositions_up_to(7) {
        for b in 1..=6 {
            assert!(verify_kidenb(&k, b).unwrap().passed, "K={k} b={b}");
        }
    }
}

#[test]
fn kcoeff_vanishes_both_ways() {
    for k in compositions_up_to(6) {
        for b in 1..=4 {
            assert!(kcoeff(&k, b).unwrap().is_zero(), "literal K={k} b={b}");
            assert!(kcoeff_closed_form(&k, b).unwrap().is_zero(), "closed K={k} b={b}");
        }
    }
}

#[test]
fn kcoeff_rejects_b_zero() {
    let k = Composition::single(2).unwrap();
    assert!(kcoeff(&k, 0).is_err());
    assert!(verify_kidenb(&k, 0).is_err());
}

#[test]
fn explicit_p_term_counts() {
    for n in 1..=6i64 {
        assert_eq!(expand_p_explicit(n as u32).unwrap().poly.num_terms(), compositions_of(n).unwrap().len());
    }
}

proptest! {
    #[test]
    fn telescope_holds(k in prop::collection::vec(1u32..=5, 2..=9)) {
        prop_assert!(telescope_check(&k).unwrap().passed);
    }
}
