use num::traits::One;
use proptest::prelude::*;
use rznk::chiribella::{coeff_c, coeff_c_real, coeff_q, coeff_qhat, MpRoute, Picture, SymLinearMap, TraceRoute};
use rznk::combinat::{binomial, sym_dim_q};
use rznk::scalar::qb;
use rznk::Rational;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn c_is_a_probability_vector(n in 1usize..30, k in 1usize..10) {
        let total: Rational = (0..=n.min(k)).map(|s| coeff_c(n, k, s).unwrap()).sum();
        prop_assert!(total.is_one());
        let total_r: Rational = (0..=n.min(k)).map(|s| coeff_c_real(n, k, s).unwrap()).sum();
        prop_assert!(total_r.is_one());
    }

    #[test]
    fn c_matches_hypergeometric_count(n in 1usize..30, k in 1usize..10, s in 0usize..10) {
        prop_assume!(s <= n.min(k));
        let want = Rational::new(binomial(k, s) * binomial(n, s), binomial(n + k, n));
        prop_assert_eq!(coeff_c(n, k, s).unwrap(), want);
    }

    #[test]
    fn q_inverts_c_with_dimension_weights(d in 1usize..5, k in 1usize..4, extra in 0usize..6, s in 0usize..4) {
        prop_assume!(s <= k);
        let n = k + extra;
        let v: Rational = (s..=k)
            .map(|t| coeff_q(n, k, t, d).unwrap() * coeff_c(n, t, s).unwrap() * sym_dim_q(d, n + k) / sym_dim_q(d, n + t))
            .sum();
        prop_assert_eq!(v, if s == k { Rational::one() } else { Rational::from_integer(0.into()) });
    }

    #[test]
    fn qhat_sums_to_one(d in 1usize..5, k in 1usize..4, extra in 1usize..20) {
        let n = k + extra;
        let total: Rational = (0..=k).map(|s| coeff_qhat(n, k, s, d).unwrap()).sum();
        prop_assert!(total.is_one());
    }

    #[test]
    fn phi_psi_inverse(d in 1usize..=3, k in 1usize..=2, extra in 0usize..4) {
        let pic = Picture::Complex { ancilla: 1 };
        let n = k + extra;
        let phi = SymLinearMap::phi(n, k, d, pic).unwrap();
        let psi = SymLinearMap::psi(n, k, d, pic).unwrap();
        prop_assert!(phi.compose(&psi).unwrap().is_identity());
        prop_assert!(psi.compose(&phi).unwrap().is_identity());
    }

    #[test]
    fn mp_routes_agree(d in 1usize..=3, k in 1usize..=2, n in 1usize..=3) {
        let pic = Picture::Complex { ancilla: 1 };
        let a = SymLinearMap::mp(n, k, d, pic, MpRoute::Chiribella).unwrap();
        let b = SymLinearMap::mp(n, k, d, pic, MpRoute::HaarMoments).unwrap();
        prop_assert_eq!(a, b);
        let ar = SymLinearMap::mp(n, k, d, Picture::Real, MpRoute::Chiribella).unwrap();
        let br = SymLinearMap::mp(n, k, d, Picture::Real, MpRoute::HaarMoments).unwrap();
        prop_assert_eq!(ar, br);
    }

    #[test]
    fn trace_routes_agree(d in 1usize..=3, k in 1usize..=3, t in 1usize..=3) {
        prop_assume!(t <= k);
        let pic = Picture::Complex { ancilla: 1 };
        let a = SymLinearMap::trace(d, k, t, pic, TraceRoute::Laplacian).unwrap();
        let b = SymLinearMap::trace(d, k, t, pic, TraceRoute::Contraction).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn mp_scales_traces_by_dimension_ratio() {
    // tr MP_{n→k}(X) = d[n+k]/d[n] · tr X, checked on the identity operator.
    for (d, n, k) in [(2, 2, 1), (2, 3, 2), (3, 2, 2)] {
        let mp = SymLinearMap::mp(n, k, d, Picture::Complex { ancilla: 1 }, MpRoute::HaarMoments).unwrap();
        let id = rznk::symspace::BiForm::<Rational>::norm_power(d, n, 1);
        let out = mp.apply_form(&id).unwrap();
        let want = qb(rznk::combinat::sym_dim_big(d, n)) * sym_dim_q(d, n + k) / sym_dim_q(d, n);
        assert_eq!(out.trace(), want, "d={d} n={n} k={k}");
    }
}
