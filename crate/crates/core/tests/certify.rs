use proptest::prelude::*;
use rznk::certify::{bound_n_complex, bound_n_real, build_certificate, complex_bracket, CertOptions, Regime};
use rznk::matrix::Matrix;
use rznk::scalar::{qi, ratio_from_f64};
use rznk::symspace::BiForm;
use rznk::Rational;

fn diag(values: &[i64]) -> BiForm<Rational> {
    let mut m = Matrix::zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m.set(i, i, qi(v));
    }
    BiForm::from_matrix(values.len(), 1, 1, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bounds_grow_with_condition_number(d in 2usize..5, k in 1usize..4, m in 0.1f64..1.0, a in 1.0f64..4.0, b in 1.0f64..4.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        let x = bound_n_complex(d, k, m, m * lo, 2000).unwrap();
        let y = bound_n_complex(d, k, m, m * hi, 2000).unwrap();
        prop_assert!(x.general <= y.general);
        prop_assert!(x.recommended() <= y.recommended());
        let xr = bound_n_real(d, k, m, m * lo, 2000).unwrap();
        let yr = bound_n_real(d, k, m, m * hi, 2000).unwrap();
        prop_assert!(xr.general <= yr.general);
    }

    #[test]
    fn numeric_bracket_is_minimal(d in 2usize..4, k in 1usize..3, ratio in 1.0f64..5.0) {
        let b = bound_n_complex(d, k, 1.0, ratio, 5000).unwrap();
        let n = b.numeric.unwrap();
        let (m, big_m) = (ratio_from_f64(1.0).unwrap(), ratio_from_f64(ratio).unwrap());
        prop_assert!(complex_bracket(d, k, n, &m, &big_m).unwrap() >= qi(0));
        if n > k {
            prop_assert!(complex_bracket(d, k, n - 1, &m, &big_m).unwrap() < qi(0));
        }
        prop_assert!(n <= b.general);
    }

    #[test]
    fn diagonal_forms_certify(a in 1i64..6, b in 1i64..6) {
        let w = diag(&[a, b]);
        let (lo, hi) = (a.min(b) as f64, a.max(b) as f64);
        let opts = CertOptions { m: Some(lo), big_m: Some(hi), ..Default::default() };
        let cert = build_certificate(&w, &opts, None).unwrap();
        prop_assert_eq!(cert.regime, Regime::Proven);
        prop_assert!(cert.pass && cert.positive);
        prop_assert!(cert.residual < 1e-8);
    }
}

#[test]
fn k1_closed_form() {
    // k = 1: n ≥ d M/m - d
    let b = bound_n_complex(2, 1, 1.0, 3.0, 1000).unwrap();
    assert_eq!(b.k1, Some(4));
}
