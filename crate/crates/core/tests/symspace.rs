use proptest::prelude::*;
use rand::Rng;
use rznk::matrix::Matrix;
use rznk::sampling::{complex_sphere, norm_c, real_sphere, seeded};
use rznk::scalar::{qi, ComplexRational};
use rznk::symspace::{tensor, BiForm, HermOp, RealSymPoly};
use rznk::{Rational, Scalar, C64};

fn random_form(seed: u64, d: usize, k: usize, ancilla: usize) -> BiForm<ComplexRational> {
    let dim = BiForm::<ComplexRational>::zeros(d, k, ancilla).matrix().rows();
    let mut rng = seeded(seed);
    let mut m = Matrix::<ComplexRational>::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let re = qi(rng.random_range(-4..=4));
            let im = if r == c { qi(0) } else { qi(rng.random_range(-4..=4)) };
            m.set(r, c, ComplexRational::new(re.clone(), im.clone()));
            m.set(c, r, ComplexRational::new(re, -im));
        }
    }
    BiForm::from_matrix(d, k, ancilla, m).unwrap()
}

fn random_real(seed: u64, d: usize, k: usize) -> RealSymPoly<Rational> {
    let len = RealSymPoly::<Rational>::zeros(d, k).coeffs().len();
    let mut rng = seeded(seed);
    RealSymPoly::from_coeffs(d, k, (0..len).map(|_| qi(rng.random_range(-5..=5))).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_trace_matches_contraction(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=3, t in 0usize..=3, anc in 1usize..=2) {
        prop_assume!(t <= k);
        let w = random_form(seed, d, k, anc);
        prop_assert_eq!(w.partial_trace(t).unwrap(), tensor::partial_trace(&w, t).unwrap());
    }

    #[test]
    fn trace_adjoint_matches_tensor_embedding(seed in any::<u64>(), d in 1usize..=3, k in 0usize..=2, extra in 0usize..=2) {
        let w = random_form(seed, d, k, 1);
        prop_assert_eq!(w.trace_adjoint(k + extra).unwrap(), tensor::trace_adjoint(&w, k + extra).unwrap());
    }

    #[test]
    fn trace_and_adjoint_are_hs_adjoint(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=3, t in 1usize..=3) {
        prop_assume!(t <= k);
        let a = random_form(seed, d, k, 1);
        let b = random_form(seed ^ 0xabcdef, d, k - t, 1);
        let lhs = b.hs_inner(&a.partial_trace(t).unwrap());
        let rhs = b.trace_adjoint(k).unwrap().hs_inner(&a);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn herm_op_and_form_agree(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=3) {
        let mut rng = seeded(seed);
        let h = HermOp::random(&mut rng, d, k, 2);
        let form = h.to_biform();
        let x = complex_sphere(&mut rng, d);
        let y = complex_sphere(&mut rng, 2);
        let a = h.eval(&x, &y).unwrap();
        let b = form.eval(&x, &y);
        prop_assert!((a - b.re).abs() < 1e-10 * (1.0 + a.abs()));
        prop_assert!(b.im.abs() < 1e-10 * (1.0 + a.abs()));
        let back = HermOp::from_biform(&form).unwrap();
        prop_assert!((back.entries() - h.entries()).norm() < 1e-10);
    }

    #[test]
    fn norm_multiplication_scales_values(seed in any::<u64>(), d in 1usize..=3, k in 0usize..=2) {
        let w = random_form(seed, d, k, 1).to_c64();
        let mut rng = seeded(seed);
        let x: Vec<C64> = (0..d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let y = [C64::new(1.0, 0.0)];
        let lhs = w.mul_norm_sq().eval(&x, &y);
        let rhs = w.eval(&x, &y) * norm_c(&x).powi(2);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn real_trace_routes_agree(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=3, t in 1usize..=3) {
        prop_assume!(t <= k);
        let p = random_real(seed, d, k);
        prop_assert_eq!(p.partial_trace(t).unwrap(), tensor::real_partial_trace(&p, t).unwrap());
        prop_assert_eq!(p.trace_adjoint(k + t).unwrap(), tensor::real_trace_adjoint(&p, k + t).unwrap());
    }

    #[test]
    fn real_laplacian_of_norm_power(d in 1usize..=4, k in 1usize..=4) {
        // Δ ‖x‖^{2k} = 2k (2k + d - 2) ‖x‖^{2k-2}
        let p = RealSymPoly::<Rational>::norm_power(d, k);
        let c = qi((2 * k * (2 * k + d - 2)) as i64);
        prop_assert_eq!(p.laplacian(), RealSymPoly::<Rational>::norm_power(d, k - 1).scale(&c));
    }

    #[test]
    fn real_eval_is_homogeneous(seed in any::<u64>(), d in 1usize..=3, k in 1usize..=3, s in 0.1f64..3.0) {
        let p = random_real(seed, d, k).to_f64();
        let x = real_sphere(&mut seeded(seed), d);
        let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
        let want = p.eval(&x) * s.powi(2 * k as i32);
        prop_assert!((p.eval(&sx) - want).abs() < 1e-9 * (1.0 + want.abs()));
    }
}

#[test]
fn exact_and_float_forms_agree() {
    let w = random_form(3, 2, 2, 1);
    let f = w.to_c64();
    let x = [C64::new(0.3, -0.2), C64::new(0.5, 0.1)];
    let y = [C64::new(1.0, 0.0)];
    let a = w.matrix().map(|z: &ComplexRational| z.to_c64());
    assert_eq!(&a, f.matrix());
    assert!(f.eval(&x, &y).im.abs() < 1e-12);
}
