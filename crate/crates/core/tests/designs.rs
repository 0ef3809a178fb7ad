use proptest::prelude::*;
use rznk::designs::{build_design, laguerre, laguerre_nodes, verify_design, verify_hilbert_complex, SphericalDesign};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn designs_reproduce_hilbert_identity(d in 1usize..=3, n in 1usize..=3, seed in any::<u64>()) {
        let design = build_design(d, n).unwrap();
        prop_assert!(verify_hilbert_complex(d, n, &design, 5, seed).unwrap().pass);
        for lower in 1..n {
            prop_assert!(verify_hilbert_complex(d, lower, &design, 3, seed).unwrap().pass);
        }
    }

    #[test]
    fn laguerre_roots_and_weights(m in 1usize..=30) {
        let l = laguerre_nodes(m).unwrap();
        prop_assert!(l.roots.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(l.roots[0] > 0.0);
        prop_assert!(l.weights.iter().all(|&w| w > 0.0));
        let total: f64 = l.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for &x in &l.roots {
            let (mut term, mut scale) = (1.0f64, 1.0f64);
            for j in 1..=m {
                term *= (m + 1 - j) as f64 * x / (j * j) as f64;
                scale += term;
            }
            prop_assert!(laguerre(m, x).abs() <= 1e-10 * scale, "m={} x={} L={} scale={}", m, x, laguerre(m, x), scale);
        }
    }
}

#[test]
fn design_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let design = build_design(2, 3).unwrap();
    let path = dir.path().join("d.json");
    design.write(&path).unwrap();
    let back = SphericalDesign::read(&path).unwrap();
    assert_eq!(back, design);
    assert!(verify_design(&back, 1e-9, 1).unwrap().pass);
}

#[test]
fn externally_supplied_design_file() {
    // one atom per basis vector with weight 1/2 is a 1-design in C^2
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ext.json");
    std::fs::write(
        &path,
        r#"{"d":2,"degree":1,"atoms":[{"v_re":[1,0],"v_im":[0,0],"w":0.5},{"v_re":[0,1],"v_im":[0,0],"w":0.5}]}"#,
    )
    .unwrap();
    let design = SphericalDesign::read(&path).unwrap();
    assert!(verify_design(&design, 1e-12, 1).unwrap().pass);
    let two = SphericalDesign { degree: 2, ..design };
    assert!(!verify_design(&two, 1e-9, 1).unwrap().pass);
}
