use nibble::generators::HardInstanceSpec;
use nibble::oracles::{
    appendix_bound, chain_eigen_check, chain_orthogonality_defect, check_hard_instance, hard_instance_without_bridge,
    recipe_c0, verify_appendix_lemma, verify_lemma51, verify_lemma51_on, AppendixBoundRequest, ChainSpectrum, Lemma,
};
use std::f64::consts::PI;

#[test]
fn chain_eigensystem_residual_up_to_512() {
    for ell in (2..=512).step_by(2) {
        let r = chain_eigen_check(ell).unwrap();
        assert!(r < 1e-9, "ell {ell}: residual {r}");
    }
    assert!(chain_eigen_check(8).unwrap() < 1e-10);
}

#[test]
fn chain_eigenvectors_are_orthonormal() {
    for ell in [2, 8, 64, 200] {
        assert!(chain_orthogonality_defect(ell).unwrap() < 1e-9);
    }
}

#[test]
fn chain_spectrum_endpoints() {
    let s = ChainSpectrum::new(16).unwrap();
    assert_eq!(s.eigenvalue(0), 1.0);
    assert!(s.eigenvalue(16).abs() < 1e-15);
    let v0 = s.eigenvector(0);
    for (u, x) in v0.iter().enumerate() {
        assert!((x / s.degree(u) - v0[0] / s.degree(0)).abs() < 1e-15);
    }
}

#[test]
fn bound_formula_examples() {
    let bound = |lemma, ell, gamma| appendix_bound(&AppendixBoundRequest { lemma, ell, gamma }).unwrap();
    assert!((bound(Lemma::A3, 100, 4.0) - 3.0 / 100.0).abs() < 1e-15);
    assert!((bound(Lemma::A1, 100, 1e-12) - 1.0 / 200.0).abs() < 1e-12);
    assert!((bound(Lemma::A4, 100, PI) - PI / 200.0).abs() < 1e-15);
}

#[test]
fn appendix_examples_pass() {
    for (lemma, ell) in [(Lemma::A1, 200), (Lemma::A2, 100), (Lemma::A4, 100)] {
        let c = verify_appendix_lemma(&AppendixBoundRequest { lemma, ell, gamma: 1.0 }, 10.0).unwrap();
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn lemma51_and_sweep_scan_agree() {
    for (ell, x, gamma) in [
        (100usize, 0.25, 2.0),
        (100, 0.1, 1.0),
        (200, 0.05, 4.0),
        (120, 0.01, 2.0),
    ] {
        let spec = HardInstanceSpec {
            ell,
            n: 1e10,
            phi: x / (ell * ell) as f64,
            c0: recipe_c0(gamma).unwrap(),
        };
        let check = check_hard_instance(&spec, gamma).unwrap();
        if check.lemma51.pass {
            assert!(!check.scan.separates_c_from_d, "{check:?}");
        }
        assert_eq!(verify_lemma51(&spec, gamma).unwrap(), check.lemma51);
    }
}

#[test]
fn removing_the_bridge_breaks_the_comparison() {
    let spec = HardInstanceSpec {
        ell: 100,
        n: 1e10,
        phi: 0.25 / 1e4,
        c0: recipe_c0(2.0).unwrap(),
    };
    let h = hard_instance_without_bridge(&spec).unwrap();
    let check = verify_lemma51_on(&h, 2.0).unwrap();
    assert_eq!(check.normalized_d, 0.0);
    assert!(!check.pass);
}
