use szabo_core::corpus::{corpus, family1_linear, verify_all, VerifyOptions};
use szabo_core::riemext::{
    check_block_structure, extension_report, is_pseudo_szabo, levi_civita_closed_form, riemannian_extension,
};
use szabo_core::szabo::CharPoly;
use szabo_core::{Connection, Expr, ExprMatrix};

#[test]
fn flat_extension_is_szabo() {
    let g = riemannian_extension(&Connection::flat(3)).unwrap();
    let v = is_pseudo_szabo(&g).unwrap();
    assert!(v.is_szabo);
    assert_eq!(v.char_poly, CharPoly::pure_power(6));
    assert!(check_block_structure(&Connection::flat(3)).unwrap().ok());
}

#[test]
fn metric_inverse_and_determinant() {
    for e in corpus() {
        let g = riemannian_extension(&e.connection).unwrap();
        let m = g.matrix();
        assert_eq!(*m, m.transpose(), "{}", e.name);
        assert_eq!(m.mul(&g.inverse()), ExprMatrix::identity(6), "{}", e.name);
        assert_eq!(m.determinant(), Expr::int(-1), "{}", e.name);
    }
}

#[test]
fn closed_form_fiber_symbol_is_linear_in_fiber_coordinates() {
    // Γ̃^{4}_{11} for the first-family linear example.
    let c = levi_civita_closed_form(&family1_linear()).unwrap();
    let e = c.gamma(0, 0, 3);
    assert!(!e.is_zero());
    assert!(e.is_homogeneous_in(|a| matches!(a, szabo_core::Atom::Var(v) if *v >= 3), 1));
    assert!(c.is_torsion_free());
}

#[test]
fn f3_zero_example_factorizes_to_lambda_six() {
    let e = corpus().into_iter().find(|e| e.name == "family2-f3-zero").unwrap();
    let rep = extension_report(&e.connection).unwrap();
    assert!(rep.ok(), "{:?}", rep.blocks.checks);
    assert_eq!(rep.extension.char_poly, CharPoly::pure_power(6));
}

#[test]
fn metric_json_is_sparse_upper_triangle() {
    let g = riemannian_extension(&family1_linear()).unwrap();
    let v = g.to_json();
    assert_eq!(v["dim"], 6);
    let items = v["g"].as_array().unwrap();
    // Three base entries and three pairings.
    assert_eq!(items.len(), 6);
    assert_eq!(items[0]["expr"], "-2*x1*x4");
}

#[test]
fn reference_checks_without_extensions() {
    let r = verify_all(VerifyOptions {
        seed: 3,
        samples: 10,
        skip_extensions: true,
    })
    .unwrap();
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.ok).collect();
    assert!(failed.is_empty(), "{failed:?}");
}
