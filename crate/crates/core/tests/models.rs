use involute_core::distribution::{Check, SymmetryClass};
use involute_core::expr::{parse, substitute, Bindings, Expr, FunctionBinding};
use involute_core::fgordon::{cartan_model, fgordon_model, klein_gordon};
use involute_core::geometry::{bracket, VectorField};
use involute_core::symmetry::{determining_equations, Component, SymmetryAnsatz};
use involute_core::Symbol;

fn e(s: &str) -> Expr {
    parse(s).unwrap()
}

fn generic() -> involute_core::fgordon::FGordonModel {
    fgordon_model(&e("F(x,y,u,p,q)"), &[]).unwrap()
}

#[test]
fn bracket_of_total_derivatives() {
    let m = generic();
    let b = bracket(m.x1(), m.x2()).unwrap();
    let fx = "diff(F(x,y,u,p,q), x) + p*diff(F(x,y,u,p,q), u) + r*diff(F(x,y,u,p,q), p) + F(x,y,u,p,q)*diff(F(x,y,u,p,q), q)";
    let fy = "diff(F(x,y,u,p,q), y) + q*diff(F(x,y,u,p,q), u) + F(x,y,u,p,q)*diff(F(x,y,u,p,q), p) + t*diff(F(x,y,u,p,q), q)";
    let expected = VectorField::from_pairs(m.chart(), &[("p", e(fx)), ("q", -e(fy))]).unwrap();
    assert_eq!(b, expected);
    let flat = fgordon_model(&Expr::zero(), &[]).unwrap();
    assert!(bracket(flat.x1(), flat.x2()).unwrap().is_zero());
}

#[test]
fn declared_forms_span_the_annihilator() {
    let m = generic();
    let d = &m.distribution;
    let ann = d.annihilator().unwrap();
    assert_eq!(ann.len(), 3);
    let declared = m.omegas();
    let as_rows = |v: &[involute_core::geometry::KForm]| v.iter().map(|w| w.covector().unwrap()).collect::<Vec<_>>();
    for w in as_rows(&declared) {
        assert!(involute_core::linalg::solve_membership(&as_rows(&ann), &w).unwrap().0.is_member());
    }
    for w in as_rows(&ann) {
        assert!(involute_core::linalg::solve_membership(&as_rows(&declared), &w).unwrap().0.is_member());
    }
}

#[test]
fn jet_translations_are_shuffling() {
    let m = fgordon_model(&e("G(u,p,q)"), &[]).unwrap();
    let c = m.chart().clone();
    let d = &m.distribution;
    match d.classify(&VectorField::coordinate(&c, 0)).unwrap() {
        SymmetryClass::ShufflingOnly(rep) => {
            assert_eq!(rep, VectorField::from_pairs(&c, &[("u", e("-p")), ("p", e("-r")), ("q", -e("G(u,p,q)"))]).unwrap())
        }
        other => panic!("{other:?}"),
    }
    // with explicit x-dependence the translation is no longer a symmetry
    assert!(!generic().distribution.is_symmetry_brackets(&VectorField::coordinate(&c, 0)).unwrap().holds());
    let dr = VectorField::coordinate(&c, 5);
    match d.classify(&dr).unwrap() {
        SymmetryClass::NotASymmetry(w) => assert_eq!((w.left, w.right), (None, 0)),
        other => panic!("{other:?}"),
    }
    assert!(d.reduce_mod(&dr, &[2, 3, 4]).unwrap().is_zero());
    let kg = klein_gordon(&e("a"), &e("b")).unwrap();
    assert!(kg.model.distribution.is_symmetry_brackets(&VectorField::coordinate(&c, 1)).unwrap().holds());
}

#[test]
fn point_ansatz_contains_second_order_constraints() {
    let m = generic();
    let c = m.chart().clone();
    let point: Vec<Symbol> = ["x", "y", "u"].map(Symbol::new).to_vec();
    let comps = ["X", "Y", "U", "P", "Q", "R", "T"]
        .iter()
        .enumerate()
        .map(|(i, n)| Component::Unknown { name: Symbol::new(n), args: if i < 3 { point.clone() } else { c.coords().to_vec() } })
        .collect();
    let sys = determining_equations(&m.distribution, &SymmetryAnsatz::new(&c, comps).unwrap()).unwrap();
    // the u-form pairings with Dr and Dt vanish for point functions
    assert_eq!(sys.len(), 10);
    for (name, slot) in [("P", "r"), ("P", "t"), ("Q", "r"), ("Q", "t")] {
        let target = Expr::apply_symbols(name, &["x", "y", "u", "p", "q", "r", "t"]).diff(&Symbol::new(slot));
        assert!(sys.equations.iter().any(|eq| eq.expr == target || eq.expr == -&target), "{name}_{slot}");
    }
}

#[test]
fn cartan_second_order_system() {
    let m = cartan_model(2, &e("f(x,p0,p1)"), &[]).unwrap();
    let sys = determining_equations(&m.distribution, &SymmetryAnsatz::general(m.chart(), &["a", "b", "c"]).unwrap()).unwrap();
    assert_eq!(sys.len(), 2);
    let x = &m.field;
    let a = e("a(x,p0,p1)");
    let b = e("b(x,p0,p1)");
    let c_body = x.apply(&b) - e("p1") * x.apply(&a);
    let bind = Bindings::new().function("c", FunctionBinding::new(&["x", "p0", "p1"], c_body.clone()));
    let z = VectorField::new(m.chart(), vec![a.clone(), b, c_body.clone()]).unwrap();
    let relation = x.apply(&c_body) - e("f(x,p0,p1)") * x.apply(&a) - z.apply(&e("f(x,p0,p1)"));
    let residuals: Vec<Expr> = sys.equations.iter().map(|eq| substitute(&eq.expr, &bind).unwrap()).collect();
    assert!(residuals[0].is_zero());
    assert!((&residuals[1] + &relation).is_zero() || (&residuals[1] - &relation).is_zero());
}

#[test]
fn cartan_models_are_involutive() {
    for k in 1..=3 {
        let m = cartan_model(k, &e("x*p0 + 2"), &[]).unwrap();
        assert!(matches!(m.distribution.is_involutive().unwrap(), Check::Holds));
    }
}
