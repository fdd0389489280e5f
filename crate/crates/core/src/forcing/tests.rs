use std::sync::Arc;

use super::*;
use crate::builtins::builtin;
use crate::fincat::{catalog, FinCategory};
use crate::presheaf::{global_elements, terminal};
use crate::sublattice::{complemented_subobjects, diagonal, subobjects};

fn base(name: &str) -> Arc<FinCategory> {
    Arc::new(catalog(name).unwrap())
}

fn x() -> Term {
    Term::var("x")
}

fn y() -> Term {
    Term::var("y")
}

#[test]
fn double_negated_equality_of_edges() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let mut sig = Signature::new();
    let s = sig.add_sort("X", &p2).unwrap();
    let phi = Formula::not(Formula::not(Formula::eq(x(), y())));
    let e = b.object_id("E").unwrap();
    let a = p2.index_of(e, "a").unwrap();
    let l0 = p2.index_of(e, "l0").unwrap();
    let free = [("x", s), ("y", s)];
    assert!(!forces(&sig, &free, &phi, e, &[a, l0]).unwrap());
    assert!(forces(&sig, &free, &phi, e, &[a, a]).unwrap());
}

#[test]
fn truth_is_forced_everywhere() {
    let b = base("refgraph");
    let mut sig = Signature::new();
    sig.add_sort("X", &terminal(&b)).unwrap();
    for c in b.objects() {
        assert!(forces(&sig, &[], &Formula::True, c, &[]).unwrap());
    }
}

#[test]
fn reflexivity_is_valid() {
    let b = base("refgraph");
    let mut sig = Signature::new();
    let s = sig.add_sort("X", &builtin(&b, "P2").unwrap()).unwrap();
    let v = universally_valid(&sig, &[("x", s)], &Formula::eq(x(), x())).unwrap();
    assert_eq!(v, Validity::Valid);
}

#[test]
fn double_negation_elimination_fails_on_loop_graph() {
    let b = base("refgraph");
    let l = builtin(&b, "L").unwrap();
    let sub = Subobject::from_elements(&l, &[vec![0], vec![0]]).unwrap();
    let mut sig = Signature::new();
    let s = sig.add_sort("L", &l).unwrap();
    sig.add_predicate("S", s, &sub).unwrap();
    let phi = Formula::implies(
        Formula::not(Formula::not(Formula::holds(x(), "S"))),
        Formula::holds(x(), "S"),
    );
    match universally_valid(&sig, &[("x", s)], &phi).unwrap() {
        Validity::Countermodel(cm) => {
            assert_eq!(cm.stage, b.object_id("E").unwrap());
            assert_eq!(l.label(cm.stage, cm.bindings[0].2), "e");
            assert_eq!(cm.describe(&sig), "stage E: x = e");
        }
        Validity::Valid => panic!("expected a countermodel"),
    }
}

#[test]
fn excluded_middle_on_point_base() {
    let b = base("point");
    let x2 = builtin(&b, "set(2)").unwrap();
    let mut sig = Signature::new();
    let s = sig.add_sort("X", &x2).unwrap();
    let p = sig.add_power("PX", s).unwrap();
    let in_u = Formula::member(x(), Term::var("u"));
    let phi = Formula::or(in_u.clone(), Formula::not(in_u));
    assert!(universally_valid(&sig, &[("x", s), ("u", p)], &phi)
        .unwrap()
        .is_valid());
}

#[test]
fn excluded_middle_fails_on_refgraph() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let mut sig = Signature::new();
    let s = sig.add_sort("X", &p2).unwrap();
    let phi = Formula::or(Formula::eq(x(), y()), Formula::not(Formula::eq(x(), y())));
    assert!(!universally_valid(&sig, &[("x", s), ("y", s)], &phi)
        .unwrap()
        .is_valid());
}

#[test]
fn pc_on_point_is_full_power() {
    let b = base("point");
    let pc = pc_object(&builtin(&b, "set(2)").unwrap()).unwrap();
    assert_eq!(pc.object.sizes(), vec![4]);
    assert!(pc.sub.is_top());
}

#[test]
fn pc_of_empty() {
    let b = base("refgraph");
    let pc = pc_object(&builtin(&b, "0").unwrap()).unwrap();
    assert_eq!(pc.object.sizes(), vec![1, 1]);
}

#[test]
fn global_points_of_pc_are_complemented_subobjects() {
    let b = base("refgraph");
    for name in ["P2", "L", "D2", "2"] {
        let x = builtin(&b, name).unwrap();
        let pc = pc_object(&x).unwrap();
        let globals = global_elements(&pc.object).unwrap().len();
        assert_eq!(globals, complemented_subobjects(&x).unwrap().len(), "{name}");
    }
}

#[test]
fn graph_of_identity_is_diagonal() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let (prod, g) = graph_of(&NatTrans::identity(&p2)).unwrap();
    let (_, delta) = diagonal(&p2);
    assert_eq!(g, delta);
    assert!(is_graph(&delta, &prod).unwrap());
    let back = arrow_of_graph(&g, &prod).unwrap().unwrap();
    assert!(back.same_arrow(&NatTrans::identity(&p2)));
}

#[test]
fn total_relation_is_not_a_graph() {
    let b = base("refgraph");
    let x = builtin(&b, "1").unwrap();
    let y = builtin(&b, "2").unwrap();
    let prod = crate::presheaf::product(&x, &y).unwrap();
    let top = Subobject::top(&prod.object);
    assert!(!is_graph(&top, &prod).unwrap());
    assert!(arrow_of_graph(&top, &prod).unwrap().is_none());
}

#[test]
fn identity_has_pneumoconnected_fibers() {
    let b = base("refgraph");
    for name in ["P2", "L", "D2"] {
        let x = builtin(&b, name).unwrap();
        assert!(has_pneumoconnected_fibers(&NatTrans::identity(&x)).unwrap());
    }
}

#[test]
fn separating_fiber_on_point_base() {
    let b = base("point");
    let x = builtin(&b, "set(2)").unwrap();
    let bang = crate::presheaf::nat_transformations(&x, &terminal(&b)).unwrap();
    assert!(!has_pneumoconnected_fibers(&bang[0]).unwrap());
}

#[test]
fn path_to_terminal_has_pneumoconnected_fibers() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let bang = crate::presheaf::nat_transformations(&p2, &terminal(&b)).unwrap();
    assert!(has_pneumoconnected_fibers(&bang[0]).unwrap());
    let d2 = builtin(&b, "D2").unwrap();
    let bang = crate::presheaf::nat_transformations(&d2, &terminal(&b)).unwrap();
    assert!(!has_pneumoconnected_fibers(&bang[0]).unwrap());
}

#[test]
fn negation_agrees_with_forcing() {
    let b = base("refgraph");
    for name in ["P2", "L", "y(E)"] {
        let px = builtin(&b, name).unwrap();
        for s in subobjects(&px).unwrap() {
            let mut sig = Signature::new();
            let sort = sig.add_sort("X", &px).unwrap();
            sig.add_predicate("S", sort, &s).unwrap();
            let mut q = Query::new(&sig, &[("x", sort)], &Formula::not(Formula::holds(x(), "S")))
                .unwrap();
            let neg = s.negation();
            for c in b.objects() {
                for e in 0..px.size(c) {
                    assert_eq!(q.forces(c, &[e]).unwrap(), neg.contains(c, e));
                }
            }
        }
    }
}

#[test]
fn exists_unique_desugaring() {
    let phi = Formula::exists_unique("y", 0, Formula::eq(x(), y()));
    let Formula::Exists(v, _, body) = &phi else {
        panic!("not an existential")
    };
    assert_eq!(v, "y");
    assert_eq!(phi.free_vars(), std::collections::BTreeSet::from(["x".to_string()]));
    assert!(matches!(**body, Formula::And(..)));
}

#[test]
fn parse_and_evaluate() {
    let b = base("refgraph");
    let l = builtin(&b, "L").unwrap();
    let sub = Subobject::from_elements(&l, &[vec![0], vec![0]]).unwrap();
    let mut sig = Signature::new();
    let s = sig.add_sort("L", &l).unwrap();
    sig.add_predicate("S", s, &sub).unwrap();
    let src = "var x : L;\n# double negation\nimplies (not not x in S) (x in S)";
    let (free, phi) = parse_formula(&sig, src).unwrap();
    assert_eq!(free, vec![("x".to_string(), s)]);
    let free: Vec<(&str, SortId)> = free.iter().map(|(v, s)| (v.as_str(), *s)).collect();
    assert!(!universally_valid(&sig, &free, &phi).unwrap().is_valid());

    let (_, phi) = parse_formula(&sig, "all x : L . exists y : L . x = y").unwrap();
    assert!(universally_valid(&sig, &[], &phi).unwrap().is_valid());
}

#[test]
fn parse_errors_carry_positions() {
    let b = base("point");
    let mut sig = Signature::new();
    sig.add_sort("X", &builtin(&b, "set(2)").unwrap()).unwrap();
    match parse_formula(&sig, "var x : X;\nand (x = x) ?") {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 13)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_formula(&sig, "var x : Q; x = x"),
        Err(Error::Parse { line: 1, col: 9, .. })
    ));
    let (free, phi) = parse_formula(&sig, "x = y").unwrap();
    assert!(free.is_empty());
    assert!(matches!(
        universally_valid(&sig, &[], &phi),
        Err(Error::UnboundVariable(_))
    ));
}

#[test]
fn sort_errors() {
    let b = base("refgraph");
    let mut sig = Signature::new();
    let a = sig.add_sort("A", &builtin(&b, "P2").unwrap()).unwrap();
    let c = sig.add_sort("B", &builtin(&b, "L").unwrap()).unwrap();
    let phi = Formula::eq(x(), y());
    assert!(matches!(
        Query::new(&sig, &[("x", a), ("y", c)], &phi),
        Err(Error::SortError(_))
    ));
    assert!(matches!(
        Query::new(&sig, &[("x", a), ("y", a)], &Formula::member(x(), y())),
        Err(Error::SortError(_))
    ));
}
