use std::sync::Arc;

use super::*;
use crate::builtins::builtin;
use crate::corpus::{enumerate_presheaves, uniform_bounds};
use crate::fincat::catalog;
use crate::presheaf::{is_isomorphic, product};

fn base(name: &str) -> Arc<FinCategory> {
    Arc::new(catalog(name).unwrap())
}

fn corpus(name: &str, bound: usize) -> CorpusIndex {
    let b = base(name);
    enumerate_presheaves(&b, &uniform_bounds(&b, bound)).unwrap()
}

fn refgraph_string() -> AdjointString {
    let c = corpus("refgraph", 2);
    let (string, checks) = build_adjoint_string(&c).unwrap();
    assert!(checks.passed());
    string
}

#[test]
fn lower_star_of_representables() {
    let b = base("refgraph");
    let s = refgraph_string();
    let e = b.object_id("E").unwrap();
    let fy = s.f_lower_star(&yoneda(&b, e).unwrap()).unwrap();
    assert!(is_isomorphic(&fy.object, &builtin(&b, "D2").unwrap()));
    let p2 = builtin(&b, "P2").unwrap();
    let fp = s.f_lower_star(&p2).unwrap();
    assert!(is_isomorphic(&fp.object, &builtin(&b, "D2").unwrap()));
    assert!(is_isomorphic(&s.f_shriek(&p2).unwrap().object, &terminal(&b)));
}

#[test]
fn upper_shriek_is_codiscrete() {
    let b = base("refgraph");
    let s = refgraph_string();
    let (v, e) = (b.object_id("V").unwrap(), b.object_id("E").unwrap());
    for n in 0..=3 {
        let d = builtin(&b, &format!("D{n}")).unwrap();
        let us = s.f_upper_shriek(&d).unwrap();
        assert_eq!(us.object.size(v), n);
        assert_eq!(us.object.size(e), n * n);
        let sq = product(&d, &d).unwrap();
        assert_eq!(us.object.size(e), sq.object.size(v));
    }
}

#[test]
fn point_base_functors_are_identities() {
    let c = corpus("point", 3);
    let (s, checks) = build_adjoint_string(&c).unwrap();
    assert!(checks.passed());
    for x in c.iter() {
        assert!(is_isomorphic(&s.f_shriek(x).unwrap().object, x));
        assert!(s.f_lower_star(x).unwrap().sub.is_top());
        assert!(is_isomorphic(&s.f_upper_shriek(x).unwrap().object, x));
    }
}

#[test]
fn refgraph_is_precohesive() {
    let r = check_precohesive(&corpus("refgraph", 2)).unwrap();
    assert!(r.prerequisite_failure.is_none());
    for c in r.checks() {
        assert!(c.passed, "{}: {:?}", c.name, c.witness);
        assert!(c.tested > 0, "{}", c.name);
    }
    assert!(r.precohesive);
}

#[test]
fn graph_base_reports_ns() {
    let r = check_precohesive(&corpus("graph", 1)).unwrap();
    assert!(!r.precohesive);
    let msg = r.prerequisite_failure.unwrap();
    assert!(msg.contains("NS") && msg.contains("y(E)"), "{msg}");
    match theorem_c_harness(&corpus("graph", 1), None) {
        Err(Error::PrereqFailed(m)) => assert!(m.contains("NS")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn theorem_c_on_refgraph_and_point() {
    for (name, bound) in [("refgraph", 2), ("point", 3)] {
        let r = theorem_c_harness(&corpus(name, bound), None).unwrap();
        assert!(r.axioms_side && r.precohesive_side && r.agree, "{name}");
        assert!(r.forward_ingredients.passed, "{name}");
        assert!(theorem_c_self_test(&corpus(name, bound)).unwrap(), "{name}");
    }
}

#[test]
fn mutation_is_noticed() {
    let c = corpus("refgraph", 2);
    let m = theorem_c_harness(&c, Some(Mutation::IgnorePoints)).unwrap();
    assert!(!m.axioms_side);
    assert!(!m.agree);
}

#[test]
fn theorem_ab_on_refgraph() {
    let r = theorem_ab_harness(&corpus("refgraph", 2)).unwrap();
    for c in r.checks() {
        assert!(c.passed, "{}: {:?}", c.name, c.witness);
    }
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    assert!(is_decidable(&exponential(&p2, &builtin(&b, "2").unwrap()).unwrap().object));
}

#[test]
fn coreflection_needs_decidable_tests() {
    let b = base("refgraph");
    let l = builtin(&b, "L").unwrap();
    let one = terminal(&b);
    let c = coreflection(&l, std::slice::from_ref(&one)).unwrap().unwrap();
    assert!(is_isomorphic(&c.object, &one));
}
