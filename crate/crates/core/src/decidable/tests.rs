use std::sync::Arc;

use super::*;
use crate::builtins::builtin;
use crate::corpus::{enumerate_presheaves, uniform_bounds};
use crate::fincat::catalog;
use crate::presheaf::{is_isomorphic, two};

fn base(name: &str) -> Arc<FinCategory> {
    Arc::new(catalog(name).unwrap())
}

#[test]
fn decidability_of_builtins() {
    let b = base("refgraph");
    for (name, expected) in [("P2", false), ("L", false), ("2", true), ("D2", true), ("1", true)] {
        assert_eq!(is_decidable(&builtin(&b, name).unwrap()), expected, "{name}");
    }
}

#[test]
fn ns_on_graphs_and_reflexive_graphs() {
    let r = check_ns(&base("graph")).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    let b = base("graph");
    let Some(AxiomWitness {
        detail: WitnessDetail::Representable(c),
        ..
    }) = r.witness
    else {
        panic!("missing witness")
    };
    assert_eq!(b.object_name(c), "E");
    assert_eq!(check_ns(&base("refgraph")).unwrap().verdict, Verdict::Holds);
    assert_eq!(check_ns(&base("point")).unwrap().verdict, Verdict::Holds);
}

#[test]
fn ns_bounded_search_agrees_with_representables() {
    for name in ["point", "graph", "refgraph", "sierpinski", "two-discrete"] {
        let b = base(name);
        let exact = check_ns(&b).unwrap().verdict.passed();
        let corpus = enumerate_presheaves(&b, &uniform_bounds(&b, 2)).unwrap();
        let found = ns_counterexample(&corpus).unwrap();
        assert_eq!(exact, found.is_none(), "{name}");
    }
}

#[test]
fn pi_of_builtins() {
    let b = base("refgraph");
    let one = terminal(&b);
    let p2 = pi(&builtin(&b, "P2").unwrap()).unwrap();
    assert!(is_isomorphic(&p2.object, &one));
    assert!(p2.quotient.is_epi());
    assert!(is_isomorphic(&pi(&two(&b)).unwrap().object, &two(&b)));
    assert!(is_isomorphic(&pi(&builtin(&b, "D2").unwrap()).unwrap().object, &two(&b)));
    assert!(pi(&builtin(&b, "0").unwrap()).unwrap().object.is_empty());
}

#[test]
fn pi_counts_components_of_reflexive_graphs() {
    let b = base("refgraph");
    let corpus = enumerate_presheaves(&b, &[3, 4]).unwrap();
    let v = b.object_id("V").unwrap();
    for x in corpus.iter() {
        assert_eq!(pi(x).unwrap().object.size(v), graph_components(x).unwrap());
    }
}

#[test]
fn pi_map_is_functorial() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let d2 = builtin(&b, "D2").unwrap();
    let (pp, pd) = (pi(&p2).unwrap(), pi(&d2).unwrap());
    let incl = HomSearch::new(&d2, &p2).injective().collect().unwrap();
    assert!(!incl.is_empty());
    for f in incl {
        let pf = pi_map(&f, &pd, &pp).unwrap();
        assert_eq!(pf.cod(), &pp.object);
        let lhs = pf.after(&pd.quotient).unwrap();
        let rhs = pp.quotient.after(&f).unwrap();
        assert!(lhs.same_arrow(&rhs));
    }
}

#[test]
fn congruence_counts_are_bell_numbers() {
    let b = base("point");
    for (n, bell) in [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15)] {
        let x = builtin(&b, &format!("set({n})")).unwrap();
        assert_eq!(congruences(&x).unwrap().len(), bell, "set({n})");
    }
}

#[test]
fn congruences_are_compatible() {
    let b = base("refgraph");
    for name in ["P2", "L", "D2", "P3"] {
        let x = builtin(&b, name).unwrap();
        for r in congruences(&x).unwrap() {
            assert!(quotient(&r).is_ok(), "{name}: {}", r.describe());
            let rel = r.relation();
            assert!(rel.le(&Subobject::top(rel.ambient())).unwrap());
        }
    }
}

#[test]
fn dqo_fails_on_an_edge_of_a_graph() {
    let b = base("graph");
    let a1 = builtin(&b, "A1").unwrap();
    let k = dqo_candidates(&a1).unwrap();
    assert_eq!(k.len(), 2);
    assert!(k.iter().any(Congruence::is_diagonal));
    assert!(k.iter().any(Congruence::is_total));
    assert_eq!(check_dqo(&a1).unwrap().verdict, Verdict::Fails);
}

#[test]
fn dqo_holds_on_small_reflexive_graphs() {
    let b = base("refgraph");
    for name in ["P2", "L", "D2", "P3", "0", "1"] {
        let r = check_dqo(&builtin(&b, name).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{name}");
    }
    let corpus = enumerate_presheaves(&b, &uniform_bounds(&b, 2)).unwrap();
    assert_eq!(check_dqo_bounded(&corpus).unwrap().verdict, Verdict::HoldsAtBound);
}

#[test]
fn dqo_bounded_reports_first_failure() {
    let b = base("graph");
    let corpus = enumerate_presheaves(&b, &uniform_bounds(&b, 2)).unwrap();
    let r = check_dqo_bounded(&corpus).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    let w = r.witness.unwrap();
    let i = w.corpus_index.unwrap();
    assert_eq!(corpus.items[i], w.object);
    for earlier in &corpus.items[..i] {
        assert_eq!(dqo_candidates(earlier).unwrap().len(), 1);
    }
}

#[test]
fn dso_on_two_discrete_and_reflexive_graphs() {
    let b = base("two-discrete");
    let x = builtin(&b, "pair(1,0)").unwrap();
    let d = dso_candidates(&x).unwrap();
    assert_eq!(d.len(), 2);
    assert!(d.iter().any(Subobject::is_bottom));
    assert!(d.iter().any(Subobject::is_top));
    assert_eq!(check_dso(&x).unwrap().verdict, Verdict::Fails);

    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let d = dso_candidates(&p2).unwrap();
    assert_eq!(d.len(), 1);
    let (inner, _) = d[0].to_presheaf();
    assert!(is_isomorphic(&inner, &builtin(&b, "D2").unwrap()));
    assert_eq!(check_dso(&p2).unwrap().verdict, Verdict::Holds);
}

#[test]
fn connectedness() {
    let b = base("refgraph");
    for (name, expected) in [("P2", true), ("L", true), ("1", true), ("D2", false), ("0", false)] {
        assert_eq!(is_connected(&builtin(&b, name).unwrap()).unwrap(), expected, "{name}");
    }
}

#[test]
fn separated_reflection_of_builtins() {
    let b = base("refgraph");
    let (m, q) = separated_reflection(&builtin(&b, "L").unwrap()).unwrap();
    assert!(is_isomorphic(&m, &terminal(&b)));
    assert!(q.is_epi());
    let p2 = builtin(&b, "P2").unwrap();
    let (m, _) = separated_reflection(&p2).unwrap();
    assert!(is_isomorphic(&m, &p2));
    assert!(is_separated(&p2));
    assert!(!is_separated(&builtin(&b, "L").unwrap()));
}

#[test]
fn separated_reflection_is_separated() {
    let b = base("refgraph");
    let corpus = enumerate_presheaves(&b, &[2, 3]).unwrap();
    for x in corpus.iter() {
        let (m, _) = separated_reflection(x).unwrap();
        assert!(is_separated(&m));
    }
}

#[test]
fn fibers_of_the_terminal_map() {
    let b = base("refgraph");
    let p2 = builtin(&b, "P2").unwrap();
    let bang = HomSearch::new(&p2, &terminal(&b)).first().unwrap().unwrap();
    let pt = NatTrans::identity(&terminal(&b));
    assert!(is_isomorphic(&fiber(&bang, &pt).unwrap(), &p2));
}

#[test]
fn dec_topos_sides_agree_on_reflexive_graphs() {
    let b = base("refgraph");
    let corpus = enumerate_presheaves(&b, &[2, 3]).unwrap();
    let r = dec_is_topos_check(&corpus).unwrap();
    assert!(r.agree());
    assert!(r.lhs);
    assert!(r.monos_checked > 0 && r.dense_arrows_checked > 0);
}

#[test]
fn dec_topos_requires_prerequisites() {
    let b = base("graph");
    let corpus = enumerate_presheaves(&b, &uniform_bounds(&b, 1)).unwrap();
    assert!(matches!(dec_is_topos_check(&corpus), Err(Error::PrereqFailed(_))));
}
