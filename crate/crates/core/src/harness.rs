//! Corpus-wide property harnesses: the fiber lemma and the structural
//! invariants of `Π`, connectedness and pneumoconnected fibers.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::corpus::CorpusIndex;
use crate::decidable::{
    check_dqo_bounded, check_ns, fiber, is_connected, is_decidable, pi, separated_reflection,
};
use crate::error::Result;
use crate::forcing::has_pneumoconnected_fibers;
use crate::precohesion::{pi_product_comparison, Check};
use crate::presheaf::{
    exponential, factor_through_epi, global_elements, is_isomorphic, product, pullback, terminal,
    HomSearch, NatTrans, Presheaf,
};
use crate::sublattice::{classify_by_two, subobjects};

/// `f × g: X × X' → Y × Y'`.
pub fn product_arrow(f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
    let dom = product(f.dom(), g.dom())?;
    let cod = product(f.cod(), g.cod())?;
    cod.tuple(&f.after(&dom.proj1)?, &g.after(&dom.proj2)?)
}

/// The three conditions for an epi `q: X ↠ Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaConditions {
    /// Every `X → 2` factors through `q`.
    pub maps_to_two: bool,
    pub pneumoconnected: bool,
    /// Every `X → Y` with `Y` decidable factors through `q`.
    pub maps_to_decidables: bool,
}

impl LemmaConditions {
    pub fn agree(&self) -> bool {
        self.maps_to_two == self.pneumoconnected && self.pneumoconnected == self.maps_to_decidables
    }
}

fn all_factor(q: &NatTrans, x: &Presheaf, y: &Presheaf) -> Result<bool> {
    let mut ok = true;
    HomSearch::new(x, y).for_each(|comps| {
        let f = NatTrans::new_unchecked(x.clone(), y.clone(), comps.to_vec());
        if factor_through_epi(q, &f).is_some() {
            ControlFlow::Continue(())
        } else {
            ok = false;
            ControlFlow::Break(())
        }
    })?;
    Ok(ok)
}

pub fn lemma_conditions(q: &NatTrans, decidables: &[Presheaf]) -> Result<LemmaConditions> {
    let x = q.dom();
    let maps_to_two = classify_by_two(x)?
        .iter()
        .all(|(_, chi)| factor_through_epi(q, chi).is_some());
    let pneumoconnected = has_pneumoconnected_fibers(q)?;
    let mut maps_to_decidables = true;
    for d in decidables {
        if !all_factor(q, x, d)? {
            maps_to_decidables = false;
            break;
        }
    }
    Ok(LemmaConditions {
        maps_to_two,
        pneumoconnected,
        maps_to_decidables,
    })
}

#[derive(Debug, Clone)]
pub struct LemmaFailure {
    pub domain: usize,
    pub codomain: usize,
    pub arrow: NatTrans,
    pub conditions: LemmaConditions,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub epis_checked: usize,
    /// How many epis satisfy all three conditions.
    pub satisfied: usize,
    pub failure: Option<LemmaFailure>,
}

/// Every epi between corpus objects, in `(domain, codomain, search)` order.
pub fn corpus_epis(corpus: &CorpusIndex) -> Result<Vec<(usize, usize, NatTrans)>> {
    let n = corpus.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let per_pair: Vec<Vec<NatTrans>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            Ok(HomSearch::new(&corpus.items[i], &corpus.items[j])
                .collect()?
                .into_iter()
                .filter(NatTrans::is_epi)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(pairs
        .into_iter()
        .zip(per_pair)
        .flat_map(|((i, j), fs)| fs.into_iter().map(move |f| (i, j, f)))
        .collect())
}

fn decidable_items(corpus: &CorpusIndex) -> Vec<Presheaf> {
    corpus.items.iter().filter(|x| is_decidable(x)).cloned().collect()
}

/// The three lemma conditions agree on every corpus epi.
pub fn lemma_harness(corpus: &CorpusIndex) -> Result<LemmaReport> {
    let epis = corpus_epis(corpus)?;
    let decidables = decidable_items(corpus);
    let conds: Vec<LemmaConditions> = epis
        .par_iter()
        .map(|(_, _, q)| lemma_conditions(q, &decidables))
        .collect::<Result<_>>()?;
    let failure = epis
        .iter()
        .zip(&conds)
        .find(|(_, c)| !c.agree())
        .map(|((i, j, q), c)| LemmaFailure {
            domain: *i,
            codomain: *j,
            arrow: q.clone(),
            conditions: *c,
        });
    Ok(LemmaReport {
        epis_checked: epis.len(),
        satisfied: conds.iter().filter(|c| c.maps_to_two && c.agree()).count(),
        failure,
    })
}

/// The invariants of `Π`, connectedness and pneumoconnected fibers over a
/// corpus. Invariants that need NS and DQO are skipped when those fail.
pub fn props_harness(corpus: &CorpusIndex) -> Result<Vec<Check>> {
    let base = &corpus.base;
    let items = &corpus.items;
    let n = items.len();
    let structural = check_ns(base)?.verdict.passed() && check_dqo_bounded(corpus)?.verdict.passed();
    let pis: Vec<_> = items.par_iter().map(pi).collect::<Result<Vec<_>>>()?;

    let mut idem = Check::new("Π idempotent, Π(1) ≅ 1, ΠX ≅ 0 iff X ≅ 0");
    let one = terminal(base);
    idem.record(is_isomorphic(&pi(&one)?.object, &one), || "Π(1) ≇ 1".into());
    for (i, (x, p)) in items.iter().zip(&pis).enumerate() {
        let pp = pi(&p.object)?;
        idem.record(is_isomorphic(&pp.object, &p.object), || format!("ΠΠX ≇ ΠX at item {i}"));
        idem.record(p.object.is_empty() == x.is_empty(), || format!("ΠX ≅ 0 mismatch at item {i}"));
    }

    let mut closure = Check::new("decidables closed under subobjects and products");
    let decidable: Vec<bool> = items.par_iter().map(is_decidable).collect();
    for (i, x) in items.iter().enumerate().filter(|(i, _)| decidable[*i]) {
        for s in subobjects(x)? {
            closure.record(is_decidable(&s.to_presheaf().0), || {
                format!("a subobject of decidable item {i} is not decidable")
            });
        }
        for (j, y) in items.iter().enumerate().filter(|(j, _)| decidable[*j] && *j >= i) {
            closure.record(is_decidable(&product(x, y)?.object), || {
                format!("item {i} × item {j} is not decidable")
            });
        }
    }

    let mut separated = Check::new("separated reflection has pneumoconnected fibers");
    let sep: Vec<bool> = items
        .par_iter()
        .map(|x| has_pneumoconnected_fibers(&separated_reflection(x)?.1))
        .collect::<Result<_>>()?;
    for (i, ok) in sep.into_iter().enumerate() {
        separated.record(ok, || format!("M(X) map fails at item {i}"));
    }

    let mut ideal = Check::new("Y^X decidable for decidable Y");
    for i in 0..n {
        for j in (0..n).filter(|&j| decidable[j]) {
            ideal.record(is_decidable(&exponential(&items[i], &items[j])?.object), || {
                format!("Y^X not decidable for X = item {i}, Y = item {j}")
            });
        }
    }

    let mut lemma = Check::new("fiber lemma conditions agree on corpus epis");
    let lr = lemma_harness(corpus)?;
    lemma.tested = lr.epis_checked;
    if let Some(f) = lr.failure {
        lemma.passed = false;
        lemma.witness = Some(format!(
            "epi item {} → item {}: {:?}",
            f.domain, f.codomain, f.conditions
        ));
    }

    let mut out = vec![idem, closure, separated, ideal, lemma];
    if !structural {
        return Ok(out);
    }

    let mut conn = Check::new("connected iff ΠX ≅ 1");
    let connected: Vec<bool> = items.par_iter().map(is_connected).collect::<Result<_>>()?;
    for (i, p) in pis.iter().enumerate() {
        conn.record(connected[i] == is_isomorphic(&p.object, &one), || {
            format!("connectedness and Π disagree at item {i}")
        });
    }

    let mut schanuel = Check::new("connected × connected is connected");
    let mut prod_pi = Check::new("Π(X×Y) ≅ ΠX × ΠY");
    for i in 0..n {
        for j in i..n {
            let cmp = pi_product_comparison(&items[i], &items[j])?;
            prod_pi.record(cmp.is_iso(), || format!("Π(X×Y) mismatch for items {i}, {j}"));
            if connected[i] && connected[j] {
                let xy = product(&items[i], &items[j])?;
                schanuel.record(is_connected(&xy.object)?, || {
                    format!("item {i} × item {j} is not connected")
                });
            }
        }
    }

    let arrows: Vec<NatTrans> = {
        let mut all = Vec::new();
        for x in items {
            for y in items {
                all.extend(HomSearch::new(x, y).collect()?);
            }
        }
        all
    };
    let pneumo: Vec<bool> = arrows
        .par_iter()
        .map(has_pneumoconnected_fibers)
        .collect::<Result<_>>()?;
    let mut fibers = Check::new("pneumoconnected fibers over points are empty or have Π ≅ 1");
    let mut products = Check::new("pneumoconnected fibers closed under ×");
    let mut pullbacks = Check::new("pneumoconnected fibers stable under pullback");
    let good: Vec<&NatTrans> = arrows.iter().zip(&pneumo).filter(|(_, p)| **p).map(|(f, _)| f).collect();
    for (k, f) in good.iter().enumerate() {
        for b in global_elements(f.cod())? {
            let fb = fiber(f, &b)?;
            let trivial = fb.is_empty() || is_isomorphic(&pi(&fb)?.object, &one);
            fibers.record(trivial, || {
                format!("fiber of pneumoconnected arrow {k} over a point is not connected")
            });
        }
        for h in arrows.iter().filter(|h| h.cod() == f.cod()) {
            let pb = pullback(f, h)?;
            pullbacks.record(has_pneumoconnected_fibers(&pb.proj2)?, || {
                format!("pullback of pneumoconnected arrow {k} loses the property")
            });
        }
    }
    for (a, f) in good.iter().enumerate() {
        for g in good.iter().skip(a) {
            let fg = product_arrow(f, g)?;
            products.record(has_pneumoconnected_fibers(&fg)?, || {
                format!("product of pneumoconnected arrows {a} fails")
            });
        }
    }
    out.extend([conn, schanuel, prod_pi, fibers, products, pullbacks]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::builtins::builtin;
    use crate::corpus::{enumerate_presheaves, uniform_bounds};
    use crate::fincat::catalog;

    fn corpus(name: &str, bound: usize) -> CorpusIndex {
        let b = Arc::new(catalog(name).unwrap());
        enumerate_presheaves(&b, &uniform_bounds(&b, bound)).unwrap()
    }

    #[test]
    fn lemma_on_refgraph() {
        let r = lemma_harness(&corpus("refgraph", 2)).unwrap();
        assert!(r.failure.is_none(), "{:?}", r.failure);
        assert!(r.epis_checked > 0 && r.satisfied > 0);
    }

    #[test]
    fn lemma_on_the_unit_of_pi() {
        let b = Arc::new(catalog("refgraph").unwrap());
        let p2 = builtin(&b, "P2").unwrap();
        let q = pi(&p2).unwrap().quotient;
        let c = lemma_conditions(&q, &[builtin(&b, "D2").unwrap(), terminal(&b)]).unwrap();
        assert!(c.maps_to_two && c.pneumoconnected && c.maps_to_decidables);
    }

    #[test]
    fn props_on_refgraph_and_point() {
        for (name, bound) in [("refgraph", 2), ("point", 2)] {
            let checks = props_harness(&corpus(name, bound)).unwrap();
            assert_eq!(checks.len(), 11, "{name}");
            for c in checks {
                assert!(c.passed, "{name}: {} {:?}", c.name, c.witness);
            }
        }
    }

    #[test]
    fn props_skip_structural_checks_without_ns() {
        let checks = props_harness(&corpus("graph", 1)).unwrap();
        assert_eq!(checks.len(), 5);
    }

    #[test]
    fn product_of_arrows() {
        let b = Arc::new(catalog("refgraph").unwrap());
        let d2 = builtin(&b, "D2").unwrap();
        let id = NatTrans::identity(&d2);
        let f = product_arrow(&id, &id).unwrap();
        assert!(f.is_iso());
        assert_eq!(f.dom().sizes(), vec![4, 4]);
    }
}
