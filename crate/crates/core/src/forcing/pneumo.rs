use std::sync::Arc;

use super::{Formula, Query, Signature, SortId, Term, Validity};
use crate::error::{Error, Result};
use crate::presheaf::{power_object, product, NatTrans, PowerObject, Presheaf, Product};
use crate::sublattice::{graph_subobject, Subobject};

/// `P_c(X) = {u ∈ P(X) : u ∪ ¬u = X}` with its inclusion into `P(X)`.
#[derive(Debug, Clone)]
pub struct PcObject {
    pub power: Arc<PowerObject>,
    pub sub: Subobject,
    pub object: Presheaf,
    pub incl: NatTrans,
}

pub fn pc_object(x: &Presheaf) -> Result<PcObject> {
    let power = Arc::new(power_object(x)?);
    pc_object_with(x, power)
}

fn pc_object_with(x: &Presheaf, power: Arc<PowerObject>) -> Result<PcObject> {
    let mut sig = Signature::new();
    let sx = sig.add_sort("X", x)?;
    let sp = sig.add_power_with("PX", sx, power.clone())?;
    let phi = Formula::forall(
        "x",
        sx,
        Formula::or(
            Formula::member(Term::var("x"), Term::var("u")),
            Formula::not(Formula::member(Term::var("x"), Term::var("u"))),
        ),
    );
    let mut q = Query::new(&sig, &[("u", sp)], &phi)?;
    let base = x.base();
    let mut elems = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut keep = Vec::new();
        for u in 0..power.object.size(c) {
            if q.forces(c, &[u])? {
                keep.push(u);
            }
        }
        elems.push(keep);
    }
    let sub = Subobject::from_elements(&power.object, &elems)?;
    let (object, incl) = sub.to_presheaf();
    Ok(PcObject {
        power,
        sub,
        object,
        incl,
    })
}

/// The graph `|f| = {(x, f(x))} ↪ X × Y`.
pub fn graph_of(f: &NatTrans) -> Result<(Product, Subobject)> {
    let prod = product(f.dom(), f.cod())?;
    let g = graph_subobject(f, &prod);
    Ok((prod, g))
}

fn graph_signature(prod: &Product, g: &Subobject) -> Result<(Signature, SortId, SortId)> {
    if g.ambient() != &prod.object {
        return Err(Error::AmbientMismatch);
    }
    let mut sig = Signature::new();
    let sx = sig.add_sort("X", prod.proj1.cod())?;
    let sy = sig.add_sort("Y", prod.proj2.cod())?;
    let sxy = sig.add_product("XY", sx, sy)?;
    sig.add_predicate("G", sxy, g)?;
    Ok((sig, sx, sy))
}

/// Whether `∀x ∃!y ⟨x, y⟩ ∈ G` is universally valid.
pub fn is_graph(g: &Subobject, prod: &Product) -> Result<bool> {
    let (sig, sx, sy) = graph_signature(prod, g)?;
    let phi = Formula::exists_unique(
        "y",
        sy,
        Formula::holds(Term::pair(Term::var("x"), Term::var("y")), "G"),
    );
    Ok(Query::new(&sig, &[("x", sx)], &phi)?
        .universally_valid()?
        .is_valid())
}

/// The arrow whose graph is `G`, when `G` is a graph.
pub fn arrow_of_graph(g: &Subobject, prod: &Product) -> Result<Option<NatTrans>> {
    if !is_graph(g, prod)? {
        return Ok(None);
    }
    let (x, y) = (prod.proj1.cod(), prod.proj2.cod());
    let base = x.base();
    let components = base
        .objects()
        .map(|c| {
            (0..x.size(c))
                .map(|a| {
                    (0..y.size(c))
                        .find(|&b| g.contains(c, prod.pair(c, a, b)))
                        .expect("graph is total")
                })
                .collect()
        })
        .collect();
    NatTrans::new(x.clone(), y.clone(), components).map(Some)
}

/// The fiber formula over free `y: Y` and `w: P_c(X)`:
/// `¬¬((∀x ¬(⟨x,y⟩ ∈ |f| ∧ x ∈ i(w))) ∨ (∀x ¬(⟨x,y⟩ ∈ |f| ∧ ¬ x ∈ i(w))))`.
pub fn pneumo_formula(x: SortId) -> Formula {
    let in_fiber = || Formula::holds(Term::pair(Term::var("x"), Term::var("y")), "graph");
    let in_w = || Formula::member(Term::var("x"), Term::app("i", Term::var("w")));
    let misses = |part: Formula| {
        Formula::forall("x", x, Formula::not(Formula::and(in_fiber(), part)))
    };
    Formula::not(Formula::not(Formula::or(
        misses(in_w()),
        misses(Formula::not(in_w())),
    )))
}

/// Universal validity of the fiber formula for `f`, with the signature used
/// (for describing countermodels).
pub fn pneumo_validity(f: &NatTrans) -> Result<(Validity, Signature)> {
    let x = f.dom();
    let pc = pc_object(x)?;
    let (prod, g) = graph_of(f)?;
    let mut sig = Signature::new();
    let sx = sig.add_sort("X", x)?;
    let sy = sig.add_sort("Y", f.cod())?;
    let sxy = sig.add_product("XY", sx, sy)?;
    debug_assert_eq!(sig.sort_object(sxy), &prod.object);
    let sp = sig.add_power_with("PX", sx, pc.power.clone())?;
    let sc = sig.add_sort("PcX", &pc.object)?;
    sig.add_arrow("i", sc, sp, &pc.incl)?;
    sig.add_predicate("graph", sxy, &g)?;
    let phi = pneumo_formula(sx);
    let validity = Query::new(&sig, &[("y", sy), ("w", sc)], &phi)?.universally_valid()?;
    Ok((validity, sig))
}

pub fn has_pneumoconnected_fibers(f: &NatTrans) -> Result<bool> {
    Ok(pneumo_validity(f)?.0.is_valid())
}
