//! Representables, the subobject classifier and power objects.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{product, terminal, NatTrans, Presheaf};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, ObjId};
use crate::limits::check_cap;
use crate::sublattice::{subobjects, Subobject};

/// `y(c) = Hom(-, c)` with elements listed in morphism-id order.
pub fn yoneda(base: &Arc<FinCategory>, c: ObjId) -> Result<Presheaf> {
    if c >= base.num_objects() {
        return Err(Error::UnknownObject(c.to_string()));
    }
    let homs: Vec<Vec<usize>> = base.objects().map(|b| base.hom(b, c)).collect();
    let pos: HashMap<usize, usize> = homs
        .iter()
        .flat_map(|h| h.iter().enumerate().map(|(i, &g)| (g, i)))
        .collect();
    let labels = homs
        .iter()
        .map(|h| h.iter().map(|&g| base.morphism(g).name.clone()).collect())
        .collect();
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let b = base.cod(f);
            homs[b]
                .iter()
                .map(|&g| pos[&base.compose(g, f).expect("composable")])
                .collect()
        })
        .collect();
    Ok(Presheaf::from_tables_unchecked(base.clone(), labels, actions))
}

/// The subobject classifier: `Ω(c)` is the set of sieves on `c`.
#[derive(Debug, Clone)]
pub struct Omega {
    pub object: Presheaf,
    /// `true: 1 → Ω`, picking the maximal sieve.
    pub truth: NatTrans,
    /// Sieves at each stage, as bit masks over `base.incoming(c)`.
    sieves: Vec<Vec<u64>>,
}

impl Omega {
    /// Index of the sieve containing exactly the morphisms accepted by `member`.
    fn index_of(&self, base: &FinCategory, c: ObjId, member: impl Fn(usize) -> bool) -> usize {
        let mask = base
            .incoming(c)
            .iter()
            .enumerate()
            .filter(|&(_, &g)| member(g))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        self.sieves[c]
            .iter()
            .position(|&s| s == mask)
            .expect("sieve enumeration is complete")
    }
}

pub fn omega(base: &Arc<FinCategory>) -> Result<Omega> {
    let mut sieves = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let into = base.incoming(c);
        if into.len() > 20 {
            return Err(Error::SizeCap {
                what: "sieve candidates".into(),
                size: 1 << into.len().min(63),
                cap: crate::limits::size_cap(),
            });
        }
        let pos: HashMap<usize, usize> = into.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let closed = |mask: u64| {
            into.iter().enumerate().all(|(i, &g)| {
                mask >> i & 1 == 0
                    || base
                        .incoming(base.dom(g))
                        .iter()
                        .all(|&h| mask >> pos[&base.compose(g, h).expect("composable")] & 1 == 1)
            })
        };
        let found: Vec<u64> = (0..1u64 << into.len()).filter(|&m| closed(m)).collect();
        check_cap("Ω stage", found.len())?;
        sieves.push(found);
    }
    let labels = base
        .objects()
        .map(|c| {
            sieves[c]
                .iter()
                .map(|&m| {
                    let names: Vec<&str> = base
                        .incoming(c)
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| m >> i & 1 == 1)
                        .map(|(_, &g)| base.morphism(g).name.as_str())
                        .collect();
                    format!("{{{}}}", names.join(","))
                })
                .collect()
        })
        .collect();
    let partial = Omega {
        object: terminal(base),
        truth: NatTrans::identity(&terminal(base)),
        sieves,
    };
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let (b, c) = (base.dom(f), base.cod(f));
            let pos: HashMap<usize, usize> =
                base.incoming(c).iter().enumerate().map(|(i, &g)| (g, i)).collect();
            partial.sieves[c]
                .iter()
                .map(|&m| {
                    partial.index_of(base, b, |h| {
                        m >> pos[&base.compose(f, h).expect("composable")] & 1 == 1
                    })
                })
                .collect()
        })
        .collect();
    let object = Presheaf::from_tables_unchecked(base.clone(), labels, actions);
    let top = base
        .objects()
        .map(|c| vec![partial.index_of(base, c, |_| true)])
        .collect();
    let truth = NatTrans::new_unchecked(terminal(base), object.clone(), top);
    Ok(Omega {
        object,
        truth,
        sieves: partial.sieves,
    })
}

/// The characteristic map `X → Ω` of a subobject:
/// `χ(x) = {g: d → c | X(g)(x) ∈ S(d)}`.
pub fn classify(omega: &Omega, s: &Subobject) -> Result<NatTrans> {
    let x = s.ambient();
    if !x.same_base(&omega.object) {
        return Err(Error::BaseMismatch);
    }
    let base = x.base();
    let components = base
        .objects()
        .map(|c| {
            (0..x.size(c))
                .map(|e| omega.index_of(base, c, |g| s.contains(base.dom(g), x.act(g, e))))
                .collect()
        })
        .collect();
    Ok(NatTrans::new_unchecked(
        x.clone(),
        omega.object.clone(),
        components,
    ))
}

/// `P(X)(c)` = subfunctors of `X × y(c)`, with restriction by pullback along
/// `id × y(f)` and membership `x ∈ u ⇔ (x, id_c) ∈ u(c)`.
#[derive(Debug, Clone)]
pub struct PowerObject {
    pub object: Presheaf,
    pub elem: Presheaf,
    members: Vec<Vec<Subobject>>,
    membership: Vec<Vec<FixedBitSet>>,
}

impl PowerObject {
    /// The relation `u ⊆ X × y(c)` behind element `u` of `P(X)(c)`.
    pub fn relation(&self, c: ObjId, u: usize) -> &Subobject {
        &self.members[c][u]
    }

    /// Elements `x ∈ X(c)` with `x ∈ u` at stage `c`.
    pub fn extension(&self, c: ObjId, u: usize) -> &FixedBitSet {
        &self.membership[c][u]
    }

    #[inline]
    pub fn contains(&self, c: ObjId, x: usize, u: usize) -> bool {
        self.membership[c][u].contains(x)
    }

    /// Global elements of `P(X)` correspond to subobjects of `X`; this returns
    /// the index at stage `c` of the restriction of the global element named
    /// by `s`.
    pub fn name_of(&self, s: &Subobject, c: ObjId) -> Option<usize> {
        let base = self.elem.base();
        // u(d) = {(x, g: d → c) | X(g)(x)... } is {(x, g) | x ∈ S(d)}
        (0..self.object.size(c)).find(|&u| {
            let rel = &self.members[c][u];
            base.objects().all(|d| {
                let homs = base.hom(d, c).len();
                (0..self.elem.size(d)).all(|x| {
                    (0..homs).all(|g| rel.contains(d, x * homs + g) == s.contains(d, x))
                })
            })
        })
    }
}

pub fn power_object(x: &Presheaf) -> Result<PowerObject> {
    let base = x.base().clone();
    let reps: Vec<Presheaf> = base
        .objects()
        .map(|c| yoneda(&base, c))
        .collect::<Result<_>>()?;
    let mut members = Vec::with_capacity(base.num_objects());
    let mut index: Vec<HashMap<Vec<FixedBitSet>, usize>> = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let prod = product(x, &reps[c])?;
        for d in base.objects() {
            check_cap("X × y(c)", prod.object.size(d))?;
        }
        let subs = subobjects(&prod.object)?;
        check_cap("power object stage", subs.len())?;
        index.push(
            subs.iter()
                .enumerate()
                .map(|(i, s)| (s.parts().to_vec(), i))
                .collect(),
        );
        members.push(subs);
    }
    let hom_pos: Vec<Vec<HashMap<usize, usize>>> = base
        .objects()
        .map(|c| {
            base.objects()
                .map(|d| base.hom(d, c).into_iter().enumerate().map(|(i, g)| (g, i)).collect())
                .collect()
        })
        .collect();

    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let (b, c) = (base.dom(f), base.cod(f));
        let table = members[c]
            .iter()
            .map(|u| {
                let parts: Vec<FixedBitSet> = base
                    .objects()
                    .map(|d| {
                        let hb = base.hom(d, b);
                        let nc = hom_pos[c][d].len();
                        let mut s = FixedBitSet::with_capacity(x.size(d) * hb.len());
                        for e in 0..x.size(d) {
                            for (gi, &g) in hb.iter().enumerate() {
                                let fg = base.compose(f, g).expect("composable");
                                if u.contains(d, e * nc + hom_pos[c][d][&fg]) {
                                    s.insert(e * hb.len() + gi);
                                }
                            }
                        }
                        s
                    })
                    .collect();
                index[b][&parts]
            })
            .collect();
        actions.push(table);
    }
    let membership = base
        .objects()
        .map(|c| {
            let homs = hom_pos[c][c].len();
            let id_pos = hom_pos[c][c][&base.identity(c)];
            members[c]
                .iter()
                .map(|u| {
                    let mut s = FixedBitSet::with_capacity(x.size(c));
                    for e in 0..x.size(c) {
                        s.set(e, u.contains(c, e * homs + id_pos));
                    }
                    s
                })
                .collect()
        })
        .collect();
    let labels = base
        .objects()
        .map(|c| (0..members[c].len()).map(|i| format!("u{i}")).collect())
        .collect();
    Ok(PowerObject {
        object: Presheaf::from_tables_unchecked(base, labels, actions),
        elem: x.clone(),
        members,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::fincat::catalog;
    use crate::presheaf::{nat_transformations, pullback};

    fn base(name: &str) -> Arc<FinCategory> {
        Arc::new(catalog(name).unwrap())
    }

    #[test]
    fn yoneda_on_point_is_terminal() {
        let b = base("point");
        assert_eq!(yoneda(&b, 0).unwrap().sizes(), vec![1]);
    }

    #[test]
    fn refgraph_representables() {
        let b = base("refgraph");
        let yv = yoneda(&b, 0).unwrap();
        let ye = yoneda(&b, 1).unwrap();
        assert_eq!(yv.labels(0), ["id_V"]);
        assert_eq!(yv.labels(1), ["sigma"]);
        assert_eq!(ye.labels(0), ["s", "t"]);
        assert_eq!(ye.labels(1), ["id_E", "s.sigma", "t.sigma"]);
    }

    #[test]
    fn unknown_object() {
        assert!(matches!(
            yoneda(&base("point"), 3),
            Err(Error::UnknownObject(_))
        ));
    }

    #[test]
    fn omega_sizes() {
        assert_eq!(omega(&base("point")).unwrap().object.sizes(), vec![2]);
        assert_eq!(omega(&base("sierpinski")).unwrap().object.sizes(), vec![2, 3]);
        assert_eq!(omega(&base("refgraph")).unwrap().object.sizes(), vec![2, 5]);
    }

    #[test]
    fn classify_recovers_subobject() {
        let b = base("refgraph");
        let om = omega(&b).unwrap();
        for name in ["P2", "L", "D2"] {
            let x = builtin(&b, name).unwrap();
            let subs = subobjects(&x).unwrap();
            let chis: Vec<_> = subs.iter().map(|s| classify(&om, s).unwrap()).collect();
            for (s, chi) in subs.iter().zip(&chis) {
                let pb = pullback(chi, &om.truth).unwrap();
                let back = Subobject::image_of(&pb.proj1);
                assert_eq!(&back, s);
            }
            // classification is a bijection onto Hom(X, Ω)
            let homs = nat_transformations(&x, &om.object).unwrap();
            assert_eq!(homs.len(), subs.len(), "{name}");
        }
    }

    #[test]
    fn power_object_sizes() {
        let p = base("point");
        let x = builtin(&p, "set(2)").unwrap();
        assert_eq!(power_object(&x).unwrap().object.sizes(), vec![4]);

        let r = base("refgraph");
        let zero = builtin(&r, "0").unwrap();
        assert_eq!(power_object(&zero).unwrap().object.sizes(), vec![1, 1]);
        let d1 = builtin(&r, "D1").unwrap();
        assert_eq!(power_object(&d1).unwrap().object.size(0), 2);
    }

    #[test]
    fn power_object_size_cap() {
        let p = base("point");
        let x = builtin(&p, "set(13)").unwrap();
        assert!(matches!(power_object(&x), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn global_points_of_power_name_subobjects() {
        let r = base("refgraph");
        let x = builtin(&r, "P2").unwrap();
        let pw = power_object(&x).unwrap();
        let globals = crate::presheaf::global_elements(&pw.object).unwrap();
        let subs = subobjects(&x).unwrap();
        assert_eq!(globals.len(), subs.len());
        for s in &subs {
            let named: Vec<usize> = r.objects().map(|c| pw.name_of(s, c).unwrap()).collect();
            assert!(globals
                .iter()
                .any(|g| r.objects().all(|c| g.apply(c, 0) == named[c])));
        }
    }
}
