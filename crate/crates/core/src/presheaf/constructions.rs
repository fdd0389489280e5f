//! Finite limits, colimits and images, all computed pointwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{NatTrans, Presheaf};
use crate::error::{Error, Result};
use crate::fincat::FinCategory;

/// The singleton presheaf.
pub fn terminal(base: &Arc<FinCategory>) -> Presheaf {
    let labels = base.objects().map(|_| vec!["*".to_string()]).collect();
    let actions = (0..base.num_morphisms()).map(|_| vec![0]).collect();
    Presheaf::from_tables_unchecked(base.clone(), labels, actions)
}

/// The empty presheaf.
pub fn initial(base: &Arc<FinCategory>) -> Presheaf {
    let labels = base.objects().map(|_| Vec::new()).collect();
    let actions = (0..base.num_morphisms()).map(|_| Vec::new()).collect();
    Presheaf::from_tables_unchecked(base.clone(), labels, actions)
}

/// `2 = 1 + 1`; index 0 is the first injection, index 1 the second.
pub fn two(base: &Arc<FinCategory>) -> Presheaf {
    let one = terminal(base);
    coproduct(&one, &one).expect("same base").object
}

#[derive(Debug, Clone)]
pub struct Product {
    pub object: Presheaf,
    pub proj1: NatTrans,
    pub proj2: NatTrans,
}

impl Product {
    /// Index of `(x, y)` at stage `c`.
    #[inline]
    pub fn pair(&self, c: usize, x: usize, y: usize) -> usize {
        x * self.proj2.cod().size(c) + y
    }

    /// `⟨f, g⟩: Z → X × Y`.
    pub fn tuple(&self, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
        if f.dom() != g.dom() {
            return Err(Error::ShapeMismatch("tuple legs differ in domain".into()));
        }
        let z = f.dom();
        let components = z
            .base()
            .objects()
            .map(|c| {
                (0..z.size(c))
                    .map(|w| self.pair(c, f.apply(c, w), g.apply(c, w)))
                    .collect()
            })
            .collect();
        Ok(NatTrans::new_unchecked(
            z.clone(),
            self.object.clone(),
            components,
        ))
    }
}

/// Pointwise product with element `(x, y)` at index `x·|Y(c)| + y`.
pub fn product(x: &Presheaf, y: &Presheaf) -> Result<Product> {
    x.ensure_same_base(y)?;
    let base = x.base().clone();
    let labels = base
        .objects()
        .map(|c| {
            let mut ls = Vec::with_capacity(x.size(c) * y.size(c));
            for a in x.labels(c) {
                for b in y.labels(c) {
                    ls.push(format!("({a},{b})"));
                }
            }
            ls
        })
        .collect();
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let (b, c) = (base.dom(f), base.cod(f));
            let (nyb, nyc) = (y.size(b), y.size(c));
            (0..x.size(c) * nyc)
                .map(|i| x.act(f, i / nyc) * nyb + y.act(f, i % nyc))
                .collect()
        })
        .collect();
    let object = Presheaf::from_tables_unchecked(base.clone(), labels, actions);
    let proj = |first: bool| {
        base.objects()
            .map(|c| {
                let ny = y.size(c);
                (0..x.size(c) * ny)
                    .map(|i| if first { i / ny } else { i % ny })
                    .collect()
            })
            .collect()
    };
    Ok(Product {
        proj1: NatTrans::new_unchecked(object.clone(), x.clone(), proj(true)),
        proj2: NatTrans::new_unchecked(object.clone(), y.clone(), proj(false)),
        object,
    })
}

#[derive(Debug, Clone)]
pub struct Coproduct {
    pub object: Presheaf,
    pub inj1: NatTrans,
    pub inj2: NatTrans,
}

/// Pointwise disjoint union, `X(c)` first.
pub fn coproduct(x: &Presheaf, y: &Presheaf) -> Result<Coproduct> {
    x.ensure_same_base(y)?;
    let base = x.base().clone();
    let labels = base
        .objects()
        .map(|c| {
            x.labels(c)
                .iter()
                .map(|l| format!("inl({l})"))
                .chain(y.labels(c).iter().map(|l| format!("inr({l})")))
                .collect()
        })
        .collect();
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let b = base.dom(f);
            x.action(f)
                .iter()
                .copied()
                .chain(y.action(f).iter().map(|&v| v + x.size(b)))
                .collect()
        })
        .collect();
    let object = Presheaf::from_tables_unchecked(base.clone(), labels, actions);
    let inj1 = base.objects().map(|c| (0..x.size(c)).collect()).collect();
    let inj2 = base
        .objects()
        .map(|c| (0..y.size(c)).map(|v| v + x.size(c)).collect())
        .collect();
    Ok(Coproduct {
        inj1: NatTrans::new_unchecked(x.clone(), object.clone(), inj1),
        inj2: NatTrans::new_unchecked(y.clone(), object.clone(), inj2),
        object,
    })
}

/// The sub-presheaf on the kept elements, with its inclusion. The caller
/// guarantees that `keep` is closed under restriction.
pub(crate) fn restrict_to(x: &Presheaf, keep: &[FixedBitSet]) -> (Presheaf, NatTrans) {
    let base = x.base().clone();
    let kept: Vec<Vec<usize>> = base.objects().map(|c| keep[c].ones().collect()).collect();
    let mut new_index: Vec<Vec<usize>> = base.objects().map(|c| vec![usize::MAX; x.size(c)]).collect();
    for c in base.objects() {
        for (i, &e) in kept[c].iter().enumerate() {
            new_index[c][e] = i;
        }
    }
    let labels = base
        .objects()
        .map(|c| kept[c].iter().map(|&e| x.label(c, e).to_string()).collect())
        .collect();
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let (b, c) = (base.dom(f), base.cod(f));
            kept[c].iter().map(|&e| new_index[b][x.act(f, e)]).collect()
        })
        .collect();
    let object = Presheaf::from_tables_unchecked(base, labels, actions);
    let incl = NatTrans::new_unchecked(object.clone(), x.clone(), kept);
    (object, incl)
}

/// `{x : f(x) = g(x)}` with its inclusion.
pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<(Presheaf, NatTrans)> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::ShapeMismatch("equalizer needs a parallel pair".into()));
    }
    let x = f.dom();
    let keep: Vec<FixedBitSet> = x
        .base()
        .objects()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(x.size(c));
            for e in 0..x.size(c) {
                s.set(e, f.apply(c, e) == g.apply(c, e));
            }
            s
        })
        .collect();
    Ok(restrict_to(x, &keep))
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: Presheaf,
    pub proj1: NatTrans,
    pub proj2: NatTrans,
}

/// Pullback of the cospan `X → Z ← Y`, as a sub-presheaf of `X × Y`.
pub fn pullback(f: &NatTrans, g: &NatTrans) -> Result<Pullback> {
    if f.cod() != g.cod() {
        return Err(Error::ShapeMismatch("pullback needs a cospan".into()));
    }
    let prod = product(f.dom(), g.dom())?;
    let p = &prod.object;
    let keep: Vec<FixedBitSet> = p
        .base()
        .objects()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(p.size(c));
            for e in 0..p.size(c) {
                let (a, b) = (prod.proj1.apply(c, e), prod.proj2.apply(c, e));
                s.set(e, f.apply(c, a) == g.apply(c, b));
            }
            s
        })
        .collect();
    let (object, incl) = restrict_to(p, &keep);
    Ok(Pullback {
        proj1: prod.proj1.after(&incl)?,
        proj2: prod.proj2.after(&incl)?,
        object,
    })
}

/// Quotient of `X` by a pointwise partition. `class[c][x]` names the block of
/// `x`; blocks are renumbered by least member, so the result is canonical.
/// The partition must be compatible with restriction.
pub fn quotient_by_classes(x: &Presheaf, class: &[Vec<usize>]) -> Result<(Presheaf, NatTrans)> {
    let base = x.base().clone();
    let mut comps = Vec::with_capacity(base.num_objects());
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut renumber = BTreeMap::new();
        let mut rep = Vec::new();
        let comp: Vec<usize> = (0..x.size(c))
            .map(|e| {
                *renumber.entry(class[c][e]).or_insert_with(|| {
                    rep.push(e);
                    rep.len() - 1
                })
            })
            .collect();
        comps.push(comp);
        reps.push(rep);
    }
    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let (b, c) = (base.dom(f), base.cod(f));
        let table: Vec<usize> = reps[c].iter().map(|&e| comps[b][x.act(f, e)]).collect();
        for e in 0..x.size(c) {
            if table[comps[c][e]] != comps[b][x.act(f, e)] {
                return Err(Error::ShapeMismatch(format!(
                    "partition is not compatible with `{}`",
                    base.morphism(f).name
                )));
            }
        }
        actions.push(table);
    }
    let labels = base
        .objects()
        .map(|c| reps[c].iter().map(|&e| format!("[{}]", x.label(c, e))).collect())
        .collect();
    let q = Presheaf::from_tables_unchecked(base, labels, actions);
    let proj = NatTrans::new_unchecked(x.clone(), q.clone(), comps);
    Ok((q, proj))
}

/// Coequalizer of a parallel pair, computed as a pointwise set quotient.
pub fn coequalizer(f: &NatTrans, g: &NatTrans) -> Result<(Presheaf, NatTrans)> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::ShapeMismatch("coequalizer needs a parallel pair".into()));
    }
    let y = f.cod();
    let class: Vec<Vec<usize>> = y
        .base()
        .objects()
        .map(|c| {
            let mut parent: Vec<usize> = (0..y.size(c)).collect();
            fn find(p: &mut [usize], mut v: usize) -> usize {
                while p[v] != v {
                    p[v] = p[p[v]];
                    v = p[v];
                }
                v
            }
            for e in 0..f.dom().size(c) {
                let (a, b) = (find(&mut parent, f.apply(c, e)), find(&mut parent, g.apply(c, e)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
            (0..y.size(c)).map(|v| find(&mut parent, v)).collect()
        })
        .collect();
    quotient_by_classes(y, &class)
}

#[derive(Debug, Clone)]
pub struct Image {
    pub object: Presheaf,
    pub epi: NatTrans,
    pub mono: NatTrans,
}

/// `f = mono ∘ epi` through the pointwise set image.
pub fn image_factorization(f: &NatTrans) -> Image {
    let y = f.cod();
    let keep: Vec<FixedBitSet> = y
        .base()
        .objects()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(y.size(c));
            for &v in f.component(c) {
                s.insert(v);
            }
            s
        })
        .collect();
    let (object, mono) = restrict_to(y, &keep);
    let epi = f
        .dom()
        .base()
        .objects()
        .map(|c| {
            let pos: Vec<usize> = {
                let mut pos = vec![usize::MAX; y.size(c)];
                for (i, &v) in mono.component(c).iter().enumerate() {
                    pos[v] = i;
                }
                pos
            };
            f.component(c).iter().map(|&v| pos[v]).collect()
        })
        .collect();
    Image {
        epi: NatTrans::new_unchecked(f.dom().clone(), object.clone(), epi),
        mono,
        object,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::catalog;
    use crate::presheaf::tests::{p2_raw, refgraph};
    use crate::presheaf::{is_isomorphic, nat_transformations, validate_presheaf, RawPresheaf};

    fn point() -> Arc<FinCategory> {
        Arc::new(catalog("point").unwrap())
    }

    fn set(base: &Arc<FinCategory>, n: usize) -> Presheaf {
        let raw = RawPresheaf {
            sets: vec![("*".into(), (0..n).map(|i| i.to_string()).collect())],
            actions: vec![],
        };
        validate_presheaf(base, &raw).unwrap()
    }

    #[test]
    fn point_product_size() {
        let b = point();
        let p = product(&set(&b, 2), &set(&b, 3)).unwrap();
        assert_eq!(p.object.sizes(), vec![6]);
    }

    #[test]
    fn two_on_refgraph() {
        let b = refgraph();
        let t = two(&b);
        assert_eq!(t.sizes(), vec![2, 2]);
        assert!(t.is_discrete());
    }

    #[test]
    fn unit_law() {
        let b = refgraph();
        let p2 = validate_presheaf(&b, &p2_raw()).unwrap();
        let p = product(&p2, &terminal(&b)).unwrap();
        assert!(is_isomorphic(&p.object, &p2));
        assert!(p.proj1.is_iso());
    }

    #[test]
    fn pullback_of_identities() {
        let b = refgraph();
        let p2 = validate_presheaf(&b, &p2_raw()).unwrap();
        let id = NatTrans::identity(&p2);
        let pb = pullback(&id, &id).unwrap();
        assert!(is_isomorphic(&pb.object, &p2));
    }

    #[test]
    fn fiber_of_bang_is_everything() {
        let b = refgraph();
        let p2 = validate_presheaf(&b, &p2_raw()).unwrap();
        let one = terminal(&b);
        let bang = nat_transformations(&p2, &one).unwrap().remove(0);
        let pt = NatTrans::identity(&one);
        let pb = pullback(&bang, &pt).unwrap();
        assert!(is_isomorphic(&pb.object, &p2));
    }

    #[test]
    fn coequalizer_of_injections() {
        let b = refgraph();
        let one = terminal(&b);
        let c = coproduct(&one, &one).unwrap();
        let (q, e) = coequalizer(&c.inj1, &c.inj2).unwrap();
        assert!(is_isomorphic(&q, &one));
        assert!(e.is_epi());
    }

    #[test]
    fn image_of_constant_map() {
        let b = refgraph();
        let p2 = validate_presheaf(&b, &p2_raw()).unwrap();
        let t = two(&b);
        let maps = nat_transformations(&p2, &t).unwrap();
        assert_eq!(maps.len(), 2);
        for f in &maps {
            let im = image_factorization(f);
            assert!(is_isomorphic(&im.object, &terminal(&b)));
            assert!(im.mono.after(&im.epi).unwrap().same_arrow(f));
        }
    }

    #[test]
    fn image_of_epi_and_mono() {
        let b = refgraph();
        let p2 = validate_presheaf(&b, &p2_raw()).unwrap();
        let id = NatTrans::identity(&p2);
        let im = image_factorization(&id);
        assert!(im.mono.is_iso() && im.epi.is_iso());
    }

    #[test]
    fn base_mismatch() {
        let a = terminal(&refgraph());
        let b = terminal(&point());
        assert!(matches!(product(&a, &b), Err(Error::BaseMismatch)));
    }
}
