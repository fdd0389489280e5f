use std::collections::HashMap;

use super::{nat_transformations, product, yoneda, NatTrans, Presheaf, Product};
use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::limits::check_cap;

/// `Y^X` with `(Y^X)(c) = Hom(y(c) × X, Y)`.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub object: Presheaf,
    /// `ev: Y^X × X → Y`.
    pub eval: NatTrans,
    pub eval_domain: Product,
    stages: Vec<Vec<NatTrans>>,
    index: Vec<HashMap<Vec<Vec<usize>>, usize>>,
    reps: Vec<Product>,
}

impl Exponential {
    /// The arrow `y(c) × X → Y` behind element `u` of `(Y^X)(c)`.
    pub fn arrow(&self, c: ObjId, u: usize) -> &NatTrans {
        &self.stages[c][u]
    }

    /// `λg: Z → Y^X` for `g: Z × X → Y`, where `zx` is the product `Z × X`.
    pub fn transpose(&self, g: &NatTrans, zx: &Product) -> Result<NatTrans> {
        if g.dom() != &zx.object || g.cod() != self.eval.cod() {
            return Err(Error::ShapeMismatch("transpose needs g: Z × X → Y".into()));
        }
        let z = zx.proj1.cod();
        let base = z.base();
        let mut components = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let rep = &self.reps[c];
            let mut comp = Vec::with_capacity(z.size(c));
            for w in 0..z.size(c) {
                let arrow: Vec<Vec<usize>> = base
                    .objects()
                    .map(|d| {
                        let hs = base.hom(d, c);
                        (0..rep.object.size(d))
                            .map(|i| {
                                let h = hs[rep.proj1.apply(d, i)];
                                let x = rep.proj2.apply(d, i);
                                g.apply(d, zx.pair(d, z.act(h, w), x))
                            })
                            .collect()
                    })
                    .collect();
                comp.push(*self.index[c].get(&arrow).ok_or_else(|| {
                    Error::NotNatural("transposed family is not natural".into())
                })?);
            }
            components.push(comp);
        }
        Ok(NatTrans::new_unchecked(
            z.clone(),
            self.object.clone(),
            components,
        ))
    }
}

pub fn exponential(x: &Presheaf, y: &Presheaf) -> Result<Exponential> {
    x.ensure_same_base(y)?;
    let base = x.base().clone();
    let mut reps = Vec::with_capacity(base.num_objects());
    let mut stages = Vec::with_capacity(base.num_objects());
    let mut index = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let rep = product(&yoneda(&base, c)?, x)?;
        let arrows = nat_transformations(&rep.object, y)?;
        check_cap("exponential stage", arrows.len())?;
        index.push(
            arrows
                .iter()
                .enumerate()
                .map(|(i, a)| (a.components().to_vec(), i))
                .collect::<HashMap<_, _>>(),
        );
        stages.push(arrows);
        reps.push(rep);
    }
    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let (b, c) = (base.dom(f), base.cod(f));
        let homs_c = base.objects().map(|d| base.hom(d, c)).collect::<Vec<_>>();
        let table = stages[c]
            .iter()
            .map(|phi| {
                let restricted: Vec<Vec<usize>> = base
                    .objects()
                    .map(|d| {
                        let hb = base.hom(d, b);
                        (0..reps[b].object.size(d))
                            .map(|i| {
                                let h = hb[reps[b].proj1.apply(d, i)];
                                let fh = base.compose(f, h).expect("composable");
                                let k = homs_c[d].iter().position(|&g| g == fh).expect("hom");
                                let x = reps[b].proj2.apply(d, i);
                                phi.apply(d, reps[c].pair(d, k, x))
                            })
                            .collect()
                    })
                    .collect();
                index[b][&restricted]
            })
            .collect();
        actions.push(table);
    }
    let labels = base
        .objects()
        .map(|c| (0..stages[c].len()).map(|i| format!("e{i}")).collect())
        .collect();
    let object = Presheaf::from_tables_unchecked(base.clone(), labels, actions);
    let eval_domain = product(&object, x)?;
    let eval = base
        .objects()
        .map(|c| {
            let id_pos = base
                .hom(c, c)
                .iter()
                .position(|&g| g == base.identity(c))
                .expect("identity");
            (0..eval_domain.object.size(c))
                .map(|i| {
                    let u = eval_domain.proj1.apply(c, i);
                    let e = eval_domain.proj2.apply(c, i);
                    stages[c][u].apply(c, reps[c].pair(c, id_pos, e))
                })
                .collect()
        })
        .collect();
    Ok(Exponential {
        eval: NatTrans::new_unchecked(eval_domain.object.clone(), y.clone(), eval),
        eval_domain,
        object,
        stages,
        index,
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::fincat::catalog;
    use crate::presheaf::{count_homs, global_elements, terminal};
    use std::sync::Arc;

    #[test]
    fn sets_exponential() {
        let b = Arc::new(catalog("point").unwrap());
        let x = builtin(&b, "set(2)").unwrap();
        let y = builtin(&b, "set(3)").unwrap();
        assert_eq!(exponential(&x, &y).unwrap().object.sizes(), vec![9]);
    }

    #[test]
    fn global_elements_are_homs() {
        let b = Arc::new(catalog("refgraph").unwrap());
        let x = builtin(&b, "P2").unwrap();
        let y = builtin(&b, "2").unwrap();
        let e = exponential(&x, &y).unwrap();
        let globals = global_elements(&e.object).unwrap().len();
        assert_eq!(globals, count_homs(&x, &y).unwrap());
    }

    #[test]
    fn transpose_then_eval() {
        let b = Arc::new(catalog("sierpinski").unwrap());
        let x = builtin(&b, "y(1)").unwrap();
        let y = builtin(&b, "2").unwrap();
        let e = exponential(&x, &y).unwrap();
        let z = terminal(&b);
        let zx = product(&z, &x).unwrap();
        for g in nat_transformations(&zx.object, &y).unwrap() {
            let lg = e.transpose(&g, &zx).unwrap();
            let lx = e.eval_domain.tuple(&lg.after(&zx.proj1).unwrap(), &zx.proj2).unwrap();
            assert!(e.eval.after(&lx).unwrap().same_arrow(&g));
        }
    }
}
