//! Objects and arrows of `Set^(C^op)` for a finite base `C`.
//!
//! A [`Presheaf`] keeps one finite set per base object, as a list of element
//! labels, and one action table per morphism: for `f: b → c` the table maps
//! indices of `X(c)` to indices of `X(b)`. Constructed presheaves (products,
//! quotients, power objects) use canonical labels and a deterministic element
//! order so repeated runs produce identical data.

mod classifier;
mod exponential;
mod homs;
mod constructions;

pub use classifier::{classify, omega, power_object, yoneda, Omega, PowerObject};
pub use exponential::{exponential, Exponential};
pub use homs::{
    count_homs, find_isomorphism, for_each_hom, global_elements, is_isomorphic,
    factor_through_epi, factor_through_mono, nat_transformations, yoneda_arrow, HomSearch,
};
pub use constructions::{
    coequalizer, coproduct, equalizer, image_factorization, initial, product, pullback,
    quotient_by_classes, terminal, two, Coproduct, Image, Product, Pullback,
};
pub(crate) use constructions::restrict_to;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};

/// A generalized element: a point of `X(stage)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub stage: ObjId,
    pub point: usize,
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Data {
    base: Arc<FinCategory>,
    labels: Vec<Vec<String>>,
    actions: Vec<Vec<usize>>,
}

/// A presheaf of finite sets. Cloning is cheap.
#[derive(Clone)]
pub struct Presheaf(Arc<Data>);

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Presheaf {}

impl std::hash::Hash for Presheaf {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.labels.hash(state);
        self.0.actions.hash(state);
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.base();
        let mut m = f.debug_map();
        for c in base.objects() {
            m.entry(&base.object_name(c), &self.labels(c));
        }
        m.finish()
    }
}

/// Unvalidated presheaf description keyed by names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawPresheaf {
    /// `(object, element labels)`
    pub sets: Vec<(String, Vec<String>)>,
    /// `(morphism f: b → c, pairs x ↦ X(f)(x) with x ∈ X(c))`
    pub actions: Vec<(String, Vec<(String, String)>)>,
}

impl Presheaf {
    /// Build from index tables, validating totality and functoriality.
    pub fn from_tables(
        base: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = Presheaf(Arc::new(Data {
            base,
            labels,
            actions,
        }));
        p.validate()?;
        Ok(p)
    }

    /// Build from the actions of a generating set of morphisms; the remaining
    /// actions are derived by composition and the result is validated.
    pub fn from_generators(
        base: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        generators: &[(MorId, Vec<usize>)],
    ) -> Result<Self> {
        if labels.len() != base.num_objects() {
            return Err(Error::ShapeMismatch("one element list per object".into()));
        }
        let mut actions: Vec<Option<Vec<usize>>> = vec![None; base.num_morphisms()];
        for c in base.objects() {
            actions[base.identity(c)] = Some((0..labels[c].len()).collect());
        }
        for (f, table) in generators {
            actions[*f] = Some(table.clone());
        }
        loop {
            let mut progress = false;
            for f in 0..base.num_morphisms() {
                for &g in base.outgoing(base.cod(f)) {
                    let gf = base.compose(g, f).expect("composable");
                    if actions[gf].is_some() {
                        continue;
                    }
                    if let (Some(xf), Some(xg)) = (&actions[f], &actions[g]) {
                        if xg.iter().any(|&y| y >= xf.len()) {
                            return Err(Error::MissingAction(base.morphism(f).name.clone()));
                        }
                        actions[gf] = Some(xg.iter().map(|&y| xf[y]).collect());
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        let actions = actions
            .into_iter()
            .enumerate()
            .map(|(f, a)| a.ok_or_else(|| Error::MissingAction(base.morphism(f).name.clone())))
            .collect::<Result<_>>()?;
        Self::from_tables(base, labels, actions)
    }

    pub(crate) fn from_tables_unchecked(
        base: Arc<FinCategory>,
        labels: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Self {
        let p = Presheaf(Arc::new(Data {
            base,
            labels,
            actions,
        }));
        debug_assert_eq!(p.validate(), Ok(()));
        p
    }

    fn validate(&self) -> Result<()> {
        let base = self.base();
        if self.0.labels.len() != base.num_objects() {
            return Err(Error::ShapeMismatch("one element list per object".into()));
        }
        if self.0.actions.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("one action per morphism".into()));
        }
        for f in 0..base.num_morphisms() {
            let (b, c) = (base.dom(f), base.cod(f));
            let table = &self.0.actions[f];
            if table.len() != self.size(c) || table.iter().any(|&y| y >= self.size(b)) {
                return Err(Error::MissingAction(base.morphism(f).name.clone()));
            }
            if base.is_identity(f) && table.iter().enumerate().any(|(i, &y)| i != y) {
                let n = base.morphism(f).name.clone();
                return Err(Error::NotFunctorial { g: n.clone(), f: n });
            }
        }
        for f in 0..base.num_morphisms() {
            for &g in base.outgoing(base.cod(f)) {
                let gf = base.compose(g, f).expect("composable");
                for x in 0..self.size(base.cod(g)) {
                    if self.act(gf, x) != self.act(f, self.act(g, x)) {
                        return Err(Error::NotFunctorial {
                            g: base.morphism(g).name.clone(),
                            f: base.morphism(f).name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.0.base
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.0.labels[c].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.0.labels.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.0.labels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_size() == 0
    }

    pub fn labels(&self, c: ObjId) -> &[String] {
        &self.0.labels[c]
    }

    pub fn label(&self, c: ObjId, x: usize) -> &str {
        &self.0.labels[c][x]
    }

    pub fn index_of(&self, c: ObjId, label: &str) -> Option<usize> {
        self.0.labels[c].iter().position(|l| l == label)
    }

    /// `X(f)(x)` for `f: b → c` and `x ∈ X(c)`.
    #[inline]
    pub fn act(&self, f: MorId, x: usize) -> usize {
        self.0.actions[f][x]
    }

    pub fn action(&self, f: MorId) -> &[usize] {
        &self.0.actions[f]
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.base()
            .objects()
            .flat_map(move |c| (0..self.size(c)).map(move |point| Element { stage: c, point }))
    }

    /// Same base, compared structurally.
    pub fn same_base(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(self.base(), other.base()) || self.base() == other.base()
    }

    pub(crate) fn ensure_same_base(&self, other: &Presheaf) -> Result<()> {
        if self.same_base(other) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    /// Every action is a bijection, i.e. the presheaf is (locally) constant.
    pub fn is_discrete(&self) -> bool {
        let base = self.base();
        (0..base.num_morphisms()).all(|f| {
            let (b, c) = (base.dom(f), base.cod(f));
            if self.size(b) != self.size(c) {
                return false;
            }
            let mut hit = vec![false; self.size(b)];
            self.action(f).iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }

    /// Name-keyed description of this presheaf, non-identity actions only.
    pub fn to_raw(&self) -> RawPresheaf {
        let base = self.base();
        RawPresheaf {
            sets: base
                .objects()
                .map(|c| (base.object_name(c).to_string(), self.labels(c).to_vec()))
                .collect(),
            actions: base
                .non_identities()
                .map(|f| {
                    let (b, c) = (base.dom(f), base.cod(f));
                    let pairs = (0..self.size(c))
                        .map(|x| {
                            (
                                self.label(c, x).to_string(),
                                self.label(b, self.act(f, x)).to_string(),
                            )
                        })
                        .collect();
                    (base.morphism(f).name.clone(), pairs)
                })
                .collect(),
        }
    }
}

/// Validate a name-keyed description. Identity actions may be omitted.
pub fn validate_presheaf(base: &Arc<FinCategory>, raw: &RawPresheaf) -> Result<Presheaf> {
    let mut labels: Vec<Option<Vec<String>>> = vec![None; base.num_objects()];
    for (obj, elems) in &raw.sets {
        let c = base
            .object_id(obj)
            .ok_or_else(|| Error::UnknownObject(obj.clone()))?;
        let mut seen = std::collections::HashSet::new();
        for e in elems {
            if !seen.insert(e) {
                return Err(Error::DuplicateName(e.clone()));
            }
        }
        labels[c] = Some(elems.clone());
    }
    let labels: Vec<Vec<String>> = labels
        .into_iter()
        .enumerate()
        .map(|(c, l)| l.ok_or_else(|| Error::UnknownObject(base.object_name(c).to_string())))
        .collect::<Result<_>>()?;
    let index: Vec<HashMap<&str, usize>> = labels
        .iter()
        .map(|ls| ls.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect())
        .collect();

    let mut actions: Vec<Option<Vec<usize>>> = vec![None; base.num_morphisms()];
    for (name, pairs) in &raw.actions {
        let f = base
            .morphism_id(name)
            .ok_or_else(|| Error::DanglingReference(name.clone()))?;
        let (b, c) = (base.dom(f), base.cod(f));
        let mut table = vec![None; labels[c].len()];
        for (from, to) in pairs {
            let dangling = |object: ObjId, element: &str| Error::DanglingElement {
                object: base.object_name(object).to_string(),
                element: element.to_string(),
            };
            let x = *index[c].get(from.as_str()).ok_or_else(|| dangling(c, from))?;
            let y = *index[b].get(to.as_str()).ok_or_else(|| dangling(b, to))?;
            if table[x].replace(y).is_some_and(|prev| prev != y) {
                return Err(Error::NotFunctorial {
                    g: name.clone(),
                    f: name.clone(),
                });
            }
        }
        let table = table
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::MissingAction(name.clone()))?;
        actions[f] = Some(table);
    }
    let actions = actions
        .into_iter()
        .enumerate()
        .map(|(f, a)| match a {
            Some(a) => Ok(a),
            None if base.is_identity(f) => Ok((0..labels[base.cod(f)].len()).collect()),
            None => Err(Error::MissingAction(base.morphism(f).name.clone())),
        })
        .collect::<Result<_>>()?;
    Presheaf::from_tables(base.clone(), labels, actions)
}

/// A morphism of presheaves.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NatTrans {
    dom: Presheaf,
    cod: Presheaf,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("NatTrans").field(&self.components).finish()
    }
}

impl NatTrans {
    pub fn new(dom: Presheaf, cod: Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        dom.ensure_same_base(&cod)?;
        let base = dom.base().clone();
        if components.len() != base.num_objects() {
            return Err(Error::ShapeMismatch("one component per object".into()));
        }
        for c in base.objects() {
            if components[c].len() != dom.size(c) || components[c].iter().any(|&y| y >= cod.size(c))
            {
                return Err(Error::ShapeMismatch(format!(
                    "component at `{}` is not a function",
                    base.object_name(c)
                )));
            }
        }
        let t = NatTrans {
            dom,
            cod,
            components,
        };
        if let Some(f) = t.naturality_failure() {
            return Err(Error::NotNatural(base.morphism(f).name.clone()));
        }
        Ok(t)
    }

    pub(crate) fn new_unchecked(dom: Presheaf, cod: Presheaf, components: Vec<Vec<usize>>) -> Self {
        let t = NatTrans {
            dom,
            cod,
            components,
        };
        debug_assert!(t.naturality_failure().is_none());
        t
    }

    fn naturality_failure(&self) -> Option<MorId> {
        let base = self.dom.base();
        (0..base.num_morphisms()).find(|&f| {
            let (b, c) = (base.dom(f), base.cod(f));
            (0..self.dom.size(c)).any(|x| {
                self.cod.act(f, self.components[c][x]) != self.components[b][self.dom.act(f, x)]
            })
        })
    }

    pub fn identity(x: &Presheaf) -> Self {
        let components = x.base().objects().map(|c| (0..x.size(c)).collect()).collect();
        NatTrans::new_unchecked(x.clone(), x.clone(), components)
    }

    pub fn dom(&self) -> &Presheaf {
        &self.dom
    }

    pub fn cod(&self) -> &Presheaf {
        &self.cod
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, c: ObjId) -> &[usize] {
        &self.components[c]
    }

    #[inline]
    pub fn apply(&self, c: ObjId, x: usize) -> usize {
        self.components[c][x]
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &NatTrans) -> Result<NatTrans> {
        if other.cod.sizes() != self.dom.sizes() || !other.cod.same_base(&self.dom) {
            return Err(Error::ShapeMismatch("arrows are not composable".into()));
        }
        let components = other
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&y| self.components[c][y]).collect())
            .collect();
        Ok(NatTrans::new_unchecked(
            other.dom.clone(),
            self.cod.clone(),
            components,
        ))
    }

    /// Same components and same endpoints.
    pub fn same_arrow(&self, other: &NatTrans) -> bool {
        self.components == other.components && self.dom == other.dom && self.cod == other.cod
    }

    /// Pointwise surjective.
    pub fn is_epi(&self) -> bool {
        self.dom.base().objects().all(|c| {
            let mut hit = vec![false; self.cod.size(c)];
            for &y in &self.components[c] {
                hit[y] = true;
            }
            hit.into_iter().all(|h| h)
        })
    }

    /// Pointwise injective.
    pub fn is_mono(&self) -> bool {
        self.dom.base().objects().all(|c| {
            let mut hit = vec![false; self.cod.size(c)];
            self.components[c]
                .iter()
                .all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    pub fn inverse(&self) -> Option<NatTrans> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut inv = vec![0; comp.len()];
                for (x, &y) in comp.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(NatTrans::new_unchecked(
            self.cod.clone(),
            self.dom.clone(),
            components,
        ))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fincat::catalog;

    pub(crate) fn refgraph() -> Arc<FinCategory> {
        Arc::new(catalog("refgraph").unwrap())
    }

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    pub(crate) fn p2_raw() -> RawPresheaf {
        RawPresheaf {
            sets: vec![
                ("V".into(), vec!["0".into(), "1".into()]),
                ("E".into(), vec!["l0".into(), "l1".into(), "a".into()]),
            ],
            actions: vec![
                ("s".into(), pairs(&[("l0", "0"), ("l1", "1"), ("a", "0")])),
                ("t".into(), pairs(&[("l0", "0"), ("l1", "1"), ("a", "1")])),
                ("sigma".into(), pairs(&[("0", "l0"), ("1", "l1")])),
                (
                    "s.sigma".into(),
                    pairs(&[("l0", "l0"), ("l1", "l1"), ("a", "l0")]),
                ),
                (
                    "t.sigma".into(),
                    pairs(&[("l0", "l0"), ("l1", "l1"), ("a", "l1")]),
                ),
            ],
        }
    }

    #[test]
    fn p2_validates() {
        let p = validate_presheaf(&refgraph(), &p2_raw()).unwrap();
        assert_eq!(p.sizes(), vec![2, 3]);
    }

    #[test]
    fn missing_sigma_action() {
        let mut raw = p2_raw();
        raw.actions.retain(|(n, _)| n != "sigma");
        assert_eq!(
            validate_presheaf(&refgraph(), &raw).unwrap_err(),
            Error::MissingAction("sigma".into())
        );
    }

    #[test]
    fn broken_functoriality() {
        let mut raw = p2_raw();
        // sigma must send vertex 1 to a loop whose source is 1
        raw.actions[2].1[1].1 = "l0".into();
        assert!(matches!(
            validate_presheaf(&refgraph(), &raw),
            Err(Error::NotFunctorial { .. })
        ));
    }

    #[test]
    fn dangling_element() {
        let mut raw = p2_raw();
        raw.actions[0].1[0].1 = "7".into();
        assert!(matches!(
            validate_presheaf(&refgraph(), &raw),
            Err(Error::DanglingElement { .. })
        ));
    }

    #[test]
    fn sets_only_on_point() {
        let base = Arc::new(catalog("point").unwrap());
        let raw = RawPresheaf {
            sets: vec![("*".into(), vec!["a".into(), "b".into()])],
            actions: vec![],
        };
        assert_eq!(validate_presheaf(&base, &raw).unwrap().sizes(), vec![2]);
    }

    #[test]
    fn raw_round_trip() {
        let p = validate_presheaf(&refgraph(), &p2_raw()).unwrap();
        assert_eq!(validate_presheaf(&refgraph(), &p.to_raw()).unwrap(), p);
    }
}
