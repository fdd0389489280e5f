//! Finite categories: the base `C` of a presheaf topos `Set^(C^op)`.
//!
//! A [`FinCategory`] stores its composition as a total table over composable
//! pairs. Objects and morphisms are addressed by dense indices internally and
//! by opaque string names externally.

mod catalog;
mod closure;

pub use catalog::{catalog, catalog_entries, CatalogEntry, Expectation, CATALOG_NAMES};
pub use closure::{Presentation, CLOSURE_CAP};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// Unvalidated category description, as read from a file or built in code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub name: String,
    pub objects: Vec<String>,
    /// `(name, dom, cod)`
    pub morphisms: Vec<(String, String, String)>,
    /// `(object, identity morphism)`
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`
    pub composition: Vec<(String, String, String)>,
}

/// A validated finite category.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    /// `compose[g * n + f] = Some(g∘f)` when `cod f = dom g`.
    compose: Vec<Option<MorId>>,
    /// Morphisms grouped by codomain, in id order.
    into: Vec<Vec<MorId>>,
    /// Morphisms grouped by domain, in id order.
    outgoing: Vec<Vec<MorId>>,
}

impl FinCategory {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len()
    }

    pub fn object_name(&self, c: ObjId) -> &str {
        &self.objects[c]
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism_id(&self, name: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn dom(&self, f: MorId) -> ObjId {
        self.morphisms[f].dom
    }

    pub fn cod(&self, f: MorId) -> ObjId {
        self.morphisms[f].cod
    }

    pub fn identity(&self, c: ObjId) -> MorId {
        self.identities[c]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identities[self.dom(f)] == f
    }

    /// `g ∘ f`, or `None` when the pair is not composable.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose[g * self.morphisms.len() + f]
    }

    /// Morphisms with codomain `c`, including the identity.
    pub fn incoming(&self, c: ObjId) -> &[MorId] {
        &self.into[c]
    }

    /// Morphisms with domain `c`, including the identity.
    pub fn outgoing(&self, c: ObjId) -> &[MorId] {
        &self.outgoing[c]
    }

    /// `Hom(b, c)` in morphism-id order.
    pub fn hom(&self, b: ObjId, c: ObjId) -> Vec<MorId> {
        self.into[c]
            .iter()
            .copied()
            .filter(|&f| self.dom(f) == b)
            .collect()
    }

    pub fn non_identities(&self) -> impl Iterator<Item = MorId> + '_ {
        (0..self.morphisms.len()).filter(move |&f| !self.is_identity(f))
    }

    /// The description this category was validated from, in canonical order.
    pub fn to_raw(&self) -> RawCategory {
        let n = self.morphisms.len();
        let mut composition = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if let Some(gf) = self.compose(g, f) {
                    composition.push((
                        self.morphisms[g].name.clone(),
                        self.morphisms[f].name.clone(),
                        self.morphisms[gf].name.clone(),
                    ));
                }
            }
        }
        RawCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| {
                    (
                        m.name.clone(),
                        self.objects[m.dom].clone(),
                        self.objects[m.cod].clone(),
                    )
                })
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(c, &f)| (self.objects[c].clone(), self.morphisms[f].name.clone()))
                .collect(),
            composition,
        }
    }
}

/// Check a raw description against the category axioms.
pub fn validate_category(raw: &RawCategory) -> Result<FinCategory> {
    let mut obj_index = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if obj_index.insert(o.as_str(), i).is_some() {
            return Err(Error::DuplicateName(o.clone()));
        }
    }
    let lookup_obj = |name: &str| {
        obj_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::DanglingReference(name.to_string()))
    };

    let mut mor_index = HashMap::new();
    let mut morphisms = Vec::with_capacity(raw.morphisms.len());
    for (i, (name, dom, cod)) in raw.morphisms.iter().enumerate() {
        if mor_index.insert(name.as_str(), i).is_some() {
            return Err(Error::DuplicateName(name.clone()));
        }
        morphisms.push(Morphism {
            name: name.clone(),
            dom: lookup_obj(dom)?,
            cod: lookup_obj(cod)?,
        });
    }
    let lookup_mor = |name: &str| {
        mor_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::DanglingReference(name.to_string()))
    };

    let mut identities = vec![None; raw.objects.len()];
    for (obj, id) in &raw.identities {
        let c = lookup_obj(obj)?;
        let f = lookup_mor(id)?;
        if morphisms[f].dom != c || morphisms[f].cod != c || identities[c].is_some() {
            return Err(Error::MissingIdentity(obj.clone()));
        }
        identities[c] = Some(f);
    }
    let identities: Vec<MorId> = identities
        .into_iter()
        .enumerate()
        .map(|(c, f)| f.ok_or_else(|| Error::MissingIdentity(raw.objects[c].clone())))
        .collect::<Result<_>>()?;

    let n = morphisms.len();
    let mut compose = vec![None; n * n];
    for (g, f, gf) in &raw.composition {
        let (gi, fi, gfi) = (lookup_mor(g)?, lookup_mor(f)?, lookup_mor(gf)?);
        let bad = |reason: &str| Error::InvalidComposition {
            g: g.clone(),
            f: f.clone(),
            gf: gf.clone(),
            reason: reason.to_string(),
        };
        if morphisms[fi].cod != morphisms[gi].dom {
            return Err(bad("pair is not composable"));
        }
        if morphisms[gfi].dom != morphisms[fi].dom || morphisms[gfi].cod != morphisms[gi].cod {
            return Err(bad("result has the wrong domain or codomain"));
        }
        match compose[gi * n + fi] {
            Some(prev) if prev != gfi => return Err(bad("conflicting entry")),
            _ => compose[gi * n + fi] = Some(gfi),
        }
    }
    for g in 0..n {
        for f in 0..n {
            if morphisms[f].cod == morphisms[g].dom && compose[g * n + f].is_none() {
                return Err(Error::IncompleteComposition {
                    g: morphisms[g].name.clone(),
                    f: morphisms[f].name.clone(),
                });
            }
        }
    }

    for f in 0..n {
        let id_dom = identities[morphisms[f].dom];
        let id_cod = identities[morphisms[f].cod];
        if compose[id_cod * n + f] != Some(f) || compose[f * n + id_dom] != Some(f) {
            return Err(Error::IdentityLaw(morphisms[f].name.clone()));
        }
    }

    for f in 0..n {
        for g in 0..n {
            let Some(gf) = compose[g * n + f] else { continue };
            for h in 0..n {
                let Some(hg) = compose[h * n + g] else { continue };
                if compose[h * n + gf] != compose[hg * n + f] {
                    return Err(Error::NonAssociative {
                        h: morphisms[h].name.clone(),
                        g: morphisms[g].name.clone(),
                        f: morphisms[f].name.clone(),
                    });
                }
            }
        }
    }

    let mut into = vec![Vec::new(); raw.objects.len()];
    let mut outgoing = vec![Vec::new(); raw.objects.len()];
    for (i, m) in morphisms.iter().enumerate() {
        into[m.cod].push(i);
        outgoing[m.dom].push(i);
    }

    Ok(FinCategory {
        name: raw.name.clone(),
        objects: raw.objects.clone(),
        morphisms,
        identities,
        compose,
        into,
        outgoing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_raw() -> RawCategory {
        RawCategory {
            name: "point".into(),
            objects: vec!["*".into()],
            morphisms: vec![("id".into(), "*".into(), "*".into())],
            identities: vec![("*".into(), "id".into())],
            composition: vec![("id".into(), "id".into(), "id".into())],
        }
    }

    #[test]
    fn point_is_valid() {
        let c = validate_category(&point_raw()).unwrap();
        assert_eq!(c.num_objects(), 1);
        assert_eq!(c.num_morphisms(), 1);
    }

    #[test]
    fn missing_identity() {
        let mut raw = point_raw();
        raw.identities.clear();
        assert_eq!(
            validate_category(&raw),
            Err(Error::MissingIdentity("*".into()))
        );
    }

    #[test]
    fn incomplete_composition() {
        let mut raw = point_raw();
        raw.composition.clear();
        assert!(matches!(
            validate_category(&raw),
            Err(Error::IncompleteComposition { .. })
        ));
    }

    #[test]
    fn dangling_reference() {
        let mut raw = point_raw();
        raw.morphisms.push(("f".into(), "*".into(), "nowhere".into()));
        assert_eq!(
            validate_category(&raw),
            Err(Error::DanglingReference("nowhere".into()))
        );
    }

    // One object, morphisms {1, a, b, z}: a table that fixes the monoid
    // axioms for the identity but breaks associativity on (a, a, b).
    #[test]
    fn non_associative_table() {
        let names = ["1", "a", "b", "z"];
        let mut raw = RawCategory {
            name: "bad".into(),
            objects: vec!["*".into()],
            morphisms: names
                .iter()
                .map(|m| (m.to_string(), "*".into(), "*".into()))
                .collect(),
            identities: vec![("*".into(), "1".into())],
            composition: Vec::new(),
        };
        for g in names {
            for f in names {
                let gf = match (g, f) {
                    ("1", x) | (x, "1") => x,
                    ("a", "a") => "a",
                    ("a", "b") => "z",
                    _ => "b",
                };
                raw.composition.push((g.into(), f.into(), gf.into()));
            }
        }
        assert!(matches!(
            validate_category(&raw),
            Err(Error::NonAssociative { .. })
        ));
    }

    #[test]
    fn raw_round_trip() {
        for name in CATALOG_NAMES {
            let c = catalog(name).unwrap();
            assert_eq!(validate_category(&c.to_raw()).unwrap(), c);
        }
    }
}
