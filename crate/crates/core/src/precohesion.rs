//! The adjoint string `f_! ⊣ f^* ⊣ f_* ⊣ f^!` between a presheaf topos and
//! its decidable objects, with the precohesion checks built on it.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::CorpusIndex;
use crate::decidable::{
    check_dqo_bounded, check_dso_bounded, check_ns, dso_candidates, is_decidable, pi, pi_map,
    AxiomReport, Pi, Verdict, WitnessDetail,
};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, ObjId};
use crate::limits::check_cap;
use crate::presheaf::{
    exponential, factor_through_epi, factor_through_mono, product, terminal, yoneda,
    yoneda_arrow, HomSearch, NatTrans, Presheaf,
};
use crate::sublattice::{for_each_subobject, Subobject};

/// A decidable subobject `ε: f_*X ↪ X` through which every arrow from a
/// decidable test object factors.
#[derive(Debug, Clone)]
pub struct Coreflection {
    pub object: Presheaf,
    pub counit: NatTrans,
    pub sub: Subobject,
}

impl Coreflection {
    fn from_sub(sub: Subobject) -> Self {
        let (object, counit) = sub.to_presheaf();
        Coreflection {
            object,
            counit,
            sub,
        }
    }
}

fn all_factor(a: &Subobject, x: &Presheaf, tests: &[Presheaf]) -> Result<bool> {
    let mut ok = true;
    for d in tests {
        HomSearch::new(d, x).for_each(|comps| {
            let hit = x
                .base()
                .objects()
                .all(|c| comps[c].iter().all(|&e| a.contains(c, e)));
            if hit {
                ControlFlow::Continue(())
            } else {
                ok = false;
                ControlFlow::Break(())
            }
        })?;
        if !ok {
            break;
        }
    }
    Ok(ok)
}

/// The coreflection of `x` into the decidables, tested against `tests`.
/// There is at most one such subobject; `None` when there is none.
pub fn coreflection(x: &Presheaf, tests: &[Presheaf]) -> Result<Option<Coreflection>> {
    let mut found = None;
    let mut failure = None;
    for_each_subobject(x, |s| {
        let (inner, _) = s.to_presheaf();
        if is_decidable(&inner) {
            match all_factor(s, x, tests) {
                Ok(true) => {
                    found = Some(s.clone());
                    return ControlFlow::Break(());
                }
                Ok(false) => {}
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(found.map(Coreflection::from_sub))
}

/// `f^!S` with its elements: `(f^!S)(c) = Hom(f_*y(c), S)`.
#[derive(Debug, Clone)]
pub struct UpperShriek {
    pub object: Presheaf,
    pub homs: Vec<Vec<NatTrans>>,
    index: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

impl UpperShriek {
    pub fn index_of(&self, c: ObjId, phi: &NatTrans) -> Option<usize> {
        self.index[c].get(phi.components()).copied()
    }
}

#[derive(Debug, Clone)]
pub struct AdjointString {
    pub base: Arc<FinCategory>,
    /// The decidable objects the coreflection is tested against.
    pub tests: Vec<Presheaf>,
    representables: Vec<Presheaf>,
    star_representables: Vec<Coreflection>,
    /// `f_*(y(g))` for every morphism `g: b → c`, as `f_*y(b) → f_*y(c)`.
    star_yoneda_maps: Vec<NatTrans>,
}

impl AdjointString {
    pub fn new(base: &Arc<FinCategory>, tests: Vec<Presheaf>) -> Result<Self> {
        let representables: Vec<Presheaf> =
            base.objects().map(|c| yoneda(base, c)).collect::<Result<_>>()?;
        let star_representables = representables
            .iter()
            .zip(base.objects())
            .map(|(y, c)| {
                coreflection(y, &tests)?.ok_or_else(|| {
                    Error::PrereqFailed(format!(
                        "y({}) has no decidable coreflection",
                        base.object_name(c)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut string = AdjointString {
            base: base.clone(),
            tests,
            representables,
            star_representables,
            star_yoneda_maps: Vec::new(),
        };
        let maps = (0..base.num_morphisms())
            .map(|g| {
                let (b, c) = (base.dom(g), base.cod(g));
                let pos = base.hom(b, c).iter().position(|&h| h == g).expect("in hom");
                let yg = yoneda_arrow(&string.representables[b], &string.representables[c], b, pos);
                string.f_lower_star_map(
                    &yg,
                    &string.star_representables[b],
                    &string.star_representables[c],
                )
            })
            .collect::<Result<_>>()?;
        string.star_yoneda_maps = maps;
        Ok(string)
    }

    pub fn f_shriek(&self, x: &Presheaf) -> Result<Pi> {
        pi(x)
    }

    pub fn f_lower_star(&self, x: &Presheaf) -> Result<Coreflection> {
        coreflection(x, &self.tests)?
            .ok_or_else(|| Error::PrereqFailed("object without a decidable coreflection".into()))
    }

    /// `f_*(h)`: the restriction of `h: X → Y` to the coreflections.
    pub fn f_lower_star_map(
        &self,
        h: &NatTrans,
        fx: &Coreflection,
        fy: &Coreflection,
    ) -> Result<NatTrans> {
        let through = h.after(&fx.counit)?;
        factor_through_mono(&fy.counit, &through).ok_or_else(|| {
            Error::TriangleIdentityFailed("f_* does not restrict an arrow to coreflections".into())
        })
    }

    pub fn f_upper_shriek(&self, s: &Presheaf) -> Result<UpperShriek> {
        let base = &self.base;
        let homs: Vec<Vec<NatTrans>> = base
            .objects()
            .map(|c| HomSearch::new(&self.star_representables[c].object, s).collect())
            .collect::<Result<_>>()?;
        for h in &homs {
            check_cap("f^! stage", h.len())?;
        }
        let index: Vec<HashMap<Vec<Vec<usize>>, usize>> = homs
            .iter()
            .map(|h| {
                h.iter()
                    .enumerate()
                    .map(|(i, phi)| (phi.components().to_vec(), i))
                    .collect()
            })
            .collect();
        let labels = homs
            .iter()
            .map(|h| (0..h.len()).map(|i| format!("h{i}")).collect())
            .collect();
        let actions = (0..base.num_morphisms())
            .map(|g| {
                let (b, c) = (base.dom(g), base.cod(g));
                homs[c]
                    .iter()
                    .map(|phi| {
                        let r = phi.after(&self.star_yoneda_maps[g]).expect("composable");
                        index[b][r.components()]
                    })
                    .collect()
            })
            .collect();
        let object = Presheaf::from_tables_unchecked(base.clone(), labels, actions);
        Ok(UpperShriek {
            object,
            homs,
            index,
        })
    }

    /// `f^!(α)`: post-composition with `α: S → T`.
    pub fn f_upper_shriek_map(
        &self,
        alpha: &NatTrans,
        us: &UpperShriek,
        ut: &UpperShriek,
    ) -> Result<NatTrans> {
        let components = self
            .base
            .objects()
            .map(|c| {
                us.homs[c]
                    .iter()
                    .map(|phi| {
                        let r = alpha.after(phi)?;
                        ut.index_of(c, &r)
                            .ok_or_else(|| Error::ShapeMismatch("f^!(α) leaves f^!T".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        NatTrans::new(us.object.clone(), ut.object.clone(), components)
    }

    /// The transpose `X → f^!S` of `α: f_*X → S`, sending `x ∈ X(c)` to
    /// `α ∘ f_*(x̂)`.
    pub fn transpose(
        &self,
        alpha: &NatTrans,
        x: &Presheaf,
        fx: &Coreflection,
        us: &UpperShriek,
    ) -> Result<NatTrans> {
        let components = self
            .base
            .objects()
            .map(|c| {
                (0..x.size(c))
                    .map(|e| {
                        let xhat = yoneda_arrow(&self.representables[c], x, c, e);
                        let fxhat = self.f_lower_star_map(&xhat, &self.star_representables[c], fx)?;
                        us.index_of(c, &alpha.after(&fxhat)?)
                            .ok_or_else(|| Error::ShapeMismatch("transpose leaves f^!S".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        NatTrans::new(x.clone(), us.object.clone(), components)
    }

    /// Unit `X → f^!f_*X`, the transpose of the identity of `f_*X`.
    pub fn unit_upper(
        &self,
        x: &Presheaf,
        fx: &Coreflection,
        u_fx: &UpperShriek,
    ) -> Result<NatTrans> {
        self.transpose(&NatTrans::identity(&fx.object), x, fx, u_fx)
    }

    /// Counit `f_*f^!S → S`: the arrow whose transpose is the identity.
    pub fn counit_upper(
        &self,
        s: &Presheaf,
        us: &UpperShriek,
        f_us: &Coreflection,
    ) -> Result<NatTrans> {
        let id = NatTrans::identity(&us.object);
        let mut found = None;
        let mut failure = None;
        HomSearch::new(&f_us.object, s).for_each(|comps| {
            let alpha = NatTrans::new_unchecked(f_us.object.clone(), s.clone(), comps.to_vec());
            match self.transpose(&alpha, &us.object, f_us, us) {
                Ok(t) if t.same_arrow(&id) => {
                    found = Some(alpha);
                    ControlFlow::Break(())
                }
                Ok(_) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        found.ok_or_else(|| {
            Error::TriangleIdentityFailed("no counit f_*f^!S → S transposes to the identity".into())
        })
    }
}

/// One named check with how many instances were tested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub tested: usize,
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            tested: 0,
            witness: None,
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.tested += 1;
        if !ok && self.passed {
            self.passed = false;
            self.witness = Some(witness());
        }
    }

    pub fn merge(&mut self, other: Check) {
        self.tested += other.tested;
        if !other.passed && self.passed {
            self.passed = false;
            self.witness = other.witness;
        }
    }
}

fn item(i: usize) -> String {
    format!("corpus item {i}")
}

fn decidable_tests(corpus: &CorpusIndex) -> (Vec<usize>, Vec<Presheaf>) {
    let idx: Vec<usize> = corpus
        .items
        .par_iter()
        .map(is_decidable)
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .filter_map(|(i, d)| d.then_some(i))
        .collect();
    let mut tests: Vec<Presheaf> = idx.iter().map(|&i| corpus.items[i].clone()).collect();
    let one = terminal(&corpus.base);
    if !tests.contains(&one) {
        tests.push(one);
    }
    (idx, tests)
}

/// Triangle identities and hom bijections for all three adjunctions.
#[derive(Debug, Clone, Serialize)]
pub struct AdjunctionChecks {
    pub shriek_triangles: Check,
    pub star_triangles: Check,
    pub upper_triangles: Check,
    pub hom_bijections: Check,
    pub counit_is_dso: Check,
}

impl AdjunctionChecks {
    pub fn all(&self) -> [&Check; 5] {
        [
            &self.shriek_triangles,
            &self.star_triangles,
            &self.upper_triangles,
            &self.hom_bijections,
            &self.counit_is_dso,
        ]
    }

    pub fn passed(&self) -> bool {
        self.all().iter().all(|c| c.passed)
    }
}

fn verify_object(
    string: &AdjointString,
    x: &Presheaf,
    i: usize,
    decidables: &[(usize, Presheaf)],
) -> Result<AdjunctionChecks> {
    let mut shriek = Check::new("f_! ⊣ f^* triangle identities");
    let mut star = Check::new("f^* ⊣ f_* triangle identities");
    let mut upper = Check::new("f_* ⊣ f^! triangle identities");
    let mut homs = Check::new("hom-set bijections");
    let mut dso = Check::new("counit f^*f_* → 1 is the DSO subobject");

    let px = pi(x)?;
    let ppx = pi(&px.object)?;
    let eps_px = ppx.quotient.inverse();
    let pi_eta = pi_map(&px.quotient, &px, &ppx)?;
    let ok = eps_px
        .as_ref()
        .map(|e| e.after(&pi_eta).map(|t| t.same_arrow(&NatTrans::identity(&px.object))))
        .transpose()?
        .unwrap_or(false);
    shriek.record(ok, || format!("ε_ΠX ∘ Π(η_X) ≠ id at {}", item(i)));

    let fx = string.f_lower_star(x)?;
    let candidates = dso_candidates(x)?;
    dso.record(candidates.len() == 1 && candidates[0] == fx.sub, || {
        format!("coreflection differs from the DSO subobject at {}", item(i))
    });
    let ffx = string.f_lower_star(&fx.object)?;
    let f_eps = string.f_lower_star_map(&fx.counit, &ffx, &fx)?;
    let eta_fx = factor_through_mono(&ffx.counit, &NatTrans::identity(&fx.object));
    let ok = match &eta_fx {
        Some(eta) => f_eps.after(eta)?.same_arrow(&NatTrans::identity(&fx.object)),
        None => false,
    };
    star.record(ok, || format!("f_*(ε_X) ∘ η_f_*X ≠ id at {}", item(i)));

    let u_fx = string.f_upper_shriek(&fx.object)?;
    let eta_x = string.unit_upper(x, &fx, &u_fx)?;
    let f_u_fx = string.f_lower_star(&u_fx.object)?;
    let eps_fx = string.counit_upper(&fx.object, &u_fx, &f_u_fx)?;
    let f_eta = string.f_lower_star_map(&eta_x, &fx, &f_u_fx)?;
    let ok = eps_fx.after(&f_eta)?.same_arrow(&NatTrans::identity(&fx.object));
    upper.record(ok, || format!("ε_f_*X ∘ f_*(η_X) ≠ id at {}", item(i)));

    for (j, s) in decidables {
        let n_xs = HomSearch::new(x, s).count()?;
        let from_pi = HomSearch::new(&px.object, s).count()?;
        homs.record(n_xs == from_pi, || {
            format!("|Hom(ΠX, S)| ≠ |Hom(X, S)| for X = {}, S = {}", item(i), item(*j))
        });
        let n_sx = HomSearch::new(s, x).count()?;
        let into_star = HomSearch::new(s, &fx.object).count()?;
        homs.record(n_sx == into_star, || {
            format!("|Hom(S, f_*X)| ≠ |Hom(S, X)| for X = {}, S = {}", item(i), item(*j))
        });
        let us = string.f_upper_shriek(s)?;
        let mut images = std::collections::HashSet::new();
        let mut count = 0;
        let mut failure = None;
        HomSearch::new(&fx.object, s).for_each(|comps| {
            count += 1;
            let alpha = NatTrans::new_unchecked(fx.object.clone(), s.clone(), comps.to_vec());
            match string.transpose(&alpha, x, &fx, &us) {
                Ok(t) => {
                    images.insert(t.components().to_vec());
                    ControlFlow::Continue(())
                }
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        let target = HomSearch::new(x, &us.object).count()?;
        homs.record(images.len() == count && count == target, || {
            format!("transpose Hom(f_*X, S) → Hom(X, f^!S) not bijective for X = {}, S = {}", item(i), item(*j))
        });
    }

    if decidables.iter().any(|(j, _)| *j == i) {
        let eps = px.quotient.inverse();
        shriek.record(eps.is_some(), || format!("η_D is not invertible at {}", item(i)));
        let eta = factor_through_mono(&fx.counit, &NatTrans::identity(x));
        let ok = match &eta {
            Some(eta) => fx.counit.after(eta)?.same_arrow(&NatTrans::identity(x)),
            None => false,
        };
        star.record(ok, || format!("ε_S ∘ η_S ≠ id at {}", item(i)));
        let us = string.f_upper_shriek(x)?;
        let f_us = string.f_lower_star(&us.object)?;
        let eps_s = string.counit_upper(x, &us, &f_us)?;
        let uu = string.f_upper_shriek(&f_us.object)?;
        let eta_us = string.unit_upper(&us.object, &f_us, &uu)?;
        let f_eps = string.f_upper_shriek_map(&eps_s, &uu, &us)?;
        let ok = f_eps.after(&eta_us)?.same_arrow(&NatTrans::identity(&us.object));
        upper.record(ok, || format!("f^!(ε_S) ∘ η_f^!S ≠ id at {}", item(i)));
    }

    Ok(AdjunctionChecks {
        shriek_triangles: shriek,
        star_triangles: star,
        upper_triangles: upper,
        hom_bijections: homs,
        counit_is_dso: dso,
    })
}

fn merge_checks(parts: Vec<AdjunctionChecks>) -> Option<AdjunctionChecks> {
    let mut it = parts.into_iter();
    let mut acc = it.next()?;
    for p in it {
        acc.shriek_triangles.merge(p.shriek_triangles);
        acc.star_triangles.merge(p.star_triangles);
        acc.upper_triangles.merge(p.upper_triangles);
        acc.hom_bijections.merge(p.hom_bijections);
        acc.counit_is_dso.merge(p.counit_is_dso);
    }
    Some(acc)
}

fn prerequisite_reports(corpus: &CorpusIndex) -> Result<Vec<AxiomReport>> {
    Ok(vec![
        check_ns(&corpus.base)?,
        check_dqo_bounded(corpus)?,
        check_dso_bounded(corpus)?,
    ])
}

fn describe_failure(r: &AxiomReport) -> String {
    let what = match r.witness.as_ref().map(|w| (&w.detail, w.corpus_index)) {
        Some((WitnessDetail::Representable(c), _)) => {
            let base = r.witness.as_ref().expect("witness").object.base();
            format!("witness y({})", base.object_name(*c))
        }
        Some((_, Some(i))) => format!("witness {}", item(i)),
        _ => "no witness".into(),
    };
    format!("{} fails ({what})", r.axiom.name())
}

/// Build the string on a corpus and verify it; fails with the first violated
/// identity.
pub fn build_adjoint_string(corpus: &CorpusIndex) -> Result<(AdjointString, AdjunctionChecks)> {
    for r in prerequisite_reports(corpus)? {
        if !r.verdict.passed() {
            return Err(Error::PrereqFailed(describe_failure(&r)));
        }
    }
    let (string, checks) = adjoint_string_unchecked(corpus)?;
    if let Some(c) = checks.all().iter().find(|c| !c.passed) {
        return Err(Error::TriangleIdentityFailed(format!(
            "{}: {}",
            c.name,
            c.witness.clone().unwrap_or_default()
        )));
    }
    Ok((string, checks))
}

fn adjoint_string_unchecked(corpus: &CorpusIndex) -> Result<(AdjointString, AdjunctionChecks)> {
    let (idx, tests) = decidable_tests(corpus);
    let string = AdjointString::new(&corpus.base, tests)?;
    let decidables: Vec<(usize, Presheaf)> =
        idx.iter().map(|&i| (i, corpus.items[i].clone())).collect();
    let parts: Vec<AdjunctionChecks> = corpus
        .items
        .par_iter()
        .enumerate()
        .map(|(i, x)| verify_object(&string, x, i, &decidables))
        .collect::<Result<_>>()?;
    let checks = merge_checks(parts).unwrap_or_else(|| AdjunctionChecks {
        shriek_triangles: Check::new("f_! ⊣ f^* triangle identities"),
        star_triangles: Check::new("f^* ⊣ f_* triangle identities"),
        upper_triangles: Check::new("f_* ⊣ f^! triangle identities"),
        hom_bijections: Check::new("hom-set bijections"),
        counit_is_dso: Check::new("counit f^*f_* → 1 is the DSO subobject"),
    });
    Ok((string, checks))
}

#[derive(Debug, Clone, Serialize)]
pub struct PrecohesionReport {
    pub bounds: Vec<usize>,
    /// Set when the string could not be built; names what failed.
    pub prerequisite_failure: Option<String>,
    pub fully_faithful: Check,
    pub products_preserved: Check,
    pub counit_monic: Check,
    pub nullstellensatz: Check,
    pub adjunctions: Option<AdjunctionChecks>,
    pub precohesive: bool,
}

impl PrecohesionReport {
    pub fn checks(&self) -> Vec<&Check> {
        let mut out = vec![
            &self.fully_faithful,
            &self.products_preserved,
            &self.counit_monic,
            &self.nullstellensatz,
        ];
        if let Some(a) = &self.adjunctions {
            out.extend(a.all());
        }
        out
    }
}

/// The comparison `Π(X×Y) → ΠX × ΠY` built from `Π` of the projections.
pub fn pi_product_comparison(x: &Presheaf, y: &Presheaf) -> Result<NatTrans> {
    let xy = product(x, y)?;
    let (pxy, px, py) = (pi(&xy.object)?, pi(x)?, pi(y)?);
    let a = pi_map(&xy.proj1, &pxy, &px)?;
    let b = pi_map(&xy.proj2, &pxy, &py)?;
    product(&px.object, &py.object)?.tuple(&a, &b)
}

fn product_checks(corpus: &CorpusIndex) -> Result<Check> {
    let mut check = Check::new("f_! preserves finite products");
    let one = terminal(&corpus.base);
    let p1 = pi(&one)?;
    check.record(p1.quotient.is_iso(), || "Π(1) ≇ 1".into());
    let n = corpus.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let results: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(pi_product_comparison(&corpus.items[i], &corpus.items[j])?.is_iso()))
        .collect::<Result<_>>()?;
    for (&(i, j), ok) in pairs.iter().zip(results) {
        check.record(ok, || format!("Π(X×Y) → ΠX×ΠY not invertible for {} × {}", item(i), item(j)));
    }
    Ok(check)
}

/// Full faithfulness of `f^*`, product preservation of `f_!`, monic counit
/// and `θ: f_*X → f_!X` epic, at the corpus bound. The verdict requires all
/// four together with the adjunction checks.
pub fn check_precohesive(corpus: &CorpusIndex) -> Result<PrecohesionReport> {
    let mut report = PrecohesionReport {
        bounds: corpus.bounds.clone(),
        prerequisite_failure: None,
        fully_faithful: Check::new("f^* fully faithful"),
        products_preserved: Check::new("f_! preserves finite products"),
        counit_monic: Check::new("counit f^*f_* → 1 monic"),
        nullstellensatz: Check::new("θ: f_* → f_! epic"),
        adjunctions: None,
        precohesive: false,
    };
    let ns = check_ns(&corpus.base)?;
    if !ns.verdict.passed() {
        report.prerequisite_failure = Some(describe_failure(&ns));
        return Ok(report);
    }
    precohesion_core(corpus, report)
}

fn precohesion_core(corpus: &CorpusIndex, mut report: PrecohesionReport) -> Result<PrecohesionReport> {
    let (string, adjunctions) = match adjoint_string_unchecked(corpus) {
        Ok(v) => v,
        Err(Error::PrereqFailed(m)) | Err(Error::TriangleIdentityFailed(m)) => {
            report.prerequisite_failure = Some(m);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let per_item: Vec<(bool, Option<bool>, bool, bool)> = corpus
        .items
        .par_iter()
        .map(|x| -> Result<_> {
            let px = pi(x)?;
            let ff = is_decidable(x).then(|| px.quotient.is_iso());
            let fx = string.f_lower_star(x)?;
            let theta = px.quotient.after(&fx.counit)?;
            Ok((true, ff, fx.counit.is_mono(), theta.is_epi()))
        })
        .collect::<Result<_>>()?;
    for (i, (_, ff, mono, theta)) in per_item.into_iter().enumerate() {
        if let Some(ok) = ff {
            report
                .fully_faithful
                .record(ok, || format!("unit X → ΠX not invertible on decidable {}", item(i)));
        }
        report.counit_monic.record(mono, || format!("counit not monic at {}", item(i)));
        report.nullstellensatz.record(theta, || format!("θ not epic at {}", item(i)));
    }
    report.products_preserved = product_checks(corpus)?;
    report.precohesive = report.fully_faithful.passed
        && report.products_preserved.passed
        && report.counit_monic.passed
        && report.nullstellensatz.passed
        && adjunctions.passed();
    report.adjunctions = Some(adjunctions);
    Ok(report)
}

/// A deliberate fault used to confirm that the equivalence harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// DSO candidates ignore the condition on global points.
    IgnorePoints,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCReport {
    pub bounds: Vec<usize>,
    pub dqo: Verdict,
    pub dso: Verdict,
    pub axioms_side: bool,
    pub precohesion: PrecohesionReport,
    pub precohesive_side: bool,
    /// Each DSO subobject is ¬¬-dense and `Π` of its inclusion is epic.
    pub forward_ingredients: Check,
    pub agree: bool,
    pub mutation: Option<Mutation>,
}

fn mutated_dso(corpus: &CorpusIndex) -> Result<Verdict> {
    let counts: Vec<usize> = corpus
        .items
        .par_iter()
        .map(|x| -> Result<usize> {
            let mut n = 0;
            for_each_subobject(x, |s| {
                if is_decidable(&s.to_presheaf().0) {
                    n += 1;
                }
                ControlFlow::Continue(())
            });
            Ok(n)
        })
        .collect::<Result<_>>()?;
    Ok(if counts.iter().all(|&n| n == 1) {
        Verdict::HoldsAtBound
    } else {
        Verdict::Fails
    })
}

/// Both sides of "DQO ∧ DSO iff precohesive over the decidables", computed
/// independently at the corpus bound.
pub fn theorem_c_harness(corpus: &CorpusIndex, mutation: Option<Mutation>) -> Result<TheoremCReport> {
    let ns = check_ns(&corpus.base)?;
    if !ns.verdict.passed() {
        return Err(Error::PrereqFailed(describe_failure(&ns)));
    }
    let dqo = check_dqo_bounded(corpus)?.verdict;
    let dso = match mutation {
        None => check_dso_bounded(corpus)?.verdict,
        Some(Mutation::IgnorePoints) => mutated_dso(corpus)?,
    };
    let precohesion = check_precohesive(corpus)?;
    let mut forward = Check::new("DSO subobject ¬¬-dense with Π(inclusion) epic");
    if dso.passed() && mutation.is_none() {
        let results: Vec<bool> = corpus
            .items
            .par_iter()
            .map(|x| -> Result<bool> {
                let d = dso_candidates(x)?;
                let a = &d[0];
                let (inner, incl) = a.to_presheaf();
                let (pa, px) = (pi(&inner)?, pi(x)?);
                Ok(a.is_nn_dense() && pi_map(&incl, &pa, &px)?.is_epi())
            })
            .collect::<Result<_>>()?;
        for (i, ok) in results.into_iter().enumerate() {
            forward.record(ok, || format!("forward ingredients fail at {}", item(i)));
        }
    }
    let axioms_side = dqo.passed() && dso.passed();
    let precohesive_side = precohesion.precohesive;
    Ok(TheoremCReport {
        bounds: corpus.bounds.clone(),
        dqo,
        dso,
        axioms_side,
        precohesion,
        precohesive_side,
        forward_ingredients: forward,
        agree: axioms_side == precohesive_side,
        mutation,
    })
}

/// Runs the harness with and without the mutation; the self-test passes when
/// the mutant either flips both sides or is flagged as disagreeing.
pub fn theorem_c_self_test(corpus: &CorpusIndex) -> Result<bool> {
    let clean = theorem_c_harness(corpus, None)?;
    let mutant = theorem_c_harness(corpus, Some(Mutation::IgnorePoints))?;
    let flipped_both = clean.axioms_side != mutant.axioms_side
        && clean.precohesive_side != mutant.precohesive_side;
    let changed = clean.axioms_side != mutant.axioms_side
        || clean.precohesive_side != mutant.precohesive_side;
    Ok(!changed || flipped_both || !mutant.agree)
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremAbReport {
    pub bounds: Vec<usize>,
    /// `Π ⊣ f^*` by the bijection `h ↦ h ∘ q_X`.
    pub reflection: Check,
    pub products: Check,
    /// `Y^X` decidable for decidable `Y`.
    pub exponential_ideal: Check,
    /// Reflectivity at the bound implies DQO at the bound.
    pub reflective_implies_dqo: Check,
}

impl TheoremAbReport {
    pub fn checks(&self) -> [&Check; 4] {
        [
            &self.reflection,
            &self.products,
            &self.exponential_ideal,
            &self.reflective_implies_dqo,
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

pub fn theorem_ab_harness(corpus: &CorpusIndex) -> Result<TheoremAbReport> {
    let ns = check_ns(&corpus.base)?;
    if !ns.verdict.passed() {
        return Err(Error::PrereqFailed(describe_failure(&ns)));
    }
    let items = &corpus.items;
    let decidable: Vec<bool> = items.par_iter().map(is_decidable).collect();
    let n = items.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let pis: Vec<Pi> = items.par_iter().map(pi).collect::<Result<_>>()?;

    let results: Vec<(Option<bool>, Option<bool>)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<_> {
            if !decidable[j] {
                return Ok((None, None));
            }
            let (x, d) = (&items[i], &items[j]);
            let homs = HomSearch::new(x, d).collect()?;
            let via = HomSearch::new(&pis[i].object, d).count()?;
            let all = homs
                .iter()
                .all(|f| factor_through_epi(&pis[i].quotient, f).is_some());
            let refl = via == homs.len() && all;
            let exp = is_decidable(&exponential(x, d)?.object);
            Ok((Some(refl), Some(exp)))
        })
        .collect::<Result<_>>()?;

    let mut reflection = Check::new("Π ⊣ inclusion");
    let mut ideal = Check::new("decidables form an exponential ideal");
    for (&(i, j), (r, e)) in pairs.iter().zip(results) {
        if let Some(ok) = r {
            reflection.record(ok, || format!("Hom(ΠX, D) ≇ Hom(X, D) for X = {}, D = {}", item(i), item(j)));
        }
        if let Some(ok) = e {
            ideal.record(ok, || format!("Y^X not decidable for X = {}, Y = {}", item(i), item(j)));
        }
    }
    let products = product_checks(corpus)?;
    let mut implies = Check::new("reflective ⇒ DQO");
    if reflection.passed {
        let dqo = check_dqo_bounded(corpus)?;
        implies.record(dqo.verdict.passed(), || describe_failure(&dqo));
    }
    Ok(TheoremAbReport {
        bounds: corpus.bounds.clone(),
        reflection,
        products,
        exponential_ideal: ideal,
        reflective_implies_dqo: implies,
    })
}

#[cfg(test)]
mod tests;
