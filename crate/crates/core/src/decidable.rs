//! Decidable objects, the component quotient `Π`, and the NS/DQO/DSO checks.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::CorpusIndex;
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, ObjId};
use crate::limits::check_cap;
use crate::presheaf::{
    global_elements, pullback, quotient_by_classes, terminal, yoneda,
    HomSearch, NatTrans, Presheaf,
};
use crate::sublattice::{
    classify_by_two, complemented_subobjects, diagonal, for_each_subobject, is_nn_dense_arrow,
    Subobject,
};

/// `X` is decidable when its diagonal is complemented in `X × X`.
pub fn is_decidable(x: &Presheaf) -> bool {
    diagonal(x).1.is_complemented()
}

/// `X` is ¬¬-separated when its diagonal is ¬¬-closed.
pub fn is_separated(x: &Presheaf) -> bool {
    diagonal(x).1.is_nn_closed()
}

/// `X` is connected when it has exactly two complemented subobjects.
pub fn is_connected(x: &Presheaf) -> Result<bool> {
    Ok(complemented_subobjects(x)?.len() == 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Ns,
    Dqo,
    Dso,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Ns => "NS",
            Axiom::Dqo => "DQO",
            Axiom::Dso => "DSO",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Decided exactly.
    Holds,
    /// No counterexample among the enumerated objects.
    HoldsAtBound,
    Fails,
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Fails)
    }
}

#[derive(Debug, Clone)]
pub enum WitnessDetail {
    /// A representable `y(c)` without global elements.
    Representable(ObjId),
    /// Two or more congruences in `K(X)`.
    Congruences(Vec<Congruence>),
    /// Zero or several subobjects in `D(X)`.
    Subobjects(Vec<Subobject>),
}

#[derive(Debug, Clone)]
pub struct AxiomWitness {
    pub object: Presheaf,
    pub corpus_index: Option<usize>,
    pub detail: WitnessDetail,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub bounds: Option<Vec<usize>>,
    pub witness: Option<AxiomWitness>,
}

/// NS holds exactly when every representable has a global element: a point
/// `p` of `y(c)` sends `x ∈ X(c)` to the global element `b ↦ X(p_b)(x)`.
/// Among failing representables the witness is the first one inhabited at
/// every stage, falling back to the first failure.
pub fn check_ns(base: &Arc<FinCategory>) -> Result<AxiomReport> {
    let mut failing = Vec::new();
    for c in base.objects() {
        let y = yoneda(base, c)?;
        if HomSearch::new(&terminal(base), &y).first()?.is_none() {
            failing.push((c, y));
        }
    }
    let inhabited = failing
        .iter()
        .position(|(_, y)| y.base().objects().all(|b| y.size(b) > 0))
        .unwrap_or(0);
    let witness = (!failing.is_empty()).then(|| {
        let (c, y) = failing.swap_remove(inhabited);
        AxiomWitness {
            object: y,
            corpus_index: None,
            detail: WitnessDetail::Representable(c),
        }
    });
    Ok(AxiomReport {
        axiom: Axiom::Ns,
        verdict: if witness.is_some() { Verdict::Fails } else { Verdict::Holds },
        bounds: None,
        witness,
    })
}

/// First nonempty corpus object without global elements.
pub fn ns_counterexample(corpus: &CorpusIndex) -> Result<Option<usize>> {
    let flags: Vec<bool> = corpus
        .items
        .par_iter()
        .map(|x| -> Result<bool> {
            Ok(!x.is_empty() && HomSearch::new(&terminal(x.base()), x).first()?.is_none())
        })
        .collect::<Result<_>>()?;
    Ok(flags.iter().position(|&f| f))
}

/// `Π(X)` with the quotient `q: X ↠ Π(X)`.
#[derive(Debug, Clone)]
pub struct Pi {
    pub object: Presheaf,
    pub quotient: NatTrans,
    /// All arrows `X → 2`, in `Sub_c` order.
    pub maps_to_two: Vec<NatTrans>,
}

/// The image of `X → 2^n`, where the `n` coordinates are all arrows `X → 2`.
/// Elements are identified through their coordinate tuples.
pub fn pi(x: &Presheaf) -> Result<Pi> {
    let maps: Vec<NatTrans> = classify_by_two(x)?.into_iter().map(|(_, m)| m).collect();
    let base = x.base();
    let mut signatures: HashMap<Vec<u8>, usize> = HashMap::new();
    let class: Vec<Vec<usize>> = base
        .objects()
        .map(|c| {
            (0..x.size(c))
                .map(|e| {
                    let sig: Vec<u8> = maps.iter().map(|m| m.apply(c, e) as u8).collect();
                    let n = signatures.len();
                    *signatures.entry(sig).or_insert(n)
                })
                .collect()
        })
        .collect();
    let (object, quotient) = quotient_by_classes(x, &class)
        .map_err(|e| Error::PiNotFunctorial(e.to_string()))?;
    Ok(Pi {
        object,
        quotient,
        maps_to_two: maps,
    })
}

/// `Π(f): Π(X) → Π(Y)`, defined on representatives.
pub fn pi_map(f: &NatTrans, px: &Pi, py: &Pi) -> Result<NatTrans> {
    if px.quotient.dom() != f.dom() || py.quotient.dom() != f.cod() {
        return Err(Error::ShapeMismatch("Π(f) needs Π of both ends".into()));
    }
    let base = f.dom().base();
    let mut components = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut comp = vec![usize::MAX; px.object.size(c)];
        for e in 0..f.dom().size(c) {
            let q = px.quotient.apply(c, e);
            let v = py.quotient.apply(c, f.apply(c, e));
            if comp[q] == usize::MAX {
                comp[q] = v;
            } else if comp[q] != v {
                return Err(Error::PiNotFunctorial(format!(
                    "class {} has images {} and {v}",
                    px.object.label(c, q),
                    comp[q]
                )));
            }
        }
        components.push(comp);
    }
    NatTrans::new(px.object.clone(), py.object.clone(), components)
        .map_err(|e| Error::PiNotFunctorial(e.to_string()))
}

/// A stage-wise equivalence relation compatible with restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub ambient: Presheaf,
    /// `class[c][x]`: least member of the block of `x` at stage `c`.
    pub class: Vec<Vec<usize>>,
}

impl Congruence {
    pub fn diagonal(x: &Presheaf) -> Self {
        Congruence {
            ambient: x.clone(),
            class: x.base().objects().map(|c| (0..x.size(c)).collect()).collect(),
        }
    }

    pub fn total(x: &Presheaf) -> Self {
        Congruence {
            ambient: x.clone(),
            class: x.base().objects().map(|c| vec![0; x.size(c)]).collect(),
        }
    }

    /// The relation as a subobject of `X × X`.
    pub fn relation(&self) -> Subobject {
        let x = &self.ambient;
        let (prod, _) = diagonal(x);
        let parts = x
            .base()
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(prod.object.size(c));
                for a in 0..x.size(c) {
                    for b in 0..x.size(c) {
                        if self.class[c][a] == self.class[c][b] {
                            s.insert(prod.pair(c, a, b));
                        }
                    }
                }
                s
            })
            .collect();
        Subobject::new(prod.object, parts).expect("congruences are subfunctors")
    }

    pub fn is_diagonal(&self) -> bool {
        self.class
            .iter()
            .all(|cl| cl.iter().enumerate().all(|(i, &k)| i == k))
    }

    pub fn is_total(&self) -> bool {
        self.class.iter().all(|cl| cl.iter().all(|&k| k == 0))
    }

    pub fn le(&self, other: &Congruence) -> bool {
        self.class.iter().zip(&other.class).all(|(a, b)| {
            (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] != a[j] || b[i] == b[j]))
        })
    }

    pub fn describe(&self) -> String {
        if self.is_diagonal() {
            return "Δ".into();
        }
        if self.is_total() {
            return "total".into();
        }
        let base = self.ambient.base();
        let stages: Vec<String> = base
            .objects()
            .map(|c| {
                let mut blocks: Vec<Vec<&str>> = Vec::new();
                let mut index: HashMap<usize, usize> = HashMap::new();
                for (e, &k) in self.class[c].iter().enumerate() {
                    let n = blocks.len();
                    let b = *index.entry(k).or_insert(n);
                    if b == blocks.len() {
                        blocks.push(Vec::new());
                    }
                    blocks[b].push(self.ambient.label(c, e));
                }
                let blocks: Vec<String> =
                    blocks.iter().map(|b| format!("{{{}}}", b.join(","))).collect();
                format!("{}: {}", base.object_name(c), blocks.join(" "))
            })
            .collect();
        stages.join("; ")
    }
}

/// Set partitions of `0..n` as least-member class vectors, in
/// restricted-growth order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, reps: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for r in 0..reps.len() {
            cur.push(reps[r]);
            go(i + 1, n, cur, reps, out);
            cur.pop();
        }
        reps.push(i);
        cur.push(i);
        go(i + 1, n, cur, reps, out);
        cur.pop();
        reps.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// All congruences on `x`, finest first within each stage choice.
pub fn congruences(x: &Presheaf) -> Result<Vec<Congruence>> {
    let base = x.base();
    let per_stage: Vec<Vec<Vec<usize>>> = base.objects().map(|c| partitions(x.size(c))).collect();
    for p in &per_stage {
        check_cap("stage partitions", p.len())?;
    }
    let compatible = |chosen: &[Option<usize>], c: ObjId| {
        let pc = &per_stage[c][chosen[c].expect("chosen")];
        base.incoming(c).iter().all(|&f| {
            let b = base.dom(f);
            let Some(pb) = chosen[b].map(|i| &per_stage[b][i]) else {
                return true;
            };
            (0..x.size(c)).all(|e| pb[x.act(f, e)] == pb[x.act(f, pc[e])])
        }) && base.outgoing(c).iter().all(|&f| {
            let d = base.cod(f);
            let Some(pd) = chosen[d].map(|i| &per_stage[d][i]) else {
                return true;
            };
            (0..x.size(d)).all(|e| pc[x.act(f, e)] == pc[x.act(f, pd[e])])
        })
    };
    let mut out = Vec::new();
    let mut chosen = vec![None; base.num_objects()];
    fn go(
        c: ObjId,
        chosen: &mut Vec<Option<usize>>,
        per_stage: &[Vec<Vec<usize>>],
        compatible: &dyn Fn(&[Option<usize>], ObjId) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if c == chosen.len() {
            out.push(chosen.iter().map(|o| o.expect("chosen")).collect());
            return check_cap("congruences", out.len());
        }
        for i in 0..per_stage[c].len() {
            chosen[c] = Some(i);
            if compatible(chosen, c) {
                go(c + 1, chosen, per_stage, compatible, out)?;
            }
        }
        chosen[c] = None;
        Ok(())
    }
    let mut picks = Vec::new();
    go(0, &mut chosen, &per_stage, &compatible, &mut picks)?;
    for p in picks {
        out.push(Congruence {
            ambient: x.clone(),
            class: p.iter().enumerate().map(|(c, &i)| per_stage[c][i].clone()).collect(),
        });
    }
    Ok(out)
}

pub fn quotient(r: &Congruence) -> Result<(Presheaf, NatTrans)> {
    quotient_by_classes(&r.ambient, &r.class)
}

/// `K(X)`: congruences with a decidable quotient through which every arrow
/// `X → 2` factors.
pub fn dqo_candidates(x: &Presheaf) -> Result<Vec<Congruence>> {
    let p = pi(x)?;
    let kernel = Congruence {
        ambient: x.clone(),
        class: x
            .base()
            .objects()
            .map(|c| {
                let mut first = HashMap::new();
                (0..x.size(c))
                    .map(|e| *first.entry(p.quotient.apply(c, e)).or_insert(e))
                    .collect()
            })
            .collect(),
    };
    let mut out = Vec::new();
    for r in congruences(x)? {
        if !r.le(&kernel) {
            continue;
        }
        let (q, _) = quotient(&r)?;
        if is_decidable(&q) {
            out.push(r);
        }
    }
    Ok(out)
}

/// DQO at `X`: `K(X)` has exactly one element.
pub fn check_dqo(x: &Presheaf) -> Result<AxiomReport> {
    let k = dqo_candidates(x)?;
    let holds = k.len() == 1;
    Ok(AxiomReport {
        axiom: Axiom::Dqo,
        verdict: if holds { Verdict::Holds } else { Verdict::Fails },
        bounds: None,
        witness: (!holds).then(|| AxiomWitness {
            object: x.clone(),
            corpus_index: None,
            detail: WitnessDetail::Congruences(k),
        }),
    })
}

/// `D(X)`: decidable subobjects through which every global element factors.
pub fn dso_candidates(x: &Presheaf) -> Result<Vec<Subobject>> {
    let points = global_elements(x)?;
    let mut out = Vec::new();
    let mut failure = None;
    for_each_subobject(x, |s| {
        let through = points
            .iter()
            .all(|p| x.base().objects().all(|c| s.contains(c, p.apply(c, 0))));
        if through && is_decidable(&s.to_presheaf().0) {
            out.push(s.clone());
            if let Err(e) = check_cap("decidable subobjects", out.len()) {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// DSO at `X`: `D(X)` has exactly one element.
pub fn check_dso(x: &Presheaf) -> Result<AxiomReport> {
    let d = dso_candidates(x)?;
    let holds = d.len() == 1;
    Ok(AxiomReport {
        axiom: Axiom::Dso,
        verdict: if holds { Verdict::Holds } else { Verdict::Fails },
        bounds: None,
        witness: (!holds).then(|| AxiomWitness {
            object: x.clone(),
            corpus_index: None,
            detail: WitnessDetail::Subobjects(d),
        }),
    })
}

fn bounded(
    corpus: &CorpusIndex,
    axiom: Axiom,
    check: impl Fn(&Presheaf) -> Result<AxiomReport> + Sync,
) -> Result<AxiomReport> {
    let reports: Vec<AxiomReport> = corpus
        .items
        .par_iter()
        .map(&check)
        .collect::<Result<_>>()?;
    let first = reports.into_iter().enumerate().find(|(_, r)| r.verdict == Verdict::Fails);
    Ok(match first {
        Some((i, r)) => AxiomReport {
            axiom,
            verdict: Verdict::Fails,
            bounds: Some(corpus.bounds.clone()),
            witness: r.witness.map(|w| AxiomWitness {
                corpus_index: Some(i),
                ..w
            }),
        },
        None => AxiomReport {
            axiom,
            verdict: Verdict::HoldsAtBound,
            bounds: Some(corpus.bounds.clone()),
            witness: None,
        },
    })
}

pub fn check_dqo_bounded(corpus: &CorpusIndex) -> Result<AxiomReport> {
    bounded(corpus, Axiom::Dqo, check_dqo)
}

pub fn check_dso_bounded(corpus: &CorpusIndex) -> Result<AxiomReport> {
    bounded(corpus, Axiom::Dso, check_dso)
}

/// The ¬¬-separated reflection `m: X ↠ M(X)`, the quotient by `¬¬Δ`.
pub fn separated_reflection(x: &Presheaf) -> Result<(Presheaf, NatTrans)> {
    let (prod, delta) = diagonal(x);
    let closed = delta.nn_closure();
    let class: Vec<Vec<usize>> = x
        .base()
        .objects()
        .map(|c| {
            (0..x.size(c))
                .map(|a| {
                    (0..x.size(c))
                        .find(|&b| closed.contains(c, prod.pair(c, a, b)))
                        .expect("reflexive")
                })
                .collect()
        })
        .collect();
    quotient_by_classes(x, &class)
}

/// The fiber of `f: X → Y` over a global element `b: 1 → Y`.
pub fn fiber(f: &NatTrans, b: &NatTrans) -> Result<Presheaf> {
    Ok(pullback(f, b)?.object)
}

/// Both sides of the criterion "dec(E) is a topos iff Π(f) is epic for every
/// ¬¬-dense f", computed independently over a corpus.
#[derive(Debug, Clone)]
pub struct DecToposReport {
    pub ns: Verdict,
    pub dqo: Verdict,
    /// Every mono between decidable corpus objects is complemented.
    pub lhs: bool,
    /// For every ¬¬-dense corpus arrow `f`, `Π(f)` is epic.
    pub rhs: bool,
    /// `(domain index, codomain index, description)` of the first failure.
    pub lhs_witness: Option<(usize, usize, String)>,
    pub rhs_witness: Option<(usize, usize, String)>,
    pub monos_checked: usize,
    pub dense_arrows_checked: usize,
}

impl DecToposReport {
    pub fn agree(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn describe_arrow(f: &NatTrans) -> String {
    let base = f.dom().base();
    let parts: Vec<String> = base
        .objects()
        .map(|c| {
            let pairs: Vec<String> = (0..f.dom().size(c))
                .map(|e| format!("{}↦{}", f.dom().label(c, e), f.cod().label(c, f.apply(c, e))))
                .collect();
            format!("{}: {}", base.object_name(c), pairs.join(" "))
        })
        .collect();
    parts.join("; ")
}

pub fn dec_is_topos_check(corpus: &CorpusIndex) -> Result<DecToposReport> {
    let ns = check_ns(&corpus.base)?.verdict;
    let dqo = check_dqo_bounded(corpus)?.verdict;
    if !ns.passed() || !dqo.passed() {
        return Err(Error::PrereqFailed(format!(
            "NS {} / DQO {} at the bound",
            if ns.passed() { "holds" } else { "fails" },
            if dqo.passed() { "holds" } else { "fails" },
        )));
    }
    let items = &corpus.items;
    let decidable: Vec<bool> = items.par_iter().map(is_decidable).collect();
    let pis: Vec<Pi> = items.par_iter().map(pi).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..items.len())
        .flat_map(|i| (0..items.len()).map(move |j| (i, j)))
        .collect();

    type PairResult = (usize, Option<String>, usize, Option<String>);
    let results: Vec<PairResult> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<PairResult> {
            let (a, b) = (&items[i], &items[j]);
            let mut monos = 0;
            let mut lhs_fail = None;
            if decidable[i] && decidable[j] {
                HomSearch::new(a, b).injective().for_each(|comps| {
                    monos += 1;
                    let f = NatTrans::new_unchecked(a.clone(), b.clone(), comps.to_vec());
                    if !Subobject::image_of(&f).is_complemented() {
                        lhs_fail = Some(describe_arrow(&f));
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                })?;
            }
            let mut dense = 0;
            let mut rhs_fail = None;
            let mut err = None;
            HomSearch::new(a, b).for_each(|comps| {
                let f = NatTrans::new_unchecked(a.clone(), b.clone(), comps.to_vec());
                if is_nn_dense_arrow(&f) {
                    dense += 1;
                    match pi_map(&f, &pis[i], &pis[j]) {
                        Ok(pf) if pf.is_epi() => {}
                        Ok(_) => {
                            rhs_fail = Some(describe_arrow(&f));
                            return ControlFlow::Break(());
                        }
                        Err(e) => {
                            err = Some(e);
                            return ControlFlow::Break(());
                        }
                    }
                }
                ControlFlow::Continue(())
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            Ok((monos, lhs_fail, dense, rhs_fail))
        })
        .collect::<Result<_>>()?;

    let mut report = DecToposReport {
        ns,
        dqo,
        lhs: true,
        rhs: true,
        lhs_witness: None,
        rhs_witness: None,
        monos_checked: 0,
        dense_arrows_checked: 0,
    };
    for (&(i, j), (monos, lf, dense, rf)) in pairs.iter().zip(results) {
        report.monos_checked += monos;
        report.dense_arrows_checked += dense;
        if let (Some(w), None) = (lf, &report.lhs_witness) {
            report.lhs = false;
            report.lhs_witness = Some((i, j, w));
        }
        if let (Some(w), None) = (rf, &report.rhs_witness) {
            report.rhs = false;
            report.rhs_witness = Some((i, j, w));
        }
    }
    Ok(report)
}

/// Connected components of the underlying graph of a reflexive graph,
/// counted with union-find over vertices.
pub fn graph_components(x: &Presheaf) -> Result<usize> {
    let base = x.base();
    let v = base
        .object_id("V")
        .ok_or_else(|| Error::UnknownObject("V".into()))?;
    let e = base
        .object_id("E")
        .ok_or_else(|| Error::UnknownObject("E".into()))?;
    let s = base
        .morphism_id("s")
        .ok_or_else(|| Error::UnknownName("s".into()))?;
    let t = base
        .morphism_id("t")
        .ok_or_else(|| Error::UnknownName("t".into()))?;
    let mut parent: Vec<usize> = (0..x.size(v)).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for edge in 0..x.size(e) {
        let (a, b) = (find(&mut parent, x.act(s, edge)), find(&mut parent, x.act(t, edge)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    Ok((0..x.size(v)).filter(|&a| find(&mut parent, a) == a).count())
}

#[cfg(test)]
mod tests;
