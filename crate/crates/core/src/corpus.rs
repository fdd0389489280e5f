//! Enumeration of all presheaves with bounded stage sizes, up to isomorphism.
//!
//! Size vectors are visited in colexicographic order (the last object varies
//! slowest). Inside one size vector, the actions of a minimal generating set
//! of morphisms are assigned by backtracking; the remaining actions are
//! derived by composition and every assignment that stays consistent is
//! canonicalized by minimizing its action tables over all stage-wise
//! relabelings. Objects are listed by canonical code, so regeneration is
//! bit-identical.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::limits::check_cap;
use crate::presheaf::Presheaf;

#[derive(Debug, Clone)]
pub struct CorpusIndex {
    pub base: Arc<FinCategory>,
    pub bounds: Vec<usize>,
    pub items: Vec<Presheaf>,
    /// Number of isomorphism classes per nonempty size vector.
    pub counts: Vec<SizeCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeCount {
    pub sizes: Vec<usize>,
    pub count: usize,
}

impl CorpusIndex {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Presheaf> {
        self.items.iter()
    }

    /// Position of the object isomorphic to `x`, if it lies in the corpus.
    pub fn position_of(&self, x: &Presheaf) -> Option<usize> {
        let code = canonical_code(x);
        self.items
            .iter()
            .position(|y| y.sizes() == x.sizes() && canonical_code(y) == code)
    }
}

/// The same bound at every object.
pub fn uniform_bounds(base: &FinCategory, n: usize) -> Vec<usize> {
    vec![n; base.num_objects()]
}

/// A minimal set of non-identity morphisms whose composites give all others,
/// chosen greedily by dropping morphisms in descending id order.
pub fn generating_set(base: &FinCategory) -> Vec<MorId> {
    let mut gens: Vec<MorId> = base.non_identities().collect();
    let all: BTreeSet<MorId> = gens.iter().copied().collect();
    for f in all.iter().rev() {
        let trial: Vec<MorId> = gens.iter().copied().filter(|g| g != f).collect();
        if closure(base, &trial) == all {
            gens = trial;
        }
    }
    gens
}

fn closure(base: &FinCategory, gens: &[MorId]) -> BTreeSet<MorId> {
    let mut reached: BTreeSet<MorId> = gens.iter().copied().collect();
    loop {
        let mut new = Vec::new();
        for &g in &reached {
            for &f in &reached {
                if base.dom(g) == base.cod(f) {
                    let gf = base.compose(g, f).expect("composable");
                    if !base.is_identity(gf) && !reached.contains(&gf) {
                        new.push(gf);
                    }
                }
            }
        }
        if new.is_empty() {
            return reached;
        }
        reached.extend(new);
    }
}

/// Size vectors below `bounds`, colexicographic.
fn size_vectors(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut v = vec![0; bounds.len()];
    loop {
        out.push(v.clone());
        let mut i = 0;
        loop {
            if i == bounds.len() {
                return out;
            }
            v[i] += 1;
            if v[i] <= bounds[i] {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

struct Enumerator<'a> {
    base: &'a FinCategory,
    sizes: &'a [usize],
    gens: &'a [MorId],
    perms: Vec<Vec<Vec<usize>>>,
    tables: Vec<Option<Vec<usize>>>,
    found: BTreeSet<Vec<usize>>,
}

impl Enumerator<'_> {
    /// Derive composites from the assigned tables; false on a conflict.
    fn derive(&self, tables: &mut [Option<Vec<usize>>]) -> bool {
        let base = self.base;
        loop {
            let mut progress = false;
            for f in 0..base.num_morphisms() {
                let Some(xf) = tables[f].clone() else { continue };
                for &g in base.outgoing(base.cod(f)) {
                    let Some(xg) = &tables[g] else { continue };
                    let composed: Vec<usize> = xg.iter().map(|&y| xf[y]).collect();
                    let gf = base.compose(g, f).expect("composable");
                    match &tables[gf] {
                        Some(existing) => {
                            if *existing != composed {
                                return false;
                            }
                        }
                        None => {
                            tables[gf] = Some(composed);
                            progress = true;
                        }
                    }
                }
            }
            if !progress {
                return true;
            }
        }
    }

    fn search(&mut self, k: usize) {
        if k == self.gens.len() {
            let tables = self.tables.clone();
            if tables.iter().all(Option::is_some) {
                let tables: Vec<Vec<usize>> = tables.into_iter().map(Option::unwrap).collect();
                let code = self.canonical(&tables);
                self.found.insert(code);
            }
            return;
        }
        let f = self.gens[k];
        if self.tables[f].is_some() {
            // already forced by earlier generators; consistency was checked
            self.search(k + 1);
            return;
        }
        let (b, c) = (self.base.dom(f), self.base.cod(f));
        let (nb, nc) = (self.sizes[b], self.sizes[c]);
        if nc > 0 && nb == 0 {
            return;
        }
        let mut table = vec![0; nc];
        loop {
            let mut trial = self.tables.clone();
            trial[f] = Some(table.clone());
            if self.derive(&mut trial) {
                let saved = std::mem::replace(&mut self.tables, trial);
                self.search(k + 1);
                self.tables = saved;
            }
            let mut i = 0;
            loop {
                if i == nc {
                    return;
                }
                table[i] += 1;
                if table[i] < nb {
                    break;
                }
                table[i] = 0;
                i += 1;
            }
        }
    }

    fn canonical(&self, tables: &[Vec<usize>]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let mut choice = vec![0; self.base.num_objects()];
        loop {
            let code = relabel(self.base, self.gens, tables, |c| &self.perms[c][choice[c]]);
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return best.expect("at least one relabeling");
                }
                choice[i] += 1;
                if choice[i] < self.perms[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

/// Generator tables after relabeling every stage `c` by `perm(c)`.
fn relabel<'p>(
    base: &FinCategory,
    gens: &[MorId],
    tables: &[Vec<usize>],
    perm: impl Fn(ObjId) -> &'p Vec<usize>,
) -> Vec<usize> {
    let mut code = Vec::new();
    for &f in gens {
        let (b, c) = (base.dom(f), base.cod(f));
        let (pb, pc) = (perm(b), perm(c));
        let mut t = vec![0; tables[f].len()];
        for (x, &y) in tables[f].iter().enumerate() {
            t[pc[x]] = pb[y];
        }
        code.extend(t);
    }
    code
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out.sort();
    out
}

/// Canonical code of `x`: its generator tables, minimized over relabelings.
pub fn canonical_code(x: &Presheaf) -> Vec<usize> {
    let base = x.base();
    let gens = generating_set(base);
    let sizes = x.sizes();
    let tables: Vec<Vec<usize>> = (0..base.num_morphisms()).map(|f| x.action(f).to_vec()).collect();
    let e = Enumerator {
        base,
        sizes: &sizes,
        gens: &gens,
        perms: sizes.iter().map(|&n| permutations(n)).collect(),
        tables: Vec::new(),
        found: BTreeSet::new(),
    };
    let mut code = sizes.clone();
    code.extend(e.canonical(&tables));
    code
}

fn object_labels(base: &FinCategory, sizes: &[usize]) -> Vec<Vec<String>> {
    base.objects()
        .map(|c| {
            let prefix: String = base
                .object_name(c)
                .chars()
                .filter(|ch| ch.is_alphanumeric())
                .collect::<String>()
                .to_lowercase();
            let prefix = if prefix.is_empty() { "x".to_string() } else { prefix };
            (0..sizes[c]).map(|i| format!("{prefix}{i}")).collect()
        })
        .collect()
}

fn from_code(base: &Arc<FinCategory>, gens: &[MorId], sizes: &[usize], code: &[usize]) -> Presheaf {
    let mut pos = 0;
    let mut generators = Vec::with_capacity(gens.len());
    for &f in gens {
        let n = sizes[base.cod(f)];
        generators.push((f, code[pos..pos + n].to_vec()));
        pos += n;
    }
    Presheaf::from_generators(base.clone(), object_labels(base, sizes), &generators)
        .expect("enumerated tables are functorial")
}

/// All presheaves on `base` with `|X(c)| ≤ bounds[c]`, up to isomorphism.
pub fn enumerate_presheaves(base: &Arc<FinCategory>, bounds: &[usize]) -> Result<CorpusIndex> {
    if bounds.len() != base.num_objects() {
        return Err(Error::ShapeMismatch("one bound per object".into()));
    }
    for &b in bounds {
        check_cap("stage bound", b)?;
    }
    let gens = generating_set(base);
    let vectors = size_vectors(bounds);
    let per_vector: Vec<Vec<Vec<usize>>> = vectors
        .par_iter()
        .map(|sizes| {
            let mut e = Enumerator {
                base,
                sizes,
                gens: &gens,
                perms: sizes.iter().map(|&n| permutations(n)).collect(),
                tables: vec![None; base.num_morphisms()],
                found: BTreeSet::new(),
            };
            for c in base.objects() {
                e.tables[base.identity(c)] = Some((0..sizes[c]).collect());
            }
            e.search(0);
            e.found.into_iter().collect()
        })
        .collect();
    let mut items = Vec::new();
    let mut counts = Vec::new();
    for (sizes, codes) in vectors.iter().zip(per_vector) {
        if codes.is_empty() {
            continue;
        }
        counts.push(SizeCount {
            sizes: sizes.clone(),
            count: codes.len(),
        });
        for code in codes {
            items.push(from_code(base, &gens, sizes, &code));
        }
        check_cap("corpus", items.len())?;
    }
    Ok(CorpusIndex {
        base: base.clone(),
        bounds: bounds.to_vec(),
        items,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::fincat::catalog;
    use crate::presheaf::is_isomorphic;

    fn base(name: &str) -> Arc<FinCategory> {
        Arc::new(catalog(name).unwrap())
    }

    /// Independent recount: every total table family for every morphism,
    /// filtered by functoriality, deduplicated by pairwise isomorphism search.
    fn brute_force(base: &Arc<FinCategory>, bounds: &[usize]) -> Vec<Presheaf> {
        let mut reps: Vec<Presheaf> = Vec::new();
        let free: Vec<MorId> = base.non_identities().collect();
        for sizes in size_vectors(bounds) {
            if free
                .iter()
                .any(|&f| sizes[base.cod(f)] > 0 && sizes[base.dom(f)] == 0)
            {
                continue;
            }
            let mut tables: Vec<Vec<usize>> = (0..base.num_morphisms())
                .map(|f| {
                    if base.is_identity(f) {
                        (0..sizes[base.cod(f)]).collect()
                    } else {
                        vec![0; sizes[base.cod(f)]]
                    }
                })
                .collect();
            'next: loop {
                let labels = base
                    .objects()
                    .map(|c| (0..sizes[c]).map(|i| i.to_string()).collect())
                    .collect();
                if let Ok(p) = Presheaf::from_tables(base.clone(), labels, tables.clone()) {
                    if !reps.iter().any(|r| is_isomorphic(r, &p)) {
                        reps.push(p);
                    }
                }
                for &f in &free {
                    let nb = sizes[base.dom(f)];
                    for i in 0..tables[f].len() {
                        tables[f][i] += 1;
                        if tables[f][i] < nb {
                            continue 'next;
                        }
                        tables[f][i] = 0;
                    }
                }
                break;
            }
        }
        reps
    }

    #[test]
    fn point_base_bound_two() {
        let b = base("point");
        let corpus = enumerate_presheaves(&b, &[2]).unwrap();
        assert_eq!(corpus.items.iter().map(|p| p.sizes()).collect::<Vec<_>>(), [[0], [1], [2]]);
    }

    #[test]
    fn two_discrete_bound_one() {
        let b = base("two-discrete");
        let corpus = enumerate_presheaves(&b, &[1, 1]).unwrap();
        let sizes: Vec<Vec<usize>> = corpus.items.iter().map(|p| p.sizes()).collect();
        assert_eq!(sizes, [[0, 0], [1, 0], [0, 1], [1, 1]]);
    }

    #[test]
    fn refgraph_bound_two() {
        let b = base("refgraph");
        let corpus = enumerate_presheaves(&b, &[2, 2]).unwrap();
        let expected = ["0", "1", "L", "D2"].map(|n| builtin(&b, n).unwrap());
        assert_eq!(corpus.len(), 4);
        for (x, e) in corpus.items.iter().zip(&expected) {
            assert!(is_isomorphic(x, e));
        }
    }

    #[test]
    fn refgraph_bound_three() {
        let b = base("refgraph");
        let corpus = enumerate_presheaves(&b, &[3, 3]).unwrap();
        assert_eq!(corpus.len(), 8);
        for name in ["0", "1", "L", "L2", "D2", "P2", "D3"] {
            let x = builtin(&b, name).unwrap();
            assert!(corpus.position_of(&x).is_some(), "{name}");
        }
    }

    #[test]
    fn matches_brute_force_recount() {
        for (name, bounds) in [
            ("refgraph", vec![1, 2]),
            ("refgraph", vec![2, 3]),
            ("graph", vec![2, 2]),
            ("sierpinski", vec![2, 2]),
        ] {
            let b = base(name);
            let corpus = enumerate_presheaves(&b, &bounds).unwrap();
            let oracle = brute_force(&b, &bounds);
            assert_eq!(corpus.len(), oracle.len(), "{name} {bounds:?}");
            for x in &oracle {
                assert!(corpus.position_of(x).is_some());
            }
        }
    }

    #[test]
    fn regeneration_is_identical() {
        let b = base("graph");
        let a = enumerate_presheaves(&b, &[2, 2]).unwrap();
        let c = enumerate_presheaves(&b, &[2, 2]).unwrap();
        assert_eq!(a.items, c.items);
        assert_eq!(a.counts, c.counts);
    }

    #[test]
    fn generating_sets() {
        let r = base("refgraph");
        let names: Vec<&str> = generating_set(&r)
            .into_iter()
            .map(|f| r.morphism(f).name.as_str())
            .collect();
        assert_eq!(names, ["s", "t", "sigma"]);
        assert!(generating_set(&base("point")).is_empty());
    }

    #[test]
    fn canonical_code_is_an_isomorphism_invariant() {
        let b = base("refgraph");
        let p2 = builtin(&b, "P2").unwrap();
        let corpus = enumerate_presheaves(&b, &[3, 3]).unwrap();
        let i = corpus.position_of(&p2).unwrap();
        assert_eq!(canonical_code(&corpus.items[i]), canonical_code(&p2));
        assert_ne!(canonical_code(&p2), canonical_code(&builtin(&b, "D2").unwrap()));
    }
}
