//! The Heyting algebra `Sub(X)` of subfunctors of a presheaf.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::limits::check_cap;
use crate::presheaf::{image_factorization, product, restrict_to, two, NatTrans, Presheaf, Product};

/// A subfunctor of `ambient`, stored as one bit set per stage.
#[derive(Clone)]
pub struct Subobject {
    ambient: Presheaf,
    parts: Vec<FixedBitSet>,
}

impl PartialEq for Subobject {
    fn eq(&self, other: &Self) -> bool {
        self.parts == other.parts && self.ambient == other.ambient
    }
}

impl Eq for Subobject {}

impl std::hash::Hash for Subobject {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.parts.hash(state);
    }
}

impl PartialOrd for Subobject {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subobject {
    fn cmp(&self, other: &Self) -> Ordering {
        self.parts.cmp(&other.parts)
    }
}

impl fmt::Debug for Subobject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.ambient.base();
        let mut m = f.debug_map();
        for c in base.objects() {
            let elems: Vec<&str> = self.parts[c]
                .ones()
                .map(|x| self.ambient.label(c, x))
                .collect();
            m.entry(&base.object_name(c), &elems);
        }
        m.finish()
    }
}

impl Subobject {
    /// Validate that `parts` is closed under restriction.
    pub fn new(ambient: Presheaf, parts: Vec<FixedBitSet>) -> Result<Self> {
        let base = ambient.base().clone();
        if parts.len() != base.num_objects()
            || base.objects().any(|c| parts[c].len() != ambient.size(c))
        {
            return Err(Error::ShapeMismatch("one bit set per stage".into()));
        }
        for f in 0..base.num_morphisms() {
            let (b, c) = (base.dom(f), base.cod(f));
            if parts[c].ones().any(|x| !parts[b].contains(ambient.act(f, x))) {
                return Err(Error::NotSubfunctor(base.morphism(f).name.clone()));
            }
        }
        Ok(Subobject { ambient, parts })
    }

    pub(crate) fn new_unchecked(ambient: Presheaf, parts: Vec<FixedBitSet>) -> Self {
        Subobject { ambient, parts }
    }

    /// Build from per-stage element lists.
    pub fn from_elements(ambient: &Presheaf, elems: &[Vec<usize>]) -> Result<Self> {
        let parts = ambient
            .base()
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(ambient.size(c));
                for &x in elems.get(c).map(Vec::as_slice).unwrap_or(&[]) {
                    if x >= ambient.size(c) {
                        return Err(Error::ShapeMismatch(format!("element {x} out of range")));
                    }
                    s.insert(x);
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        Subobject::new(ambient.clone(), parts)
    }

    pub fn top(x: &Presheaf) -> Self {
        let parts = x
            .base()
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(x.size(c));
                s.insert_range(..);
                s
            })
            .collect();
        Subobject::new_unchecked(x.clone(), parts)
    }

    pub fn bottom(x: &Presheaf) -> Self {
        let parts = x
            .base()
            .objects()
            .map(|c| FixedBitSet::with_capacity(x.size(c)))
            .collect();
        Subobject::new_unchecked(x.clone(), parts)
    }

    /// The least subfunctor containing the given elements.
    pub fn generated_by(x: &Presheaf, elems: &[(ObjId, usize)]) -> Self {
        let mut s = Subobject::bottom(x);
        let base = x.base();
        for &(c, e) in elems {
            for &f in base.incoming(c) {
                s.parts[base.dom(f)].insert(x.act(f, e));
            }
        }
        s
    }

    /// Image of an arrow as a subobject of its codomain.
    pub fn image_of(f: &NatTrans) -> Self {
        let y = f.cod();
        let parts = y
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
        Subobject::new_unchecked(y.clone(), parts)
    }

    /// Inverse image along `f: W → X`.
    pub fn pullback_along(&self, f: &NatTrans) -> Result<Self> {
        if f.cod() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        let w = f.dom();
        let parts = w
            .base()
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(w.size(c));
                for e in 0..w.size(c) {
                    s.set(e, self.parts[c].contains(f.apply(c, e)));
                }
                s
            })
            .collect();
        Ok(Subobject::new_unchecked(w.clone(), parts))
    }

    pub fn ambient(&self) -> &Presheaf {
        &self.ambient
    }

    pub fn parts(&self) -> &[FixedBitSet] {
        &self.parts
    }

    pub fn part(&self, c: ObjId) -> &FixedBitSet {
        &self.parts[c]
    }

    #[inline]
    pub fn contains(&self, c: ObjId, x: usize) -> bool {
        self.parts[c].contains(x)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.count_ones(..)).collect()
    }

    pub fn is_top(&self) -> bool {
        self.parts.iter().all(|p| p.count_ones(..) == p.len())
    }

    pub fn is_bottom(&self) -> bool {
        self.parts.iter().all(|p| p.count_ones(..) == 0)
    }

    fn check_ambient(&self, other: &Subobject) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    pub fn le(&self, other: &Subobject) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.parts.iter().zip(&other.parts).all(|(a, b)| a.is_subset(b)))
    }

    pub fn meet(&self, other: &Subobject) -> Result<Subobject> {
        self.check_ambient(other)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.intersection(b).collect())
            .collect::<Vec<FixedBitSet>>();
        Ok(Subobject::new_unchecked(self.ambient.clone(), self.resize(parts)))
    }

    pub fn join(&self, other: &Subobject) -> Result<Subobject> {
        self.check_ambient(other)?;
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.union(b).collect())
            .collect::<Vec<FixedBitSet>>();
        Ok(Subobject::new_unchecked(self.ambient.clone(), self.resize(parts)))
    }

    fn resize(&self, mut parts: Vec<FixedBitSet>) -> Vec<FixedBitSet> {
        for (c, p) in parts.iter_mut().enumerate() {
            p.grow(self.ambient.size(c));
        }
        parts
    }

    /// `(S ⇒ T)(c) = {x : ∀f: b → c, X(f)(x) ∈ S(b) ⇒ X(f)(x) ∈ T(b)}`.
    pub fn implication(&self, other: &Subobject) -> Result<Subobject> {
        self.check_ambient(other)?;
        let x = &self.ambient;
        let base = x.base();
        let parts = base
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(x.size(c));
                for e in 0..x.size(c) {
                    let ok = base.incoming(c).iter().all(|&f| {
                        let b = base.dom(f);
                        let r = x.act(f, e);
                        !self.parts[b].contains(r) || other.parts[b].contains(r)
                    });
                    s.set(e, ok);
                }
                s
            })
            .collect();
        Ok(Subobject::new_unchecked(x.clone(), parts))
    }

    /// Pseudocomplement `S ⇒ ∅`.
    pub fn negation(&self) -> Subobject {
        self.implication(&Subobject::bottom(&self.ambient))
            .expect("same ambient")
    }

    pub fn is_complemented(&self) -> bool {
        self.join(&self.negation()).expect("same ambient").is_top()
    }

    pub fn nn_closure(&self) -> Subobject {
        self.negation().negation()
    }

    pub fn is_nn_dense(&self) -> bool {
        self.nn_closure().is_top()
    }

    pub fn is_nn_closed(&self) -> bool {
        self.nn_closure() == *self
    }

    /// The subobject as a presheaf in its own right, with its inclusion.
    pub fn to_presheaf(&self) -> (Presheaf, NatTrans) {
        restrict_to(&self.ambient, &self.parts)
    }

    /// Per-stage element lists.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        self.parts.iter().map(|p| p.ones().collect()).collect()
    }
}

/// Element-level adjacency used by the enumerators: for each element, every
/// restriction of it and every element restricting to it.
struct Adjacency {
    offset: Vec<usize>,
    down: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
}

impl Adjacency {
    fn new(x: &Presheaf) -> Self {
        let base = x.base();
        let mut offset = Vec::with_capacity(base.num_objects() + 1);
        let mut total = 0;
        for c in base.objects() {
            offset.push(total);
            total += x.size(c);
        }
        offset.push(total);
        let mut down = vec![Vec::new(); total];
        let mut up = vec![Vec::new(); total];
        for c in base.objects() {
            for e in 0..x.size(c) {
                let i = offset[c] + e;
                for &f in base.incoming(c) {
                    let j = offset[base.dom(f)] + x.act(f, e);
                    if j != i {
                        down[i].push(j);
                        up[j].push(i);
                    }
                }
            }
        }
        for l in down.iter_mut().chain(up.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
        Adjacency { offset, down, up }
    }

    fn total(&self) -> usize {
        *self.offset.last().unwrap_or(&0)
    }

    fn to_parts(&self, x: &Presheaf, member: impl Fn(usize) -> bool) -> Vec<FixedBitSet> {
        x.base()
            .objects()
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(x.size(c));
                for e in 0..x.size(c) {
                    s.set(e, member(self.offset[c] + e));
                }
                s
            })
            .collect()
    }
}

/// Visit every subfunctor of `x` in deterministic order.
pub fn for_each_subobject<F>(x: &Presheaf, mut visit: F)
where
    F: FnMut(&Subobject) -> ControlFlow<()>,
{
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Free,
        In,
        Out,
    }
    let adj = Adjacency::new(x);
    let n = adj.total();
    let mut mark = vec![Mark::Free; n];
    let mut trail: Vec<usize> = Vec::new();

    fn set(
        adj: &Adjacency,
        mark: &mut [Mark],
        trail: &mut Vec<usize>,
        i: usize,
        m: Mark,
    ) -> bool {
        let related = if m == Mark::In { &adj.down[i] } else { &adj.up[i] };
        for &j in std::iter::once(&i).chain(related) {
            match mark[j] {
                Mark::Free => {
                    mark[j] = m;
                    trail.push(j);
                }
                current if current != m => return false,
                _ => {}
            }
        }
        true
    }

    fn go<F: FnMut(&Subobject) -> ControlFlow<()>>(
        x: &Presheaf,
        adj: &Adjacency,
        mark: &mut Vec<Mark>,
        trail: &mut Vec<usize>,
        next: usize,
        visit: &mut F,
    ) -> ControlFlow<()> {
        let mut i = next;
        while i < mark.len() && mark[i] != Mark::Free {
            i += 1;
        }
        if i == mark.len() {
            let parts = adj.to_parts(x, |j| mark[j] == Mark::In);
            return visit(&Subobject::new_unchecked(x.clone(), parts));
        }
        for m in [Mark::Out, Mark::In] {
            let t = trail.len();
            if set(adj, mark, trail, i, m) {
                go(x, adj, mark, trail, i + 1, visit)?;
            }
            while trail.len() > t {
                let j = trail.pop().expect("trail");
                mark[j] = Mark::Free;
            }
        }
        ControlFlow::Continue(())
    }

    let _ = go(x, &adj, &mut mark, &mut trail, 0, &mut visit);
}

/// All subfunctors of `x`, duplicate-free.
pub fn subobjects(x: &Presheaf) -> Result<Vec<Subobject>> {
    let mut out = Vec::new();
    let mut over = None;
    for_each_subobject(x, |s| {
        out.push(s.clone());
        if let Err(e) = check_cap("subobject lattice", out.len()) {
            over = Some(e);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    match over {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Connected pieces of the category of elements of `x`, as lists of
/// flattened element indices. Complemented subobjects are exactly unions of
/// these pieces.
fn element_components(adj: &Adjacency) -> Vec<usize> {
    let n = adj.total();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = count;
        while let Some(i) = stack.pop() {
            for &j in adj.down[i].iter().chain(&adj.up[i]) {
                if comp[j] == usize::MAX {
                    comp[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    comp
}

/// `Sub_c(X)`: unions of element components, in increasing bitmask order.
pub fn complemented_subobjects(x: &Presheaf) -> Result<Vec<Subobject>> {
    let adj = Adjacency::new(x);
    let comp = element_components(&adj);
    let k = comp.iter().copied().filter(|&c| c != usize::MAX).max().map_or(0, |m| m + 1);
    if k >= usize::BITS as usize - 1 {
        return Err(Error::SizeCap {
            what: "complemented subobjects".into(),
            size: usize::MAX,
            cap: crate::limits::size_cap(),
        });
    }
    check_cap("complemented subobjects", 1usize << k)?;
    Ok((0..1usize << k)
        .map(|mask| {
            let parts = adj.to_parts(x, |j| mask >> comp[j] & 1 == 1);
            Subobject::new_unchecked(x.clone(), parts)
        })
        .collect())
}

/// The arrow `X → 2` sending `s` to the first injection and its complement to
/// the second.
pub fn characteristic_two(s: &Subobject) -> Result<NatTrans> {
    if !s.is_complemented() {
        return Err(Error::ShapeMismatch(
            "only complemented subobjects are classified by 2".into(),
        ));
    }
    let x = s.ambient();
    let components = x
        .base()
        .objects()
        .map(|c| {
            (0..x.size(c))
                .map(|e| if s.contains(c, e) { 0 } else { 1 })
                .collect()
        })
        .collect();
    Ok(NatTrans::new_unchecked(x.clone(), two(x.base()), components))
}

/// The bijection `Sub_c(X) ≅ Hom(X, 2)`, listed in `Sub_c` order.
pub fn classify_by_two(x: &Presheaf) -> Result<Vec<(Subobject, NatTrans)>> {
    complemented_subobjects(x)?
        .into_iter()
        .map(|s| {
            let chi = characteristic_two(&s)?;
            Ok((s, chi))
        })
        .collect()
}

/// An arrow is ¬¬-dense when the ¬¬-closure of its image is the whole codomain.
pub fn is_nn_dense_arrow(f: &NatTrans) -> bool {
    let image = image_factorization(f);
    Subobject::image_of(&image.mono).is_nn_dense()
}

/// `Δ_X ↣ X × X`.
pub fn diagonal(x: &Presheaf) -> (Product, Subobject) {
    let prod = product(x, x).expect("same base");
    let parts = x
        .base()
        .objects()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(prod.object.size(c));
            for e in 0..x.size(c) {
                s.insert(prod.pair(c, e, e));
            }
            s
        })
        .collect();
    let diag = Subobject::new_unchecked(prod.object.clone(), parts);
    (prod, diag)
}

/// The graph `|f| ↣ X × Y` of an arrow.
pub fn graph_subobject(f: &NatTrans, prod: &Product) -> Subobject {
    let x = f.dom();
    let parts = x
        .base()
        .objects()
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(prod.object.size(c));
            for e in 0..x.size(c) {
                s.insert(prod.pair(c, e, f.apply(c, e)));
            }
            s
        })
        .collect();
    Subobject::new_unchecked(prod.object.clone(), parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::fincat::catalog;
    use crate::presheaf::{nat_transformations, terminal};
    use std::sync::Arc;

    fn base(name: &str) -> Arc<crate::fincat::FinCategory> {
        Arc::new(catalog(name).unwrap())
    }

    fn obj(b: &str, name: &str) -> Presheaf {
        builtin(&base(b), name).unwrap()
    }

    #[test]
    fn powerset_on_point() {
        let x = obj("point", "set(2)");
        assert_eq!(subobjects(&x).unwrap().len(), 4);
        assert_eq!(complemented_subobjects(&x).unwrap().len(), 4);
    }

    // Brute force: vertex sets W ⊆ {0,1} with their loops, plus `a` when both
    // endpoints are present. 1 + 1 + 1 + 2 = 5.
    #[test]
    fn p2_subobject_count() {
        let p2 = obj("refgraph", "P2");
        let all = subobjects(&p2).unwrap();
        assert_eq!(all.len(), 5);
        let mut brute = 0;
        let sizes = p2.sizes();
        let n = sizes[0] + sizes[1];
        for mask in 0u32..1 << n {
            let elems = vec![
                (0..sizes[0]).filter(|&i| mask >> i & 1 == 1).collect(),
                (0..sizes[1]).filter(|&i| mask >> (sizes[0] + i) & 1 == 1).collect(),
            ];
            if Subobject::from_elements(&p2, &elems).is_ok() {
                brute += 1;
            }
        }
        assert_eq!(brute, 5);
    }

    #[test]
    fn empty_has_one_subobject() {
        let z = obj("refgraph", "0");
        assert_eq!(subobjects(&z).unwrap().len(), 1);
    }

    #[test]
    fn negation_of_extremes() {
        let p2 = obj("refgraph", "P2");
        assert!(Subobject::bottom(&p2).negation().is_top());
        assert!(Subobject::top(&p2).negation().is_bottom());
    }

    #[test]
    fn negation_of_vertex_in_p2() {
        let p2 = obj("refgraph", "P2");
        let (v, e) = (0, 1);
        let s = Subobject::generated_by(&p2, &[(v, p2.index_of(v, "0").unwrap())]);
        let n = s.negation();
        let names = |c: usize| -> Vec<String> {
            n.part(c).ones().map(|i| p2.label(c, i).to_string()).collect()
        };
        assert_eq!(names(v), vec!["1"]);
        assert_eq!(names(e), vec!["l1"]);
    }

    #[test]
    fn heyting_adjunction_on_p2() {
        let p2 = obj("refgraph", "P2");
        let all = subobjects(&p2).unwrap();
        for s in &all {
            for t in &all {
                for u in &all {
                    let lhs = s.meet(t).unwrap().le(u).unwrap();
                    let rhs = t.le(&s.implication(u).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn sub_c_counts() {
        assert_eq!(complemented_subobjects(&obj("two-discrete", "1")).unwrap().len(), 4);
        assert_eq!(complemented_subobjects(&obj("refgraph", "P2")).unwrap().len(), 2);
    }

    #[test]
    fn complemented_matches_filter() {
        for (b, name) in [("refgraph", "P2"), ("refgraph", "L"), ("graph", "A1"), ("sierpinski", "y(0)")] {
            let x = obj(b, name);
            let filtered: Vec<_> = subobjects(&x)
                .unwrap()
                .into_iter()
                .filter(Subobject::is_complemented)
                .collect();
            let mut direct = complemented_subobjects(&x).unwrap();
            direct.sort();
            let mut filtered = filtered;
            filtered.sort();
            assert_eq!(direct, filtered, "{b}/{name}");
        }
    }

    #[test]
    fn classify_by_two_is_bijective() {
        for (b, name, n) in [("point", "1", 2), ("refgraph", "P2", 2), ("refgraph", "2", 4)] {
            let x = obj(b, name);
            let pairs = classify_by_two(&x).unwrap();
            let homs = nat_transformations(&x, &two(x.base())).unwrap();
            assert_eq!(pairs.len(), n);
            assert_eq!(homs.len(), n);
            for h in &homs {
                assert_eq!(pairs.iter().filter(|(_, chi)| chi.same_arrow(h)).count(), 1);
            }
        }
    }

    #[test]
    fn loop_vertex_is_dense_in_l() {
        let l = obj("refgraph", "L");
        let v = Subobject::generated_by(&l, &[(0, 0)]);
        assert!(!v.is_top());
        assert!(v.is_nn_dense());
    }

    #[test]
    fn complemented_is_nn_closed() {
        let x = obj("refgraph", "D2");
        for s in complemented_subobjects(&x).unwrap() {
            assert!(s.is_nn_closed());
        }
    }

    #[test]
    fn empty_dense_only_in_zero() {
        let z = obj("refgraph", "0");
        assert!(Subobject::bottom(&z).is_nn_dense());
        let one = terminal(z.base());
        assert!(!Subobject::bottom(&one).is_nn_dense());
    }

    #[test]
    fn not_subfunctor() {
        let p2 = obj("refgraph", "P2");
        // the edge `a` without its endpoints
        let a = p2.index_of(1, "a").unwrap();
        assert!(matches!(
            Subobject::from_elements(&p2, &[vec![], vec![a]]),
            Err(Error::NotSubfunctor(_))
        ));
    }
}
