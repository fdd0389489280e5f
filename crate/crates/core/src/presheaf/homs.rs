use std::ops::ControlFlow;

use super::{constructions::terminal, NatTrans, Presheaf};
use crate::error::Result;
use crate::fincat::ObjId;
use crate::limits::check_cap;

const UNSET: usize = usize::MAX;

/// Backtracking search over natural families `X → Y`.
///
/// Slots are the elements of `X`; assigning `x ↦ y` at stage `c` forces
/// `X(f)(x) ↦ Y(f)(y)` at every stage below `c`, so most of `X` is
/// determined by the elements at the stages with the most incoming arrows.
pub struct HomSearch<'a> {
    dom: &'a Presheaf,
    cod: &'a Presheaf,
    injective: bool,
}

struct State<'a> {
    dom: &'a Presheaf,
    cod: &'a Presheaf,
    injective: bool,
    val: Vec<Vec<usize>>,
    owner: Vec<Vec<usize>>,
    trail: Vec<(ObjId, usize)>,
    slots: Vec<(ObjId, usize)>,
}

impl State<'_> {
    fn assign(&mut self, c: ObjId, x: usize, y: usize) -> bool {
        let current = self.val[c][x];
        if current != UNSET {
            return current == y;
        }
        if self.injective {
            if self.owner[c][y] != UNSET {
                return false;
            }
            self.owner[c][y] = x;
        }
        self.val[c][x] = y;
        self.trail.push((c, x));
        let dom = self.dom;
        let cod = self.cod;
        let base = dom.base();
        for &f in base.incoming(c) {
            if base.is_identity(f) {
                continue;
            }
            let b = base.dom(f);
            if !self.assign(b, dom.act(f, x), cod.act(f, y)) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, x) = self.trail.pop().expect("trail");
            if self.injective {
                let y = self.val[c][x];
                self.owner[c][y] = UNSET;
            }
            self.val[c][x] = UNSET;
        }
    }

    fn search<F>(&mut self, next: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    {
        let mut next = next;
        while next < self.slots.len() && self.val[self.slots[next].0][self.slots[next].1] != UNSET
        {
            next += 1;
        }
        if next == self.slots.len() {
            return visit(&self.val);
        }
        let (c, x) = self.slots[next];
        for y in 0..self.cod.size(c) {
            let mark = self.trail.len();
            if self.assign(c, x, y) {
                self.search(next + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }
}

impl<'a> HomSearch<'a> {
    pub fn new(dom: &'a Presheaf, cod: &'a Presheaf) -> Self {
        Self {
            dom,
            cod,
            injective: false,
        }
    }

    /// Restrict to pointwise-injective families.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Visit every natural family in deterministic order until `visit` breaks.
    pub fn for_each<F>(&self, mut visit: F) -> Result<()>
    where
        F: FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    {
        self.dom.ensure_same_base(self.cod)?;
        let base = self.dom.base();
        if base
            .objects()
            .any(|c| self.dom.size(c) > 0 && self.cod.size(c) == 0)
        {
            return Ok(());
        }
        if self.injective && base.objects().any(|c| self.dom.size(c) > self.cod.size(c)) {
            return Ok(());
        }
        let mut order: Vec<ObjId> = base.objects().collect();
        order.sort_by_key(|&c| {
            let incoming = base.incoming(c).iter().filter(|&&f| !base.is_identity(f)).count();
            (std::cmp::Reverse(incoming), c)
        });
        let slots = order
            .iter()
            .flat_map(|&c| (0..self.dom.size(c)).map(move |x| (c, x)))
            .collect();
        let mut state = State {
            dom: self.dom,
            cod: self.cod,
            injective: self.injective,
            val: base.objects().map(|c| vec![UNSET; self.dom.size(c)]).collect(),
            owner: base.objects().map(|c| vec![UNSET; self.cod.size(c)]).collect(),
            trail: Vec::new(),
            slots,
        };
        let _ = state.search(0, &mut visit);
        Ok(())
    }

    pub fn first(&self) -> Result<Option<NatTrans>> {
        let mut found = None;
        self.for_each(|comps| {
            found = Some(comps.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found.map(|c| NatTrans::new_unchecked(self.dom.clone(), self.cod.clone(), c)))
    }

    pub fn count(&self) -> Result<usize> {
        let mut n = 0usize;
        self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        })?;
        Ok(n)
    }

    pub fn collect(&self) -> Result<Vec<NatTrans>> {
        let mut out = Vec::new();
        let mut over = None;
        self.for_each(|comps| {
            out.push(comps.to_vec());
            if let Err(e) = check_cap("hom-set", out.len()) {
                over = Some(e);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        if let Some(e) = over {
            return Err(e);
        }
        Ok(out
            .into_iter()
            .map(|c| NatTrans::new_unchecked(self.dom.clone(), self.cod.clone(), c))
            .collect())
    }
}

/// All natural transformations `X → Y`, duplicate-free, in search order.
pub fn nat_transformations(x: &Presheaf, y: &Presheaf) -> Result<Vec<NatTrans>> {
    HomSearch::new(x, y).collect()
}

pub fn count_homs(x: &Presheaf, y: &Presheaf) -> Result<usize> {
    HomSearch::new(x, y).count()
}

pub fn for_each_hom<F>(x: &Presheaf, y: &Presheaf, visit: F) -> Result<()>
where
    F: FnMut(&[Vec<usize>]) -> ControlFlow<()>,
{
    HomSearch::new(x, y).for_each(visit)
}

/// Arrows `1 → X`.
pub fn global_elements(x: &Presheaf) -> Result<Vec<NatTrans>> {
    nat_transformations(&terminal(x.base()), x)
}

/// A natural family of bijections `X → Y`, if one exists.
pub fn find_isomorphism(x: &Presheaf, y: &Presheaf) -> Option<NatTrans> {
    if !x.same_base(y) || x.sizes() != y.sizes() {
        return None;
    }
    HomSearch::new(x, y).injective().first().ok().flatten()
}

pub fn is_isomorphic(x: &Presheaf, y: &Presheaf) -> bool {
    find_isomorphism(x, y).is_some()
}

/// The Yoneda arrow `y(c) → X` of `e ∈ X(c)`; `yc` must be `yoneda(base, c)`.
pub fn yoneda_arrow(yc: &Presheaf, x: &Presheaf, c: ObjId, e: usize) -> NatTrans {
    let base = x.base();
    let components = base
        .objects()
        .map(|b| base.hom(b, c).into_iter().map(|g| x.act(g, e)).collect())
        .collect();
    NatTrans::new_unchecked(yc.clone(), x.clone(), components)
}

/// The unique `h` with `h ∘ q = f` for an epi `q`, when it exists.
pub fn factor_through_epi(q: &NatTrans, f: &NatTrans) -> Option<NatTrans> {
    if q.dom() != f.dom() {
        return None;
    }
    let base = q.dom().base();
    let mut components = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut comp = vec![UNSET; q.cod().size(c)];
        for e in 0..q.dom().size(c) {
            let slot = &mut comp[q.apply(c, e)];
            let v = f.apply(c, e);
            if *slot == UNSET {
                *slot = v;
            } else if *slot != v {
                return None;
            }
        }
        if comp.contains(&UNSET) {
            return None;
        }
        components.push(comp);
    }
    NatTrans::new(q.cod().clone(), f.cod().clone(), components).ok()
}

/// The unique `g` with `m ∘ g = f` for a mono `m`, when it exists.
pub fn factor_through_mono(m: &NatTrans, f: &NatTrans) -> Option<NatTrans> {
    if m.cod() != f.cod() {
        return None;
    }
    let base = m.dom().base();
    let mut components = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut pre = vec![UNSET; m.cod().size(c)];
        for a in 0..m.dom().size(c) {
            pre[m.apply(c, a)] = a;
        }
        let comp: Vec<usize> = (0..f.dom().size(c)).map(|e| pre[f.apply(c, e)]).collect();
        if comp.contains(&UNSET) {
            return None;
        }
        components.push(comp);
    }
    Some(NatTrans::new_unchecked(f.dom().clone(), m.dom().clone(), components))
}
