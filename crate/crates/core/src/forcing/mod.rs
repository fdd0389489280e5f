//! Kripke–Joyal forcing for the internal language of a presheaf topos.
//!
//! A [`Signature`] names the sorts (presheaves, power objects, binary
//! products), arrows and predicates (subobjects) a formula may mention.
//! Formulas are compiled against a signature and a list of free variables;
//! [`Query::forces`] then evaluates them stage by stage with the presheaf
//! clauses:
//!
//! * atoms, `∧`, `∨` and `∃` are decided at the current stage;
//! * `φ ⇒ ψ` and `¬φ` quantify over every arrow `f: b → c`;
//! * `∀y: Y` quantifies over every `f: b → c` and every `y ∈ Y(b)`.

mod parse;
mod pneumo;

pub use parse::parse_formula;
pub use pneumo::{
    arrow_of_graph, graph_of, has_pneumoconnected_fibers, is_graph, pc_object, pneumo_formula,
    pneumo_validity, PcObject,
};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::presheaf::{NatTrans, PowerObject, Presheaf, Product};
use crate::sublattice::Subobject;

pub type SortId = usize;

#[derive(Debug, Clone)]
enum SortKind {
    Plain,
    Power { of: SortId, power: Arc<PowerObject> },
    Product { left: SortId, right: SortId, product: Product },
}

#[derive(Debug, Clone)]
struct Sort {
    name: String,
    object: Presheaf,
    kind: SortKind,
}

#[derive(Debug, Clone)]
struct Arrow {
    name: String,
    dom: SortId,
    cod: SortId,
    map: NatTrans,
}

#[derive(Debug, Clone)]
struct Predicate {
    name: String,
    sort: SortId,
    sub: Subobject,
}

/// Sorts, arrows and predicates available to formulas.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: Vec<Sort>,
    arrows: Vec<Arrow>,
    predicates: Vec<Predicate>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_sort(&mut self, name: &str, object: Presheaf, kind: SortKind) -> Result<SortId> {
        if self.sort_id(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if let Some(first) = self.sorts.first() {
            first.object.ensure_same_base(&object)?;
        }
        self.sorts.push(Sort {
            name: name.to_string(),
            object,
            kind,
        });
        Ok(self.sorts.len() - 1)
    }

    pub fn add_sort(&mut self, name: &str, object: &Presheaf) -> Result<SortId> {
        self.push_sort(name, object.clone(), SortKind::Plain)
    }

    /// A power sort over `of`, computed from its presheaf.
    pub fn add_power(&mut self, name: &str, of: SortId) -> Result<SortId> {
        let power = crate::presheaf::power_object(&self.sorts[of].object)?;
        self.add_power_with(name, of, Arc::new(power))
    }

    pub fn add_power_with(
        &mut self,
        name: &str,
        of: SortId,
        power: Arc<PowerObject>,
    ) -> Result<SortId> {
        if power.elem != self.sorts[of].object {
            return Err(Error::SortError(format!(
                "power object for `{name}` is not over `{}`",
                self.sorts[of].name
            )));
        }
        let object = power.object.clone();
        self.push_sort(name, object, SortKind::Power { of, power })
    }

    pub fn add_product(&mut self, name: &str, left: SortId, right: SortId) -> Result<SortId> {
        let product = crate::presheaf::product(&self.sorts[left].object, &self.sorts[right].object)?;
        let object = product.object.clone();
        self.push_sort(
            name,
            object,
            SortKind::Product {
                left,
                right,
                product,
            },
        )
    }

    pub fn add_arrow(&mut self, name: &str, dom: SortId, cod: SortId, map: &NatTrans) -> Result<()> {
        if self.arrows.iter().any(|a| a.name == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if map.dom() != &self.sorts[dom].object || map.cod() != &self.sorts[cod].object {
            return Err(Error::SortError(format!(
                "arrow `{name}` does not go from `{}` to `{}`",
                self.sorts[dom].name, self.sorts[cod].name
            )));
        }
        self.arrows.push(Arrow {
            name: name.to_string(),
            dom,
            cod,
            map: map.clone(),
        });
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, sort: SortId, sub: &Subobject) -> Result<()> {
        if self.predicates.iter().any(|p| p.name == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if sub.ambient() != &self.sorts[sort].object {
            return Err(Error::SortError(format!(
                "predicate `{name}` is not a subobject of `{}`",
                self.sorts[sort].name
            )));
        }
        self.predicates.push(Predicate {
            name: name.to_string(),
            sort,
            sub: sub.clone(),
        });
        Ok(())
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s.name == name)
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s].name
    }

    pub fn sort_object(&self, s: SortId) -> &Presheaf {
        &self.sorts[s].object
    }

    pub fn has_predicate(&self, name: &str) -> bool {
        self.predicates.iter().any(|p| p.name == name)
    }

    fn product_of(&self, left: SortId, right: SortId) -> Option<SortId> {
        self.sorts.iter().position(|s| {
            matches!(s.kind, SortKind::Product { left: l, right: r, .. } if l == left && r == right)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Application of a named arrow.
    App(String, Box<Term>),
    Pair(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn app(arrow: &str, t: Term) -> Self {
        Term::App(arrow.to_string(), Box::new(t))
    }

    pub fn pair(a: Term, b: Term) -> Self {
        Term::Pair(Box::new(a), Box::new(b))
    }

    fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, t) => t.free_vars(out),
            Term::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Var(_) => self.clone(),
            Term::App(a, t) => Term::App(a.clone(), Box::new(t.rename(from, to))),
            Term::Pair(a, b) => Term::pair(a.rename(from, to), b.rename(from, to)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(a, t) => write!(f, "{a}({t})"),
            Term::Pair(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// `t ∈ u` for `u` of a power sort over the sort of `t`.
    Member(Term, Term),
    /// `t ∈ S` for a named predicate `S`.
    Holds(Term, String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(String, SortId, Box<Formula>),
    Exists(String, SortId, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn member(t: Term, u: Term) -> Self {
        Formula::Member(t, u)
    }

    pub fn holds(t: Term, pred: &str) -> Self {
        Formula::Holds(t, pred.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn forall(v: &str, sort: SortId, body: Formula) -> Self {
        Formula::Forall(v.to_string(), sort, Box::new(body))
    }

    pub fn exists(v: &str, sort: SortId, body: Formula) -> Self {
        Formula::Exists(v.to_string(), sort, Box::new(body))
    }

    /// `∃!v φ`, as `∃v (φ ∧ ∀v' (φ[v'/v] ⇒ v = v'))`.
    pub fn exists_unique(v: &str, sort: SortId, body: Formula) -> Self {
        let mut fresh = format!("{v}'");
        let used = body.all_names();
        while used.contains(&fresh) {
            fresh.push('\'');
        }
        let renamed = body.rename(v, &fresh);
        let unique = Formula::forall(
            &fresh,
            sort,
            Formula::implies(renamed, Formula::eq(Term::var(v), Term::var(&fresh))),
        );
        Formula::exists(v, sort, Formula::and(body, unique))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Member(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Formula::Holds(t, _) => t.free_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Not(a) => a.collect_free(out),
            Formula::Forall(v, _, body) | Formula::Exists(v, _, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Member(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Formula::Holds(t, _) => t.free_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Not(a) => a.collect_names(out),
            Formula::Forall(v, _, body) | Formula::Exists(v, _, body) => {
                out.insert(v.clone());
                body.collect_names(out);
            }
        }
    }

    /// Replace free occurrences of the variable `from` by `to`.
    fn rename(&self, from: &str, to: &str) -> Formula {
        let r = |t: &Term| t.rename(from, to);
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(r(a), r(b)),
            Formula::Member(a, b) => Formula::Member(r(a), r(b)),
            Formula::Holds(t, p) => Formula::Holds(r(t), p.clone()),
            Formula::And(a, b) => Formula::and(a.rename(from, to), b.rename(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename(from, to), b.rename(from, to)),
            Formula::Implies(a, b) => Formula::implies(a.rename(from, to), b.rename(from, to)),
            Formula::Not(a) => Formula::not(a.rename(from, to)),
            Formula::Forall(v, _, _) | Formula::Exists(v, _, _) if v == from => self.clone(),
            Formula::Forall(v, s, body) => Formula::forall(v, *s, body.rename(from, to)),
            Formula::Exists(v, s, body) => Formula::exists(v, *s, body.rename(from, to)),
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True
            | Formula::False
            | Formula::Eq(..)
            | Formula::Member(..)
            | Formula::Holds(..) => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Not(a) => 1 + a.depth(),
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => 1 + b.depth(),
        }
    }
}

#[derive(Debug, Clone)]
enum CTerm {
    Var(usize),
    App(usize, Box<CTerm>),
    Pair(SortId, Box<CTerm>, Box<CTerm>),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Eq(CTerm, CTerm),
    Member(CTerm, CTerm, SortId),
    Holds(CTerm, usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Not(usize),
    Forall(SortId, usize),
    Exists(SortId, usize),
}

/// A failing stage and assignment of a universal-validity query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub stage: ObjId,
    /// `(variable, sort, element index at the stage)` in declaration order.
    pub bindings: Vec<(String, SortId, usize)>,
}

impl Countermodel {
    pub fn describe(&self, sig: &Signature) -> String {
        let base = sig.sorts[0].object.base();
        let parts: Vec<String> = self
            .bindings
            .iter()
            .map(|(v, s, x)| format!("{v} = {}", sig.sorts[*s].object.label(self.stage, *x)))
            .collect();
        let stage = base.object_name(self.stage);
        if parts.is_empty() {
            format!("stage {stage}")
        } else {
            format!("stage {stage}: {}", parts.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Countermodel(Countermodel),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// A formula compiled against a signature and an ordered list of free variables.
pub struct Query<'a> {
    sig: &'a Signature,
    free: Vec<(String, SortId)>,
    nodes: Vec<Node>,
    /// Free slots of each node, ascending.
    uses: Vec<Vec<usize>>,
    root: usize,
    memo: HashMap<(usize, ObjId, Vec<usize>), bool>,
}

impl<'a> Query<'a> {
    pub fn new(sig: &'a Signature, free: &[(&str, SortId)], phi: &Formula) -> Result<Self> {
        if sig.sorts.is_empty() {
            return Err(Error::SortError("empty signature".into()));
        }
        let free: Vec<(String, SortId)> = free.iter().map(|(v, s)| (v.to_string(), *s)).collect();
        for (_, s) in &free {
            if *s >= sig.sorts.len() {
                return Err(Error::SortError(format!("unknown sort id {s}")));
            }
        }
        let mut q = Query {
            sig,
            free: free.clone(),
            nodes: Vec::new(),
            uses: Vec::new(),
            root: 0,
            memo: HashMap::new(),
        };
        let mut scope: Vec<(String, SortId)> = free;
        q.root = q.compile(phi, &mut scope)?;
        Ok(q)
    }

    fn push(&mut self, node: Node, uses: Vec<usize>) -> usize {
        self.nodes.push(node);
        self.uses.push(uses);
        self.nodes.len() - 1
    }

    fn term(&self, t: &Term, scope: &[(String, SortId)]) -> Result<(CTerm, SortId, BTreeSet<usize>)> {
        match t {
            Term::Var(v) => {
                let slot = scope
                    .iter()
                    .rposition(|(n, _)| n == v)
                    .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
                Ok((CTerm::Var(slot), scope[slot].1, BTreeSet::from([slot])))
            }
            Term::App(name, inner) => {
                let idx = self
                    .sig
                    .arrows
                    .iter()
                    .position(|a| &a.name == name)
                    .ok_or_else(|| Error::UnknownName(name.clone()))?;
                let (ct, s, used) = self.term(inner, scope)?;
                let arrow = &self.sig.arrows[idx];
                if arrow.dom != s {
                    return Err(Error::SortError(format!(
                        "`{name}` expects `{}`, got `{}`",
                        self.sig.sort_name(arrow.dom),
                        self.sig.sort_name(s)
                    )));
                }
                Ok((CTerm::App(idx, Box::new(ct)), arrow.cod, used))
            }
            Term::Pair(a, b) => {
                let (ca, sa, mut ua) = self.term(a, scope)?;
                let (cb, sb, ub) = self.term(b, scope)?;
                let ps = self.sig.product_of(sa, sb).ok_or_else(|| {
                    Error::SortError(format!(
                        "no product sort for `{}` × `{}`",
                        self.sig.sort_name(sa),
                        self.sig.sort_name(sb)
                    ))
                })?;
                ua.extend(ub);
                Ok((CTerm::Pair(ps, Box::new(ca), Box::new(cb)), ps, ua))
            }
        }
    }

    fn compile(&mut self, phi: &Formula, scope: &mut Vec<(String, SortId)>) -> Result<usize> {
        let to_vec = |s: BTreeSet<usize>| s.into_iter().collect::<Vec<_>>();
        let merge = |q: &Self, a: usize, b: usize| {
            let mut u: BTreeSet<usize> = q.uses[a].iter().copied().collect();
            u.extend(q.uses[b].iter().copied());
            u.into_iter().collect::<Vec<_>>()
        };
        match phi {
            Formula::True => Ok(self.push(Node::True, Vec::new())),
            Formula::False => Ok(self.push(Node::False, Vec::new())),
            Formula::Eq(a, b) => {
                let (ca, sa, mut ua) = self.term(a, scope)?;
                let (cb, sb, ub) = self.term(b, scope)?;
                if sa != sb {
                    return Err(Error::SortError(format!(
                        "`{a} = {b}` compares `{}` with `{}`",
                        self.sig.sort_name(sa),
                        self.sig.sort_name(sb)
                    )));
                }
                ua.extend(ub);
                Ok(self.push(Node::Eq(ca, cb), to_vec(ua)))
            }
            Formula::Member(t, u) => {
                let (ct, st, mut ut) = self.term(t, scope)?;
                let (cu, su, uu) = self.term(u, scope)?;
                match self.sig.sorts[su].kind {
                    SortKind::Power { of, .. } if of == st => {}
                    _ => {
                        return Err(Error::SortError(format!(
                            "`{u}` is not a power of `{}`",
                            self.sig.sort_name(st)
                        )))
                    }
                }
                ut.extend(uu);
                Ok(self.push(Node::Member(ct, cu, su), to_vec(ut)))
            }
            Formula::Holds(t, p) => {
                let (ct, st, ut) = self.term(t, scope)?;
                let idx = self
                    .sig
                    .predicates
                    .iter()
                    .position(|q| &q.name == p)
                    .ok_or_else(|| Error::UnknownName(p.clone()))?;
                if self.sig.predicates[idx].sort != st {
                    return Err(Error::SortError(format!(
                        "predicate `{p}` is over `{}`, not `{}`",
                        self.sig.sort_name(self.sig.predicates[idx].sort),
                        self.sig.sort_name(st)
                    )));
                }
                Ok(self.push(Node::Holds(ct, idx), to_vec(ut)))
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let na = self.compile(a, scope)?;
                let nb = self.compile(b, scope)?;
                let uses = merge(self, na, nb);
                let node = match phi {
                    Formula::And(..) => Node::And(na, nb),
                    Formula::Or(..) => Node::Or(na, nb),
                    _ => Node::Implies(na, nb),
                };
                Ok(self.push(node, uses))
            }
            Formula::Not(a) => {
                let na = self.compile(a, scope)?;
                let uses = self.uses[na].clone();
                Ok(self.push(Node::Not(na), uses))
            }
            Formula::Forall(v, s, body) | Formula::Exists(v, s, body) => {
                if *s >= self.sig.sorts.len() {
                    return Err(Error::SortError(format!("unknown sort id {s}")));
                }
                scope.push((v.clone(), *s));
                let depth = scope.len() - 1;
                let nb = self.compile(body, scope);
                scope.pop();
                let nb = nb?;
                let uses: Vec<usize> = self.uses[nb].iter().copied().filter(|&u| u != depth).collect();
                let node = if matches!(phi, Formula::Forall(..)) {
                    Node::Forall(*s, nb)
                } else {
                    Node::Exists(*s, nb)
                };
                Ok(self.push(node, uses))
            }
        }
    }

    pub fn free_vars(&self) -> &[(String, SortId)] {
        &self.free
    }

    fn eval_term(&self, t: &CTerm, c: ObjId, env: &[(SortId, usize)]) -> usize {
        match t {
            CTerm::Var(slot) => env[*slot].1,
            CTerm::App(a, inner) => self.sig.arrows[*a].map.apply(c, self.eval_term(inner, c, env)),
            CTerm::Pair(ps, a, b) => {
                let SortKind::Product { product, .. } = &self.sig.sorts[*ps].kind else {
                    unreachable!("pair sort is a product")
                };
                product.pair(c, self.eval_term(a, c, env), self.eval_term(b, c, env))
            }
        }
    }

    fn restrict(&self, env: &[(SortId, usize)], f: usize) -> Vec<(SortId, usize)> {
        env.iter()
            .map(|&(s, v)| (s, self.sig.sorts[s].object.act(f, v)))
            .collect()
    }

    fn eval(&mut self, n: usize, c: ObjId, env: &mut Vec<(SortId, usize)>) -> bool {
        let key_vals: Vec<usize> = self.uses[n].iter().map(|&s| env[s].1).collect();
        let key = (n, c, key_vals);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let base = self.sig.sorts[0].object.base().clone();
        let result = match self.nodes[n].clone() {
            Node::True => true,
            Node::False => false,
            Node::Eq(a, b) => self.eval_term(&a, c, env) == self.eval_term(&b, c, env),
            Node::Member(t, u, ps) => {
                let SortKind::Power { power, .. } = &self.sig.sorts[ps].kind else {
                    unreachable!("member sort is a power")
                };
                power.contains(c, self.eval_term(&t, c, env), self.eval_term(&u, c, env))
            }
            Node::Holds(t, p) => self.sig.predicates[p]
                .sub
                .contains(c, self.eval_term(&t, c, env)),
            Node::And(a, b) => self.eval(a, c, env) && self.eval(b, c, env),
            Node::Or(a, b) => self.eval(a, c, env) || self.eval(b, c, env),
            Node::Implies(a, b) => base.incoming(c).iter().all(|&f| {
                let mut env_f = self.restrict(env, f);
                !self.eval(a, base.dom(f), &mut env_f) || self.eval(b, base.dom(f), &mut env_f)
            }),
            Node::Not(a) => base.incoming(c).iter().all(|&f| {
                let mut env_f = self.restrict(env, f);
                !self.eval(a, base.dom(f), &mut env_f)
            }),
            Node::Forall(s, body) => base.incoming(c).iter().all(|&f| {
                let b = base.dom(f);
                let mut env_f = self.restrict(env, f);
                (0..self.sig.sorts[s].object.size(b)).all(|y| {
                    env_f.push((s, y));
                    let r = self.eval(body, b, &mut env_f);
                    env_f.pop();
                    r
                })
            }),
            Node::Exists(s, body) => (0..self.sig.sorts[s].object.size(c)).any(|y| {
                env.push((s, y));
                let r = self.eval(body, c, env);
                env.pop();
                r
            }),
        };
        self.memo.insert(key, result);
        result
    }

    /// Whether stage `c` forces the formula with free variables bound to
    /// `values` (element indices at stage `c`, in declaration order).
    pub fn forces(&mut self, c: ObjId, values: &[usize]) -> Result<bool> {
        let base = self.sig.sorts[0].object.base();
        if c >= base.num_objects() {
            return Err(Error::UnknownObject(c.to_string()));
        }
        if values.len() != self.free.len() {
            return Err(Error::UnboundVariable(
                self.free
                    .get(values.len())
                    .map(|(v, _)| v.clone())
                    .unwrap_or_else(|| "<extra value>".into()),
            ));
        }
        let mut env = Vec::with_capacity(values.len());
        for ((v, s), &x) in self.free.iter().zip(values) {
            if x >= self.sig.sorts[*s].object.size(c) {
                return Err(Error::SortError(format!(
                    "value {x} for `{v}` is not an element of `{}` at this stage",
                    self.sig.sort_name(*s)
                )));
            }
            env.push((*s, x));
        }
        Ok(self.eval(self.root, c, &mut env))
    }

    /// Forced at every stage under every assignment; otherwise the first
    /// failure in object order, then lexicographic assignment order.
    pub fn universally_valid(&mut self) -> Result<Validity> {
        let base = self.sig.sorts[0].object.base().clone();
        for c in base.objects() {
            let sizes: Vec<usize> = self
                .free
                .iter()
                .map(|(_, s)| self.sig.sorts[*s].object.size(c))
                .collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut values = vec![0; sizes.len()];
            loop {
                if !self.forces(c, &values)? {
                    return Ok(Validity::Countermodel(Countermodel {
                        stage: c,
                        bindings: self
                            .free
                            .iter()
                            .zip(&values)
                            .map(|((v, s), &x)| (v.clone(), *s, x))
                            .collect(),
                    }));
                }
                let mut i = sizes.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    values[i] += 1;
                    if values[i] < sizes[i] {
                        break;
                    }
                    values[i] = 0;
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX || sizes.is_empty() {
                    break;
                }
            }
        }
        Ok(Validity::Valid)
    }
}

/// Convenience wrapper: compile and decide universal validity.
pub fn universally_valid(
    sig: &Signature,
    free: &[(&str, SortId)],
    phi: &Formula,
) -> Result<Validity> {
    Query::new(sig, free, phi)?.universally_valid()
}

/// Convenience wrapper: compile and force at one stage.
pub fn forces(
    sig: &Signature,
    free: &[(&str, SortId)],
    phi: &Formula,
    c: ObjId,
    values: &[usize],
) -> Result<bool> {
    Query::new(sig, free, phi)?.forces(c, values)
}

#[cfg(test)]
mod tests;
