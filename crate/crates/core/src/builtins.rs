//! Named presheaves used in examples, tests and the CLI.
//!
//! Available on every base: `0`, `1`, `2`, `set(n)` (constant) and `y(c)`.
//! On `refgraph`: `Pn` (path on n vertices), `Dn` (n vertices, no extra
//! edges), `L` and `Ln` (one vertex with one or n extra loops). On `graph`:
//! `A1` (a single edge `0 → 1`) and `C1` (a single loop). On `two-discrete`:
//! `pair(m,n)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::presheaf::{initial, terminal, two, yoneda, Presheaf};

pub fn builtin(base: &Arc<FinCategory>, name: &str) -> Result<Presheaf> {
    let unknown = || Error::UnknownName(name.to_string());
    match name {
        "0" => return Ok(initial(base)),
        "1" => return Ok(terminal(base)),
        "2" => return Ok(two(base)),
        _ => {}
    }
    if let Some(arg) = call(name, "set") {
        return constant(base, arg.parse().map_err(|_| unknown())?);
    }
    if let Some(arg) = call(name, "y") {
        let c = base.object_id(arg).ok_or_else(unknown)?;
        return yoneda(base, c);
    }
    match base.name() {
        "refgraph" => refgraph_builtin(base, name).ok_or_else(unknown)?,
        "graph" => match name {
            "A1" => graph(base, &["0", "1"], &[("a", 0, 1)]),
            "C1" => graph(base, &["0"], &[("a", 0, 0)]),
            _ => Err(unknown()),
        },
        "two-discrete" => {
            let arg = call(name, "pair").ok_or_else(unknown)?;
            let (m, n) = arg.split_once(',').ok_or_else(unknown)?;
            let m: usize = m.trim().parse().map_err(|_| unknown())?;
            let n: usize = n.trim().parse().map_err(|_| unknown())?;
            let labels = vec![
                (0..m).map(|i| format!("a{i}")).collect(),
                (0..n).map(|i| format!("b{i}")).collect(),
            ];
            Presheaf::from_generators(base.clone(), labels, &[])
        }
        _ => Err(unknown()),
    }
}

fn call<'a>(name: &'a str, head: &str) -> Option<&'a str> {
    name.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')
}

fn number(name: &str, head: &str) -> Option<usize> {
    name.strip_prefix(head)?.parse().ok()
}

fn refgraph_builtin(base: &Arc<FinCategory>, name: &str) -> Option<Result<Presheaf>> {
    if name == "L" {
        return Some(reflexive_graph(base, &["v"], &[("e", 0, 0)]));
    }
    if let Some(n) = number(name, "L") {
        let vs = ["v"];
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let edges: Vec<(&str, usize, usize)> = names.iter().map(|e| (e.as_str(), 0, 0)).collect();
        return Some(reflexive_graph(base, &vs, &edges));
    }
    if let Some(n) = number(name, "D") {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let vs: Vec<&str> = names.iter().map(String::as_str).collect();
        return Some(reflexive_graph(base, &vs, &[]));
    }
    if let Some(n) = number(name, "P") {
        if n == 0 {
            return None;
        }
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let vs: Vec<&str> = names.iter().map(String::as_str).collect();
        let edge_names: Vec<String> = (1..n)
            .map(|i| {
                if n == 2 {
                    "a".to_string()
                } else {
                    format!("a{}", i - 1)
                }
            })
            .collect();
        let edges: Vec<(&str, usize, usize)> = edge_names
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i, i + 1))
            .collect();
        return Some(reflexive_graph(base, &vs, &edges));
    }
    None
}

/// A constant presheaf on `n` points.
pub fn constant(base: &Arc<FinCategory>, n: usize) -> Result<Presheaf> {
    let labels = base
        .objects()
        .map(|_| (0..n).map(|i| i.to_string()).collect())
        .collect();
    let actions = (0..base.num_morphisms()).map(|_| (0..n).collect()).collect();
    Presheaf::from_tables(base.clone(), labels, actions)
}

fn generator(base: &FinCategory, name: &str) -> Result<usize> {
    base.morphism_id(name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

/// A graph on the `graph` base: vertices plus `(name, source, target)` edges.
pub fn graph(
    base: &Arc<FinCategory>,
    vertices: &[&str],
    edges: &[(&str, usize, usize)],
) -> Result<Presheaf> {
    let (v, e) = object_pair(base)?;
    let mut labels = vec![Vec::new(); 2];
    labels[v] = vertices.iter().map(|s| s.to_string()).collect();
    labels[e] = edges.iter().map(|(n, _, _)| n.to_string()).collect();
    let s = edges.iter().map(|&(_, a, _)| a).collect();
    let t = edges.iter().map(|&(_, _, b)| b).collect();
    Presheaf::from_generators(
        base.clone(),
        labels,
        &[(generator(base, "s")?, s), (generator(base, "t")?, t)],
    )
}

/// A reflexive graph. Each vertex gets a degenerate loop (`l0` for vertex
/// `0`, `l_v` for vertex `v`); these come first, then the given edges.
pub fn reflexive_graph(
    base: &Arc<FinCategory>,
    vertices: &[&str],
    edges: &[(&str, usize, usize)],
) -> Result<Presheaf> {
    let (v, e) = object_pair(base)?;
    let n = vertices.len();
    let mut labels = vec![Vec::new(); 2];
    labels[v] = vertices.iter().map(|s| s.to_string()).collect();
    labels[e] = vertices
        .iter()
        .map(|s| {
            if s.chars().all(|ch| ch.is_ascii_digit()) {
                format!("l{s}")
            } else {
                format!("l_{s}")
            }
        })
        .chain(edges.iter().map(|(n, _, _)| n.to_string()))
        .collect();
    let s = (0..n).chain(edges.iter().map(|&(_, a, _)| a)).collect();
    let t = (0..n).chain(edges.iter().map(|&(_, _, b)| b)).collect();
    let sigma = (0..n).collect();
    Presheaf::from_generators(
        base.clone(),
        labels,
        &[
            (generator(base, "s")?, s),
            (generator(base, "t")?, t),
            (generator(base, "sigma")?, sigma),
        ],
    )
}

fn object_pair(base: &FinCategory) -> Result<(usize, usize)> {
    let v = base
        .object_id("V")
        .ok_or_else(|| Error::UnknownObject("V".into()))?;
    let e = base
        .object_id("E")
        .ok_or_else(|| Error::UnknownObject("E".into()))?;
    Ok((v, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::catalog;
    use crate::presheaf::tests::p2_raw;
    use crate::presheaf::validate_presheaf;

    fn base(name: &str) -> Arc<FinCategory> {
        Arc::new(catalog(name).unwrap())
    }

    #[test]
    fn p2_matches_hand_written_tables() {
        let b = base("refgraph");
        let p2 = builtin(&b, "P2").unwrap();
        assert_eq!(p2, validate_presheaf(&b, &p2_raw()).unwrap());
    }

    #[test]
    fn sizes() {
        let r = base("refgraph");
        assert_eq!(builtin(&r, "L").unwrap().sizes(), vec![1, 2]);
        assert_eq!(builtin(&r, "L2").unwrap().sizes(), vec![1, 3]);
        assert_eq!(builtin(&r, "D3").unwrap().sizes(), vec![3, 3]);
        assert_eq!(builtin(&r, "P3").unwrap().sizes(), vec![3, 5]);
        assert_eq!(builtin(&r, "y(E)").unwrap().sizes(), vec![2, 3]);
        let g = base("graph");
        assert_eq!(builtin(&g, "A1").unwrap().sizes(), vec![2, 1]);
        let t = base("two-discrete");
        assert_eq!(builtin(&t, "pair(1,0)").unwrap().sizes(), vec![1, 0]);
        assert_eq!(builtin(&t, "set(2)").unwrap().sizes(), vec![2, 2]);
    }

    #[test]
    fn loop_graph_labels() {
        let l = builtin(&base("refgraph"), "L").unwrap();
        assert_eq!(l.labels(1), ["l_v", "e"]);
    }

    #[test]
    fn unknown_names() {
        let r = base("refgraph");
        for name in ["A1", "P0", "y(Q)", "set(x)", "pair(1,1)"] {
            assert!(matches!(builtin(&r, name), Err(Error::UnknownName(_))), "{name}");
        }
    }
}
