//! Bounded counterexample search over a corpus, with witness shrinking.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::CorpusIndex;
use crate::decidable::{dqo_candidates, dso_candidates, is_decidable, pi, separated_reflection};
use crate::error::{Error, Result};
use crate::forcing::has_pneumoconnected_fibers;
use crate::harness::{corpus_epis, lemma_conditions};
use crate::precohesion::pi_product_comparison;
use crate::presheaf::{NatTrans, Presheaf};

/// Arrow families for the pneumoconnectedness property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapFamily {
    /// `X → ΠX`.
    PiUnit,
    /// `X → M(X)`.
    Separated,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    DqoUniqueness,
    DsoUniqueness,
    Pneumo(MapFamily),
    PiProduct,
    Lemma,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::DqoUniqueness => "dqo-uniqueness",
            Property::DsoUniqueness => "dso-uniqueness",
            Property::Pneumo(MapFamily::PiUnit) => "pneumo:pi-unit",
            Property::Pneumo(MapFamily::Separated) => "pneumo:separated",
            Property::Pneumo(MapFamily::Identity) => "pneumo:identity",
            Property::PiProduct => "pi-product",
            Property::Lemma => "lemma",
        })
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dqo-uniqueness" | "dqo" => Property::DqoUniqueness,
            "dso-uniqueness" | "dso" => Property::DsoUniqueness,
            "pneumo" | "pneumo:pi-unit" => Property::Pneumo(MapFamily::PiUnit),
            "pneumo:separated" => Property::Pneumo(MapFamily::Separated),
            "pneumo:identity" => Property::Pneumo(MapFamily::Identity),
            "pi-product" => Property::PiProduct,
            "lemma" => Property::Lemma,
            other => return Err(Error::UnknownName(other.to_string())),
        })
    }
}

pub const PROPERTY_NAMES: [&str; 7] = [
    "dqo-uniqueness",
    "dso-uniqueness",
    "pneumo:pi-unit",
    "pneumo:separated",
    "pneumo:identity",
    "pi-product",
    "lemma",
];

#[derive(Debug, Clone)]
pub struct Witness {
    /// Corpus indices of the objects involved.
    pub items: Vec<usize>,
    pub objects: Vec<Presheaf>,
    pub arrow: Option<NatTrans>,
    pub detail: String,
}

impl Witness {
    /// Stage sizes of the objects in order, then their total element count.
    fn shrink_key(&self) -> (Vec<usize>, usize, Vec<usize>) {
        let sizes: Vec<usize> = self.objects.iter().flat_map(Presheaf::sizes).collect();
        let total = self.objects.iter().map(Presheaf::total_size).sum();
        (sizes, total, self.items.clone())
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub property: Property,
    pub bounds: Vec<usize>,
    pub instances_checked: usize,
    /// First failure in corpus order.
    pub witness: Option<Witness>,
    /// The failure with the lexicographically least stage sizes, then least
    /// element count.
    pub shrunk: Option<Witness>,
}

fn single(corpus: &CorpusIndex, test: impl Fn(&Presheaf) -> Result<Option<String>> + Sync) -> Result<(usize, Vec<Witness>)> {
    let found: Vec<Option<String>> = corpus.items.par_iter().map(&test).collect::<Result<_>>()?;
    let witnesses = found
        .into_iter()
        .enumerate()
        .filter_map(|(i, d)| {
            d.map(|detail| Witness {
                items: vec![i],
                objects: vec![corpus.items[i].clone()],
                arrow: None,
                detail,
            })
        })
        .collect();
    Ok((corpus.len(), witnesses))
}

fn failures(corpus: &CorpusIndex, property: Property) -> Result<(usize, Vec<Witness>)> {
    match property {
        Property::DqoUniqueness => single(corpus, |x| {
            let k = dqo_candidates(x)?;
            Ok((k.len() != 1).then(|| {
                let names: Vec<String> = k.iter().map(|r| r.describe()).collect();
                format!("|K(X)| = {}: {{{}}}", k.len(), names.join(", "))
            }))
        }),
        Property::DsoUniqueness => single(corpus, |x| {
            let d = dso_candidates(x)?;
            Ok((d.len() != 1).then(|| {
                let names: Vec<String> = d
                    .iter()
                    .map(|s| {
                        if s.is_bottom() {
                            "∅".to_string()
                        } else if s.is_top() {
                            "X".to_string()
                        } else {
                            format!("{:?}", s.sizes())
                        }
                    })
                    .collect();
                format!("|D(X)| = {}: {{{}}}", d.len(), names.join(", "))
            }))
        }),
        Property::Pneumo(family) => single(corpus, |x| {
            let f = match family {
                MapFamily::PiUnit => pi(x)?.quotient,
                MapFamily::Separated => separated_reflection(x)?.1,
                MapFamily::Identity => NatTrans::identity(x),
            };
            Ok((!has_pneumoconnected_fibers(&f)?).then(|| "fibers are not pneumoconnected".into()))
        }),
        Property::PiProduct => {
            let n = corpus.len();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
            let ok: Vec<bool> = pairs
                .par_iter()
                .map(|&(i, j)| Ok(pi_product_comparison(&corpus.items[i], &corpus.items[j])?.is_iso()))
                .collect::<Result<_>>()?;
            let witnesses = pairs
                .iter()
                .zip(ok)
                .filter(|(_, ok)| !ok)
                .map(|(&(i, j), _)| Witness {
                    items: vec![i, j],
                    objects: vec![corpus.items[i].clone(), corpus.items[j].clone()],
                    arrow: None,
                    detail: "Π(X×Y) → ΠX × ΠY is not invertible".into(),
                })
                .collect();
            Ok((pairs.len(), witnesses))
        }
        Property::Lemma => {
            let epis = corpus_epis(corpus)?;
            let decidables: Vec<Presheaf> =
                corpus.items.iter().filter(|x| is_decidable(x)).cloned().collect();
            let conds: Vec<_> = epis
                .par_iter()
                .map(|(_, _, q)| lemma_conditions(q, &decidables))
                .collect::<Result<_>>()?;
            let witnesses = epis
                .iter()
                .zip(conds)
                .filter(|(_, c)| !c.agree())
                .map(|((i, j, q), c)| Witness {
                    items: vec![*i, *j],
                    objects: vec![corpus.items[*i].clone(), corpus.items[*j].clone()],
                    arrow: Some(q.clone()),
                    detail: format!(
                        "(i) {} (ii) {} (iii) {}",
                        c.maps_to_two, c.pneumoconnected, c.maps_to_decidables
                    ),
                })
                .collect();
            Ok((epis.len(), witnesses))
        }
    }
}

/// Search the corpus for a failure of `property`.
pub fn search_counterexample(property: Property, corpus: &CorpusIndex) -> Result<SearchResult> {
    let (checked, witnesses) = failures(corpus, property)?;
    let shrunk = witnesses.iter().min_by_key(|w| w.shrink_key()).cloned();
    Ok(SearchResult {
        property,
        bounds: corpus.bounds.clone(),
        instances_checked: checked,
        witness: witnesses.into_iter().next(),
        shrunk,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::builtins::builtin;
    use crate::corpus::{enumerate_presheaves, uniform_bounds};
    use crate::fincat::catalog;
    use crate::presheaf::is_isomorphic;

    fn corpus(name: &str, bound: usize) -> CorpusIndex {
        let b = Arc::new(catalog(name).unwrap());
        enumerate_presheaves(&b, &uniform_bounds(&b, bound)).unwrap()
    }

    #[test]
    fn dqo_witness_on_graphs_is_an_edge() {
        let c = corpus("graph", 2);
        let r = search_counterexample(Property::DqoUniqueness, &c).unwrap();
        let w = r.witness.unwrap();
        let a1 = builtin(&c.base, "A1").unwrap();
        assert!(is_isomorphic(&w.objects[0], &a1));
        assert!(w.detail.contains("Δ") && w.detail.contains("total"), "{}", w.detail);
        assert!(is_isomorphic(&r.shrunk.unwrap().objects[0], &a1));
    }

    #[test]
    fn dso_witness_on_two_discrete() {
        let c = corpus("two-discrete", 2);
        let r = search_counterexample(Property::DsoUniqueness, &c).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.objects[0].sizes(), vec![1, 0]);
        assert!(w.detail.contains("∅") && w.detail.contains('X'));
    }

    #[test]
    fn no_counterexamples_on_refgraph() {
        let c = corpus("refgraph", 2);
        for name in PROPERTY_NAMES {
            let p: Property = name.parse().unwrap();
            let r = search_counterexample(p, &c).unwrap();
            assert!(r.witness.is_none(), "{name}");
            assert!(r.instances_checked > 0);
        }
    }

    #[test]
    fn property_names_round_trip() {
        for name in PROPERTY_NAMES {
            assert_eq!(name.parse::<Property>().unwrap().to_string(), name);
        }
        assert!("nope".parse::<Property>().is_err());
    }
}
