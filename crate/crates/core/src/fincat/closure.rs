use std::collections::BTreeMap;

use super::{validate_category, FinCategory, RawCategory};
use crate::error::{Error, Result};

/// Closure aborts once this many morphisms have been generated.
pub const CLOSURE_CAP: usize = 64;

/// A category given by generators and rewrite rules on composable words.
///
/// Words are written in composition order: `["g", "f"]` denotes `g∘f`. Rules
/// rewrite left to right and must form a terminating, confluent system; the
/// result is validated afterwards, so a bad system surfaces as a validation
/// error rather than a wrong table.
#[derive(Debug, Clone, Default)]
pub struct Presentation {
    pub name: String,
    pub objects: Vec<String>,
    pub generators: Vec<(String, String, String)>,
    pub relations: Vec<(Vec<String>, Vec<String>)>,
}

impl Presentation {
    pub fn new(name: &str, objects: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            objects: objects.iter().map(|o| o.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn generator(mut self, name: &str, dom: &str, cod: &str) -> Self {
        self.generators
            .push((name.to_string(), dom.to_string(), cod.to_string()));
        self
    }

    pub fn relation(mut self, lhs: &[&str], rhs: &[&str]) -> Self {
        self.relations.push((
            lhs.iter().map(|s| s.to_string()).collect(),
            rhs.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    /// Close the generators under composition and validate the result.
    pub fn close(&self) -> Result<FinCategory> {
        let obj = |name: &str| {
            self.objects
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| Error::DanglingReference(name.to_string()))
        };
        let mut gens = Vec::new();
        for (name, dom, cod) in &self.generators {
            gens.push((name.clone(), obj(dom)?, obj(cod)?));
        }
        let gen = |name: &String| {
            gens.iter()
                .position(|(g, _, _)| g == name)
                .ok_or_else(|| Error::DanglingReference(name.clone()))
        };
        let mut rules = Vec::new();
        for (lhs, rhs) in &self.relations {
            let l: Vec<usize> = lhs.iter().map(gen).collect::<Result<_>>()?;
            let r: Vec<usize> = rhs.iter().map(gen).collect::<Result<_>>()?;
            rules.push((l, r));
        }
        let normalize = |mut word: Vec<usize>| -> Vec<usize> {
            'outer: loop {
                for (l, r) in &rules {
                    if l.is_empty() || word.len() < l.len() {
                        continue;
                    }
                    if let Some(pos) = word.windows(l.len()).position(|w| w == l.as_slice()) {
                        word.splice(pos..pos + l.len(), r.iter().copied());
                        continue 'outer;
                    }
                }
                return word;
            }
        };

        // (dom, cod, word); an empty word is the identity on dom == cod.
        let mut arrows: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        let mut seen = BTreeMap::new();
        let mut push = |arrow: (usize, usize, Vec<usize>), arrows: &mut Vec<_>| -> Result<()> {
            if !seen.contains_key(&arrow) {
                seen.insert(arrow.clone(), arrows.len());
                arrows.push(arrow);
                if arrows.len() > CLOSURE_CAP {
                    return Err(Error::ClosureCap(CLOSURE_CAP));
                }
            }
            Ok(())
        };
        for c in 0..self.objects.len() {
            push((c, c, Vec::new()), &mut arrows)?;
        }
        for (i, (_, d, c)) in gens.iter().enumerate() {
            push((*d, *c, normalize(vec![i])), &mut arrows)?;
        }
        let mut frontier = 0;
        while frontier < arrows.len() {
            let (fd, fc, fw) = arrows[frontier].clone();
            for (i, (_, d, c)) in gens.iter().enumerate() {
                if *d == fc {
                    let mut word = vec![i];
                    word.extend(&fw);
                    push((fd, *c, normalize(word)), &mut arrows)?;
                }
            }
            frontier += 1;
        }

        let name_of = |(d, _, w): &(usize, usize, Vec<usize>)| {
            if w.is_empty() {
                format!("id_{}", self.objects[*d])
            } else {
                w.iter()
                    .map(|&g| gens[g].0.as_str())
                    .collect::<Vec<_>>()
                    .join(".")
            }
        };
        let mut raw = RawCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            ..RawCategory::default()
        };
        for a in &arrows {
            raw.morphisms.push((
                name_of(a),
                self.objects[a.0].clone(),
                self.objects[a.1].clone(),
            ));
        }
        for c in 0..self.objects.len() {
            raw.identities
                .push((self.objects[c].clone(), format!("id_{}", self.objects[c])));
        }
        for g in &arrows {
            for f in &arrows {
                if f.1 != g.0 {
                    continue;
                }
                let mut word = g.2.clone();
                word.extend(&f.2);
                let gf = (f.0, g.1, normalize(word));
                let target = seen
                    .get(&gf)
                    .ok_or_else(|| Error::DanglingReference(name_of(&gf)))?;
                raw.composition
                    .push((name_of(g), name_of(f), name_of(&arrows[*target])));
            }
        }
        validate_category(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_loop_hits_cap() {
        let p = Presentation::new("loop", &["*"]).generator("f", "*", "*");
        assert_eq!(p.close(), Err(Error::ClosureCap(CLOSURE_CAP)));
    }

    #[test]
    fn idempotent_monoid() {
        let p = Presentation::new("idem", &["*"])
            .generator("e", "*", "*")
            .relation(&["e", "e"], &["e"]);
        let c = p.close().unwrap();
        assert_eq!(c.num_morphisms(), 2);
        let e = c.morphism_id("e").unwrap();
        assert_eq!(c.compose(e, e), Some(e));
    }
}
