//! Subcommand implementations. Each builds a [`Report`].

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use dectopos::builtins::builtin;
use dectopos::corpus::{enumerate_presheaves, uniform_bounds, CorpusIndex};
use dectopos::decidable::{
    check_dqo, check_dqo_bounded, check_dso, check_dso_bounded, check_ns, dec_is_topos_check, is_connected,
    is_decidable, ns_counterexample, pi, separated_reflection, AxiomReport, WitnessDetail,
};
use dectopos::fincat::{catalog, catalog_entries, Expectation, CATALOG_NAMES};
use dectopos::forcing::{parse_formula, pneumo_validity, Query, Signature, Validity};
use dectopos::format::{parse_category, parse_presheaf, presheaf_base_name, serialize_category, serialize_presheaf};
use dectopos::harness::{lemma_harness, props_harness};
use dectopos::precohesion::{check_precohesive, theorem_ab_harness, theorem_c_harness, theorem_c_self_test, Check};
use dectopos::presheaf::{global_elements, terminal, HomSearch};
use dectopos::search::{search_counterexample, MapFamily, Property, PROPERTY_NAMES};
use dectopos::sublattice::{complemented_subobjects, subobjects};
use dectopos::{Error, FinCategory, NatTrans, Presheaf, Subobject};
use serde_json::json;

use crate::report::{Outcome, Report, WitnessOut};
use crate::{Cli, Command, MapArg, Target};

/// Resolved global options.
struct Ctx<'a> {
    cli: &'a Cli,
    base: Arc<FinCategory>,
    base_arg: String,
    bounds: Vec<usize>,
}

pub fn run(cli: &Cli) -> Result<Report> {
    let (base, base_arg) = resolve_base(cli)?;
    let bounds = parse_bounds(&base, &cli.bound)?;
    let ctx = Ctx {
        cli,
        base,
        base_arg,
        bounds,
    };
    match &cli.command {
        Command::CheckNs => ctx.check_ns(),
        Command::Decidable => ctx.decidable(),
        Command::Pi => ctx.pi(),
        Command::Connected => ctx.connected(),
        Command::Subc => ctx.subc(),
        Command::Pneumo { map } => ctx.pneumo(*map),
        Command::CheckDqo => ctx.check_axiom(true),
        Command::CheckDso => ctx.check_axiom(false),
        Command::DecTopos => ctx.dec_topos(),
        Command::Precohesion => ctx.precohesion(),
        Command::Verify { target } => ctx.verify(*target),
        Command::SearchCounterexample { property } => ctx.search(property),
        Command::Catalog { emit } => ctx.catalog(emit.as_deref()),
        Command::Valid { formula } => ctx.valid(formula),
    }
}

fn is_catalog_name(s: &str) -> bool {
    CATALOG_NAMES.contains(&s)
}

fn object_file(spec: &str) -> Option<&str> {
    (!spec.starts_with("builtin:") && !spec.starts_with("corpus:") && Path::new(spec).is_file()).then_some(spec)
}

fn resolve_base(cli: &Cli) -> Result<(Arc<FinCategory>, String)> {
    let name = match (&cli.base, cli.object.as_deref().and_then(object_file)) {
        (Some(b), _) => b.clone(),
        (None, Some(path)) => {
            let src = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let name = presheaf_base_name(&src).with_context(|| format!("in {path}"))?;
            if !is_catalog_name(&name) {
                bail!("{path} is over `{name}`; pass its category file with --base");
            }
            name
        }
        (None, None) => "refgraph".to_string(),
    };
    let cat = if is_catalog_name(&name) {
        catalog(&name)?
    } else {
        let src = fs::read_to_string(&name).with_context(|| format!("reading {name}"))?;
        parse_category(&src).with_context(|| format!("in {name}"))?
    };
    Ok((Arc::new(cat), name))
}

fn parse_bounds(base: &FinCategory, spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad bound `{spec}`"))?;
    if parts.contains(&0) {
        bail!("bounds must be at least 1");
    }
    match parts.len() {
        1 => Ok(uniform_bounds(base, parts[0])),
        n if n == base.num_objects() => Ok(parts),
        n => bail!("{n} bounds given for {} objects", base.num_objects()),
    }
}

fn shell_quote(arg: &str) -> String {
    let plain = arg
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || "_-:./,=".contains(c));
    if plain && !arg.is_empty() {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', r"'\''"))
    }
}

fn joined(n: &[usize]) -> String {
    n.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn what(e: &WitnessDetail, base: &FinCategory) -> String {
    match e {
        WitnessDetail::Representable(c) => format!("y({}) has no global element", base.object_name(*c)),
        WitnessDetail::Congruences(k) => {
            let names: Vec<String> = k.iter().map(|r| r.describe()).collect();
            format!("|K(X)| = {}: {{{}}}", k.len(), names.join(", "))
        }
        WitnessDetail::Subobjects(d) => {
            let names: Vec<String> = d.iter().map(describe_subobject).collect();
            format!("|D(X)| = {}: {{{}}}", d.len(), names.join(", "))
        }
    }
}

fn describe_subobject(s: &Subobject) -> String {
    if s.is_bottom() {
        return "∅".into();
    }
    if s.is_top() {
        return "X".into();
    }
    let x = s.ambient();
    let base = x.base();
    let stages: Vec<String> = base
        .objects()
        .map(|c| {
            let elems: Vec<&str> = (0..x.size(c)).filter(|&e| s.contains(c, e)).map(|e| x.label(c, e)).collect();
            format!("{}: {{{}}}", base.object_name(c), elems.join(" "))
        })
        .collect();
    format!("({})", stages.join(", "))
}

fn check(name: &str, passed: bool, tested: usize, witness: Option<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        tested,
        witness: if passed { None } else { witness },
    }
}

fn prefixed(prefix: &str, c: &Check) -> Check {
    Check {
        name: format!("{prefix}: {}", c.name),
        ..c.clone()
    }
}

/// Splits a prerequisite failure from other engine errors.
fn prereq<T>(r: dectopos::Result<T>) -> Result<std::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(Error::PrereqFailed(msg)) => Ok(Err(msg)),
        Err(e) => Err(e.into()),
    }
}

impl Ctx<'_> {
    fn bound_arg(&self) -> String {
        joined(&self.bounds)
    }

    fn command_line(&self, with_bound: bool, object: Option<&str>, rest: &[&str]) -> String {
        let mut parts = vec!["dectopos".to_string(), "--base".into(), shell_quote(&self.base_arg)];
        if with_bound {
            parts.push("--bound".into());
            parts.push(self.bound_arg());
        }
        if let Some(o) = object {
            parts.push("--object".into());
            parts.push(shell_quote(o));
        }
        parts.extend(rest.iter().map(|s| shell_quote(s)));
        parts.join(" ")
    }

    fn corpus_object(&self, i: usize) -> String {
        format!("corpus:{}:{i}", self.bound_arg())
    }

    fn report(&self, command: &str, bounded: bool, rest: &[&str]) -> Report {
        let object = if bounded { None } else { self.cli.object.as_deref() };
        let recheck = self.command_line(bounded, object, rest);
        Report::new(command, &self.base_arg, bounded.then(|| self.bounds.clone()), recheck)
    }

    fn corpus(&self) -> Result<CorpusIndex> {
        Ok(enumerate_presheaves(&self.base, &self.bounds)?)
    }

    fn object(&self) -> Result<Presheaf> {
        let Some(spec) = self.cli.object.as_deref() else {
            bail!("this command needs --object");
        };
        if let Some(name) = spec.strip_prefix("builtin:") {
            return Ok(builtin(&self.base, name)?);
        }
        if let Some(rest) = spec.strip_prefix("corpus:") {
            let (bound, index) = rest.rsplit_once(':').context("expected corpus:BOUND:INDEX")?;
            let bounds = parse_bounds(&self.base, bound)?;
            let index: usize = index.parse().with_context(|| format!("bad corpus index `{index}`"))?;
            let corpus = enumerate_presheaves(&self.base, &bounds)?;
            let len = corpus.len();
            return corpus
                .items
                .into_iter()
                .nth(index)
                .with_context(|| format!("corpus at bound {bound} has {len} items"));
        }
        if let Some(path) = object_file(spec) {
            let src = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let name = presheaf_base_name(&src)?;
            if name != self.base.name() {
                bail!("{path} is over `{name}`, not `{}`", self.base.name());
            }
            return parse_presheaf(&self.base, &src).with_context(|| format!("in {path}"));
        }
        builtin(&self.base, spec).with_context(|| format!("`{spec}` is neither a file nor a builtin"))
    }

    fn axiom_witness(&self, r: &AxiomReport, command: &str) -> Option<WitnessOut> {
        let w = r.witness.as_ref()?;
        let recheck = match w.corpus_index {
            Some(i) => self.command_line(false, Some(&self.corpus_object(i)), &[command]),
            None => self.report(command, r.bounds.is_some(), &[command]).recheck,
        };
        Some(WitnessOut {
            description: what(&w.detail, &self.base),
            corpus_index: w.corpus_index,
            object: Some(serialize_presheaf(&w.object)),
            recheck: Some(recheck),
        })
    }

    fn check_ns(&self) -> Result<Report> {
        let mut rep = self.report("check-ns", false, &["check-ns"]);
        rep.bounds = Some(self.bounds.clone());
        rep.recheck = self.command_line(true, None, &["check-ns"]);
        let r = check_ns(&self.base)?;
        let corpus = self.corpus()?;
        let found = ns_counterexample(&corpus)?;
        let holds = r.verdict.passed();
        rep.line(format!("NS {}", if holds { "holds" } else { "fails" }));
        rep.line(match found {
            Some(i) => format!("bounded search: corpus item {i} is nonempty with no global element"),
            None => format!("bounded search: no nonempty pointless object among {} items", corpus.len()),
        });
        rep.checks.push(check(
            "bounded search agrees",
            holds == found.is_none(),
            corpus.len(),
            Some("decision and bounded search disagree".into()),
        ));
        if let Some(mut w) = self.axiom_witness(&r, "check-ns") {
            w.recheck = Some(rep.recheck.clone());
            rep.witnesses.push(w);
        }
        if let Some(i) = found {
            rep.witnesses.push(WitnessOut {
                description: format!("corpus item {i} is nonempty with no global element"),
                corpus_index: Some(i),
                object: Some(serialize_presheaf(&corpus.items[i])),
                recheck: Some(rep.recheck.clone()),
            });
        }
        rep.verdict = Outcome::from_bool(holds && rep.checks[0].passed, false);
        Ok(rep)
    }

    fn decidable(&self) -> Result<Report> {
        let x = self.object()?;
        let mut rep = self.report("decidable", false, &["decidable"]);
        let ok = is_decidable(&x);
        rep.line(format!("X is {}decidable", if ok { "" } else { "not " }));
        if !ok {
            let s = subobjects(&x)?.into_iter().find(|s| !s.is_complemented());
            if let Some(s) = s {
                rep.witnesses.push(WitnessOut {
                    description: format!("subobject {} is not complemented", describe_subobject(&s)),
                    object: Some(serialize_presheaf(&x)),
                    recheck: Some(rep.recheck.clone()),
                    ..Default::default()
                });
            }
        }
        rep.value = Some(json!(ok));
        rep.verdict = Outcome::from_bool(ok, false);
        Ok(rep)
    }

    fn pi(&self) -> Result<Report> {
        let x = self.object()?;
        let mut rep = self.report("pi", false, &["pi"]);
        let p = pi(&x)?;
        let points = global_elements(&p.object)?.len();
        let discrete = p.object.is_discrete();
        rep.line(format!("Π(X) has {points} global points"));
        rep.line(format!("Π(X) stage sizes {:?}", p.object.sizes()));
        rep.line(format!("Π(X) is {}discrete", if discrete { "" } else { "not " }));
        rep.line(format!("arrows X → 2: {}", p.maps_to_two.len()));
        rep.value = Some(json!({
            "points": points,
            "sizes": p.object.sizes(),
            "discrete": discrete,
            "maps_to_two": p.maps_to_two.len(),
            "object": serialize_presheaf(&p.object),
        }));
        Ok(rep)
    }

    fn connected(&self) -> Result<Report> {
        let x = self.object()?;
        let mut rep = self.report("connected", false, &["connected"]);
        let n = complemented_subobjects(&x)?.len();
        let ok = is_connected(&x)?;
        rep.line(format!("|Sub_c(X)| = {n}"));
        rep.line(format!("X is {}connected", if ok { "" } else { "not " }));
        rep.value = Some(json!(ok));
        rep.verdict = Outcome::from_bool(ok, false);
        if !ok {
            rep.witnesses.push(WitnessOut {
                description: format!("X has {n} complemented subobjects, not 2"),
                object: Some(serialize_presheaf(&x)),
                recheck: Some(rep.recheck.clone()),
                ..Default::default()
            });
        }
        Ok(rep)
    }

    fn subc(&self) -> Result<Report> {
        let x = self.object()?;
        let mut rep = self.report("subc", false, &["subc"]);
        let subs = complemented_subobjects(&x)?;
        rep.line(format!("{} complemented subobjects", subs.len()));
        for s in &subs {
            rep.line(format!("  {}", describe_subobject(s)));
        }
        rep.value = Some(json!(subs.len()));
        Ok(rep)
    }

    fn pneumo(&self, map: MapArg) -> Result<Report> {
        let x = self.object()?;
        let name = map_name(map);
        let mut rep = self.report("pneumo", false, &["pneumo", "--map", name]);
        let f = match map {
            MapArg::Terminal => HomSearch::new(&x, &terminal(&self.base))
                .first()?
                .context("no arrow to the terminal object")?,
            MapArg::PiUnit => pi(&x)?.quotient,
            MapArg::Separated => separated_reflection(&x)?.1,
            MapArg::Identity => NatTrans::identity(&x),
        };
        let (validity, sig) = pneumo_validity(&f)?;
        rep.line(format!("map {name}: fibers are {}pneumoconnected", if validity.is_valid() { "" } else { "not " }));
        if let Validity::Countermodel(cm) = &validity {
            rep.witnesses.push(WitnessOut {
                description: format!("countermodel at {}", cm.describe(&sig)),
                object: Some(serialize_presheaf(&x)),
                recheck: Some(rep.recheck.clone()),
                ..Default::default()
            });
        }
        rep.verdict = Outcome::from_bool(validity.is_valid(), false);
        Ok(rep)
    }

    fn check_axiom(&self, dqo: bool) -> Result<Report> {
        let command = if dqo { "check-dqo" } else { "check-dso" };
        let bounded = self.cli.object.is_none();
        let mut rep = self.report(command, bounded, &[command]);
        let r = if bounded {
            let corpus = self.corpus()?;
            rep.line(format!("corpus items: {}", corpus.len()));
            if dqo {
                check_dqo_bounded(&corpus)?
            } else {
                check_dso_bounded(&corpus)?
            }
        } else {
            let x = self.object()?;
            if dqo {
                check_dqo(&x)?
            } else {
                check_dso(&x)?
            }
        };
        rep.line(format!("{} {}", r.axiom.name(), Outcome::from(r.verdict).name()));
        rep.witnesses.extend(self.axiom_witness(&r, command));
        rep.verdict = r.verdict.into();
        Ok(rep)
    }

    fn dec_topos(&self) -> Result<Report> {
        let mut rep = self.report("dec-topos", true, &["dec-topos"]);
        let corpus = self.corpus()?;
        let r = match prereq(dec_is_topos_check(&corpus))? {
            Ok(r) => r,
            Err(msg) => return Ok(prereq_report(rep, &msg)),
        };
        rep.line(format!("every mono between decidables is complemented: {}", r.lhs));
        rep.line(format!("Π(f) is epic for every ¬¬-dense f: {}", r.rhs));
        rep.checks.push(check(
            "both sides agree",
            r.agree(),
            r.monos_checked + r.dense_arrows_checked,
            Some(format!("left {} right {}", r.lhs, r.rhs)),
        ));
        for (side, w) in [("mono", &r.lhs_witness), ("dense arrow", &r.rhs_witness)] {
            if let Some((i, j, d)) = w {
                rep.witnesses.push(WitnessOut {
                    description: format!("{side} from corpus item {i} to {j}: {d}"),
                    corpus_index: Some(*i),
                    object: Some(serialize_presheaf(&corpus.items[*i])),
                    recheck: Some(rep.recheck.clone()),
                });
            }
        }
        rep.checks_verdict(true);
        Ok(rep)
    }

    fn precohesion(&self) -> Result<Report> {
        let mut rep = self.report("precohesion", true, &["precohesion"]);
        let corpus = self.corpus()?;
        let r = check_precohesive(&corpus)?;
        if let Some(msg) = &r.prerequisite_failure {
            return Ok(prereq_report(rep, msg));
        }
        rep.checks = r.checks().into_iter().cloned().collect();
        rep.line(format!("precohesive at bound: {}", r.precohesive));
        rep.verdict = Outcome::from_bool(r.precohesive, true);
        Ok(rep)
    }

    fn verify(&self, target: Target) -> Result<Report> {
        let name = target_name(target);
        let mut rep = self.report("verify", true, &["verify", name]);
        let corpus = self.corpus()?;
        rep.line(format!("corpus items: {}", corpus.len()));
        let targets = match target {
            Target::All => vec![Target::A, Target::B, Target::C, Target::D, Target::Lemma, Target::Props],
            t => vec![t],
        };
        let mut prereq_failed = false;
        for t in targets {
            let label = target_name(t);
            match self.verify_one(t, &corpus, &mut rep)? {
                Ok(checks) => rep.checks.extend(checks.iter().map(|c| prefixed(label, c))),
                Err(msg) => {
                    prereq_failed = true;
                    rep.line(format!("{label}: prerequisite failed: {msg}"));
                }
            }
        }
        rep.checks_verdict(true);
        if prereq_failed {
            rep.verdict = Outcome::PrerequisiteFailed;
        }
        Ok(rep)
    }

    fn verify_one(
        &self,
        t: Target,
        corpus: &CorpusIndex,
        rep: &mut Report,
    ) -> Result<std::result::Result<Vec<Check>, String>> {
        let label = target_name(t);
        Ok(Ok(match t {
            Target::A | Target::B => {
                let r = match prereq(theorem_ab_harness(corpus))? {
                    Ok(r) => r,
                    Err(msg) => return Ok(Err(msg)),
                };
                if t == Target::A {
                    vec![r.reflection, r.products]
                } else {
                    vec![r.exponential_ideal, r.reflective_implies_dqo]
                }
            }
            Target::C => {
                let r = match prereq(theorem_c_harness(corpus, None))? {
                    Ok(r) => r,
                    Err(msg) => return Ok(Err(msg)),
                };
                rep.line(format!("{label}: DQO ∧ DSO at bound: {}", r.axioms_side));
                rep.line(format!("{label}: precohesive at bound: {}", r.precohesive_side));
                let mut checks: Vec<Check> = r.precohesion.checks().into_iter().cloned().collect();
                checks.push(r.forward_ingredients.clone());
                checks.push(check(
                    "DQO ∧ DSO ⇔ precohesive",
                    r.agree,
                    1,
                    Some(format!("axioms {} precohesive {}", r.axioms_side, r.precohesive_side)),
                ));
                let noticed = theorem_c_self_test(corpus)?;
                checks.push(check("mutation self-test", noticed, 1, Some("mutant not detected".into())));
                checks
            }
            Target::D => {
                let r = match prereq(dec_is_topos_check(corpus))? {
                    Ok(r) => r,
                    Err(msg) => return Ok(Err(msg)),
                };
                rep.line(format!("{label}: monos between decidables complemented: {}", r.lhs));
                rep.line(format!("{label}: Π(f) epic for ¬¬-dense f: {}", r.rhs));
                vec![check(
                    "dec(E) topos ⇔ Π(dense) epic",
                    r.agree(),
                    r.monos_checked + r.dense_arrows_checked,
                    Some(format!("left {} right {}", r.lhs, r.rhs)),
                )]
            }
            Target::Lemma => {
                let r = lemma_harness(corpus)?;
                rep.line(format!(
                    "{label}: {} epis, {} satisfy (i), (ii) and (iii)",
                    r.epis_checked, r.satisfied
                ));
                let witness = r.failure.as_ref().map(|f| {
                    format!(
                        "epi from corpus item {} to {}: (i) {} (ii) {} (iii) {}",
                        f.domain,
                        f.codomain,
                        f.conditions.maps_to_two,
                        f.conditions.pneumoconnected,
                        f.conditions.maps_to_decidables
                    )
                });
                vec![check("(i) ⇔ (ii) ⇔ (iii)", r.failure.is_none(), r.epis_checked, witness)]
            }
            Target::Props => props_harness(corpus)?,
            Target::All => unreachable!(),
        }))
    }

    fn search(&self, property: &str) -> Result<Report> {
        let p: Property = property.parse().map_err(|_| {
            anyhow::anyhow!("unknown property `{property}`; expected one of {}", PROPERTY_NAMES.join(", "))
        })?;
        let name = p.to_string();
        let mut rep = self.report("search-counterexample", true, &["search-counterexample", &name]);
        let corpus = self.corpus()?;
        let r = search_counterexample(p, &corpus)?;
        rep.line(format!("property {name}: {} instances checked", r.instances_checked));
        let per_object: Option<Vec<&str>> = match p {
            Property::DqoUniqueness => Some(vec!["check-dqo"]),
            Property::DsoUniqueness => Some(vec!["check-dso"]),
            Property::Pneumo(f) => Some(vec![
                "pneumo",
                "--map",
                match f {
                    MapFamily::PiUnit => "pi-unit",
                    MapFamily::Separated => "separated",
                    MapFamily::Identity => "identity",
                },
            ]),
            Property::PiProduct | Property::Lemma => None,
        };
        let mut seen = Vec::new();
        for (kind, w) in [("first", &r.witness), ("shrunk", &r.shrunk)] {
            let Some(w) = w else { continue };
            if seen.contains(&w.items) {
                continue;
            }
            seen.push(w.items.clone());
            let recheck = match &per_object {
                Some(args) => self.command_line(false, Some(&self.corpus_object(w.items[0])), args),
                None => rep.recheck.clone(),
            };
            let items: Vec<String> = w.items.iter().map(usize::to_string).collect();
            let objects: Vec<String> = w.objects.iter().map(serialize_presheaf).collect();
            rep.witnesses.push(WitnessOut {
                description: format!("{kind}: corpus items [{}]: {}", items.join(", "), w.detail),
                corpus_index: w.items.first().copied(),
                object: Some(objects.join("\n")),
                recheck: Some(recheck),
            });
        }
        rep.verdict = Outcome::from_bool(r.witness.is_none(), true);
        Ok(rep)
    }

    fn catalog(&self, emit: Option<&Path>) -> Result<Report> {
        let mut rep = self.report("catalog", false, &["catalog"]);
        rep.recheck = "dectopos catalog".into();
        let mut entries = Vec::new();
        for e in catalog_entries() {
            rep.line(format!(
                "{:<13} {} objects, {:>2} morphisms   NS {:<7} DQO {:<7} DSO {}",
                e.name,
                e.category.num_objects(),
                e.category.num_morphisms(),
                expectation(e.ns),
                expectation(e.dqo),
                expectation(e.dso)
            ));
            entries.push(json!({
                "name": e.name,
                "objects": e.category.num_objects(),
                "morphisms": e.category.num_morphisms(),
                "ns": expectation(e.ns),
                "dqo": expectation(e.dqo),
                "dso": expectation(e.dso),
            }));
        }
        rep.value = Some(json!(entries));
        if let Some(dir) = emit {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (file, text) in emitted_files()? {
                let path = dir.join(&file);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                rep.line(format!("wrote {}", path.display()));
            }
        }
        Ok(rep)
    }

    fn valid(&self, formula: &str) -> Result<Report> {
        let x = self.object()?;
        let mut rep = self.report("valid", false, &["valid", formula]);
        let mut sig = Signature::new();
        let xs = sig.add_sort("X", &x)?;
        sig.add_power("PX", xs)?;
        let (free, phi) = parse_formula(&sig, formula)?;
        let free: Vec<(&str, _)> = free.iter().map(|(v, s)| (v.as_str(), *s)).collect();
        let validity = Query::new(&sig, &free, &phi)?.universally_valid()?;
        rep.line(format!("formula is {}universally valid", if validity.is_valid() { "" } else { "not " }));
        if let Validity::Countermodel(cm) = &validity {
            rep.witnesses.push(WitnessOut {
                description: format!("countermodel at {}", cm.describe(&sig)),
                object: Some(serialize_presheaf(&x)),
                recheck: Some(rep.recheck.clone()),
                ..Default::default()
            });
        }
        rep.verdict = Outcome::from_bool(validity.is_valid(), false);
        Ok(rep)
    }
}

fn prereq_report(mut rep: Report, msg: &str) -> Report {
    rep.line(format!("prerequisite failed: {msg}"));
    rep.verdict = Outcome::PrerequisiteFailed;
    rep
}

fn map_name(m: MapArg) -> &'static str {
    match m {
        MapArg::Terminal => "terminal",
        MapArg::PiUnit => "pi-unit",
        MapArg::Separated => "separated",
        MapArg::Identity => "identity",
    }
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::A => "A",
        Target::B => "B",
        Target::C => "C",
        Target::D => "D",
        Target::Lemma => "lemma",
        Target::Props => "props",
        Target::All => "all",
    }
}

fn expectation(e: Expectation) -> &'static str {
    match e {
        Expectation::Holds => "holds",
        Expectation::Fails => "fails",
        Expectation::Unknown => "unknown",
    }
}

/// Category files for the catalog and a few sample presheaves.
pub fn emitted_files() -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for name in CATALOG_NAMES {
        out.push((format!("{name}.cat"), serialize_category(&catalog(name)?)));
    }
    let samples: [(&str, &[(&str, &str)]); 3] = [
        ("refgraph", &[("p2.psh", "P2"), ("d2.psh", "D2"), ("l.psh", "L")]),
        ("graph", &[("a1.psh", "A1"), ("c1.psh", "C1")]),
        ("two-discrete", &[("pair-1-0.psh", "pair(1,0)")]),
    ];
    for (base, files) in samples {
        let b = Arc::new(catalog(base)?);
        for (file, name) in files {
            out.push((file.to_string(), serialize_presheaf(&builtin(&b, name)?)));
        }
    }
    Ok(out)
}
