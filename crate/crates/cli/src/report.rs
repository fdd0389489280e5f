//! The report every subcommand produces, in text or JSON.

use std::fmt::Write as _;

use dectopos::decidable::Verdict;
use dectopos::precohesion::Check;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    HoldsAtBound,
    Fails,
    PrerequisiteFailed,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Holds => Outcome::Holds,
            Verdict::HoldsAtBound => Outcome::HoldsAtBound,
            Verdict::Fails => Outcome::Fails,
        }
    }
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::HoldsAtBound => "holds-at-bound",
            Outcome::Fails => "fails",
            Outcome::PrerequisiteFailed => "prerequisite-failed",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Holds | Outcome::HoldsAtBound => 0,
            Outcome::Fails | Outcome::PrerequisiteFailed => 1,
        }
    }

    pub fn from_bool(ok: bool, bounded: bool) -> Self {
        match (ok, bounded) {
            (true, false) => Outcome::Holds,
            (true, true) => Outcome::HoldsAtBound,
            (false, _) => Outcome::Fails,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct WitnessOut {
    pub description: String,
    pub corpus_index: Option<usize>,
    /// The witness object in presheaf file syntax.
    pub object: Option<String>,
    pub recheck: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub base: String,
    pub bounds: Option<Vec<usize>>,
    pub verdict: Outcome,
    pub summary: Vec<String>,
    pub value: Option<serde_json::Value>,
    pub witnesses: Vec<WitnessOut>,
    pub checks: Vec<Check>,
    pub recheck: String,
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(command: &str, base: &str, bounds: Option<Vec<usize>>, recheck: String) -> Self {
        Report {
            command: command.to_string(),
            base: base.to_string(),
            bounds,
            verdict: Outcome::Holds,
            summary: Vec::new(),
            value: None,
            witnesses: Vec::new(),
            checks: Vec::new(),
            recheck,
            timings: None,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.summary.push(s.into());
        self
    }

    pub fn checks_verdict(&mut self, bounded: bool) {
        self.verdict = Outcome::from_bool(self.checks.iter().all(|c| c.passed), bounded);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command  {}", self.command);
        let _ = writeln!(out, "base     {}", self.base);
        if let Some(b) = &self.bounds {
            let b: Vec<String> = b.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "bounds   {}", b.join(","));
        }
        let _ = writeln!(out, "verdict  {}", self.verdict.name());
        for l in &self.summary {
            let _ = writeln!(out, "  {l}");
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
            let _ = writeln!(out, "checks");
            for c in &self.checks {
                let pad = width - c.name.chars().count();
                let _ = writeln!(
                    out,
                    "  [{}] {}{} {:>6} tested",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    " ".repeat(pad),
                    c.tested
                );
                if let Some(w) = &c.witness {
                    let _ = writeln!(out, "         {w}");
                }
            }
        }
        for (i, w) in self.witnesses.iter().enumerate() {
            let _ = writeln!(out, "witness {}: {}", i + 1, w.description);
            if let Some(k) = w.corpus_index {
                let _ = writeln!(out, "  corpus index {k}");
            }
            if let Some(o) = &w.object {
                for l in o.lines() {
                    let _ = writeln!(out, "  | {l}");
                }
            }
            if let Some(r) = &w.recheck {
                let _ = writeln!(out, "  recheck: {r}");
            }
        }
        let _ = writeln!(out, "recheck  {}", self.recheck);
        if let Some(t) = &self.timings {
            let _ = writeln!(out, "time     {} ms", t.total_ms);
        }
        out
    }
}
