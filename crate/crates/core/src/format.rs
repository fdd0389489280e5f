//! Text formats for categories (`.cat`) and presheaves (`.psh`).
//!
//! ```text
//! # category file
//! category NAME
//! objects OBJ...
//! morphism NAME : DOM -> COD
//! identity OBJ NAME
//! compose G F = GF          # G∘F; identity composites may be omitted
//!
//! # presheaf file
//! presheaf over BASE
//! set OBJ : ELEM...
//! action MOR : ELEM -> ELEM, ...   # X(MOR): X(cod) → X(dom); identities may be omitted
//! ```
//!
//! Names are runs of letters, digits and `_'.-`; anything else is written in
//! double quotes. `#` starts a comment. Serialization is canonical: the same
//! object always produces the same bytes.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{validate_category, FinCategory, RawCategory};
use crate::presheaf::{validate_presheaf, Presheaf, RawPresheaf};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn parse_error(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn is_bare(ch: char) -> bool {
    ch.is_alphanumeric() || "_'.".contains(ch)
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            i += 1;
        } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Sym("->"), col });
            i += 2;
        } else if ch == ':' || ch == ',' || ch == '=' {
            let s = match ch {
                ':' => ":",
                ',' => ",",
                _ => "=",
            };
            out.push(Token { tok: Tok::Sym(s), col });
            i += 1;
        } else if ch == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(parse_error(lineno, col, "unterminated string")),
                    Some('"') => break,
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Token { tok: Tok::Word(s), col });
        } else if is_bare(ch) || ch == '-' {
            let start = i;
            while i < chars.len() && (is_bare(chars[i]) || (chars[i] == '-' && chars.get(i + 1) != Some(&'>'))) {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..i].iter().collect()),
                col,
            });
        } else {
            return Err(parse_error(lineno, col, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Line {
    no: usize,
    toks: Vec<Token>,
    pos: usize,
    end_col: usize,
}

impl Line {
    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self.toks.get(self.pos).map_or(self.end_col, |t| t.col);
        parse_error(self.no, col, msg)
    }

    fn err_at(&self, k: usize, msg: impl Into<String>) -> Error {
        parse_error(self.no, self.toks[k].col, msg)
    }

    fn word(&mut self, what: &str) -> Result<(usize, String)> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), .. }) => {
                self.pos += 1;
                Ok((self.pos - 1, w.clone()))
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Sym(t), .. }) if *t == s => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{s}`"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

fn lines(src: &str) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, l) in src.lines().enumerate() {
        let toks = lex_line(l, i + 1)?;
        if !toks.is_empty() {
            out.push(Line {
                no: i + 1,
                toks,
                pos: 0,
                end_col: l.chars().count() + 1,
            });
        }
    }
    Ok(out)
}

fn quote(name: &str) -> String {
    if !name.is_empty() && name.chars().all(|c| is_bare(c) || c == '-') && !name.contains("->") {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Parse and validate a category file.
pub fn parse_category(src: &str) -> Result<FinCategory> {
    let mut raw = RawCategory::default();
    let mut named = false;
    let mut objects_at = HashMap::new();
    let mut morphisms_at: HashMap<String, (usize, usize)> = HashMap::new();
    for mut line in lines(src)? {
        let (k, kw) = line.word("a keyword")?;
        match kw.as_str() {
            "category" => {
                if named {
                    return Err(line.err_at(k, "duplicate `category` line"));
                }
                raw.name = line.word("a category name")?.1;
                named = true;
            }
            "objects" => {
                while !line.at_end() {
                    let (k, o) = line.word("an object name")?;
                    if objects_at.insert(o.clone(), k).is_some() {
                        return Err(line.err_at(k, format!("duplicate object `{o}`")));
                    }
                    raw.objects.push(o);
                }
            }
            "morphism" => {
                let (k, name) = line.word("a morphism name")?;
                line.sym(":")?;
                let (kd, dom) = line.word("a domain")?;
                line.sym("->")?;
                let (kc, cod) = line.word("a codomain")?;
                for (kk, o) in [(kd, &dom), (kc, &cod)] {
                    if !objects_at.contains_key(o) {
                        return Err(line.err_at(kk, format!("unknown object `{o}`")));
                    }
                }
                if morphisms_at.insert(name.clone(), (line.no, k)).is_some() {
                    return Err(line.err_at(k, format!("duplicate morphism `{name}`")));
                }
                raw.morphisms.push((name, dom, cod));
            }
            "identity" => {
                let (ko, o) = line.word("an object name")?;
                let (km, m) = line.word("a morphism name")?;
                if !objects_at.contains_key(&o) {
                    return Err(line.err_at(ko, format!("unknown object `{o}`")));
                }
                if !morphisms_at.contains_key(&m) {
                    return Err(line.err_at(km, format!("unknown morphism `{m}`")));
                }
                raw.identities.push((o, m));
            }
            "compose" => {
                let (kg, g) = line.word("a morphism name")?;
                let (kf, f) = line.word("a morphism name")?;
                line.sym("=")?;
                let (kgf, gf) = line.word("a morphism name")?;
                for (kk, m) in [(kg, &g), (kf, &f), (kgf, &gf)] {
                    if !morphisms_at.contains_key(m) {
                        return Err(line.err_at(kk, format!("unknown morphism `{m}`")));
                    }
                }
                raw.composition.push((g, f, gf));
            }
            other => return Err(line.err_at(k, format!("unknown keyword `{other}`"))),
        }
        line.end()?;
    }
    if !named {
        return Err(parse_error(1, 1, "missing `category` line"));
    }
    let id_of: HashMap<String, String> = raw.identities.iter().map(|(o, m)| (o.clone(), m.clone())).collect();
    let mut extra = Vec::new();
    for (name, dom, cod) in &raw.morphisms {
        if let (Some(ic), Some(id)) = (id_of.get(cod), id_of.get(dom)) {
            extra.push((ic.clone(), name.clone(), name.clone()));
            extra.push((name.clone(), id.clone(), name.clone()));
        }
    }
    for e in extra {
        if !raw.composition.iter().any(|(g, f, _)| (g, f) == (&e.0, &e.1)) {
            raw.composition.push(e);
        }
    }
    validate_category(&raw)
}

/// Canonical text of a category; identity composites are left implicit.
pub fn serialize_category(cat: &FinCategory) -> String {
    let raw = cat.to_raw();
    let mut out = format!("category {}\n", quote(&raw.name));
    let objs: Vec<String> = raw.objects.iter().map(|o| quote(o)).collect();
    out.push_str(&format!("objects {}\n", objs.join(" ")));
    for (name, dom, cod) in &raw.morphisms {
        out.push_str(&format!("morphism {} : {} -> {}\n", quote(name), quote(dom), quote(cod)));
    }
    for (o, m) in &raw.identities {
        out.push_str(&format!("identity {} {}\n", quote(o), quote(m)));
    }
    for (g, f, gf) in &raw.composition {
        let (gi, fi) = (cat.morphism_id(g).expect("named"), cat.morphism_id(f).expect("named"));
        if !cat.is_identity(gi) && !cat.is_identity(fi) {
            out.push_str(&format!("compose {} {} = {}\n", quote(g), quote(f), quote(gf)));
        }
    }
    out
}

/// The base name a presheaf file declares, without parsing the rest.
pub fn presheaf_base_name(src: &str) -> Result<String> {
    let mut ls = lines(src)?;
    let Some(line) = ls.first_mut() else {
        return Err(parse_error(1, 1, "empty presheaf file"));
    };
    let (k, kw) = line.word("`presheaf`")?;
    if kw != "presheaf" {
        return Err(line.err_at(k, "expected `presheaf over BASE`"));
    }
    let (k, over) = line.word("`over`")?;
    if over != "over" {
        return Err(line.err_at(k, "expected `over`"));
    }
    Ok(line.word("a base name")?.1)
}

/// Parse a presheaf file over `base` and validate it.
pub fn parse_presheaf(base: &Arc<FinCategory>, src: &str) -> Result<Presheaf> {
    let mut raw = RawPresheaf::default();
    let mut elems: HashMap<String, Vec<String>> = HashMap::new();
    let mut header = false;
    for mut line in lines(src)? {
        let (k, kw) = line.word("a keyword")?;
        match kw.as_str() {
            "presheaf" => {
                if header {
                    return Err(line.err_at(k, "duplicate header"));
                }
                let (ko, over) = line.word("`over`")?;
                if over != "over" {
                    return Err(line.err_at(ko, "expected `over`"));
                }
                let (kb, name) = line.word("a base name")?;
                if name != base.name() {
                    return Err(line.err_at(
                        kb,
                        format!("file is over `{name}`, expected `{}`", base.name()),
                    ));
                }
                header = true;
            }
            "set" => {
                let (ko, o) = line.word("an object name")?;
                if base.object_id(&o).is_none() {
                    return Err(line.err_at(ko, format!("unknown object `{o}`")));
                }
                if elems.contains_key(&o) {
                    return Err(line.err_at(ko, format!("duplicate set for `{o}`")));
                }
                line.sym(":")?;
                let mut list = Vec::new();
                while !line.at_end() {
                    let (ke, e) = line.word("an element")?;
                    if list.contains(&e) {
                        return Err(line.err_at(ke, format!("duplicate element `{e}`")));
                    }
                    list.push(e);
                }
                elems.insert(o.clone(), list.clone());
                raw.sets.push((o, list));
            }
            "action" => {
                let (km, m) = line.word("a morphism name")?;
                let Some(f) = base.morphism_id(&m) else {
                    return Err(line.err_at(km, format!("unknown morphism `{m}`")));
                };
                let dom = base.object_name(base.dom(f)).to_string();
                let cod = base.object_name(base.cod(f)).to_string();
                line.sym(":")?;
                let mut pairs = Vec::new();
                while !line.at_end() {
                    let (kx, x) = line.word("an element")?;
                    line.sym("->")?;
                    let (ky, y) = line.word("an element")?;
                    for (kk, e, o) in [(kx, &x, &cod), (ky, &y, &dom)] {
                        let Some(list) = elems.get(o) else {
                            return Err(line.err_at(kk, format!("set for `{o}` must come first")));
                        };
                        if !list.contains(e) {
                            return Err(line.err_at(kk, format!("`{e}` is not in the set at `{o}`")));
                        }
                    }
                    pairs.push((x, y));
                    if !line.at_end() {
                        line.sym(",")?;
                    }
                }
                raw.actions.push((m, pairs));
            }
            other => return Err(line.err_at(k, format!("unknown keyword `{other}`"))),
        }
        line.end()?;
    }
    if !header {
        return Err(parse_error(1, 1, "missing `presheaf over BASE` line"));
    }
    validate_presheaf(base, &raw)
}

/// Canonical text of a presheaf; identity actions are left implicit.
pub fn serialize_presheaf(x: &Presheaf) -> String {
    let raw = x.to_raw();
    let mut out = format!("presheaf over {}\n", quote(x.base().name()));
    for (o, es) in &raw.sets {
        let es: Vec<String> = es.iter().map(|e| quote(e)).collect();
        let sep = if es.is_empty() { "" } else { " " };
        out.push_str(&format!("set {} :{sep}{}\n", quote(o), es.join(" ")));
    }
    for (m, pairs) in &raw.actions {
        let ps: Vec<String> = pairs
            .iter()
            .map(|(a, b)| format!("{} -> {}", quote(a), quote(b)))
            .collect();
        let sep = if ps.is_empty() { "" } else { " " };
        out.push_str(&format!("action {} :{sep}{}\n", quote(m), ps.join(", ")));
    }
    out
}
