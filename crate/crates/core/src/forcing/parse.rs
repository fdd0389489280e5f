//! Surface syntax for formulas.
//!
//! ```text
//! input   := decl* formula
//! decl    := "var" NAME ":" SORT ";"
//! formula := "true" | "false" | "not" formula
//!          | ("and" | "or" | "implies") formula formula
//!          | ("all" | "exists" | "unique") NAME ":" SORT "." formula
//!          | "(" formula ")"
//!          | term "=" term | term "in" term | term "in" PREDICATE
//! term    := NAME | ARROW "(" term ")" | "<" term "," term ">"
//! ```
//!
//! `x in S` reads `S` as a predicate when `S` is not a variable in scope.
//! Line comments start with `#`.

use super::{Formula, Signature, SortId, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let (line, col) = (li + 1, i + 1);
            if ch.is_alphanumeric() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || "_'".contains(chars[i])) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Name(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            } else if "():;.=<>,".contains(ch) {
                out.push(Token {
                    tok: Tok::Sym(ch),
                    line,
                    col,
                });
                i += 1;
            } else {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 9] = [
    "true", "false", "not", "and", "or", "implies", "all", "exists", "unique",
];

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or((1, 1), |t| (t.line, t.col));
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    fn sym(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(ch)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{ch}`")))
        }
    }

    fn sort(&mut self) -> Result<SortId> {
        let n = self.name()?;
        self.sig.sort_id(&n).ok_or_else(|| {
            self.pos -= 1;
            let e = self.error(format!("unknown sort `{n}`"));
            self.pos += 1;
            e
        })
    }

    fn keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == k)
    }

    fn formula(&mut self) -> Result<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok {
            Tok::Sym('(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.sym(')')?;
                Ok(f)
            }
            Tok::Name(n) if KEYWORDS.contains(&n.as_str()) => {
                match n.as_str() {
                    "true" => {
                        self.pos += 1;
                        Ok(Formula::True)
                    }
                    "false" => {
                        self.pos += 1;
                        Ok(Formula::False)
                    }
                    "not" => {
                        self.pos += 1;
                        Ok(Formula::not(self.formula()?))
                    }
                    "and" | "or" | "implies" => {
                        self.pos += 1;
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Ok(match n.as_str() {
                            "and" => Formula::and(a, b),
                            "or" => Formula::or(a, b),
                            _ => Formula::implies(a, b),
                        })
                    }
                    "all" | "exists" | "unique" => {
                        self.pos += 1;
                        let v = self.name()?;
                        self.sym(':')?;
                        let s = self.sort()?;
                        self.sym('.')?;
                        self.scope.push(v.clone());
                        let body = self.formula();
                        self.scope.pop();
                        let body = body?;
                        Ok(match n.as_str() {
                            "all" => Formula::forall(&v, s, body),
                            "exists" => Formula::exists(&v, s, body),
                            _ => Formula::exists_unique(&v, s, body),
                        })
                    }
                    _ => unreachable!("keyword list"),
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        if self.peek() == Some(&Tok::Sym('=')) {
            self.pos += 1;
            let rhs = self.term()?;
            return Ok(Formula::eq(lhs, rhs));
        }
        if self.keyword("in") {
            self.pos += 1;
            if let (Some(Tok::Name(n)), next) = (self.peek().cloned(), self.peek_at(1)) {
                let is_call = next == Some(&Tok::Sym('('));
                if !is_call && !self.scope.contains(&n) && self.sig.has_predicate(&n) {
                    self.pos += 1;
                    return Ok(Formula::holds(lhs, &n));
                }
            }
            let rhs = self.term()?;
            return Ok(Formula::member(lhs, rhs));
        }
        Err(self.error("expected `=` or `in`"))
    }

    fn term(&mut self) -> Result<Term> {
        if self.peek() == Some(&Tok::Sym('<')) {
            self.pos += 1;
            let a = self.term()?;
            self.sym(',')?;
            let b = self.term()?;
            self.sym('>')?;
            return Ok(Term::pair(a, b));
        }
        let n = self.name()?;
        if self.peek() == Some(&Tok::Sym('(')) {
            self.pos += 1;
            let t = self.term()?;
            self.sym(')')?;
            return Ok(Term::app(&n, t));
        }
        Ok(Term::Var(n))
    }
}

/// Parse declarations and a formula; returns the declared free variables in
/// order together with the formula.
pub fn parse_formula(sig: &Signature, src: &str) -> Result<(Vec<(String, SortId)>, Formula)> {
    let mut p = Parser {
        sig,
        toks: lex(src)?,
        pos: 0,
        scope: Vec::new(),
    };
    let mut free = Vec::new();
    while p.keyword("var") {
        p.pos += 1;
        let v = p.name()?;
        p.sym(':')?;
        let s = p.sort()?;
        p.sym(';')?;
        if free.iter().any(|(n, _)| n == &v) {
            p.pos -= 4;
            return Err(p.error(format!("variable `{v}` declared twice")));
        }
        p.scope.push(v.clone());
        free.push((v, s));
    }
    let phi = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok((free, phi))
}
