//! Parsers for the expression grammar and the graph input formats.
//!
//! Classes and factors use the grammar (whitespace insignificant):
//!
//! ```text
//! class  := item ("+" item)*
//! item   := [nat "*"]? "<" factor ">"
//! factor := term ("+" term)* | "0"
//! term   := [coeff "*"]? "z" "^" "(" rat ")"
//! coeff  := rat | rat "i" | "(" rat ("+"|"-") rat "i" ")"
//! rat    := ["-"] nat ["/" nat]
//! ```
//!
//! Graphs and diagrams come either as JSON
//! (`{"vertices": [...], "B": [[...]]}`) or as an edge list with one
//! `u v mult` entry per line (`;` also separates entries); a line holding
//! a single token declares an isolated vertex.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cyclo::Cyclotomic;
use crate::diagram::{Diagram, IrregularClass};
use crate::error::{Error, Result};
use crate::puiseux::ExponentialFactor;
use crate::rational::Rational;

/// A parsed class expression: the source text plus the entries in source
/// order, before merging conjugate factors.
#[derive(Debug, Clone)]
pub struct ClassExpression {
    pub source: String,
    pub entries: Vec<(u32, ExponentialFactor)>,
}

impl ClassExpression {
    pub fn to_class(&self) -> Result<IrregularClass> {
        IrregularClass::from_factors(self.entries.iter().map(|(m, q)| (q.clone(), *m)))
    }
}

pub fn parse_class(text: &str) -> Result<ClassExpression> {
    let mut p = Parser::new(text);
    let entries = p.class()?;
    p.finish()?;
    Ok(ClassExpression {
        source: text.to_string(),
        entries,
    })
}

pub fn parse_factor(text: &str) -> Result<ExponentialFactor> {
    let mut p = Parser::new(text);
    let terms = p.factor()?;
    p.finish()?;
    ExponentialFactor::new(terms)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn ws(&mut self) {
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, expected: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == expected => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{}`", expected as char))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }

    fn nat(&mut self) -> Result<BigUint> {
        self.ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse as BigUint"))
    }

    fn rat(&mut self) -> Result<Rational> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let numer = self.nat()?;
        let denom = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.nat()?;
            if d.is_zero() {
                return Err(self.err("denominator must be nonzero"));
            }
            d
        } else {
            BigUint::from(1u32)
        };
        let mut numer = BigInt::from(numer);
        if negative {
            numer = -numer;
        }
        Ok(Rational::new(numer, BigInt::from(denom)))
    }

    fn coeff(&mut self) -> Result<Cyclotomic> {
        if self.peek() == Some(b'(') {
            self.eat(b'(')?;
            let re = self.rat()?;
            let sign = match self.peek() {
                Some(b'+') => 1,
                Some(b'-') => -1,
                _ => return Err(self.err("expected `+` or `-` in a complex coefficient")),
            };
            self.pos += 1;
            let mut im = self.rat()?;
            if sign < 0 {
                im = -im;
            }
            self.eat(b'i')?;
            self.eat(b')')?;
            return Ok(Cyclotomic::gaussian(re, im));
        }
        let value = self.rat()?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            Ok(Cyclotomic::gaussian(Rational::zero(), value))
        } else {
            Ok(Cyclotomic::from_rational(value))
        }
    }

    fn term(&mut self) -> Result<(Rational, Cyclotomic)> {
        let coeff = if self.peek() == Some(b'z') {
            Cyclotomic::one()
        } else {
            let c = self.coeff()?;
            self.eat(b'*')?;
            c
        };
        self.eat(b'z')?;
        self.eat(b'^')?;
        self.eat(b'(')?;
        let exponent = self.rat()?;
        self.eat(b')')?;
        if !exponent.is_positive() {
            return Err(Error::NonPositiveExponent(
                crate::rational::format_rational(&exponent),
            ));
        }
        Ok((exponent, coeff))
    }

    fn factor(&mut self) -> Result<Vec<(Rational, Cyclotomic)>> {
        // the zero factor is written literally as `0`
        if self.peek() == Some(b'0') {
            let save = self.pos;
            self.pos += 1;
            match self.peek() {
                // `0` continuing into a longer token is a malformed term
                Some(b) if b.is_ascii_digit() || b == b'/' || b == b'*' || b == b'i' => {
                    self.pos = save;
                }
                _ => return Ok(Vec::new()),
            }
        }
        let mut terms = vec![self.term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(terms)
    }

    fn item(&mut self) -> Result<(u32, ExponentialFactor)> {
        let mult = match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let n = self.nat()?;
                self.eat(b'*')?;
                let m = n
                    .to_u32()
                    .ok_or_else(|| self.err("multiplicity too large"))?;
                if m == 0 {
                    return Err(Error::ZeroMultiplicity);
                }
                m
            }
            _ => 1,
        };
        self.eat(b'<')?;
        let terms = self.factor()?;
        self.eat(b'>')?;
        Ok((mult, ExponentialFactor::new(terms)?))
    }

    fn class(&mut self) -> Result<Vec<(u32, ExponentialFactor)>> {
        let mut entries = vec![self.item()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            entries.push(self.item()?);
        }
        Ok(entries)
    }
}

/// Parses a graph or diagram from JSON or edge-list text.
pub fn parse_diagram_input(text: &str) -> Result<Diagram> {
    if text.trim_start().starts_with('{') {
        parse_diagram_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// Reads `{"vertices": [{"id", ..., "mult"?}], "B": [[...]]}`; the
/// `vertices` field is optional.
pub fn parse_diagram_json(text: &str) -> Result<Diagram> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        offset: e.column().saturating_sub(1),
        message: format!("invalid JSON: {e}"),
    })?;
    let b_rows = value
        .get("B")
        .and_then(|b| b.as_array())
        .ok_or_else(|| Error::InvalidDiagram("missing `B` matrix".into()))?;
    let mut b = Vec::with_capacity(b_rows.len());
    for row in b_rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::InvalidDiagram("`B` must be a matrix".into()))?;
        let mut out = Vec::with_capacity(row.len());
        for x in row {
            out.push(x.as_i64().ok_or_else(|| {
                Error::InvalidDiagram("matrix entries must be integers".into())
            })?);
        }
        b.push(out);
    }
    let mut names = None;
    let mut mults = None;
    if let Some(vertices) = value.get("vertices").and_then(|v| v.as_array()) {
        let mut ns = Vec::with_capacity(vertices.len());
        let mut ms = Vec::with_capacity(vertices.len());
        for (idx, v) in vertices.iter().enumerate() {
            let name = v
                .get("circle")
                .and_then(|x| x.as_str())
                .map(|s| s.to_string())
                .or_else(|| v.get("id").map(json_scalar_to_string))
                .unwrap_or_else(|| idx.to_string());
            ns.push(name);
            ms.push(v.get("mult").and_then(|m| m.as_u64()));
        }
        names = Some(ns);
        if !ms.is_empty() && ms.iter().all(|m| m.is_some()) {
            mults = Some(ms.into_iter().map(|m| m.unwrap()).collect());
        }
    }
    Diagram::from_matrix(names, b, mults)
}

fn json_scalar_to_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads an edge list: one `u v mult` entry per line (or `;`-separated),
/// single tokens declaring isolated vertices. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Diagram> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    fn index_of(names: &mut Vec<String>, token: &str) -> usize {
        match names.iter().position(|n| n == token) {
            Some(i) => i,
            None => {
                names.push(token.to_string());
                names.len() - 1
            }
        }
    }
    for (lineno, raw) in text.split(['\n', ';']).enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [v] => {
                index_of(&mut names, v);
            }
            [u, v, m] => {
                let mult: i64 = m.parse().map_err(|_| Error::Parse {
                    offset: lineno,
                    message: format!("invalid multiplicity `{m}`"),
                })?;
                let ui = index_of(&mut names, u);
                let vi = index_of(&mut names, v);
                edges.push((ui, vi, mult));
            }
            _ => {
                return Err(Error::Parse {
                    offset: lineno,
                    message: format!("expected `u v mult` or a single vertex, got `{line}`"),
                })
            }
        }
    }
    let n = names.len();
    let mut b = vec![vec![0i64; n]; n];
    let mut seen = vec![vec![false; n]; n];
    for (u, v, m) in edges {
        if seen[u][v] && b[u][v] != m {
            return Err(Error::InvalidDiagram(format!(
                "conflicting multiplicities for edge {} {}",
                names[u], names[v]
            )));
        }
        seen[u][v] = true;
        seen[v][u] = true;
        b[u][v] = m;
        b[v][u] = m;
    }
    Diagram::from_matrix(Some(names), b, None)
}
