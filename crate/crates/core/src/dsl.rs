//! The critique language used by human sessions.
//!
//! A critique is a conjunction of atoms over trip route attributes:
//!
//! ```text
//! total_cost <= 500
//! time_at_city(2) >= 0.5 and season = winter
//! conjunction(season = winter, indoor_hours ≥ 1)
//! ```
//!
//! Expressions compile to a [`TripFeature::Indicator`] that is `+1` when
//! every atom holds and `-1` otherwise. The grammar lives in
//! `docs/critique-grammar.ebnf`; [`GRAMMAR_VERSION`] tracks it.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::trip::{Atom, Attribute, CmpOp, Season, TripDomain, TripFeature, ACTIVITIES};

pub const GRAMMAR_VERSION: &str = "1.0";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DslErrorKind {
    Syntax,
    Type,
}

/// A parse or type error; `column` counts characters from 1.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{kind_name} error at column {column}: {message}", kind_name = self.kind_name())]
pub struct DslError {
    pub kind: DslErrorKind,
    pub column: usize,
    pub message: String,
}

impl DslError {
    fn syntax(column: usize, message: impl Into<String>) -> Self {
        DslError {
            kind: DslErrorKind::Syntax,
            column,
            message: message.into(),
        }
    }

    fn typing(column: usize, message: impl Into<String>) -> Self {
        DslError {
            kind: DslErrorKind::Type,
            column,
            message: message.into(),
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            DslErrorKind::Syntax => "syntax",
            DslErrorKind::Type => "type",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Op(CmpOp),
    LParen,
    RParen,
    Comma,
    And,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Op(op) => write!(f, "'{}'", op.symbol()),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::And => f.write_str("'and'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '≤' => (Tok::Op(CmpOp::Le), 1),
            '≥' => (Tok::Op(CmpOp::Ge), 1),
            '∧' => (Tok::And, 1),
            '<' if next == Some('=') => (Tok::Op(CmpOp::Le), 2),
            '>' if next == Some('=') => (Tok::Op(CmpOp::Ge), 2),
            '<' => (Tok::Op(CmpOp::Lt), 1),
            '>' => (Tok::Op(CmpOp::Gt), 1),
            '=' if next == Some('=') => (Tok::Op(CmpOp::Eq), 2),
            '=' => (Tok::Op(CmpOp::Eq), 1),
            '&' if next == Some('&') => (Tok::And, 2),
            '"' => {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&c| c == '"')
                    .ok_or_else(|| DslError::syntax(col, "unterminated string"))?;
                let s: String = chars[i + 1..i + 1 + end].iter().collect();
                (Tok::Str(s), end + 2)
            }
            _ if c.is_ascii_digit()
                || c == '.'
                || (c == '-' && next.is_some_and(|n| n.is_ascii_digit() || n == '.')) =>
            {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| DslError::syntax(col, format!("malformed number '{text}'")))?;
                (Tok::Num(v), j - i)
            }
            _ if c.is_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if word.eq_ignore_ascii_case("and") {
                    Tok::And
                } else {
                    Tok::Ident(word)
                };
                (tok, j - i)
            }
            _ => return Err(DslError::syntax(col, format!("unexpected character '{c}'"))),
        };
        out.push((tok, col));
        i += len;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// An argument as written: an index or a name.
#[derive(Clone, Debug, PartialEq)]
enum Arg {
    Index(f64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq)]
enum RawAtom {
    Compare {
        name: String,
        arg: Option<(Arg, usize)>,
        op: CmpOp,
        value: f64,
        column: usize,
        value_column: usize,
    },
    Season {
        op: CmpOp,
        name: String,
        column: usize,
        value_column: usize,
    },
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, DslError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(DslError::syntax(
                self.column(),
                format!("expected {what}, found {}", self.peek()),
            ))
        }
    }

    fn expression(&mut self, out: &mut Vec<RawAtom>) -> Result<(), DslError> {
        self.term(out)?;
        while *self.peek() == Tok::And {
            self.bump();
            self.term(out)?;
        }
        Ok(())
    }

    fn term(&mut self, out: &mut Vec<RawAtom>) -> Result<(), DslError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                self.expression(out)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(())
            }
            Tok::Ident(word)
                if word == "conjunction" && self.toks[self.pos + 1].0 == Tok::LParen =>
            {
                self.bump();
                self.bump();
                self.expression(out)?;
                while *self.peek() == Tok::Comma {
                    self.bump();
                    self.expression(out)?;
                }
                self.expect(Tok::RParen, "',' or ')'")?;
                Ok(())
            }
            Tok::Ident(_) => {
                out.push(self.atom()?);
                Ok(())
            }
            other => Err(DslError::syntax(
                self.column(),
                format!("expected an attribute, found {other}"),
            )),
        }
    }

    fn atom(&mut self) -> Result<RawAtom, DslError> {
        let (tok, column) = self.bump();
        let Tok::Ident(name) = tok else {
            unreachable!()
        };
        if name == "season" {
            let op = self.operator()?;
            let value_column = self.column();
            return match self.bump().0 {
                Tok::Ident(s) | Tok::Str(s) => Ok(RawAtom::Season {
                    op,
                    name: s,
                    column,
                    value_column,
                }),
                other => Err(DslError::syntax(
                    value_column,
                    format!("expected a season, found {other}"),
                )),
            };
        }
        let arg = if *self.peek() == Tok::LParen {
            self.bump();
            let col = self.column();
            let arg = match self.bump().0 {
                Tok::Num(v) => Arg::Index(v),
                Tok::Ident(s) | Tok::Str(s) => Arg::Name(s),
                other => {
                    return Err(DslError::syntax(
                        col,
                        format!("expected an index or a name, found {other}"),
                    ))
                }
            };
            self.expect(Tok::RParen, "')'")?;
            Some((arg, col))
        } else {
            None
        };
        let op = self.operator()?;
        let value_column = self.column();
        match self.bump().0 {
            Tok::Num(value) => Ok(RawAtom::Compare {
                name,
                arg,
                op,
                value,
                column,
                value_column,
            }),
            other => Err(DslError::syntax(
                value_column,
                format!("expected a number, found {other}"),
            )),
        }
    }

    fn operator(&mut self) -> Result<CmpOp, DslError> {
        let col = self.column();
        match self.bump().0 {
            Tok::Op(op) => Ok(op),
            other => Err(DslError::syntax(
                col,
                format!("expected a comparison operator, found {other}"),
            )),
        }
    }
}

/// Parsed but not yet checked against a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    atoms: Vec<RawAtom>,
}

pub fn parse(src: &str) -> Result<Expression, DslError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut atoms = Vec::new();
    p.expression(&mut atoms)?;
    if *p.peek() != Tok::End {
        return Err(DslError::syntax(
            p.column(),
            format!("expected 'and' or end of input, found {}", p.peek()),
        ));
    }
    Ok(Expression { atoms })
}

fn resolve(
    domain: &TripDomain,
    name: &str,
    arg: Option<(Arg, usize)>,
    column: usize,
) -> Result<Attribute, DslError> {
    let plain = match name {
        "total_cost" => Some(Attribute::TotalCost),
        "total_travel" => Some(Attribute::TotalTravel),
        "distinct_locations" => Some(Attribute::DistinctLocations),
        "regions_visited" => Some(Attribute::RegionsVisited),
        "moves" => Some(Attribute::Moves),
        "indoor_hours" => Some(Attribute::IndoorHours),
        "outdoor_hours" => Some(Attribute::OutdoorHours),
        _ => None,
    };
    if let Some(attr) = plain {
        return match arg {
            None => Ok(attr),
            Some((_, col)) => Err(DslError::typing(col, format!("{name} takes no argument"))),
        };
    }
    let (make, names): (fn(usize) -> Attribute, Vec<String>) = match name {
        "time_at_city" => (Attribute::TimeAtCity, city_names(domain)),
        "slots_at_city" => (Attribute::SlotsAtCity, city_names(domain)),
        "activity_hours" => (
            Attribute::ActivityHours,
            ACTIVITIES.iter().map(|(n, _)| n.to_string()).collect(),
        ),
        "slots_in_region" => (Attribute::SlotsInRegion, domain.region_names().to_vec()),
        _ => {
            return Err(DslError::typing(
                column,
                format!("unknown attribute '{name}'"),
            ))
        }
    };
    let Some((arg, col)) = arg else {
        return Err(DslError::typing(
            column,
            format!("{name} needs an argument, e.g. {name}(0)"),
        ));
    };
    let index = match arg {
        Arg::Index(v) if v.fract() == 0.0 && v >= 0.0 && (v as usize) < names.len() => v as usize,
        Arg::Index(v) => {
            return Err(DslError::typing(
                col,
                format!(
                    "{name} index must be an integer in 0..{}, got {v}",
                    names.len()
                ),
            ))
        }
        Arg::Name(s) => names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(&s))
            .ok_or_else(|| DslError::typing(col, format!("unknown {name} argument '{s}'")))?,
    };
    Ok(make(index))
}

fn city_names(domain: &TripDomain) -> Vec<String> {
    domain.cities().iter().map(|c| c.name.clone()).collect()
}

impl Expression {
    /// Type-checks against `domain` and builds the indicator.
    pub fn compile(&self, domain: &TripDomain) -> Result<TripFeature, DslError> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for raw in &self.atoms {
            let atom = match raw.clone() {
                RawAtom::Season {
                    op,
                    name,
                    column,
                    value_column,
                } => {
                    if op != CmpOp::Eq {
                        return Err(DslError::typing(column, "season only supports '='"));
                    }
                    let season = Season::parse(&name.to_ascii_lowercase()).ok_or_else(|| {
                        DslError::typing(value_column, format!("unknown season '{name}'"))
                    })?;
                    Atom::Season { season }
                }
                RawAtom::Compare {
                    name,
                    arg,
                    op,
                    value,
                    column,
                    value_column,
                } => {
                    let attr = resolve(domain, &name, arg, column)?;
                    if !value.is_finite() {
                        return Err(DslError::typing(value_column, "value must be finite"));
                    }
                    Atom::Compare { attr, op, value }
                }
            };
            if !atoms.contains(&atom) {
                atoms.push(atom);
            }
        }
        Ok(TripFeature::indicator(atoms))
    }
}

/// Parses and compiles in one go.
pub fn compile(src: &str, domain: &TripDomain) -> Result<TripFeature, DslError> {
    parse(src)?.compile(domain)
}
