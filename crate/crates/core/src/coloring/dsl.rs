//! `mod:<m>` | `table:<path.json>` | `lift:<base>:<inner>` | `collapse:<inner>` | `reducibility`

use std::path::Path;

use thiserror::Error;

use super::{collapse_to_t, lift_from_nat, ColorError, NatColoring, PolyColoring, PolyOracle};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coloring {
    Nat(NatColoring),
    Poly(PolyColoring),
}

impl Coloring {
    pub fn color_count(&self) -> u32 {
        match self {
            Coloring::Nat(c) => c.color_count(),
            Coloring::Poly(c) => c.color_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("coloring spec error at position {position}: {message} (expected one of: {})", expected.join(", "))]
pub struct DslError {
    pub position: usize,
    pub expected: Vec<String>,
    pub message: String,
}

pub fn parse_coloring(spec: &str) -> Result<Coloring, DslError> {
    parse_at(spec, 0)
}

const HEADS: [&str; 5] = ["mod:", "table:", "lift:", "collapse:", "reducibility"];

fn err(position: usize, expected: &[&str], message: impl Into<String>) -> DslError {
    DslError {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        message: message.into(),
    }
}

fn invalid(offset: usize, e: ColorError) -> DslError {
    err(offset, &["a valid coloring"], e.to_string())
}

fn parse_at(spec: &str, offset: usize) -> Result<Coloring, DslError> {
    if spec == "reducibility" {
        return Ok(Coloring::Poly(PolyColoring::Reducibility));
    }
    if let Some(rest) = spec.strip_prefix("mod:") {
        let at = offset + 4;
        let m = number(rest, at)?;
        return NatColoring::modulo(m).map(Coloring::Nat).map_err(|e| invalid(at, e));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let at = offset + 6;
        if path.is_empty() {
            return Err(err(at, &["<path.json>"], "missing table path"));
        }
        return NatColoring::load_table(Path::new(path))
            .map(Coloring::Nat)
            .map_err(|e| invalid(at, e));
    }
    if let Some(rest) = spec.strip_prefix("lift:") {
        let at = offset + 5;
        let (base, inner) = rest
            .split_once(':')
            .ok_or_else(|| err(at + rest.len(), &[":"], "lift needs <base>:<inner>"))?;
        let base = number(base, at)?;
        let inner_at = at + base.to_string().len() + 1;
        return match parse_at(inner, inner_at)? {
            Coloring::Nat(n) => lift_from_nat(n, base).map(Coloring::Poly).map_err(|e| invalid(at, e)),
            Coloring::Poly(_) => Err(err(inner_at, &["mod:", "table:"], "lift expects a coloring of the integers")),
        };
    }
    if let Some(rest) = spec.strip_prefix("collapse:") {
        let at = offset + 9;
        return match parse_at(rest, at)? {
            Coloring::Poly(p) => Ok(Coloring::Poly(collapse_to_t(p))),
            Coloring::Nat(_) => Err(err(at, &["lift:", "collapse:", "reducibility"], "collapse expects a polynomial coloring")),
        };
    }
    Err(err(offset, &HEADS, format!("unknown coloring '{spec}'")))
}

fn number(s: &str, at: usize) -> Result<u32, DslError> {
    if s.is_empty() {
        return Err(err(at, &["<integer>"], "missing number"));
    }
    if let Some(i) = s.find(|c: char| !c.is_ascii_digit()) {
        return Err(err(at + i, &["<integer>"], format!("unexpected '{}'", &s[i..])));
    }
    s.parse().map_err(|_| err(at, &["<integer>"], "number too large"))
}
