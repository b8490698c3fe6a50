//! Text format: `2t^3+t`, `x1^2*x2 + 3*x1`. Whitespace is ignored.

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use super::{GoodPoly, Monomial, PolyError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {message} (expected {expected})")]
pub struct ParsePolyError {
    pub position: usize,
    pub expected: String,
    pub message: String,
}

/// Parses with the default variable names: `t` is variable 1, `x<i>` is variable `i`.
pub fn parse_poly(s: &str) -> Result<GoodPoly, ParsePolyError> {
    parse_poly_with(s, &default_names)
}

fn default_names(name: &str) -> Option<Var> {
    if name == "t" {
        return Some(1);
    }
    let idx = name.strip_prefix('x')?;
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    idx.parse::<Var>().ok().filter(|&v| v >= 1)
}

/// Parses with a caller supplied variable-name resolver.
pub fn parse_poly_with(s: &str, names: &dyn Fn(&str) -> Option<Var>) -> Result<GoodPoly, ParsePolyError> {
    let mut p = Parser {
        chars: s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
        pos: 0,
        len: s.len(),
        names,
    };
    p.poly()
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    names: &'a dyn Fn(&str) -> Option<Var>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(i, _)| i).unwrap_or(self.len)
    }

    fn err(&self, expected: &str, message: &str) -> ParsePolyError {
        ParsePolyError {
            position: self.offset(),
            expected: expected.to_string(),
            message: message.to_string(),
        }
    }

    fn poly(&mut self) -> Result<GoodPoly, ParsePolyError> {
        let mut terms: Vec<(Monomial, BigInt)> = Vec::new();
        loop {
            let start = self.offset();
            let (m, c) = self.term()?;
            if m.is_one() && c != BigInt::from(0) {
                return Err(ParsePolyError {
                    position: start,
                    expected: "a variable".into(),
                    message: "constant term present".into(),
                });
            }
            terms.push((m, c));
            match self.peek() {
                None => break,
                Some('+') => self.pos += 1,
                Some(_) => return Err(self.err("'+' or end of input", "unexpected character")),
            }
        }
        GoodPoly::make(terms).map_err(|e: PolyError| ParsePolyError {
            position: 0,
            expected: "a good polynomial".into(),
            message: e.to_string(),
        })
    }

    fn term(&mut self) -> Result<(Monomial, BigInt), ParsePolyError> {
        let coef = self.number();
        let mut pairs: Vec<(Var, u32)> = Vec::new();
        match (&coef, self.peek()) {
            (Some(_), Some('*')) => {
                self.pos += 1;
                pairs.push(self.factor()?);
            }
            (Some(_), Some(c)) if c.is_ascii_alphabetic() => pairs.push(self.factor()?),
            (Some(_), _) => {}
            (None, _) => pairs.push(self.factor()?),
        }
        while self.peek() == Some('*') {
            self.pos += 1;
            pairs.push(self.factor()?);
        }
        let m = Monomial::from_pairs(pairs).map_err(|e| self.err("a smaller exponent", &e.to_string()))?;
        let c = coef.unwrap_or_else(|| BigUint::from(1u32));
        Ok((m, BigInt::from(c)))
    }

    fn number(&mut self) -> Option<BigUint> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        digits.parse().ok()
    }

    fn factor(&mut self) -> Result<(Var, u32), ParsePolyError> {
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.err("a variable name", "missing variable"));
        }
        let start = self.pos;
        let at = self.offset();
        self.pos += 1;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let var = (self.names)(&name).ok_or(ParsePolyError {
            position: at,
            expected: "a known variable".into(),
            message: format!("unknown variable '{name}'"),
        })?;
        let mut exp = 1u32;
        if self.peek() == Some('^') {
            self.pos += 1;
            let n = self.number().ok_or_else(|| self.err("an exponent", "missing exponent"))?;
            exp = u32::try_from(n).map_err(|_| self.err("a smaller exponent", "exponent overflow"))?;
        }
        Ok((var, exp))
    }
}
