use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::{GoodPoly, Monomial, SizeBound, Var};

/// All monomials over `vars` with total degree in `1..=max_degree`, ascending grlex.
pub fn monomials_up_to(max_degree: u32, vars: &[Var]) -> Vec<Monomial> {
    let mut vars: Vec<Var> = vars.to_vec();
    vars.sort_unstable();
    vars.dedup();
    let mut out = Vec::new();
    let mut current: Vec<(Var, u32)> = Vec::new();
    fn rec(vars: &[Var], budget: u32, current: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
        match vars.split_first() {
            None => {
                if !current.is_empty() {
                    out.push(Monomial::from_pairs(current.iter().copied()).expect("valid"));
                }
            }
            Some((&v, rest)) => {
                for e in 0..=budget {
                    if e > 0 {
                        current.push((v, e));
                    }
                    rec(rest, budget - e, current, out);
                    if e > 0 {
                        current.pop();
                    }
                }
            }
        }
    }
    rec(&vars, max_degree, &mut current, &mut out);
    out.sort();
    out
}

/// The nonzero good polynomials over `vars` whose size is exactly `s`, sorted.
pub(crate) fn size_layer(s: u32, vars: &[Var]) -> Vec<GoodPoly> {
    if s == 0 {
        return Vec::new();
    }
    let monos = monomials_up_to(s, vars);
    let top_degree: Vec<bool> = monos.iter().map(|m| m.degree() == s as u64).collect();
    let radix = s + 1;
    let mut digits = vec![0u32; monos.len()];
    let mut out = Vec::new();
    loop {
        // Advance the mixed-radix counter; the all-zero start is skipped.
        let mut i = 0;
        loop {
            if i == digits.len() {
                let mut layer = out;
                sort_layer(&mut layer);
                return layer;
            }
            digits[i] += 1;
            if digits[i] == radix {
                digits[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        let exact = digits
            .iter()
            .zip(&top_degree)
            .any(|(&d, &top)| d == s || (d > 0 && top));
        if exact {
            let terms: BTreeMap<Monomial, BigUint> = monos
                .iter()
                .zip(&digits)
                .filter(|(_, &d)| d > 0)
                .map(|(m, &d)| (m.clone(), BigUint::from(d)))
                .collect();
            out.push(GoodPoly::from_map_unchecked(terms));
        }
    }
}

fn sort_layer(layer: &mut [GoodPoly]) {
    // Every element has the same size, so the full order is the term order.
    layer.sort_unstable();
}

/// Restartable, deterministic stream of good polynomials ordered by size and then
/// by descending term sequence. Each size layer is materialized on first use.
#[derive(Debug, Clone)]
pub struct GoodPolyStream {
    vars: Vec<Var>,
    max_size: Option<u32>,
    size: u32,
    layer: Vec<GoodPoly>,
    pos: usize,
}

impl GoodPolyStream {
    /// Every nonzero good polynomial over `vars`, with no size limit.
    pub fn unbounded(vars: &[Var]) -> Self {
        GoodPolyStream::new(vars, None)
    }

    fn new(vars: &[Var], max_size: Option<u32>) -> Self {
        assert!(!vars.is_empty(), "need at least one variable");
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        GoodPolyStream {
            vars,
            max_size,
            size: 0,
            layer: Vec::new(),
            pos: 0,
        }
    }
}

impl Iterator for GoodPolyStream {
    type Item = GoodPoly;

    fn next(&mut self) -> Option<GoodPoly> {
        while self.pos >= self.layer.len() {
            if self.max_size.is_some_and(|m| self.size >= m) {
                return None;
            }
            self.size += 1;
            self.layer = size_layer(self.size, &self.vars);
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.layer[self.pos - 1].clone())
    }
}

/// The nonzero good polynomials over `vars` with `size <= c`, each exactly once, in
/// canonical order.
pub fn enumerate_good(c: SizeBound, vars: &[Var]) -> GoodPolyStream {
    GoodPolyStream::new(vars, Some(c.0))
}
