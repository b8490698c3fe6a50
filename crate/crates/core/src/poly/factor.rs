//! Reducibility of good polynomials over the integers: `p = q * r` with `q`, `r`
//! nonconstant integer-coefficient polynomials (not necessarily good).

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::intpoly::IntPoly;
use super::{monomials_up_to, GoodPoly, Monomial, Var};

/// Cap on the number of candidate factors tried by the general fallback search.
const SEARCH_CAP: u64 = 4_000_000;

pub fn is_reducible(p: &GoodPoly) -> bool {
    if p.is_zero() || p.degree() <= 1 {
        return false;
    }
    // A shared variable factors off: p = x_v * (p / x_v), and deg p >= 2.
    let common = p
        .terms()
        .map(|(m, _)| m.clone())
        .reduce(|a, b| a.gcd(&b))
        .unwrap_or_default();
    if !common.is_one() {
        return true;
    }
    if p.is_multilinear() {
        return multilinear_reducible(p);
    }
    bounded_factor_search(p)
}

/// A multilinear polynomial factors only as `q(S1) * r(S2)` over a partition of its
/// variables, which happens exactly when the coefficient matrix indexed by
/// (monomial over S1, monomial over S2) has rank one.
fn multilinear_reducible(p: &GoodPoly) -> bool {
    let vars: Vec<Var> = p.vars().into_iter().collect();
    let n = vars.len();
    if !(2..=20).contains(&n) {
        return false;
    }
    let masks: Vec<(u32, &num_bigint::BigUint)> = p
        .terms()
        .map(|(m, c)| {
            let mask = m
                .vars()
                .map(|v| 1u32 << vars.iter().position(|&w| w == v).expect("support"))
                .fold(0, |a, b| a | b);
            (mask, c)
        })
        .collect();
    let full = (1u32 << n) - 1;
    // Fix the first variable into S1 so each unordered partition is tried once.
    for s1 in (1..full).filter(|s| s & 1 == 1) {
        let mut matrix: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for &(mask, c) in &masks {
            matrix.insert((mask & s1, mask & !s1), BigInt::from_biguint(Sign::Plus, c.clone()));
        }
        if rank_one(&matrix) {
            return true;
        }
    }
    false
}

fn rank_one(matrix: &BTreeMap<(u32, u32), BigInt>) -> bool {
    let rows: Vec<u32> = {
        let mut r: Vec<u32> = matrix.keys().map(|k| k.0).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let cols: Vec<u32> = {
        let mut c: Vec<u32> = matrix.keys().map(|k| k.1).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let zero = BigInt::zero();
    let at = |r: u32, c: u32| matrix.get(&(r, c)).unwrap_or(&zero);
    let (&r0, &c0) = match matrix.keys().next() {
        Some((r, c)) => (r, c),
        None => return false,
    };
    let pivot = at(r0, c0);
    // With a nonzero pivot, rank one iff M[r][c] * M[r0][c0] = M[r][c0] * M[r0][c].
    for &r in &rows {
        for &c in &cols {
            if at(r, c) * pivot != at(r, c0) * at(r0, c) {
                return false;
            }
        }
    }
    true
}

/// Tries integer factors `q` with per-variable degrees inside those of `p`, total degree
/// at most `deg(p) / 2`, and coefficients bounded by the largest coefficient of `p`.
fn bounded_factor_search(p: &GoodPoly) -> bool {
    let target = IntPoly::from(p);
    let deg = p.degree();
    let vars: Vec<Var> = p.vars().into_iter().collect();
    let bound = p.max_coefficient().to_i64().unwrap_or(i64::MAX).min(64);
    let max_q_degree = (deg / 2) as u32;
    let mut support: Vec<Monomial> = vec![Monomial::one()];
    support.extend(
        monomials_up_to(max_q_degree, &vars)
            .into_iter()
            .filter(|m| m.factors().iter().all(|&(v, e)| e <= p.degree_in(v))),
    );
    let radix = (2 * bound + 1) as u64;
    let mut tried = 0u64;
    let mut digits = vec![0u64; support.len()];
    loop {
        let mut i = 0;
        loop {
            if i == digits.len() {
                return false;
            }
            digits[i] += 1;
            if digits[i] == radix {
                digits[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        tried += 1;
        if tried > SEARCH_CAP {
            return false;
        }
        let mut q = IntPoly::default();
        for (m, &d) in support.iter().zip(&digits) {
            let c = d as i64 - bound;
            if c != 0 {
                q.terms.insert(m.clone(), BigInt::from(c));
            }
        }
        if q.degree() == 0 {
            continue;
        }
        if let Some(r) = target.divide_exact(&q) {
            if r.degree() >= 1 {
                return true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> GoodPoly {
        s.parse().unwrap()
    }

    #[test]
    fn multilinear_cases() {
        assert!(is_reducible(&p("x1*x2 + x1*x3 + x2*x4 + x3*x4"))); // (x1 + x4)(x2 + x3)
        assert!(!is_reducible(&p("x1*x2 + x3")));
        assert!(!is_reducible(&p("x1 + x2")));
        assert!(!is_reducible(&p("2*x1")));
        assert!(is_reducible(&p("x1 + x1*x2")));
        assert!(!is_reducible(&p("x1*x2 + x1*x3 + x2*x3")));
    }

    #[test]
    fn general_cases() {
        assert!(is_reducible(&p("x1^2 + 2*x1*x2 + x2^2")));
        assert!(!is_reducible(&p("x1^2 + x2")));
        assert!(is_reducible(&p("t^2+t")));
        assert!(!is_reducible(&p("3t")));
    }
}
