#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use rand::Rng;
use ramsey_forge::poly::{GoodPoly, Monomial, Var};

/// A random nonzero good polynomial with up to `terms` terms.
pub fn random_good(rng: &mut impl Rng, vars: Var, max_exp: u32, max_coef: u64, terms: usize) -> GoodPoly {
    loop {
        let n = rng.gen_range(1..=terms);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let exps: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=max_exp)).collect();
            let m = Monomial::from_exponents(&exps);
            if m.is_one() {
                continue;
            }
            out.push((m, BigInt::from(rng.gen_range(1..=max_coef))));
        }
        let p = GoodPoly::make(out).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_assignment(rng: &mut impl Rng, vars: Var, max: u64) -> HashMap<Var, BigUint> {
    (1..=vars).map(|v| (v, BigUint::from(rng.gen_range(1..=max)))).collect()
}

prop_compose! {
    pub fn good_poly(vars: usize, max_exp: u32, max_coef: u64)
        (terms in prop::collection::vec(
            (prop::collection::vec(0..=max_exp, vars), 1..=max_coef), 1..6))
        -> GoodPoly
    {
        let terms = terms.into_iter().filter_map(|(e, c)| {
            let m = Monomial::from_exponents(&e);
            (!m.is_one()).then(|| (m, BigInt::from(c)))
        });
        let p = GoodPoly::make(terms).unwrap();
        if p.is_zero() { GoodPoly::var(1) } else { p }
    }
}

/// True if no stored term is constant and every coefficient is positive.
pub fn is_good(p: &GoodPoly) -> bool {
    p.terms().all(|(m, c)| !m.is_one() && *c > BigUint::from(0u32))
}
