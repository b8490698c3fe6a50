//! Good polynomials: nonnegative integer coefficients, zero constant term.
//!
//! [`GoodPoly`] is the element type of the semiring of univariate good polynomials in
//! `t` (variable 1) and of its multivariate extension. Coefficients are arbitrary
//! precision; exponents are `u32` with checked arithmetic.

pub(crate) mod enumerate;
mod factor;
mod intpoly;
mod monomial;
mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use enumerate::{enumerate_good, monomials_up_to, GoodPolyStream};
pub use factor::is_reducible;
pub use monomial::{Monomial, Var};
pub use parse::{parse_poly, parse_poly_with, ParsePolyError};

/// Variable index used for `t` in the univariate semiring.
pub const T: Var = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("constant term present")]
    ConstantTermPresent,
    #[error("negative coefficient on {0}")]
    NegativeCoefficient(String),
    #[error("variable x{0} is not assigned")]
    UnassignedVariable(Var),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial is not exactly divisible")]
    NotDivisible,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("variable indices start at 1")]
    ZeroVariable,
    #[error("substituted value must be a nonzero good polynomial")]
    ZeroSubstitution,
}

/// Upper bound on the size of a polynomial: degrees and coefficients at most `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SizeBound(pub u32);

/// A sparse polynomial with positive coefficients on nonconstant monomials.
///
/// The term map is canonical, so structural equality is polynomial equality. The
/// empty map is the zero polynomial: representable, but not an element of the `T`
/// semiring (see [`GoodPoly::is_zero`]).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GoodPoly {
    terms: BTreeMap<Monomial, BigUint>,
}

impl GoodPoly {
    pub fn zero() -> Self {
        GoodPoly::default()
    }

    /// `t`, i.e. variable 1.
    pub fn t() -> Self {
        GoodPoly::var(T)
    }

    pub fn var(v: Var) -> Self {
        GoodPoly::monomial(Monomial::var(v), 1u32)
    }

    /// `coef * m`. Panics if `m` is the constant monomial and `coef` is nonzero.
    pub fn monomial(m: Monomial, coef: impl Into<BigUint>) -> Self {
        let coef = coef.into();
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            assert!(!m.is_one(), "good polynomials have no constant term");
            terms.insert(m, coef);
        }
        GoodPoly { terms }
    }

    /// Validates and canonicalizes a list of signed terms, merging like monomials.
    pub fn make(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Result<Self, PolyError> {
        let mut merged: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *merged.entry(m).or_default() += c;
        }
        let mut out = BTreeMap::new();
        for (m, c) in merged {
            if c.is_zero() {
                continue;
            }
            if m.is_one() {
                return Err(PolyError::ConstantTermPresent);
            }
            if c.is_negative() {
                return Err(PolyError::NegativeCoefficient(format!("{m:?}")));
            }
            out.insert(m, c.magnitude().clone());
        }
        Ok(GoodPoly { terms: out })
    }

    /// Univariate polynomial in `t` from coefficients of `t^1, t^2, ...`.
    pub fn from_coeffs(coeffs: &[u64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| (Monomial::power(T, i as u32 + 1), BigUint::from(c)))
            .collect();
        GoodPoly { terms }
    }

    pub(crate) fn from_map_unchecked(terms: BTreeMap<Monomial, BigUint>) -> Self {
        debug_assert!(terms.iter().all(|(m, c)| !m.is_one() && !c.is_zero()));
        GoodPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigUint)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigUint {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigUint)> {
        self.terms.iter().next_back()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn max_coefficient(&self) -> BigUint {
        self.terms.values().max().cloned().unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn is_univariate_in(&self, v: Var) -> bool {
        self.terms.keys().all(|m| m.vars().all(|w| w == v))
    }

    /// `max(total degree, largest coefficient)`, and 0 for the zero polynomial.
    ///
    /// Saturates at `u64::MAX` for coefficients that do not fit.
    pub fn size(&self) -> u64 {
        let coef = self.max_coefficient().to_u64().unwrap_or(u64::MAX);
        self.degree().max(coef)
    }

    /// Every variable exponent at most `d`. The zero constant term holds by construction.
    pub fn is_member_pd(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.max_exponent() <= d)
    }

    pub fn is_multilinear(&self) -> bool {
        self.is_member_pd(1)
    }

    pub fn add(&self, other: &GoodPoly) -> GoodPoly {
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            *terms.entry(m.clone()).or_default() += c;
        }
        GoodPoly { terms }
    }

    pub fn add_assign_scaled(&mut self, other: &GoodPoly, scale: &BigUint) {
        if scale.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            *self.terms.entry(m.clone()).or_default() += c * scale;
        }
    }

    pub fn scale(&self, k: &BigUint) -> GoodPoly {
        if k.is_zero() {
            return GoodPoly::zero();
        }
        GoodPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &GoodPoly) -> Result<GoodPoly, PolyError> {
        let mut terms: BTreeMap<Monomial, BigUint> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *terms.entry(ma.checked_mul(mb)?).or_default() += ca * cb;
            }
        }
        Ok(GoodPoly { terms })
    }

    /// Product. Panics on exponent overflow; use [`GoodPoly::checked_mul`] to recover.
    pub fn mul(&self, other: &GoodPoly) -> GoodPoly {
        self.checked_mul(other).expect("exponent overflow in polynomial product")
    }

    pub fn checked_pow(&self, n: u32) -> Result<GoodPoly, PolyError> {
        // A zero power would be the constant 1, which is not good.
        assert!(n >= 1, "power must be at least 1");
        let mut base = self.clone();
        let mut acc: Option<GoodPoly> = None;
        let mut n = n;
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.checked_mul(&base)?,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.checked_mul(&base)?;
        }
        Ok(acc.expect("n >= 1"))
    }

    pub fn pow(&self, n: u32) -> GoodPoly {
        self.checked_pow(n).expect("exponent overflow in polynomial power")
    }

    /// Composition: every variable of `self` replaced by its assigned polynomial.
    pub fn substitute(&self, assignment: &HashMap<Var, GoodPoly>) -> Result<GoodPoly, PolyError> {
        for v in self.vars() {
            match assignment.get(&v) {
                None => return Err(PolyError::UnassignedVariable(v)),
                Some(p) if p.is_zero() => return Err(PolyError::ZeroSubstitution),
                Some(_) => {}
            }
        }
        let mut powers: HashMap<(Var, u32), GoodPoly> = HashMap::new();
        let mut out = GoodPoly::zero();
        for (m, c) in &self.terms {
            let mut term: Option<GoodPoly> = None;
            for &(v, e) in m.factors() {
                let pw = match powers.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = assignment[&v].checked_pow(e)?;
                        powers.insert((v, e), p.clone());
                        p
                    }
                };
                term = Some(match term {
                    None => pw,
                    Some(acc) => acc.checked_mul(&pw)?,
                });
            }
            out.add_assign_scaled(&term.expect("nonconstant monomial"), c);
        }
        Ok(out)
    }

    /// Convenience for substituting into a univariate polynomial in `t`.
    pub fn compose(&self, value: &GoodPoly) -> Result<GoodPoly, PolyError> {
        let assignment: HashMap<Var, GoodPoly> = self.vars().into_iter().map(|v| (v, value.clone())).collect();
        self.substitute(&assignment)
    }

    /// Every variable replaced by `t`.
    pub fn collapse(&self) -> GoodPoly {
        let mut terms: BTreeMap<Monomial, BigUint> = BTreeMap::new();
        for (m, c) in &self.terms {
            *terms.entry(m.collapse()).or_default() += c;
        }
        GoodPoly { terms }
    }

    /// Exact natural-number value under the given assignment.
    pub fn evaluate_nat(&self, assignment: &HashMap<Var, BigUint>) -> Result<BigUint, PolyError> {
        let mut total = BigUint::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m.factors() {
                let x = assignment.get(&v).ok_or(PolyError::UnassignedVariable(v))?;
                term *= x.pow(e);
            }
            total += term;
        }
        Ok(total)
    }

    /// Value with every variable set to `x`.
    pub fn evaluate_at(&self, x: &BigUint) -> BigUint {
        let mut total = BigUint::zero();
        for (m, c) in &self.terms {
            total += c * x.pow(m.degree() as u32);
        }
        total
    }

    /// Exact quotient `self / divisor` when it exists and is good.
    pub fn divide_exact(&self, divisor: &GoodPoly) -> Result<GoodPoly, PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(GoodPoly::zero());
        }
        let q = intpoly::IntPoly::from(self)
            .divide_exact(&intpoly::IntPoly::from(divisor))
            .ok_or(PolyError::NotDivisible)?;
        q.into_good().ok_or(PolyError::NotDivisible)
    }

    /// Reducible over the integers into two nonconstant factors.
    pub fn is_reducible(&self) -> bool {
        factor::is_reducible(self)
    }

    /// Evaluation at `t = 2` of a univariate polynomial, mainly for reports.
    pub fn value_at_two(&self) -> BigUint {
        self.evaluate_at(&BigUint::from(2u32))
    }

    fn desc_terms(&self) -> impl Iterator<Item = (&Monomial, &BigUint)> {
        self.terms.iter().rev()
    }
}

impl Ord for GoodPoly {
    /// Size first, then the descending term sequence compared lexicographically by
    /// `(monomial, coefficient)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.desc_terms().cmp(other.desc_terms()))
    }
}

impl PartialOrd for GoodPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GoodPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let univariate = self.is_univariate_in(T);
        let mut first = true;
        for (m, c) in self.desc_terms() {
            if univariate {
                if !first {
                    write!(f, "+")?;
                }
                if !c.is_one() {
                    write!(f, "{c}")?;
                }
                match m.degree() {
                    1 => write!(f, "t")?,
                    d => write!(f, "t^{d}")?,
                }
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                if !c.is_one() {
                    write!(f, "{c}*")?;
                }
                let parts: Vec<String> = m
                    .factors()
                    .iter()
                    .map(|&(v, e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
                    .collect();
                write!(f, "{}", parts.join("*"))?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for GoodPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GoodPoly({self})")
    }
}

impl std::str::FromStr for GoodPoly {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

impl Serialize for GoodPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GoodPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

impl std::ops::Add for &GoodPoly {
    type Output = GoodPoly;
    fn add(self, rhs: &GoodPoly) -> GoodPoly {
        GoodPoly::add(self, rhs)
    }
}

impl std::ops::Mul for &GoodPoly {
    type Output = GoodPoly;
    fn mul(self, rhs: &GoodPoly) -> GoodPoly {
        GoodPoly::mul(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> GoodPoly {
        s.parse().unwrap()
    }

    fn int(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn make_merges_and_validates() {
        let t = Monomial::var(1);
        assert_eq!(GoodPoly::make([(t.clone(), int(2)), (t.clone(), int(1))]).unwrap(), p("3t"));
        assert_eq!(GoodPoly::make([(Monomial::one(), int(5))]), Err(PolyError::ConstantTermPresent));
        assert!(matches!(
            GoodPoly::make([(t.clone(), int(1)), (t, int(-2))]),
            Err(PolyError::NegativeCoefficient(_))
        ));
        let zero = GoodPoly::make([]).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.size(), 0);
        // Cancelling to zero on the constant monomial is fine.
        assert!(GoodPoly::make([(Monomial::one(), int(1)), (Monomial::one(), int(-1))]).unwrap().is_zero());
    }

    #[test]
    fn add_and_mul() {
        assert_eq!(&p("t") + &p("t^2"), p("t^2+t"));
        assert_eq!(&GoodPoly::zero() + &p("t^2+t"), p("t^2+t"));
        assert_eq!(&p("t^2+t") + &p("t^2+t"), p("2t^2+2t"));
        assert_eq!(&p("t") * &p("t^2+2t"), p("t^3+2t^2"));
        assert!((&GoodPoly::zero() * &p("t^2+t")).is_zero());
        assert_eq!(&p("x1 + x2") * &p("x1"), p("x1^2 + x1*x2"));
    }

    #[test]
    fn substitution() {
        let y = GoodPoly::var(2);
        let sq = y.pow(2);
        let a: HashMap<Var, GoodPoly> = [(2, p("t^2"))].into();
        assert_eq!(sq.substitute(&a).unwrap(), p("t^4"));
        let xy = &GoodPoly::var(1) * &GoodPoly::var(2);
        let a: HashMap<Var, GoodPoly> = [(1, p("t")), (2, p("t^2"))].into();
        assert_eq!(xy.substitute(&a).unwrap(), p("t^3"));
        let a: HashMap<Var, GoodPoly> = [(1, p("t"))].into();
        assert_eq!(xy.substitute(&a), Err(PolyError::UnassignedVariable(2)));
    }

    #[test]
    fn substitution_matches_naive_expansion() {
        // (t^2+t)^2 + (t^2+t), expanded coefficient by coefficient.
        let y = GoodPoly::var(2);
        let poly = &y.pow(2) + &y;
        let a: HashMap<Var, GoodPoly> = [(2, p("t^2+t"))].into();
        let naive = {
            // coefficients of t^1..t^4, from (t^2+t)(t^2+t) = t^4 + 2t^3 + t^2, plus t^2 + t.
            let mut c = [0u64; 4];
            let base = [1u64, 1]; // t, t^2
            for (i, x) in base.iter().enumerate() {
                for (j, y) in base.iter().enumerate() {
                    c[i + j + 1] += x * y;
                }
            }
            c[0] += 1;
            c[1] += 1;
            GoodPoly::from_coeffs(&c)
        };
        assert_eq!(naive, p("t^4+2t^3+2t^2+t"));
        assert_eq!(poly.substitute(&a).unwrap(), naive);
    }

    #[test]
    fn evaluation() {
        let two: HashMap<Var, BigUint> = [(1, BigUint::from(2u32))].into();
        assert_eq!(p("t^2+t").evaluate_nat(&two).unwrap(), BigUint::from(6u32));
        assert_eq!(GoodPoly::zero().evaluate_nat(&two).unwrap(), BigUint::zero());
        assert_eq!(p("t^3").evaluate_nat(&two).unwrap(), BigUint::from(8u32));
        assert_eq!(p("x2").evaluate_nat(&two), Err(PolyError::UnassignedVariable(2)));
    }

    #[test]
    fn sizes() {
        assert_eq!(p("2t^3+t").size(), 3);
        assert_eq!(GoodPoly::zero().size(), 0);
        assert_eq!(p("5t").size(), 5);
        assert_eq!(p("x1^2*x2").size(), 3);
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("t^3+t^2").divide_exact(&p("t")).unwrap(), p("t^2+t"));
        assert_eq!(p("t^2+t").divide_exact(&p("t^2")), Err(PolyError::NotDivisible));
        assert_eq!(p("t").divide_exact(&GoodPoly::zero()), Err(PolyError::ZeroDivisor));
        // Quotient would be the constant 1.
        assert_eq!(p("t").divide_exact(&p("t")), Err(PolyError::NotDivisible));
        assert_eq!(p("x1^2 + x1*x2").divide_exact(&p("x1 + x2")).unwrap(), p("x1"));
    }

    #[test]
    fn pd_membership() {
        assert!(p("x1*x2").is_member_pd(1));
        assert!(!p("x1^2").is_member_pd(1));
        assert!(p("t^3").is_member_pd(3));
    }

    #[test]
    fn reducibility() {
        assert!(p("x1*x2").is_reducible());
        assert!(!p("x1").is_reducible());
        assert!(p("x1 + x1*x2").is_reducible());
        assert!(p("x1^2").is_reducible());
    }

    #[test]
    fn order_is_size_first() {
        let mut v = vec![p("t^2+t"), p("t^2"), p("2t"), p("t")];
        v.sort();
        assert_eq!(v, vec![p("t"), p("2t"), p("t^2"), p("t^2+t")]);
    }
}
