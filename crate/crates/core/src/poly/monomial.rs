use std::cmp::Ordering;
use std::fmt;

use super::PolyError;

/// Index of a variable. Variables are numbered from 1; variable 1 doubles as `t`.
pub type Var = u32;

/// A monomial `x_{v1}^{e1} * x_{v2}^{e2} * ...` stored as `(var, exponent)` pairs
/// sorted by variable, with every exponent at least 1.
///
/// The empty monomial is the constant 1. It never appears inside a [`super::GoodPoly`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// The monomial `x_var`.
    pub fn var(var: Var) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Monomial {
            factors: vec![(var, 1)],
        }
    }

    /// The monomial `x_var^exp`; exponent 0 gives the constant monomial.
    pub fn power(var: Var, exp: u32) -> Self {
        assert!(var >= 1, "variables are 1-based");
        if exp == 0 {
            return Monomial::one();
        }
        Monomial {
            factors: vec![(var, exp)],
        }
    }

    /// Builds a monomial from arbitrary `(var, exp)` pairs, merging repeated variables
    /// and dropping zero exponents.
    pub fn from_pairs<I: IntoIterator<Item = (Var, u32)>>(pairs: I) -> Result<Self, PolyError> {
        let mut factors: Vec<(Var, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        if factors.iter().any(|&(v, _)| v == 0) {
            return Err(PolyError::ZeroVariable);
        }
        factors.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(Var, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => {
                    *le = le.checked_add(e).ok_or(PolyError::ExponentOverflow)?;
                }
                _ => merged.push((v, e)),
            }
        }
        Ok(Monomial { factors: merged })
    }

    /// Dense exponent vector `[e1, e2, ..., en]`, where index 0 is variable 1.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial {
            factors: exps
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .map(|(i, &e)| (i as Var + 1, e))
                .collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, var: Var) -> u32 {
        self.factors
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1.checked_add(b[j].1).ok_or(PolyError::ExponentOverflow)?;
                    out.push((a[i].0, e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Monomial { factors: out })
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        let b = &other.factors;
        for &(v, e) in &self.factors {
            if j < b.len() && b[j].0 < v {
                // `other` has a variable `self` lacks.
                return None;
            }
            if j < b.len() && b[j].0 == v {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((v, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial { factors: out })
    }

    /// Greatest common divisor of two monomials.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial {
            factors: self
                .factors
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.exponent(v);
                    (f > 0).then(|| (v, e.min(f)))
                })
                .collect(),
        }
    }

    pub fn checked_pow(&self, n: u32) -> Result<Monomial, PolyError> {
        let factors = self
            .factors
            .iter()
            .map(|&(v, e)| e.checked_mul(n).map(|e| (v, e)))
            .collect::<Option<Vec<_>>>()
            .ok_or(PolyError::ExponentOverflow)?;
        if n == 0 {
            return Ok(Monomial::one());
        }
        Ok(Monomial { factors })
    }

    /// Every variable mapped to variable 1.
    pub fn collapse(&self) -> Monomial {
        Monomial::power(1, self.degree() as u32)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the lowest
    /// variable where the two differ (larger exponent is larger).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.factors, &other.factors);
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(va, ea)), Some(&(vb, eb))) => {
                        if va < vb {
                            return Ordering::Greater;
                        }
                        if vb < va {
                            return Ordering::Less;
                        }
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(v, e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x1 = Monomial::var(1);
        let x2 = Monomial::var(2);
        let x1sq = Monomial::power(1, 2);
        let x1x2 = x1.checked_mul(&x2).unwrap();
        assert!(x1 > x2);
        assert!(x1sq > x1x2);
        assert!(x1x2 > Monomial::power(2, 2));
        assert!(Monomial::power(2, 2) > x1);
        assert!(x1 > Monomial::one());
    }

    #[test]
    fn division() {
        let m = Monomial::from_pairs([(1, 2), (3, 1)]).unwrap();
        assert_eq!(m.checked_div(&Monomial::var(1)), Some(Monomial::from_pairs([(1, 1), (3, 1)]).unwrap()));
        assert_eq!(m.checked_div(&Monomial::var(2)), None);
        assert_eq!(m.checked_div(&Monomial::power(1, 3)), None);
        assert_eq!(m.checked_div(&m), Some(Monomial::one()));
    }

    #[test]
    fn overflow_is_reported() {
        let big = Monomial::power(1, u32::MAX);
        assert_eq!(big.checked_mul(&Monomial::var(1)), Err(PolyError::ExponentOverflow));
    }
}
