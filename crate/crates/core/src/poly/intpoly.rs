//! Integer-coefficient polynomials with an optional constant term. Used internally for
//! exact division and factor search, where intermediate values leave the good cone.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{GoodPoly, Monomial};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct IntPoly {
    pub(crate) terms: BTreeMap<Monomial, BigInt>,
}

impl From<&GoodPoly> for IntPoly {
    fn from(p: &GoodPoly) -> Self {
        IntPoly {
            terms: p
                .terms()
                .map(|(m, c)| (m.clone(), BigInt::from_biguint(Sign::Plus, c.clone())))
                .collect(),
        }
    }
}

impl IntPoly {
    pub(crate) fn degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
        }
    }

    /// Exact quotient in the integer polynomial ring, by leading-term division in
    /// graded-lex order.
    pub(crate) fn divide_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let (dm, dc) = divisor.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = IntPoly::default();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.checked_div(&dm)?;
            let (qc, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            for (m, c) in &divisor.terms {
                rem.add_term(m.checked_mul(&qm).ok()?, -(c * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub(crate) fn into_good(self) -> Option<GoodPoly> {
        let mut out = BTreeMap::new();
        for (m, c) in self.terms {
            if m.is_one() || c.is_negative() {
                return None;
            }
            out.insert(m, c.into_parts().1);
        }
        Some(GoodPoly::from_map_unchecked(out))
    }
}
