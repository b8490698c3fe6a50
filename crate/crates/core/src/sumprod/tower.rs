//! The tower: `b_1..b_k`, `a_1 = b_1`, `a_i = a_{i-1} b_i`, and a base `x` such that
//! for every level `i < k` and every good `P` with `s(P) <= c_i`,
//! `A_i x + P(a_{i+1}, b_{i+2}, ..., b_k)` has the color of `A_i x`, where
//! `A_i = a_1 * ... * a_i`.
//!
//! Levels are added one at a time through a shifted pvdW search. A candidate step is
//! accepted only after every condition of the extended tower is re-checked by full
//! enumeration.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{ColorError, ColorId, PolyOracle};
use crate::poly::{monomials_up_to, GoodPoly, Monomial, PolyError, SizeBound, Var};
use crate::vdw::{Family, Ground, PvdwQuery, ShiftedSearch, VdwError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("budget exhausted at level {level} after {tried} candidates")]
    BudgetExhausted { level: usize, tried: u64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("condition fails at level {level}: P = {poly} gives color {got}, base has {expected}")]
    Violation {
        level: usize,
        poly: String,
        expected: ColorId,
        got: ColorId,
    },
    #[error("structural identity fails: {0}")]
    Structure(String),
    #[error("condition space too large at level {level}: {count} polynomials")]
    TooLarge { level: usize, count: u128 },
    #[error(transparent)]
    Vdw(VdwError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Size bounds `c_0 >= c_1 >= ... >= c_k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct CSchedule(Vec<u32>);

impl CSchedule {
    pub fn new(values: Vec<u32>) -> Result<Self, TowerError> {
        if values.is_empty() {
            return Err(TowerError::InvalidSchedule("schedule is empty".into()));
        }
        if values.contains(&0) {
            return Err(TowerError::InvalidSchedule("bounds must be positive".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(TowerError::InvalidSchedule("bounds must be nonincreasing".into()));
        }
        Ok(CSchedule(values))
    }

    /// `c, c, ..., c, 1` with `k + 1` entries.
    pub fn flat(k: usize, c: u32) -> Result<Self, TowerError> {
        let mut v = vec![c.max(1); k];
        v.push(1);
        CSchedule::new(v)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn bound(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<u32>> for CSchedule {
    type Error = TowerError;
    fn try_from(v: Vec<u32>) -> Result<Self, TowerError> {
        CSchedule::new(v)
    }
}

impl From<CSchedule> for Vec<u32> {
    fn from(s: CSchedule) -> Vec<u32> {
        s.0
    }
}

/// Exponent of the scale used at the step that adds level `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepPower {
    /// `a_k^(k+1)`.
    LevelPlusOne,
    Fixed(u32),
}

impl StepPower {
    fn at(self, k: usize) -> u32 {
        match self {
            StepPower::LevelPlusOne => k as u32 + 1,
            StepPower::Fixed(p) => p.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TowerOptions {
    pub budget: u64,
    pub power: StepPower,
    pub jobs: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            budget: 100_000,
            power: StepPower::LevelPlusOne,
            jobs: 1,
        }
    }
}

/// One induction step: `x_{k+1} = x_k + f / A_k`, `b_{k+1} = e / a_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerStep {
    pub level: usize,
    pub f: GoodPoly,
    pub e: GoodPoly,
    pub f_template: GoodPoly,
    pub e_template: GoodPoly,
    pub power: u32,
    pub x_before: GoodPoly,
    pub x_after: GoodPoly,
    /// Shifted witnesses rejected because the extended tower failed re-verification
    /// or the quotients were not good.
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerWitness {
    pub k: usize,
    pub b: Vec<GoodPoly>,
    pub a: Vec<GoodPoly>,
    pub x: GoodPoly,
    pub schedule: CSchedule,
    pub steps: Vec<TowerStep>,
    pub conditions_checked: u64,
    pub candidates_tried: u64,
}

/// `a_1 = b_1`, `a_i = a_{i-1} b_i`.
pub fn a_from_b(b: &[GoodPoly]) -> Vec<GoodPoly> {
    let mut a: Vec<GoodPoly> = Vec::with_capacity(b.len());
    for bi in b {
        let next = match a.last() {
            None => bi.clone(),
            Some(prev) => prev.mul(bi),
        };
        a.push(next);
    }
    a
}

/// `A_i = a_1 * ... * a_i`; `None` stands for the empty product.
fn prefix_product(a: &[GoodPoly], i: usize) -> Option<GoodPoly> {
    a[..i].iter().cloned().reduce(|x, y| x.mul(&y))
}

fn times_prefix(a: &[GoodPoly], i: usize, x: &GoodPoly) -> GoodPoly {
    match prefix_product(a, i) {
        None => x.clone(),
        Some(p) => p.mul(x),
    }
}

/// Above this many polynomials per level the full check is refused.
const MAX_CONDITIONS: u128 = 50_000_000;

/// Checks every condition of the tower `(b, x)` against `schedule` by enumerating all
/// good `P` (including zero) of bounded size over the level's variable tuple. Returns
/// the number of conditions checked.
pub fn verify_lemma(
    oracle: &dyn PolyOracle,
    b: &[GoodPoly],
    x: &GoodPoly,
    schedule: &CSchedule,
) -> Result<u64, TowerError> {
    let k = b.len();
    if schedule.len() < k {
        return Err(TowerError::InvalidSchedule(format!(
            "schedule has {} entries for {k} levels",
            schedule.len()
        )));
    }
    let a = a_from_b(b);
    let mut checked = 0u64;
    for i in 0..k {
        let base = times_prefix(&a, i, x);
        let mut values: Vec<GoodPoly> = vec![a[i].clone()];
        values.extend(b[i + 1..].iter().cloned());
        checked += verify_level(oracle, i, &base, &values, schedule.bound(i))?;
    }
    Ok(checked)
}

fn verify_level(
    oracle: &dyn PolyOracle,
    level: usize,
    base: &GoodPoly,
    values: &[GoodPoly],
    c: u32,
) -> Result<u64, TowerError> {
    let vars: Vec<Var> = (1..=values.len() as Var).collect();
    let monos = monomials_up_to(c, &vars);
    let radix = c as u64 + 1;
    let count = (radix as u128).checked_pow(monos.len() as u32).unwrap_or(u128::MAX);
    if count > MAX_CONDITIONS {
        return Err(TowerError::TooLarge { level, count });
    }
    let count = count as u64;
    let mono_values: Vec<GoodPoly> = monos.iter().map(|m| monomial_value(m, values)).collect::<Result<_, _>>()?;
    let expected = oracle.color(base)?;
    let violation = (1..count).into_par_iter().find_map_first(|mut idx| {
        let mut p = base.clone();
        for mv in &mono_values {
            let digit = idx % radix;
            idx /= radix;
            if digit > 0 {
                p.add_assign_scaled(mv, &BigUint::from(digit));
            }
        }
        match oracle.color(&p) {
            Ok(got) if got == expected => None,
            Ok(got) => Some(Ok((p, got))),
            Err(e) => Some(Err(e)),
        }
    });
    match violation {
        None => Ok(count),
        Some(Err(e)) => Err(e.into()),
        Some(Ok((p, got))) => {
            // Report P itself rather than the shifted element.
            let poly = describe_offset(&p, base);
            Err(TowerError::Violation {
                level,
                poly,
                expected,
                got,
            })
        }
    }
}

fn describe_offset(p: &GoodPoly, base: &GoodPoly) -> String {
    format!("{p} - ({base})")
}

fn monomial_value(m: &Monomial, values: &[GoodPoly]) -> Result<GoodPoly, PolyError> {
    let mut acc: Option<GoodPoly> = None;
    for &(v, e) in m.factors() {
        let pw = values[v as usize - 1].checked_pow(e)?;
        acc = Some(match acc {
            None => pw,
            Some(x) => x.checked_mul(&pw)?,
        });
    }
    Ok(acc.expect("nonconstant monomial"))
}

/// Builds a `k`-level tower by induction, starting from `x_0 = t`.
pub fn build_tower(
    oracle: &dyn PolyOracle,
    k: usize,
    schedule: &CSchedule,
    opts: TowerOptions,
) -> Result<TowerWitness, TowerError> {
    if schedule.len() != k + 1 {
        return Err(TowerError::InvalidSchedule(format!(
            "need {} bounds for {k} levels, got {}",
            k + 1,
            schedule.len()
        )));
    }
    let mut x = GoodPoly::t();
    let mut b: Vec<GoodPoly> = Vec::with_capacity(k);
    let mut a: Vec<GoodPoly> = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    let mut tried = 0u64;
    let mut conditions_checked = 0u64;

    for level in 0..k {
        let anchor = times_prefix(&a, level, &x);
        let scale = a.last().cloned().unwrap_or_else(GoodPoly::t);
        let power = opts.power.at(level);
        let remaining = opts.budget.saturating_sub(tried);
        if remaining == 0 {
            return Err(TowerError::BudgetExhausted { level: level + 1, tried });
        }
        let query = PvdwQuery::new(
            Ground::Poly(oracle),
            Family::SizeBounded(SizeBound(schedule.bound(level))),
            remaining,
        )
        .with_jobs(opts.jobs);
        let mut search = ShiftedSearch::new(&query, anchor, &scale, power).map_err(TowerError::Vdw)?;
        let mut rejected = 0u64;
        let accepted = loop {
            let w = match search.next_witness() {
                Ok(w) => w,
                Err(VdwError::BudgetExhausted { .. }) => {
                    return Err(TowerError::BudgetExhausted {
                        level: level + 1,
                        tried: tried + search.tried(),
                    })
                }
                Err(e) => return Err(TowerError::Vdw(e)),
            };
            let shift = match prefix_product(&a, level) {
                None => Ok(w.f.clone()),
                Some(p) => w.f.divide_exact(&p),
            };
            let b_next = match a.last() {
                None => Ok(w.e.clone()),
                Some(ak) => w.e.divide_exact(ak),
            };
            let (Ok(shift), Ok(b_next)) = (shift, b_next) else {
                rejected += 1;
                continue;
            };
            let x_next = x.add(&shift);
            let mut b_try = b.clone();
            b_try.push(b_next);
            match verify_lemma(oracle, &b_try, &x_next, schedule) {
                Ok(n) => break (w, x_next, b_try, n),
                Err(TowerError::Violation { .. }) => rejected += 1,
                Err(e) => return Err(e),
            }
        };
        tried += search.tried();
        let (w, x_next, b_next, checked) = accepted;
        conditions_checked = checked;
        steps.push(TowerStep {
            level: level + 1,
            f: w.f,
            e: w.e.clone(),
            f_template: w.f_template,
            e_template: w.e_template,
            power,
            x_before: x.clone(),
            x_after: x_next.clone(),
            rejected,
        });
        x = x_next;
        b = b_next;
        a.push(w.e);
    }

    let tower = TowerWitness {
        k,
        a: a_from_b(&b),
        b,
        x,
        schedule: schedule.clone(),
        steps,
        conditions_checked,
        candidates_tried: tried,
    };
    tower.check_structure()?;
    Ok(tower)
}

impl TowerWitness {
    /// `A_i x` for `0 <= i <= k`.
    pub fn level_element(&self, i: usize) -> GoodPoly {
        times_prefix(&self.a, i, &self.x)
    }

    /// Full re-verification: structural identities and every condition.
    pub fn verify(&self, oracle: &dyn PolyOracle) -> Result<u64, TowerError> {
        self.check_structure()?;
        verify_lemma(oracle, &self.b, &self.x, &self.schedule)
    }

    /// The exact algebra of each step: `a_i = a_{i-1} b_i`, `e = a_{k+1}`,
    /// `b_{k+1} a_k = e`, and `x_{k+1} - x_k = f / A_k`.
    pub fn check_structure(&self) -> Result<(), TowerError> {
        if self.b.len() != self.k || self.a.len() != self.k || self.steps.len() != self.k {
            return Err(TowerError::Structure("level counts disagree".into()));
        }
        if self.a != a_from_b(&self.b) {
            return Err(TowerError::Structure("a_i != a_(i-1) b_i".into()));
        }
        for (j, step) in self.steps.iter().enumerate() {
            if step.e != self.a[j] {
                return Err(TowerError::Structure(format!("e at step {} is not a_{}", j + 1, j + 1)));
            }
            if j > 0 && self.b[j].mul(&self.a[j - 1]) != step.e {
                return Err(TowerError::Structure(format!("b_{} a_{} != e", j + 1, j)));
            }
            let shift = match prefix_product(&self.a, j) {
                None => step.f.clone(),
                Some(p) => step.f.divide_exact(&p)?,
            };
            if step.x_before.add(&shift) != step.x_after {
                return Err(TowerError::Structure(format!("x step {} is not f / A", j + 1)));
            }
            let scale = if j == 0 { GoodPoly::t() } else { self.a[j - 1].clone() };
            let unit = scale.pow(step.power);
            let f_ok = if step.f_template.is_zero() {
                step.f.is_zero()
            } else {
                step.f_template.compose(&unit)? == step.f
            };
            if !f_ok || step.e_template.compose(&unit)? != step.e {
                return Err(TowerError::Structure(format!("step {} is not a substitution instance", j + 1)));
            }
        }
        if let Some(last) = self.steps.last() {
            if last.x_after != self.x {
                return Err(TowerError::Structure("final x differs from last step".into()));
            }
        }
        Ok(())
    }
}
