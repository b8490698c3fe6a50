//! Bounded witness search for polynomial van der Waerden configurations: a base `x`
//! and a difference `d` such that `x` and every `x + P(d)` share a color.
//!
//! Candidates are scanned in a fixed order, graded by `size(x) + size(d)`, then
//! `size(x)`, then the canonical polynomial order on `x` and on `d`. The first
//! verified candidate is returned, so equal queries give equal witnesses. Running out
//! of budget is reported as [`VdwError::BudgetExhausted`], never as non-existence.

use std::collections::VecDeque;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{ColorError, ColorId, NatColoring, PolyOracle};
use crate::poly::{enumerate::size_layer, enumerate_good, GoodPoly, PolyError, SizeBound, T};

/// Candidates evaluated together per block when running with more than one job.
const BLOCK: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VdwError {
    #[error("budget exhausted after {tried} candidates")]
    BudgetExhausted { tried: u64 },
    #[error("the polynomial family is empty")]
    EmptyFamily,
    #[error("invalid family member {0}: members must be nonzero and univariate in t")]
    InvalidFamily(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("witness failed verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The `P_1, ..., P_k`, either listed or as every good `P` with `s(P) <= c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Explicit(Vec<GoodPoly>),
    SizeBounded(SizeBound),
}

impl Family {
    pub fn resolve(&self) -> Result<Vec<GoodPoly>, VdwError> {
        let members: Vec<GoodPoly> = match self {
            Family::Explicit(v) => v.clone(),
            Family::SizeBounded(c) => enumerate_good(*c, &[T]).collect(),
        };
        if members.is_empty() {
            return Err(VdwError::EmptyFamily);
        }
        if let Some(bad) = members.iter().find(|p| p.is_zero() || !p.is_univariate_in(T)) {
            return Err(VdwError::InvalidFamily(bad.to_string()));
        }
        Ok(members)
    }
}

/// The ground set and its coloring.
#[derive(Clone, Copy)]
pub enum Ground<'a> {
    /// Nonzero univariate good polynomials in `t`.
    Poly(&'a dyn PolyOracle),
    /// Positive integers with `x >= min_x` and `d >= min_d`.
    Nat {
        coloring: &'a NatColoring,
        min_x: u64,
        min_d: u64,
    },
}

impl<'a> Ground<'a> {
    /// Integers from 2 up, the values nonzero good polynomials take at `t = 2`.
    pub fn nat(coloring: &'a NatColoring) -> Self {
        Ground::Nat {
            coloring,
            min_x: 2,
            min_d: 2,
        }
    }
}

#[derive(Clone)]
pub struct PvdwQuery<'a> {
    pub ground: Ground<'a>,
    pub family: Family,
    pub budget: u64,
    pub jobs: usize,
}

impl<'a> PvdwQuery<'a> {
    pub fn new(ground: Ground<'a>, family: Family, budget: u64) -> Self {
        PvdwQuery {
            ground,
            family,
            budget,
            jobs: 1,
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Poly(GoodPoly),
    /// Serialized as a decimal string; a bare number never parses as a good polynomial.
    Nat(#[serde(with = "decimal")] BigUint),
}

mod decimal {
    use std::str::FromStr;

    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(D::Error::custom)
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Element::Poly(p) => write!(f, "{p}"),
            Element::Nat(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvdwWitness {
    pub x: Element,
    pub d: Element,
    pub color: ColorId,
    pub checked_count: usize,
    /// Zero-based index of the witness in the candidate order.
    pub position: u64,
}

impl PvdwWitness {
    /// Builds a witness over polynomials, checking `x` and every `x + P(d)` first.
    pub fn verified_poly(
        oracle: &dyn PolyOracle,
        family: &[GoodPoly],
        x: GoodPoly,
        d: GoodPoly,
        position: u64,
    ) -> Result<Self, VdwError> {
        let images = FamilyImages::new(family);
        match check_poly(oracle, &images, &x, &d)? {
            Some(color) => Ok(PvdwWitness {
                x: Element::Poly(x),
                d: Element::Poly(d),
                color,
                checked_count: family.len(),
                position,
            }),
            None => Err(VdwError::Unverified(format!("x = {x}, d = {d}"))),
        }
    }

    pub fn verified_nat(
        coloring: &NatColoring,
        family: &[GoodPoly],
        x: BigUint,
        d: BigUint,
        position: u64,
    ) -> Result<Self, VdwError> {
        match check_nat(coloring, family, &x, &d)? {
            Some(color) => Ok(PvdwWitness {
                x: Element::Nat(x),
                d: Element::Nat(d),
                color,
                checked_count: family.len(),
                position,
            }),
            None => Err(VdwError::Unverified(format!("x = {x}, d = {d}"))),
        }
    }
}

/// Evaluates every family member at a given difference, sharing the powers of `d`.
pub(crate) struct FamilyImages<'f> {
    family: &'f [GoodPoly],
    max_degree: u32,
}

impl<'f> FamilyImages<'f> {
    pub(crate) fn new(family: &'f [GoodPoly]) -> Self {
        let max_degree = family.iter().map(|p| p.degree() as u32).max().unwrap_or(0);
        FamilyImages { family, max_degree }
    }

    pub(crate) fn images(&self, d: &GoodPoly) -> Result<Vec<GoodPoly>, PolyError> {
        let mut powers = Vec::with_capacity(self.max_degree as usize);
        let mut acc = d.clone();
        for i in 0..self.max_degree {
            if i > 0 {
                acc = acc.checked_mul(d)?;
            }
            powers.push(acc.clone());
        }
        Ok(self
            .family
            .iter()
            .map(|p| {
                let mut out = GoodPoly::zero();
                for (m, c) in p.terms() {
                    out.add_assign_scaled(&powers[m.degree() as usize - 1], c);
                }
                out
            })
            .collect())
    }
}

fn check_poly(
    oracle: &dyn PolyOracle,
    images: &FamilyImages<'_>,
    x: &GoodPoly,
    d: &GoodPoly,
) -> Result<Option<ColorId>, VdwError> {
    if x.is_zero() || d.is_zero() {
        return Ok(None);
    }
    let base = oracle.color(x)?;
    for img in images.images(d)? {
        if oracle.color(&x.add(&img))? != base {
            return Ok(None);
        }
    }
    Ok(Some(base))
}

fn check_nat(
    coloring: &NatColoring,
    family: &[GoodPoly],
    x: &BigUint,
    d: &BigUint,
) -> Result<Option<ColorId>, VdwError> {
    let base = coloring.color(x)?;
    for p in family {
        if coloring.color(&(x + p.evaluate_at(d)))? != base {
            return Ok(None);
        }
    }
    Ok(Some(base))
}

/// Pairs `(a, b)` of univariate good polynomials ordered by `(size a + size b, size a,
/// a, b)`. `a` may be the zero polynomial when `allow_zero_first` is set.
pub(crate) struct PairStream {
    layers: Vec<Vec<GoodPoly>>,
    first_min: u32,
    total: u32,
    first_size: u32,
    i: usize,
    j: usize,
}

impl PairStream {
    pub(crate) fn new(allow_zero_first: bool) -> Self {
        let first_min = if allow_zero_first { 0 } else { 1 };
        PairStream {
            layers: vec![vec![GoodPoly::zero()]],
            first_min,
            total: first_min + 1,
            first_size: first_min,
            i: 0,
            j: 0,
        }
    }

    fn layer(&mut self, s: u32) -> &[GoodPoly] {
        while self.layers.len() <= s as usize {
            let next = self.layers.len() as u32;
            self.layers.push(size_layer(next, &[T]));
        }
        &self.layers[s as usize]
    }
}

impl Iterator for PairStream {
    type Item = (GoodPoly, GoodPoly);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (sa, sb) = (self.first_size, self.total - self.first_size);
            let la = self.layer(sa).len();
            let lb = self.layer(sb).len();
            if self.i < la && self.j < lb {
                let pair = (self.layers[sa as usize][self.i].clone(), self.layers[sb as usize][self.j].clone());
                self.j += 1;
                if self.j == lb {
                    self.j = 0;
                    self.i += 1;
                }
                return Some(pair);
            }
            self.i = 0;
            self.j = 0;
            if self.first_size + 1 < self.total {
                self.first_size += 1;
            } else {
                self.total += 1;
                self.first_size = self.first_min;
            }
        }
    }
}

/// Budgeted scan over a candidate stream. `test` returns the witness color, if any.
pub(crate) struct Scan<I: Iterator> {
    stream: I,
    pending: VecDeque<I::Item>,
    pub(crate) tried: u64,
    budget: u64,
    jobs: usize,
}

impl<I: Iterator> Scan<I> {
    pub(crate) fn new(stream: I, budget: u64, jobs: usize) -> Self {
        Scan {
            stream,
            pending: VecDeque::new(),
            tried: 0,
            budget,
            jobs: jobs.max(1),
        }
    }
}

impl<I> Scan<I>
where
    I: Iterator,
    I::Item: Send + Sync,
{
    fn pull(&mut self) -> Option<I::Item> {
        self.pending.pop_front().or_else(|| self.stream.next())
    }

    /// Next candidate passing `test`, with its zero-based position.
    ///
    /// With several jobs, candidates are tested a block at a time and the block is
    /// scanned in order, so the result matches a sequential scan.
    pub(crate) fn next_hit<F>(&mut self, test: F) -> Result<(I::Item, ColorId, u64), VdwError>
    where
        F: Fn(&I::Item) -> Result<Option<ColorId>, VdwError> + Sync,
    {
        loop {
            if self.tried >= self.budget {
                return Err(VdwError::BudgetExhausted { tried: self.tried });
            }
            let room = (self.budget - self.tried) as usize;
            if self.jobs == 1 {
                let Some(c) = self.pull() else {
                    return Err(VdwError::BudgetExhausted { tried: self.tried });
                };
                let pos = self.tried;
                self.tried += 1;
                if let Some(color) = test(&c)? {
                    return Ok((c, color, pos));
                }
                continue;
            }
            let mut block: Vec<I::Item> = Vec::with_capacity(BLOCK.min(room));
            while block.len() < BLOCK.min(room) {
                match self.pull() {
                    Some(c) => block.push(c),
                    None => break,
                }
            }
            if block.is_empty() {
                return Err(VdwError::BudgetExhausted { tried: self.tried });
            }
            let results: Vec<Result<Option<ColorId>, VdwError>> = block.par_iter().map(&test).collect();
            let mut rest = block.into_iter();
            for r in results {
                let c = rest.next().expect("one result per candidate");
                let pos = self.tried;
                self.tried += 1;
                match r {
                    Ok(Some(color)) => {
                        self.pending.extend(rest);
                        return Ok((c, color, pos));
                    }
                    Ok(None) => {}
                    Err(e) => {
                        self.pending.extend(rest);
                        return Err(e);
                    }
                }
            }
        }
    }
}

/// The earliest `(x, d)` in candidate order with `x` and all `x + P(d)` one color.
pub fn find_pvdw_witness(q: &PvdwQuery<'_>) -> Result<PvdwWitness, VdwError> {
    if q.budget == 0 {
        return Err(VdwError::InvalidQuery("budget must be at least 1".into()));
    }
    let family = q.family.resolve()?;
    match q.ground {
        Ground::Poly(oracle) => {
            let images = FamilyImages::new(&family);
            let mut scan = Scan::new(PairStream::new(false), q.budget, q.jobs);
            let ((x, d), _, pos) = scan.next_hit(|(x, d)| check_poly(oracle, &images, x, d))?;
            PvdwWitness::verified_poly(oracle, &family, x, d, pos)
        }
        Ground::Nat { coloring, min_x, min_d } => {
            let pairs = nat_pairs(min_x, min_d);
            let mut scan = Scan::new(pairs, q.budget, q.jobs);
            let ((x, d), _, pos) =
                scan.next_hit(|(x, d)| check_nat(coloring, &family, &BigUint::from(*x), &BigUint::from(*d)))?;
            PvdwWitness::verified_nat(coloring, &family, x.into(), d.into(), pos)
        }
    }
}

/// `(x, d)` with `x >= min_x`, `d >= min_d`, ordered by `(x + d, x)`.
fn nat_pairs(min_x: u64, min_d: u64) -> impl Iterator<Item = (u64, u64)> {
    let min_x = min_x.max(1);
    let min_d = min_d.max(1);
    (min_x + min_d..).flat_map(move |s| (min_x..=s - min_d).map(move |x| (x, s - x)))
}

/// A shifted witness: `x = anchor + f` and difference `e`, where `f = F(scale^power)`
/// and `e = E(scale^power)` for good `F` (possibly zero) and nonzero good `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedWitness {
    pub witness: PvdwWitness,
    pub f: GoodPoly,
    pub e: GoodPoly,
    pub f_template: GoodPoly,
    pub e_template: GoodPoly,
    pub power: u32,
}

/// Resumable search for shifted witnesses in candidate order.
pub struct ShiftedSearch<'a> {
    oracle: &'a dyn PolyOracle,
    family: Vec<GoodPoly>,
    anchor: GoodPoly,
    unit: GoodPoly,
    power: u32,
    scan: Scan<PairStream>,
}

impl<'a> ShiftedSearch<'a> {
    pub fn new(q: &PvdwQuery<'a>, anchor: GoodPoly, scale: &GoodPoly, power: u32) -> Result<Self, VdwError> {
        let Ground::Poly(oracle) = q.ground else {
            return Err(VdwError::InvalidQuery("shifted search runs over polynomials".into()));
        };
        if scale.is_zero() {
            return Err(VdwError::InvalidQuery("scale must be nonzero".into()));
        }
        if anchor.is_zero() {
            return Err(VdwError::InvalidQuery("anchor must be nonzero".into()));
        }
        if power == 0 {
            return Err(VdwError::InvalidQuery("power must be at least 1".into()));
        }
        if q.budget == 0 {
            return Err(VdwError::InvalidQuery("budget must be at least 1".into()));
        }
        Ok(ShiftedSearch {
            oracle,
            family: q.family.resolve()?,
            anchor,
            unit: scale.checked_pow(power)?,
            power,
            scan: Scan::new(PairStream::new(true), q.budget, q.jobs),
        })
    }

    pub fn tried(&self) -> u64 {
        self.scan.tried
    }

    pub fn next_witness(&mut self) -> Result<ShiftedWitness, VdwError> {
        let images = FamilyImages::new(&self.family);
        let (oracle, anchor, unit) = (self.oracle, &self.anchor, &self.unit);
        let instantiate = |tpl: &GoodPoly| -> Result<GoodPoly, PolyError> {
            if tpl.is_zero() {
                Ok(GoodPoly::zero())
            } else {
                tpl.compose(unit)
            }
        };
        let ((ft, et), _, pos) = self.scan.next_hit(|(ft, et)| {
            let x = anchor.add(&instantiate(ft)?);
            check_poly(oracle, &images, &x, &instantiate(et)?)
        })?;
        let f = instantiate(&ft)?;
        let e = instantiate(&et)?;
        let witness = PvdwWitness::verified_poly(oracle, &self.family, anchor.add(&f), e.clone(), pos)?;
        Ok(ShiftedWitness {
            witness,
            f,
            e,
            f_template: ft,
            e_template: et,
            power: self.power,
        })
    }
}

/// The earliest shifted witness for `anchor` and `scale^power`.
pub fn find_shifted_pvdw(
    q: &PvdwQuery<'_>,
    anchor: &GoodPoly,
    scale: &GoodPoly,
    power: u32,
) -> Result<ShiftedWitness, VdwError> {
    ShiftedSearch::new(q, anchor.clone(), scale, power)?.next_witness()
}
