//! Coloring oracles over the positive integers and over good polynomials.
//!
//! Every oracle is a pure function: equal inputs always receive equal colors, which
//! is what lets the search engines memoize on canonical polynomial form.

mod dsl;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::GoodPoly;

pub use dsl::{parse_coloring, Coloring, DslError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("{value} is outside the coloring domain 1..={len}")]
    OutOfDomain { value: String, len: usize },
    #[error("colorings are defined on nonzero elements only")]
    ZeroElement,
    #[error("invalid coloring: {0}")]
    Invalid(String),
    #[error("could not read table: {0}")]
    Io(String),
}

/// A coloring of nonzero good polynomials.
pub trait PolyOracle: Send + Sync {
    fn color_count(&self) -> u32;
    fn color(&self, p: &GoodPoly) -> Result<ColorId, ColorError>;
}

impl<O: PolyOracle + ?Sized> PolyOracle for &O {
    fn color_count(&self) -> u32 {
        (**self).color_count()
    }
    fn color(&self, p: &GoodPoly) -> Result<ColorId, ColorError> {
        (**self).color(p)
    }
}

/// A coloring of the positive integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NatColoring {
    /// `k mod m`.
    Mod { m: u32 },
    /// Finite table: entry `i` is the color of `i + 1`. Lookups past the end fail.
    Table { colors: Vec<u32>, count: u32 },
    /// Everything in one color out of `count`.
    Constant { color: u32, count: u32 },
}

impl NatColoring {
    pub fn modulo(m: u32) -> Result<Self, ColorError> {
        if m < 2 {
            return Err(ColorError::Invalid(format!("modulus must be at least 2, got {m}")));
        }
        Ok(NatColoring::Mod { m })
    }

    /// Table coloring whose color count is one more than the largest entry.
    pub fn table(colors: Vec<u32>) -> Result<Self, ColorError> {
        let count = colors.iter().max().map_or(1, |&c| c + 1);
        NatColoring::table_with_count(colors, count)
    }

    pub fn table_with_count(colors: Vec<u32>, count: u32) -> Result<Self, ColorError> {
        if count == 0 || colors.iter().any(|&c| c >= count) {
            return Err(ColorError::Invalid("table entry exceeds the color count".into()));
        }
        Ok(NatColoring::Table { colors, count })
    }

    /// Reads a JSON array of color indices; element `i` colors the integer `i + 1`.
    pub fn load_table(path: &Path) -> Result<Self, ColorError> {
        let text = std::fs::read_to_string(path).map_err(|e| ColorError::Io(format!("{}: {e}", path.display())))?;
        let colors: Vec<u32> = serde_json::from_str(&text).map_err(|e| ColorError::Io(format!("{}: {e}", path.display())))?;
        NatColoring::table(colors)
    }

    /// The bit-exact table JSON: a compact array such as `[0,1,1,0]`.
    pub fn table_json(colors: &[u32]) -> String {
        serde_json::to_string(colors).expect("u32 array serializes")
    }

    pub fn constant(color: u32, count: u32) -> Result<Self, ColorError> {
        if color >= count {
            return Err(ColorError::Invalid("constant color exceeds count".into()));
        }
        Ok(NatColoring::Constant { color, count })
    }

    pub fn color_count(&self) -> u32 {
        match self {
            NatColoring::Mod { m } => *m,
            NatColoring::Table { count, .. } | NatColoring::Constant { count, .. } => *count,
        }
    }

    pub fn color(&self, k: &BigUint) -> Result<ColorId, ColorError> {
        if *k == BigUint::from(0u32) {
            return Err(ColorError::ZeroElement);
        }
        match self {
            NatColoring::Mod { m } => Ok(ColorId((k % *m).to_u32().expect("residue fits"))),
            NatColoring::Table { colors, .. } => k
                .to_usize()
                .and_then(|i| colors.get(i - 1))
                .map(|&c| ColorId(c))
                .ok_or_else(|| ColorError::OutOfDomain {
                    value: k.to_string(),
                    len: colors.len(),
                }),
            NatColoring::Constant { color, .. } => Ok(ColorId(*color)),
        }
    }

    pub fn color_u64(&self, k: u64) -> Result<ColorId, ColorError> {
        match self {
            NatColoring::Mod { m } if k > 0 => Ok(ColorId((k % *m as u64) as u32)),
            NatColoring::Table { colors, .. } if k > 0 => colors
                .get(k as usize - 1)
                .map(|&c| ColorId(c))
                .ok_or_else(|| ColorError::OutOfDomain {
                    value: k.to_string(),
                    len: colors.len(),
                }),
            _ => self.color(&BigUint::from(k)),
        }
    }
}

/// A coloring of good polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyColoring {
    /// Color `p` with the inner color of `p` evaluated at `base` (every variable).
    Lift { inner: NatColoring, base: u32 },
    /// Color `P(x1, ..., xn)` with the inner color of `P(t, ..., t)`.
    Collapse(Box<PolyColoring>),
    /// 0 for reducible polynomials, 1 for irreducible ones.
    Reducibility,
    Constant { color: u32, count: u32 },
}

/// Default evaluation point of [`lift_from_nat`].
pub const DEFAULT_LIFT_BASE: u32 = 2;

pub fn mod_coloring(m: u32) -> Result<NatColoring, ColorError> {
    NatColoring::modulo(m)
}

pub fn lift_from_nat(inner: NatColoring, base: u32) -> Result<PolyColoring, ColorError> {
    if base < 2 {
        return Err(ColorError::Invalid(format!("lift base must be at least 2, got {base}")));
    }
    Ok(PolyColoring::Lift { inner, base })
}

pub fn collapse_to_t(inner: PolyColoring) -> PolyColoring {
    PolyColoring::Collapse(Box::new(inner))
}

pub fn reducibility_coloring() -> PolyColoring {
    PolyColoring::Reducibility
}

impl PolyOracle for PolyColoring {
    fn color_count(&self) -> u32 {
        match self {
            PolyColoring::Lift { inner, .. } => inner.color_count(),
            PolyColoring::Collapse(inner) => inner.color_count(),
            PolyColoring::Reducibility => 2,
            PolyColoring::Constant { count, .. } => *count,
        }
    }

    fn color(&self, p: &GoodPoly) -> Result<ColorId, ColorError> {
        if p.is_zero() {
            return Err(ColorError::ZeroElement);
        }
        match self {
            PolyColoring::Lift { inner, base } => inner.color(&p.evaluate_at(&BigUint::from(*base))),
            PolyColoring::Collapse(inner) => inner.color(&p.collapse()),
            PolyColoring::Reducibility => Ok(ColorId(if p.is_reducible() { 0 } else { 1 })),
            PolyColoring::Constant { color, .. } => Ok(ColorId(*color)),
        }
    }
}

/// An oracle backed by a closure. The closure must be deterministic.
pub struct FnColoring<F> {
    count: u32,
    rule: F,
}

impl<F> FnColoring<F>
where
    F: Fn(&GoodPoly) -> u32 + Send + Sync,
{
    pub fn new(count: u32, rule: F) -> Self {
        FnColoring { count, rule }
    }
}

impl<F> PolyOracle for FnColoring<F>
where
    F: Fn(&GoodPoly) -> u32 + Send + Sync,
{
    fn color_count(&self) -> u32 {
        self.count
    }

    fn color(&self, p: &GoodPoly) -> Result<ColorId, ColorError> {
        if p.is_zero() {
            return Err(ColorError::ZeroElement);
        }
        let c = (self.rule)(p);
        if c >= self.count {
            return Err(ColorError::Invalid(format!("rule returned color {c} of {}", self.count)));
        }
        Ok(ColorId(c))
    }
}

/// Caches colors by canonical polynomial.
pub struct Memoized<O> {
    inner: O,
    cache: Mutex<HashMap<GoodPoly, ColorId>>,
}

impl<O: PolyOracle> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Memoized {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

impl<O: PolyOracle> PolyOracle for Memoized<O> {
    fn color_count(&self) -> u32 {
        self.inner.color_count()
    }

    fn color(&self, p: &GoodPoly) -> Result<ColorId, ColorError> {
        if let Some(&c) = self.cache.lock().expect("cache lock").get(p) {
            return Ok(c);
        }
        let c = self.inner.color(p)?;
        self.cache.lock().expect("cache lock").insert(p.clone(), c);
        Ok(c)
    }
}

/// Checks that `elements`, all colored alike under a lift, evaluate to integers that
/// share one inner color.
pub fn lift_transfer_holds(inner: &NatColoring, base: u32, elements: &[GoodPoly]) -> Result<bool, ColorError> {
    let base = BigUint::from(base);
    let colors = elements
        .iter()
        .map(|p| inner.color(&p.evaluate_at(&base)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(colors.windows(2).all(|w| w[0] == w[1]))
}
