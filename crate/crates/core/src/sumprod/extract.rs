//! Reading a monochromatic `{x, x + P_1(y), ..., x + P_m(y), x y}` off a tower.
//!
//! With `C` colors and `k >= C` levels, two of the level elements `A_i x` share a
//! color. For such a pair `l0 < l1`, `x' = A_l0 x` and `y = a_(l0+1) * ... * a_l1`
//! give `x' y = A_l1 x`, and each `P(y)` is a polynomial in `a_(l0+1), b_(l0+2), ...`
//! of size at most `max(maxcoef P, deg P * L(L+1)/2)` where `L = l1 - l0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tower::TowerWitness;
use crate::coloring::{ColorError, ColorId, PolyOracle};
use crate::poly::{GoodPoly, PolyError, T};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("tower too small: need {needed_levels} levels and level size {needed_size}, have {have_levels} levels and size {have_size}")]
    InsufficientTower {
        needed_levels: usize,
        needed_size: u64,
        have_levels: usize,
        have_size: u64,
    },
    #[error("target {0} must be a nonzero polynomial in one variable")]
    InvalidTarget(String),
    #[error("candidate is not monochromatic: {0}")]
    Unverified(String),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A monochromatic configuration with its assignment, checked on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub assignment: Vec<(String, GoodPoly)>,
    pub elements: Vec<GoodPoly>,
    pub color: ColorId,
}

impl Witness {
    pub fn verified(
        oracle: &dyn PolyOracle,
        assignment: Vec<(String, GoodPoly)>,
        elements: Vec<GoodPoly>,
    ) -> Result<Self, ExtractError> {
        let first = elements
            .first()
            .ok_or_else(|| ExtractError::Unverified("no elements".into()))?;
        let color = oracle.color(first)?;
        for el in &elements[1..] {
            let c = oracle.color(el)?;
            if c != color {
                return Err(ExtractError::Unverified(format!("{first} has {color}, {el} has {c}")));
            }
        }
        Ok(Witness {
            assignment,
            elements,
            color,
        })
    }

    pub fn recheck(&self, oracle: &dyn PolyOracle) -> Result<(), ExtractError> {
        Witness::verified(oracle, self.assignment.clone(), self.elements.clone()).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelColor {
    pub level: usize,
    pub element: GoodPoly,
    pub color: ColorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub witness: Witness,
    pub pair: (usize, usize),
    pub levels: Vec<LevelColor>,
    /// Level indices grouped by color, in order of first appearance.
    pub color_classes: Vec<Vec<usize>>,
    /// Extra same-colored level elements `A_j x`, `j > l1`, beyond the pattern.
    pub extended: Vec<GoodPoly>,
}

/// Size of `P(y)` as a polynomial in the tower variables for a gap of `gap` levels.
pub fn required_size(target: &GoodPoly, gap: usize) -> u64 {
    let gap = gap as u64;
    let y_degree = gap * (gap + 1) / 2;
    let coef = target.max_coefficient();
    let coef = u64::try_from(&coef).unwrap_or(u64::MAX);
    coef.max(target.degree() * y_degree)
}

/// Extracts a witness for `targets`, scanning level pairs by `l1` then `l0` and taking
/// the first same-colored pair whose size demand fits under `c_l0`.
pub fn extract_pattern(
    oracle: &dyn PolyOracle,
    tower: &TowerWitness,
    targets: &[GoodPoly],
) -> Result<Extraction, ExtractError> {
    for p in targets {
        if p.is_zero() || !p.is_univariate_in(T) {
            return Err(ExtractError::InvalidTarget(p.to_string()));
        }
    }
    let k = tower.k;
    let levels: Vec<LevelColor> = (0..=k)
        .map(|i| {
            let element = tower.level_element(i);
            oracle.color(&element).map(|color| LevelColor { level: i, element, color })
        })
        .collect::<Result<_, _>>()?;

    let mut classes: Vec<(ColorId, Vec<usize>)> = Vec::new();
    for lc in &levels {
        match classes.iter_mut().find(|(c, _)| *c == lc.color) {
            Some((_, v)) => v.push(lc.level),
            None => classes.push((lc.color, vec![lc.level])),
        }
    }

    let mut best_needed: Option<u64> = None;
    for l1 in 1..=k {
        for l0 in 0..l1 {
            if levels[l0].color != levels[l1].color {
                continue;
            }
            let needed = targets.iter().map(|p| required_size(p, l1 - l0)).max().unwrap_or(1);
            if needed > tower.schedule.bound(l0) as u64 {
                best_needed = Some(best_needed.map_or(needed, |b| b.min(needed)));
                continue;
            }
            let x = levels[l0].element.clone();
            let y = tower.a[l0..l1].iter().cloned().reduce(|a, b| a.mul(&b)).expect("l1 > l0");
            let mut elements = vec![x.clone()];
            for p in targets {
                elements.push(x.add(&p.compose(&y)?));
            }
            elements.push(levels[l1].element.clone());
            let witness = Witness::verified(oracle, vec![("x".into(), x), ("y".into(), y)], elements)?;
            let color = levels[l0].color;
            let extended = levels[l1 + 1..]
                .iter()
                .filter(|lc| lc.color == color)
                .map(|lc| lc.element.clone())
                .collect();
            return Ok(Extraction {
                witness,
                pair: (l0, l1),
                levels,
                color_classes: classes.into_iter().map(|(_, v)| v).collect(),
                extended,
            });
        }
    }
    let have_size = tower.schedule.bound(0) as u64;
    let needed_size = best_needed.unwrap_or_else(|| targets.iter().map(|p| required_size(p, 1)).max().unwrap_or(1));
    Err(ExtractError::InsufficientTower {
        needed_levels: (oracle.color_count() as usize).max(k + 1),
        needed_size,
        have_levels: k,
        have_size,
    })
}
