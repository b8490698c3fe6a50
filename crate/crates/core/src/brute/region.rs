use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{var_name, BruteError, PatternFamily};
use crate::coloring::{ColorId, Coloring, NatColoring, PolyColoring, PolyOracle};
use crate::poly::{monomials_up_to, GoodPoly, Var};
use crate::vdw::Element;

/// Where pattern elements must land.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `[1, n]`.
    Nat(u64),
    /// Nonzero good polynomials in `x1..x{vars}` of size at most `size`, optionally
    /// multilinear.
    Poly { size: u32, vars: u32, multilinear: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub assignment: Vec<(String, Element)>,
    pub elements: Vec<Element>,
    pub color: ColorId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    /// Every assignment landing in the region was checked.
    NoInstance { checked: u64 },
    Witness(Instance),
}

/// Scans `region` for the earliest monochromatic instance of `f`.
pub fn verify_coloring_avoids(coloring: &Coloring, f: &PatternFamily, region: Region) -> Result<Outcome, BruteError> {
    match (coloring, region) {
        (Coloring::Nat(c), Region::Nat(n)) => verify_nat_coloring(c, f, n),
        (Coloring::Poly(c), Region::Poly { .. }) => verify_poly_region(c, f, region),
        _ => Err(BruteError::InvalidArgument(
            "integer colorings need an integer region, polynomial colorings a polynomial region".into(),
        )),
    }
}

pub fn verify_nat_coloring(c: &NatColoring, f: &PatternFamily, n: u64) -> Result<Outcome, BruteError> {
    let mut checked = 0u64;
    let mut failure = None;
    let flow = f.for_each_nat_instance(n, |assignment, elements| {
        checked += 1;
        let colors: Result<Vec<ColorId>, _> = elements.iter().map(|&e| c.color_u64(e)).collect();
        let colors = match colors {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(None);
            }
        };
        if colors.iter().all(|x| *x == colors[0]) {
            return ControlFlow::Break(Some(Instance {
                assignment: named(assignment.iter().map(|&v| Element::Nat(v.into()))),
                elements: elements.iter().map(|&e| Element::Nat(e.into())).collect(),
                color: colors[0],
            }));
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(match flow {
        ControlFlow::Break(Some(w)) => Outcome::Witness(w),
        _ => Outcome::NoInstance { checked },
    })
}

fn named(values: impl Iterator<Item = Element>) -> Vec<(String, Element)> {
    values.enumerate().map(|(i, v)| (var_name(i as Var + 1), v)).collect()
}

/// Every polynomial in the region, in polynomial order.
pub fn region_members(size: u32, vars: u32, multilinear: bool) -> Vec<GoodPoly> {
    if size == 0 || vars == 0 {
        return Vec::new();
    }
    let vs: Vec<Var> = (1..=vars).collect();
    let monos: Vec<_> = monomials_up_to(size, &vs)
        .into_iter()
        .filter(|m| !multilinear || m.max_exponent() <= 1)
        .collect();
    let radix = size as u64 + 1;
    let count = radix.pow(monos.len() as u32);
    let mut out: Vec<GoodPoly> = (1..count)
        .map(|mut idx| {
            let mut p = GoodPoly::zero();
            for m in &monos {
                let d = idx % radix;
                idx /= radix;
                if d > 0 {
                    p = p.add(&GoodPoly::monomial(m.clone(), d));
                }
            }
            p
        })
        .collect();
    out.sort();
    out
}

/// Scans a polynomial region. An assignment counts only when every element lies in
/// the region.
pub fn verify_poly_region(c: &dyn PolyOracle, f: &PatternFamily, region: Region) -> Result<Outcome, BruteError> {
    let Region::Poly { size, vars, multilinear } = region else {
        return Err(BruteError::InvalidArgument("expected a polynomial region".into()));
    };
    let members = region_members(size, vars, multilinear);
    let mut color_of: HashMap<GoodPoly, ColorId> = HashMap::with_capacity(members.len());
    for p in &members {
        color_of.insert(p.clone(), c.color(p)?);
    }
    let k = f.var_count();
    let plain: Vec<Option<usize>> = f
        .templates
        .iter()
        .map(|t| {
            let vs = t.vars();
            (t.term_count() == 1 && t.degree() == 1 && t.max_coefficient() == 1u32.into())
                .then(|| *vs.iter().next().unwrap() as usize - 1)
        })
        .collect();
    let mut checked = 0u64;
    let mut assignment: Vec<&GoodPoly> = Vec::with_capacity(k);
    let found = scan_poly(f, size as u64, &members, &color_of, &plain, &mut assignment, &mut checked)?;
    Ok(match found {
        Some(w) => Outcome::Witness(w),
        None => Outcome::NoInstance { checked },
    })
}

fn scan_poly<'m>(
    f: &PatternFamily,
    max_degree: u64,
    members: &'m [GoodPoly],
    color_of: &HashMap<GoodPoly, ColorId>,
    plain: &[Option<usize>],
    assignment: &mut Vec<&'m GoodPoly>,
    checked: &mut u64,
) -> Result<Option<Instance>, BruteError> {
    let k = f.var_count();
    if assignment.len() == k {
        *checked += 1;
        return instantiate(f, assignment, max_degree, color_of);
    }
    let var = assignment.len();
    let base_color = assignment.first().map(|p| color_of[*p]);
    // A variable that is itself a template must match the first variable's color.
    let must_match = plain.contains(&Some(var)) && plain.contains(&Some(0));
    for p in members {
        if let (true, Some(bc)) = (must_match, base_color) {
            if color_of[p] != bc {
                continue;
            }
        }
        assignment.push(p);
        let r = scan_poly(f, max_degree, members, color_of, plain, assignment, checked)?;
        assignment.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

fn instantiate(
    f: &PatternFamily,
    assignment: &[&GoodPoly],
    max_degree: u64,
    color_of: &HashMap<GoodPoly, ColorId>,
) -> Result<Option<Instance>, BruteError> {
    let mut elements = Vec::with_capacity(f.templates.len());
    let mut color = None;
    for t in &f.templates {
        let Some(e) = eval_template(t, assignment, max_degree) else {
            return Ok(None);
        };
        let Some(&c) = color_of.get(&e) else {
            return Ok(None);
        };
        match color {
            None => color = Some(c),
            Some(c0) if c0 != c => return Ok(None),
            _ => {}
        }
        elements.push(e);
    }
    Ok(Some(Instance {
        assignment: named(assignment.iter().map(|p| Element::Poly((*p).clone()))),
        elements: elements.into_iter().map(Element::Poly).collect(),
        color: color.expect("nonempty pattern"),
    }))
}

/// Substitutes `assignment` into `t`, or `None` when the result has degree above
/// `max_degree`. Coefficients are nonnegative, so the degree is known before
/// multiplying.
fn eval_template(t: &GoodPoly, assignment: &[&GoodPoly], max_degree: u64) -> Option<GoodPoly> {
    for (m, _) in t.terms() {
        let d: u64 = m
            .factors()
            .iter()
            .map(|&(v, e)| e as u64 * assignment[v as usize - 1].degree())
            .sum();
        if d > max_degree {
            return None;
        }
    }
    let mut out = GoodPoly::zero();
    for (m, c) in t.terms() {
        let mut term: Option<GoodPoly> = None;
        for &(v, e) in m.factors() {
            let p = assignment[v as usize - 1];
            let pw = if e == 1 { p.clone() } else { p.pow(e) };
            term = Some(match term {
                None => pw,
                Some(acc) => acc.mul(&pw),
            });
        }
        out.add_assign_scaled(&term.expect("nonconstant monomial"), c);
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExerciseReport {
    pub size_bound: u32,
    pub var_bound: u32,
    pub region_size: usize,
    pub outcome: Outcome,
}

/// The reducibility 2-coloring of multilinear polynomials against `{x, y, x+y, xy}`,
/// with all four elements required to be multilinear of size at most `c` in at most
/// `v` variables.
pub fn check_p1_exercise(c: u32, v: u32) -> Result<ExerciseReport, BruteError> {
    let region = Region::Poly {
        size: c,
        vars: v,
        multilinear: true,
    };
    let outcome = verify_poly_region(&PolyColoring::Reducibility, &PatternFamily::quad(), region)?;
    Ok(ExerciseReport {
        size_bound: c,
        var_bound: v,
        region_size: region_members(c, v, true).len(),
        outcome,
    })
}
