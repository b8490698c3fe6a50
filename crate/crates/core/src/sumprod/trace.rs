//! Constructive search for a monochromatic `{a, a + b, a b}` under a coloring with
//! exactly three colors, recorded as a replayable trace.
//!
//! The search runs in four phases:
//!
//! 1. a pvdW witness `x, d` for the size-`c0` family, all of color R;
//! 2. the product test `a = x + P(d)`, `b = d` for every `s(P) < c0`;
//! 3. a shifted witness above `d x` at scale `d^2`, giving `x' = x + f/d` and `e`
//!    with the R and B conditions of the chain below (candidates that fail are
//!    skipped);
//! 4. the seven-step chain, which must close with three colors.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::extract::{ExtractError, Witness};
use crate::coloring::{ColorError, ColorId, PolyOracle};
use crate::poly::{enumerate_good, GoodPoly, PolyError, SizeBound, T};
use crate::vdw::{find_pvdw_witness, Element, Family, Ground, PvdwQuery, ShiftedSearch, VdwError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("the trace needs exactly 3 colors, coloring has {0}")]
    ColorCount(u32),
    #[error("search budget exhausted in phase {phase} after {tried} candidates")]
    BudgetExhausted { phase: u8, tried: u64 },
    #[error("chain closed without a witness (the coloring uses more than three colors)")]
    ChainOpen,
    #[error("replay mismatch at step {step}: {message}")]
    Replay { step: usize, message: String },
    #[error(transparent)]
    Vdw(VdwError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub c0: u32,
    pub c1: u32,
    pub budget: u64,
    pub jobs: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            c0: 2,
            c1: 3,
            budget: 200_000,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Pvdw,
    ProductTest,
    Shift,
    Chain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The recorded elements share the claimed colors.
    Established,
    /// The triple is not monochromatic.
    Excluded,
    /// The triple is monochromatic.
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub index: usize,
    pub rule: Rule,
    pub note: String,
    pub elements: Vec<GoodPoly>,
    /// Each element evaluated at `t = 2`, in decimal.
    pub values: Vec<String>,
    pub colors: Vec<ColorId>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub x: GoodPoly,
    pub d: GoodPoly,
    pub steps: Vec<TraceStep>,
    pub witness: Witness,
    pub candidates_tried: u64,
    pub shifts_skipped: u64,
}

struct Recorder<'o> {
    oracle: &'o dyn PolyOracle,
    steps: Vec<TraceStep>,
}

impl Recorder<'_> {
    fn record(&mut self, rule: Rule, note: String, elements: Vec<GoodPoly>, outcome: Outcome) -> Result<(), TraceError> {
        let colors = elements.iter().map(|e| self.oracle.color(e)).collect::<Result<_, _>>()?;
        self.steps.push(TraceStep {
            index: self.steps.len(),
            rule,
            note,
            values: values_at_two(&elements),
            elements,
            colors,
            outcome,
        });
        Ok(())
    }

    /// Records `{a, a + b, a b}`; returns the witness if it is monochromatic.
    fn triple(&mut self, rule: Rule, note: String, a: &GoodPoly, b: &GoodPoly) -> Result<Option<Witness>, TraceError> {
        let elements = vec![a.clone(), a.add(b), a.mul(b)];
        let colors: Vec<ColorId> = elements.iter().map(|e| self.oracle.color(e)).collect::<Result<_, _>>()?;
        let mono = colors.iter().all(|c| *c == colors[0]);
        let outcome = if mono { Outcome::Witness } else { Outcome::Excluded };
        self.steps.push(TraceStep {
            index: self.steps.len(),
            rule,
            note,
            values: values_at_two(&elements),
            elements: elements.clone(),
            colors,
            outcome,
        });
        if !mono {
            return Ok(None);
        }
        let assignment = vec![("a".to_string(), a.clone()), ("b".to_string(), b.clone())];
        Ok(Some(Witness::verified(self.oracle, assignment, elements)?))
    }
}

fn values_at_two(elements: &[GoodPoly]) -> Vec<String> {
    elements.iter().map(|e| e.value_at_two().to_string()).collect()
}

fn budget_error(phase: u8, e: VdwError) -> TraceError {
    match e {
        VdwError::BudgetExhausted { tried } => TraceError::BudgetExhausted { phase, tried },
        e => TraceError::Vdw(e),
    }
}

/// Runs the search and returns the full trace ending in a verified witness.
pub fn three_color_trace(oracle: &dyn PolyOracle, opts: TraceOptions) -> Result<Trace, TraceError> {
    if oracle.color_count() != 3 {
        return Err(TraceError::ColorCount(oracle.color_count()));
    }
    let c0 = opts.c0.max(1);
    let mut rec = Recorder {
        oracle,
        steps: Vec::new(),
    };

    // Phase 1.
    let family: Vec<GoodPoly> = Family::SizeBounded(SizeBound(c0)).resolve().map_err(TraceError::Vdw)?;
    let q = PvdwQuery::new(Ground::Poly(oracle), Family::Explicit(family.clone()), opts.budget).with_jobs(opts.jobs);
    let w = find_pvdw_witness(&q).map_err(|e| budget_error(1, e))?;
    let (Element::Poly(x), Element::Poly(d)) = (w.x, w.d) else {
        unreachable!("polynomial ground yields polynomial witnesses")
    };
    let mut tried = w.position + 1;
    let mut elements = vec![x.clone()];
    elements.extend(family.iter().map(|p| x.add(&p.compose(&d).expect("small family"))));
    rec.record(
        Rule::Pvdw,
        format!("x = {x}, d = {d}: x + P(d) share one color for all s(P) <= {c0}"),
        elements,
        Outcome::Established,
    )?;
    let red = oracle.color(&x)?;

    // Phase 2.
    let mut offsets = vec![GoodPoly::zero()];
    if c0 > 1 {
        offsets.extend(enumerate_good(SizeBound(c0 - 1), &[T]));
    }
    for p in &offsets {
        let a = x.add(&p.compose(&d)?);
        let note = format!("a = x + P(d) with P = {p}, b = d");
        if let Some(wit) = rec.triple(Rule::ProductTest, note, &a, &d)? {
            return Ok(finish(rec, x, d, wit, tried, 0));
        }
    }

    // Phase 3.
    let anchor = d.mul(&x);
    let q = PvdwQuery::new(
        Ground::Poly(oracle),
        Family::SizeBounded(SizeBound(opts.c1.max(3))),
        opts.budget.saturating_sub(tried).max(1),
    )
    .with_jobs(opts.jobs);
    let mut search = ShiftedSearch::new(&q, anchor, &d, 2).map_err(TraceError::Vdw)?;
    let mut skipped = 0u64;
    let (xs, e) = loop {
        let sw = search.next_witness().map_err(|err| budget_error(3, err))?;
        let blue = sw.witness.color;
        let e = sw.e;
        let xs = x.add(&sw.f.divide_exact(&d)?);
        let e_over_d = e.divide_exact(&d)?;
        let de = d.mul(&e);
        let de3 = de.mul(&e).mul(&e);
        let dxs = d.mul(&xs);
        if blue == red {
            // d x' is red as well; x' and x' + d may close immediately.
            if oracle.color(&xs)? == red && oracle.color(&xs.add(&d))? == red {
                let note = format!("x' = {xs}: x', x' + d, d x' all red");
                if let Some(wit) = rec.triple(Rule::Shift, note, &xs, &d)? {
                    tried += search.tried();
                    return Ok(finish(rec, x, d, wit, tried, skipped));
                }
            }
            skipped += 1;
            continue;
        }
        let red_set = [xs.clone(), xs.add(&de), xs.add(&e_over_d), xs.add(&e_over_d).add(&de), xs.add(&de3)];
        let blue_set = [dxs.clone(), dxs.add(&e), dxs.add(&e.scale(&2u32.into())), dxs.add(&e.pow(3))];
        let mut ok = true;
        for el in &red_set {
            ok &= oracle.color(el)? == red;
        }
        for el in &blue_set {
            ok &= oracle.color(el)? == blue;
        }
        if !ok {
            skipped += 1;
            continue;
        }
        let mut elements = red_set.to_vec();
        elements.extend(blue_set);
        rec.record(
            Rule::Shift,
            format!(
                "x' = {xs}, e = {e}: x', x' + de, x' + e/d, x' + e/d + de, x' + de^3 red; \
                 dx', dx' + e, dx' + 2e, dx' + e^3 blue ({skipped} shifts skipped)"
            ),
            elements,
            Outcome::Established,
        )?;
        break (xs, e);
    };
    tried += search.tried();

    // Phase 4.
    let e_over_d = e.divide_exact(&d)?;
    let de = d.mul(&e);
    let dxs = d.mul(&xs);
    let dexs = de.mul(&xs);
    let e2 = e.mul(&e);
    let de3 = de.mul(&e2);
    let chain: [(&str, GoodPoly, GoodPoly); 7] = [
        ("a = x', b = de", xs.clone(), de.clone()),
        ("a = x' + e/d, b = de", xs.add(&e_over_d), de.clone()),
        ("a = dx', b = e", dxs.clone(), e.clone()),
        ("a = dx' + e, b = e", dxs.add(&e), e.clone()),
        ("a = dex', b = e^2", dexs, e2),
        ("a = x', b = de^3", xs.clone(), de3),
        ("a = dx', b = e^3", dxs, e.pow(3)),
    ];
    for (note, a, b) in chain {
        if let Some(wit) = rec.triple(Rule::Chain, note.to_string(), &a, &b)? {
            return Ok(finish(rec, x, d, wit, tried, skipped));
        }
    }
    Err(TraceError::ChainOpen)
}

fn finish(rec: Recorder<'_>, x: GoodPoly, d: GoodPoly, witness: Witness, tried: u64, skipped: u64) -> Trace {
    Trace {
        x,
        d,
        steps: rec.steps,
        witness,
        candidates_tried: tried,
        shifts_skipped: skipped,
    }
}

impl Trace {
    /// Recomputes every recorded color and the witness from scratch.
    pub fn replay(&self, oracle: &dyn PolyOracle) -> Result<(), TraceError> {
        for step in &self.steps {
            if step.elements.len() != step.colors.len() || step.values != values_at_two(&step.elements) {
                return Err(TraceError::Replay {
                    step: step.index,
                    message: "recorded values or colors do not match the elements".into(),
                });
            }
            for (el, want) in step.elements.iter().zip(&step.colors) {
                let got = oracle.color(el)?;
                if got != *want {
                    return Err(TraceError::Replay {
                        step: step.index,
                        message: format!("{el} has {got}, trace says {want}"),
                    });
                }
            }
            let uniform = step.colors.iter().all(|c| *c == step.colors[0]);
            let consistent = match step.outcome {
                Outcome::Witness => uniform,
                Outcome::Excluded => !uniform,
                Outcome::Established => true,
            };
            if !consistent {
                return Err(TraceError::Replay {
                    step: step.index,
                    message: format!("colors contradict outcome {:?}", step.outcome),
                });
            }
        }
        match self.steps.last() {
            Some(last) if last.outcome == Outcome::Witness && last.elements == self.witness.elements => {}
            _ => {
                return Err(TraceError::Replay {
                    step: self.steps.len(),
                    message: "trace does not end in its witness".into(),
                })
            }
        }
        let [a, b] = [&self.witness.assignment[0].1, &self.witness.assignment[1].1];
        if self.witness.elements != vec![a.clone(), a.add(b), a.mul(b)] {
            return Err(TraceError::Replay {
                step: self.steps.len() - 1,
                message: "witness is not {a, a + b, ab}".into(),
            });
        }
        self.witness.recheck(oracle)?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let tag = match s.outcome {
                Outcome::Established => "ok",
                Outcome::Excluded => "excluded",
                Outcome::Witness => "WITNESS",
            };
            let _ = writeln!(out, "[{}] {:?} {}: {}", s.index, s.rule, tag, s.note);
            for ((el, v), c) in s.elements.iter().zip(&s.values).zip(&s.colors) {
                let _ = writeln!(out, "      {el} = {v} -> {c}");
            }
        }
        let _ = writeln!(
            out,
            "witness: a = {}, b = {}, color {}",
            self.witness.assignment[0].1, self.witness.assignment[1].1, self.witness.color
        );
        out
    }
}
