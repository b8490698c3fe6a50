use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::BruteError;
use crate::poly::{parse_poly_with, GoodPoly, Var};

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

pub fn var_name(v: Var) -> String {
    match NAMES.get(v as usize - 1) {
        Some(s) => s.to_string(),
        None => format!("v{v}"),
    }
}

fn var_index(name: &str) -> Option<Var> {
    if let Some(i) = NAMES.iter().position(|n| *n == name) {
        return Some(i as Var + 1);
    }
    name.strip_prefix('v')?.parse::<Var>().ok().filter(|&v| v >= 1)
}

/// A finite list of templates in the pattern variables `x, y, z, w, v5, ...`, with a
/// lower bound for each variable when the pattern is read over the integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFamily {
    pub name: String,
    pub templates: Vec<GoodPoly>,
    pub mins: Vec<u64>,
}

impl PatternFamily {
    pub fn new(name: impl Into<String>, templates: Vec<GoodPoly>, mins: Vec<u64>) -> Result<Self, BruteError> {
        if templates.is_empty() {
            return Err(BruteError::InvalidPattern("no templates".into()));
        }
        if templates.iter().any(GoodPoly::is_zero) {
            return Err(BruteError::InvalidPattern("templates must be nonzero".into()));
        }
        let used: BTreeSet<Var> = templates.iter().flat_map(|t| t.vars()).collect();
        let declared: BTreeSet<Var> = (1..=mins.len() as Var).collect();
        if used != declared {
            return Err(BruteError::InvalidPattern(format!(
                "templates use {} variables, {} declared",
                used.len(),
                declared.len()
            )));
        }
        if mins.contains(&0) {
            return Err(BruteError::InvalidPattern("variable minimums must be positive".into()));
        }
        Ok(PatternFamily {
            name: name.into(),
            templates,
            mins,
        })
    }

    fn builtin(name: &str, spec: &str, mins: Vec<u64>) -> Self {
        let templates = spec.split(';').map(|t| parse_template(t).expect("builtin template")).collect();
        PatternFamily::new(name, templates, mins).expect("builtin pattern")
    }

    /// `{x, y, x + y}`, with `x = y` allowed.
    pub fn schur() -> Self {
        Self::builtin("schur", "x; y; x+y", vec![1, 1])
    }

    /// `{x, x + y, x + 2y}`.
    pub fn ap3() -> Self {
        Self::builtin("ap3", "x; x+y; x+2y", vec![1, 1])
    }

    /// `{x, x + y, x y}` with `y >= y_min`.
    pub fn sumprod(y_min: u64) -> Self {
        Self::builtin("sumprod", "x; x+y; x*y", vec![1, y_min])
    }

    /// `{x + y, x y}` with `y >= y_min`.
    pub fn sumprod_corollary(y_min: u64) -> Self {
        Self::builtin("sumprod-corollary", "x+y; x*y", vec![1, y_min])
    }

    /// `{x, y, x + y, x y}`.
    pub fn quad() -> Self {
        Self::builtin("quad", "x; y; x+y; x*y", vec![1, 1])
    }

    /// A builtin name, or `;`-separated templates such as `x; x+y^2; x*y`. `y_min`
    /// applies to the sum-product builtins; custom patterns use 1 for every variable.
    pub fn parse(spec: &str, y_min: u64) -> Result<Self, BruteError> {
        match spec.trim() {
            "schur" => return Ok(Self::schur()),
            "ap3" => return Ok(Self::ap3()),
            "sumprod" => return Ok(Self::sumprod(y_min)),
            "sumprod-corollary" => return Ok(Self::sumprod_corollary(y_min)),
            "quad" => return Ok(Self::quad()),
            _ => {}
        }
        let templates = spec
            .split(';')
            .map(|t| parse_template(t).map_err(|e| BruteError::InvalidPattern(format!("'{}': {e}", t.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        let vars = templates.iter().flat_map(|t| t.vars()).max().unwrap_or(0);
        PatternFamily::new(spec.trim(), templates, vec![1; vars as usize])
    }

    pub fn var_count(&self) -> usize {
        self.mins.len()
    }

    pub(crate) fn compile(&self) -> Vec<CompiledTemplate> {
        self.templates.iter().map(CompiledTemplate::new).collect()
    }

    /// Visits every assignment over the integers whose elements all lie in `[1, n]`,
    /// in lexicographic order of the variable values. Elements are returned in
    /// template order.
    pub fn for_each_nat_instance<B>(
        &self,
        n: u64,
        mut visit: impl FnMut(&[u64], &[u64]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let compiled = self.compile();
        let mut values = self.mins.clone();
        let mut elements = vec![0u64; compiled.len()];
        nat_rec(&compiled, &self.mins, n, 0, &mut values, &mut elements, &mut visit)
    }
}

fn nat_rec<B>(
    compiled: &[CompiledTemplate],
    mins: &[u64],
    n: u64,
    var: usize,
    values: &mut [u64],
    elements: &mut [u64],
    visit: &mut impl FnMut(&[u64], &[u64]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if var == values.len() {
        return visit(values, elements);
    }
    let mut v = mins[var];
    loop {
        values[var] = v;
        // Remaining variables sit at their minimums, so this is the smallest
        // completion; templates are monotone in every variable.
        values[var + 1..].copy_from_slice(&mins[var + 1..]);
        let mut fits = true;
        for (slot, t) in elements.iter_mut().zip(compiled) {
            match t.eval(values, n) {
                Some(x) => *slot = x,
                None => {
                    fits = false;
                    break;
                }
            }
        }
        if !fits {
            return ControlFlow::Continue(());
        }
        nat_rec(compiled, mins, n, var + 1, values, elements, visit)?;
        v += 1;
    }
}

/// A template with machine-word coefficients, evaluated with an upper limit.
pub(crate) struct CompiledTemplate {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledTemplate {
    fn new(p: &GoodPoly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let c = c.to_u64().unwrap_or(u64::MAX);
                (c, m.factors().iter().map(|&(v, e)| (v as usize - 1, e)).collect())
            })
            .collect();
        CompiledTemplate { terms }
    }

    /// The value, or `None` if it exceeds `limit`.
    pub(crate) fn eval(&self, values: &[u64], limit: u64) -> Option<u64> {
        let mut total = 0u64;
        for (c, factors) in &self.terms {
            let mut term = *c;
            for &(v, e) in factors {
                term = term.checked_mul(values[v].checked_pow(e)?)?;
                if term > limit {
                    return None;
                }
            }
            total = total.checked_add(term)?;
            if total > limit {
                return None;
            }
        }
        Some(total)
    }
}

pub fn parse_template(s: &str) -> Result<GoodPoly, crate::poly::ParsePolyError> {
    parse_poly_with(s, &var_index)
}

/// Renders a template with the pattern variable names.
pub fn render_template(p: &GoodPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let mono: Vec<String> = m
                .factors()
                .iter()
                .map(|&(v, e)| if e == 1 { var_name(v) } else { format!("{}^{e}", var_name(v)) })
                .collect();
            let mono = mono.join("*");
            if c == &1u32.into() {
                mono
            } else {
                format!("{c}{mono}")
            }
        })
        .collect();
    parts.join("+")
}

impl fmt::Display for PatternFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ts: Vec<String> = self.templates.iter().map(render_template).collect();
        write!(f, "{{{}}}", ts.join(", "))?;
        for (i, &m) in self.mins.iter().enumerate() {
            if m > 1 {
                write!(f, " with {} >= {m}", var_name(i as Var + 1))?;
            }
        }
        Ok(())
    }
}
