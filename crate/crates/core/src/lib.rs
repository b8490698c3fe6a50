//! Monochromatic sum-product patterns in colorings of good polynomials.
//!
//! A good polynomial has nonnegative integer coefficients and no constant term. Given a
//! finite coloring of good polynomials in `t`, this crate searches for verified
//! monochromatic configurations `{x, x + P_1(y), ..., x + P_m(y), x y}`, and computes
//! exact avoidance numbers over `[N]` as ground truth.
//!
//! - [`poly`]: exact arithmetic, size, enumeration, division, reducibility.
//! - [`coloring`]: integer and polynomial colorings, the evaluation lift, a small DSL.
//! - [`vdw`]: budgeted polynomial van der Waerden witness search.
//! - [`sumprod`]: towers, pattern extraction, and the three-color trace.
//! - [`brute`]: backtracking avoidance numbers and exhaustive region scans.
//!
//! Every witness any of these return has been re-checked against the coloring.

pub mod brute;
pub mod coloring;
pub mod poly;
pub mod sumprod;
pub mod vdw;

pub use brute::{min_unavoidable_n, AvoidanceReport, PatternFamily};
pub use coloring::{parse_coloring, ColorId, Coloring, NatColoring, PolyColoring, PolyOracle};
pub use poly::{enumerate_good, parse_poly, GoodPoly, Monomial, SizeBound, Var};
pub use sumprod::{build_tower, extract_pattern, three_color_trace, CSchedule, TowerWitness, Witness};
pub use vdw::{find_pvdw_witness, find_shifted_pvdw, Family, PvdwQuery, PvdwWitness};
