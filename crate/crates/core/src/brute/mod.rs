//! Exhaustive ground truth: avoidance numbers over `[N]`, pattern scans over bounded
//! regions, and the reducibility coloring check.

mod avoid;
mod pattern;
mod region;

use thiserror::Error;

use crate::coloring::ColorError;
use crate::poly::PolyError;

pub use avoid::{min_unavoidable_n, refute, AvoidOptions, AvoidanceReport};
pub use pattern::{parse_template, render_template, var_name, PatternFamily};
pub use region::{
    check_p1_exercise, region_members, verify_coloring_avoids, verify_nat_coloring, verify_poly_region, ExerciseReport,
    Instance, Outcome, Region,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("an avoiding coloring of [{cap}] exists; raise the cap")]
    CapReached { cap: u32, coloring: Vec<u32> },
    #[error("verification failed: {0}")]
    Unverified(String),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
