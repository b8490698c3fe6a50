//! Sum-product engine: towers, pattern extraction, and the three-color trace.

mod extract;
mod tower;
mod trace;

pub use extract::{extract_pattern, required_size, ExtractError, Extraction, LevelColor, Witness};
pub use tower::{
    a_from_b, build_tower, verify_lemma, CSchedule, StepPower, TowerError, TowerOptions, TowerStep, TowerWitness,
};
pub use trace::{three_color_trace, Outcome, Rule, Trace, TraceError, TraceOptions, TraceStep};
