//! Route timing, feasibility checks and solution comparison.

mod compare;
mod timing;
mod validate;

pub use compare::{compare, delta_percent, Comparison, GroupDelta};
pub use timing::{flight_km, timing, SortieTiming, TimingTrace};
pub use validate::{validate_solution, Finding, FindingCode, ValidationReport, COST_TOLERANCE_H};
