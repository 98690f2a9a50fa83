//! The complete mixed-integer model and an exhaustive solver for tiny
//! instances.

mod brute;
mod model;

pub use brute::{brute_force_exact, BruteForceCaps};
pub use model::{build_full_milp, encode_solution, FullModelConfig};
