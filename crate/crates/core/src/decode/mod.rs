//! Turning a customer visit order into a timed truck-and-drone route.

mod dp;
mod plan;

pub use dp::{decode_all, decode_route, decode_sources, time_batch};
pub use plan::{materialize, StopSortie};
