//! Reference methods: a truck-only start, a hill-climbing local search and
//! lower bounds.

mod bound;
mod initial;
mod vns;

pub use bound::{bound_sources, lower_bound, LowerBoundMode, EXACT_BOUND_MAX_CUSTOMERS, EXACT_BOUND_MAX_DEPOTS};
pub use initial::{nearest_depot_groups, nearest_neighbor_route, nearest_neighbor_solution};
pub use vns::{hc_vns_solve, hc_vns_with, VnsConfig, VnsOperator};
