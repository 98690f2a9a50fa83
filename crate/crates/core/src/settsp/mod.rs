//! Per-group set tours: neighbor-set systems, cost tables, exact and
//! heuristic solvers and the linear model.

mod costs;
mod exact;
mod external;
mod greedy;
mod model;
mod system;
mod tour;

pub use costs::{edge_cost, service_cost, SetCosts};
pub(crate) use exact::HeldKarp;
pub use external::{parse_solution, run_external};
pub use model::{build_set_tsp_milp, SetTourVars};
pub use system::{build_set_system, SetMode, SetSystem};
pub use tour::{
    extract_visit_order, solve_set_tsp, tour_cost, Backend, ServicePair, SetTour, SolveOptions, Visit,
    DEFAULT_CUSTOMER_CAP, DEFAULT_VERTEX_CAP,
};
