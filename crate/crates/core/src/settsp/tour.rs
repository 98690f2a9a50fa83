use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solution::VisitOrder;

use super::costs::SetCosts;
use super::exact::HeldKarp;
use super::external::solve_external;
use super::greedy::solve_greedy;
use super::system::SetSystem;

pub const DEFAULT_CUSTOMER_CAP: usize = 14;
pub const DEFAULT_VERTEX_CAP: usize = 32;

/// Passage through one set: entry and exit positions inside `verts[set]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub set: usize,
    pub enter: usize,
    pub leave: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServicePair {
    pub customer: usize,
    pub takeoff: usize,
    pub landing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SetTour<S> {
    pub depot: usize,
    pub order: Vec<usize>,
    pub service_pairs: Vec<ServicePair>,
    /// Depot, then entry and exit vertex of each set, then depot.
    pub vertices: Vec<usize>,
    #[serde(rename = "cost_h")]
    pub cost: S,
    pub backend: String,
}

impl<S: Scalar> SetTour<S> {
    pub fn empty(depot: usize, backend: &str) -> Self {
        SetTour {
            depot,
            order: Vec::new(),
            service_pairs: Vec::new(),
            vertices: vec![depot, depot],
            cost: S::zero(),
            backend: backend.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tour serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn build_tour<S: Scalar>(costs: &SetCosts<'_, S>, visits: &[Visit], backend: &str) -> SetTour<S> {
    let mut tour = SetTour::empty(costs.depot, backend);
    tour.vertices = vec![costs.depot];
    for v in visits {
        let verts = &costs.verts[v.set];
        tour.order.push(costs.owners[v.set].expect("customer set"));
        let (takeoff, landing) = costs.service_pair[v.set][v.enter * verts.len() + v.leave];
        tour.service_pairs.push(ServicePair { customer: costs.owners[v.set].unwrap(), takeoff, landing });
        tour.vertices.push(verts[v.enter]);
        tour.vertices.push(verts[v.leave]);
    }
    tour.vertices.push(costs.depot);
    tour.cost = tour_cost(costs, visits);
    tour
}

/// Total time of a tour given as a visit sequence.
pub fn tour_cost<S: Scalar>(costs: &SetCosts<'_, S>, visits: &[Visit]) -> S {
    let mut at = costs.depot;
    let mut total = S::zero();
    for v in visits {
        let verts = &costs.verts[v.set];
        total += costs.travel(at, verts[v.enter]) + costs.service_at(v.set, v.enter, v.leave);
        at = verts[v.leave];
    }
    total + costs.travel(at, costs.depot)
}

/// Best entry and exit vertices for a fixed set order.
pub(crate) fn best_for_order<S: Scalar>(costs: &SetCosts<'_, S>, order: &[usize]) -> (S, Vec<Visit>) {
    if order.is_empty() {
        return (S::zero(), Vec::new());
    }
    // leave[l][b] = best time standing at exit b of the l-th set.
    let mut leave: Vec<Vec<(S, usize, usize)>> = Vec::with_capacity(order.len());
    let mut prev_exits: Vec<(usize, S)> = vec![(costs.depot, S::zero())];
    for &set in order {
        let verts = &costs.verts[set];
        let m = verts.len();
        let entry: Vec<(S, usize)> = verts
            .iter()
            .map(|&a| {
                prev_exits
                    .iter()
                    .enumerate()
                    .map(|(pi, &(b, t))| (t + costs.travel(b, a), pi))
                    .fold((S::infinity(), 0), |acc, x| if x.0 < acc.0 { x } else { acc })
            })
            .collect();
        let mut row = vec![(S::infinity(), 0, 0); m];
        for (ai, &(e, from)) in entry.iter().enumerate() {
            for (bi, slot) in row.iter_mut().enumerate() {
                let cand = e + costs.service_at(set, ai, bi);
                if cand < slot.0 {
                    *slot = (cand, ai, from);
                }
            }
        }
        prev_exits = verts.iter().zip(&row).map(|(&b, r)| (b, r.0)).collect();
        leave.push(row);
    }
    let last = order.len() - 1;
    let (mut cost, mut bi) = (S::infinity(), 0);
    for (i, &(b, t)) in prev_exits.iter().enumerate() {
        let cand = t + costs.travel(b, costs.depot);
        if cand < cost {
            cost = cand;
            bi = i;
        }
    }
    let mut visits = vec![Visit { set: 0, enter: 0, leave: 0 }; order.len()];
    for l in (0..=last).rev() {
        let (_, ai, from) = leave[l][bi];
        visits[l] = Visit { set: order[l], enter: ai, leave: bi };
        bi = from;
    }
    (cost, visits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Exact when within caps, else the external solver if configured, else
    /// the local search.
    Auto {
        external: Option<String>,
    },
    ExactDp,
    ExternalMilp {
        cmd: String,
    },
    GreedyLs,
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Auto { external: None }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Auto { .. } => "auto",
            Backend::ExactDp => "exact_dp",
            Backend::ExternalMilp { .. } => "external_milp",
            Backend::GreedyLs => "greedy_ls",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    /// Parses `auto`, `exact_dp`, `greedy_ls` or `external_milp:<command>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Backend::Auto { external: None }),
            "exact_dp" => Ok(Backend::ExactDp),
            "greedy_ls" => Ok(Backend::GreedyLs),
            _ => match s.strip_prefix("external_milp") {
                Some(rest) => {
                    let cmd = rest.strip_prefix(':').unwrap_or("").trim();
                    if cmd.is_empty() {
                        Err("external_milp needs a command: external_milp:<cmd>".into())
                    } else {
                        Ok(Backend::ExternalMilp { cmd: cmd.into() })
                    }
                }
                None => Err(format!("unknown backend {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub backend: Backend,
    pub budget_s: f64,
    pub customer_cap: usize,
    pub vertex_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: Backend::default(),
            budget_s: 60.0,
            customer_cap: DEFAULT_CUSTOMER_CAP,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

impl SolveOptions {
    pub fn with_backend(backend: Backend) -> Self {
        SolveOptions { backend, ..Default::default() }
    }
}

/// Solves the set tour of one group.
pub fn solve_set_tsp<S: Scalar>(
    system: &SetSystem<S>,
    costs: &SetCosts<'_, S>,
    opts: &SolveOptions,
) -> Result<SetTour<S>> {
    let start = Instant::now();
    match &opts.backend {
        Backend::ExactDp => solve_exact(system, costs, opts, start),
        Backend::GreedyLs => Ok(solve_greedy(costs, opts.budget_s, start)),
        Backend::ExternalMilp { cmd } => solve_external(system, costs, cmd, opts.budget_s),
        Backend::Auto { external } => {
            if system.is_empty() {
                return Ok(SetTour::empty(system.depot, "exact_dp"));
            }
            if system.len() <= opts.customer_cap && system.max_retained() <= opts.vertex_cap {
                return solve_exact(system, costs, opts, start);
            }
            if let Some(cmd) = external {
                match solve_external(system, costs, cmd, opts.budget_s) {
                    Ok(t) => return Ok(t),
                    Err(e) => log::warn!("external solver failed for depot {}: {e}; using greedy_ls", system.depot),
                }
            }
            Ok(solve_greedy(costs, opts.budget_s, start))
        }
    }
}

fn solve_exact<S: Scalar>(
    system: &SetSystem<S>,
    costs: &SetCosts<'_, S>,
    opts: &SolveOptions,
    start: Instant,
) -> Result<SetTour<S>> {
    if system.len() > opts.customer_cap {
        return Err(Error::Backend {
            backend: "exact_dp".into(),
            budget_s: opts.budget_s,
            reason: format!("{} customers exceed the cap of {}", system.len(), opts.customer_cap),
        });
    }
    if system.is_empty() {
        return Ok(SetTour::empty(system.depot, "exact_dp"));
    }
    let hk = HeldKarp::run(costs, Some((start, opts.budget_s)))?;
    let (_, visits) = hk.tour(costs, hk.full_mask());
    if visits.len() != system.len() {
        return Err(Error::Infeasible(format!("no set tour from depot {} reaches every customer", system.depot)));
    }
    Ok(build_tour(costs, &visits, "exact_dp"))
}

/// Customers in the order the tour serves them.
pub fn extract_visit_order<S: Scalar>(tour: &SetTour<S>) -> VisitOrder {
    VisitOrder { depot: tour.depot, order: tour.order.clone() }
}
