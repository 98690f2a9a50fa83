//! End-to-end solve: customer assignment, a set tour per group, route
//! decoding and self-validation.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decode::decode_route;
use crate::error::{Error, Result};
use crate::eval::validate_solution;
use crate::partition::{meta_sources, partition, Assignment, PartitionMethod};
use crate::roadnet::{neighbor_set, road_distances, DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::settsp::{
    build_set_system, extract_visit_order, solve_set_tsp, Backend, SetCosts, SetMode, SetTour, SolveOptions,
};
use crate::solution::Solution;

/// Environment variable naming the external MILP solver command.
pub const MILP_CMD_ENV: &str = "MAFSTSP_MILP_CMD";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub partition: PartitionMethod,
    /// Radius of the sets used by the set-distance partition; defaults to
    /// the instance's own value.
    pub theta_km: Option<f64>,
    pub backend: Backend,
    pub mode: SetMode,
    /// Per-group set-tour budget in seconds.
    pub budget_s: f64,
    /// Replaces the instance's drones per truck.
    pub drones: Option<usize>,
    pub seed: u64,
    /// Worker threads; defaults to the number of depots.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub metrics_output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            partition: PartitionMethod::default(),
            theta_km: None,
            backend: Backend::default(),
            mode: SetMode::default(),
            budget_s: 60.0,
            drones: None,
            seed: 0,
            threads: None,
            output: None,
            metrics_output: None,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.budget_s > 0.0 && self.budget_s.is_finite()) {
            return Err(Error::Infeasible(format!("budget must be positive, got {}", self.budget_s)));
        }
        if let Some(theta) = self.theta_km {
            if !(theta >= 0.0 && theta.is_finite()) {
                return Err(Error::Infeasible(format!("theta must be non-negative, got {theta}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Infeasible("threads must be at least 1".into()));
        }
        let cmd = match &self.backend {
            Backend::ExternalMilp { cmd } => Some(cmd),
            Backend::Auto { external } => external.as_ref(),
            _ => None,
        };
        if let Some(cmd) = cmd {
            let program = cmd.split_whitespace().next().unwrap_or("");
            if !program_exists(program) {
                return Err(Error::Backend {
                    backend: "external_milp".into(),
                    budget_s: self.budget_s,
                    reason: format!("solver program {program:?} not found"),
                });
            }
        }
        Ok(())
    }

    /// Lets `auto` use the external solver named by [`MILP_CMD_ENV`].
    pub fn with_env_solver(mut self) -> Self {
        if let Backend::Auto { external: None } = self.backend {
            if let Ok(cmd) = std::env::var(MILP_CMD_ENV) {
                if !cmd.trim().is_empty() {
                    self.backend = Backend::Auto { external: Some(cmd) };
                }
            }
        }
        self
    }
}

fn program_exists(program: &str) -> bool {
    if program.is_empty() {
        return false;
    }
    if program.contains('/') {
        return std::path::Path::new(program).is_file();
    }
    std::env::var_os("PATH").is_some_and(|paths| std::env::split_paths(&paths).any(|dir| dir.join(program).is_file()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupMetrics {
    pub depot: usize,
    pub customers: usize,
    pub backend: String,
    pub set_tour_cost_h: f64,
    pub cost_h: f64,
    pub budget_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub cost_h: f64,
    pub distances_s: f64,
    pub partition_s: f64,
    pub set_tour_s: f64,
    pub decode_s: f64,
    pub validate_s: f64,
    pub total_s: f64,
    pub threads: usize,
    pub seed: u64,
    pub budget_exceeded: bool,
    pub groups: Vec<GroupMetrics>,
}

/// Every vertex the pipeline reads road distances from.
pub fn pipeline_sources<S: Scalar>(inst: &Instance<S>, cfg: &RunConfig) -> Vec<usize> {
    let theta = theta_of(inst, cfg);
    let mut out = meta_sources(inst, cfg.partition.metric(), theta);
    for &c in &inst.customers {
        out.extend(neighbor_set(inst, c, inst.drone_range).members);
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn theta_of<S: Scalar>(inst: &Instance<S>, cfg: &RunConfig) -> S {
    cfg.theta_km.map_or_else(|| inst.partition_theta(), S::lit)
}

fn set_tour<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    depot: usize,
    customers: &[usize],
    cfg: &RunConfig,
) -> Result<(SetTour<S>, bool)> {
    let system = build_set_system(inst, depot, customers, inst.drone_range, cfg.mode);
    let costs = SetCosts::new(inst, oracle, &system);
    let opts = SolveOptions { backend: cfg.backend.clone(), budget_s: cfg.budget_s, ..SolveOptions::default() };
    let start = Instant::now();
    match solve_set_tsp(&system, &costs, &opts) {
        Ok(tour) => {
            let late = start.elapsed().as_secs_f64() > cfg.budget_s;
            Ok((tour, late))
        }
        Err(Error::Backend { reason, .. }) if reason.contains("budget") && cfg.backend == Backend::ExactDp => {
            log::warn!("exact set tour for depot {depot} ran out of time; keeping the local search tour");
            let opts = SolveOptions::with_backend(Backend::GreedyLs);
            Ok((solve_set_tsp(&system, &costs, &SolveOptions { budget_s: cfg.budget_s, ..opts })?, true))
        }
        Err(e) => Err(e),
    }
}

/// Assignment, set tours, decoding and validation with a prepared oracle.
pub fn solve_with_oracle<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    cfg: &RunConfig,
) -> Result<(Solution<S>, RunMetrics)> {
    cfg.check()?;
    let threads = cfg.threads.unwrap_or(inst.depots.len().max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?;
    let k = cfg.drones.unwrap_or(inst.drones_per_truck);
    let started = Instant::now();

    let clock = Instant::now();
    let assignment: Assignment =
        partition(inst, oracle, cfg.partition, theta_of(inst, cfg)).map_err(|e| e.in_phase("partition"))?;
    let partition_s = clock.elapsed().as_secs_f64();
    let groups: Vec<(usize, Vec<usize>)> = assignment.groups.iter().map(|(&p, cs)| (p, cs.clone())).collect();

    let clock = Instant::now();
    let tours = pool
        .install(|| groups.par_iter().map(|(p, cs)| set_tour(inst, oracle, *p, cs, cfg)).collect::<Result<Vec<_>>>())
        .map_err(|e| e.in_phase("set tour"))?;
    let set_tour_s = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let routes = pool
        .install(|| {
            tours
                .par_iter()
                .map(|(tour, _)| decode_route(inst, oracle, &extract_visit_order(tour), k))
                .collect::<Result<Vec<_>>>()
        })
        .map_err(|e| e.in_phase("decode"))?;
    let decode_s = clock.elapsed().as_secs_f64();

    let mut sol = Solution::from_groups(routes);
    sol.meta.insert("method".into(), Value::from("pipeline"));
    sol.meta.insert("partition".into(), Value::from(cfg.partition.name()));
    sol.meta.insert("set_mode".into(), Value::from(cfg.mode.name()));
    sol.meta.insert("drones_per_truck".into(), Value::from(k));
    sol.meta.insert("seed".into(), Value::from(cfg.seed));
    sol.meta.insert("backends".into(), Value::from(tours.iter().map(|(t, _)| t.backend.clone()).collect::<Vec<_>>()));

    let clock = Instant::now();
    let mut checked = inst.clone();
    checked.drones_per_truck = k;
    let report = validate_solution(&checked, &sol);
    let validate_s = clock.elapsed().as_secs_f64();
    if !report.is_clean() {
        return Err(Error::Validation(report.messages()).in_phase("validate"));
    }

    let group_metrics: Vec<GroupMetrics> = groups
        .iter()
        .zip(&tours)
        .zip(&sol.groups)
        .map(|(((p, cs), (tour, late)), route)| GroupMetrics {
            depot: *p,
            customers: cs.len(),
            backend: tour.backend.clone(),
            set_tour_cost_h: tour.cost.as_f64(),
            cost_h: route.cost.as_f64(),
            budget_exceeded: *late,
        })
        .collect();
    let metrics = RunMetrics {
        cost_h: sol.total_cost.as_f64(),
        distances_s: 0.0,
        partition_s,
        set_tour_s,
        decode_s,
        validate_s,
        total_s: started.elapsed().as_secs_f64(),
        threads,
        seed: cfg.seed,
        budget_exceeded: group_metrics.iter().any(|g| g.budget_exceeded),
        groups: group_metrics,
    };
    Ok((sol, metrics))
}

/// [`solve_with_oracle`] after computing the road distances it needs.
pub fn solve<S: Scalar>(inst: &Instance<S>, cfg: &RunConfig) -> Result<(Solution<S>, RunMetrics)> {
    let clock = Instant::now();
    let oracle = road_distances(inst, pipeline_sources(inst, cfg)).map_err(|e| e.in_phase("distances"))?;
    let distances_s = clock.elapsed().as_secs_f64();
    let (sol, mut metrics) = solve_with_oracle(inst, &oracle, cfg)?;
    metrics.distances_s = distances_s;
    metrics.total_s += distances_s;
    Ok((sol, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::line_instance;

    #[test]
    fn empty_customer_list_gives_trivial_routes() {
        let mut inst = line_instance::<f64>(4, 1.0);
        inst.depots = vec![0, 3];
        inst.customers.clear();
        let (sol, metrics) = solve(&inst, &RunConfig::default()).unwrap();
        assert_eq!(sol.total_cost, 0.0);
        assert_eq!(sol.groups.len(), 2);
        assert!(sol.groups.iter().all(|g| g.truck_route.len() == 1));
        assert_eq!(metrics.groups.len(), 2);
    }

    #[test]
    fn drone_override_applies() {
        let mut inst = line_instance::<f64>(3, 1.0);
        inst.drone_range = 4.0;
        inst.drone_speed = 60.0;
        inst.drones_per_truck = 1;
        let (with, _) = solve(&inst, &RunConfig::default()).unwrap();
        let cfg = RunConfig { drones: Some(0), ..RunConfig::default() };
        let (without, _) = solve(&inst, &cfg).unwrap();
        assert!((without.total_cost - 4.0 / 30.0).abs() < 1e-12);
        assert!(with.total_cost < without.total_cost);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let inst = line_instance::<f64>(3, 1.0);
        let zero = RunConfig { budget_s: 0.0, ..RunConfig::default() };
        assert!(solve(&inst, &zero).is_err());
        let missing =
            RunConfig { backend: Backend::ExternalMilp { cmd: "/nonexistent/solver".into() }, ..RunConfig::default() };
        assert!(matches!(solve(&inst, &missing), Err(Error::Backend { .. })));
    }

    #[test]
    fn config_json_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"partition": "nn", "budget_s": 5}"#).unwrap();
        assert_eq!(cfg.partition, PartitionMethod::Nn);
        assert_eq!(cfg.mode, SetMode::Both);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
