//! Batch runs over a directory of instances with parameter sweeps.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{hc_vns_solve, lower_bound, nearest_neighbor_solution, LowerBoundMode, VnsConfig};
use crate::error::{Error, Result};
use crate::pipeline::{solve, RunConfig};
use crate::roadnet::{load_instance, road_distances, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    Pipeline,
    HcVns,
    TruckOnly,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 3] = [BenchMethod::Pipeline, BenchMethod::HcVns, BenchMethod::TruckOnly];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Pipeline => "pipeline",
            BenchMethod::HcVns => "hc_vns",
            BenchMethod::TruckOnly => "truck_only",
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BenchMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected pipeline, hc_vns or truck_only)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<BenchMethod>,
    /// Sweep values; an empty list keeps the instance's own value.
    pub drones: Vec<usize>,
    pub drone_speeds_kmh: Vec<f64>,
    pub ranges_km: Vec<f64>,
    pub lower_bound: Option<LowerBoundMode>,
    pub run: RunConfig,
    pub vns: VnsConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            methods: vec![BenchMethod::Pipeline],
            drones: Vec::new(),
            drone_speeds_kmh: Vec::new(),
            ranges_km: Vec::new(),
            lower_bound: None,
            run: RunConfig::default(),
            vns: VnsConfig::default(),
        }
    }
}

/// One CSV line; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: String,
    pub drones: usize,
    pub drone_speed_kmh: f64,
    pub drone_range_km: f64,
    pub cost_h: f64,
    pub wall_s: f64,
    pub lower_bound_h: Option<f64>,
    pub gap_percent: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Instance name and error for every run that failed.
    pub failures: Vec<(String, String)>,
}

impl BenchReport {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Infeasible(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| Error::io("csv output", e))
    }
}

fn or_own<T: Copy>(values: &[T], own: T) -> Vec<T> {
    if values.is_empty() {
        vec![own]
    } else {
        values.to_vec()
    }
}

fn run_method(inst: &Instance<f64>, method: BenchMethod, cfg: &BenchConfig) -> Result<f64> {
    Ok(match method {
        BenchMethod::Pipeline => solve(inst, &cfg.run)?.0.total_cost,
        BenchMethod::HcVns => hc_vns_solve(inst, &cfg.vns)?.total_cost,
        BenchMethod::TruckOnly => {
            let o = road_distances(inst, inst.depots.iter().chain(&inst.customers).copied())?;
            nearest_neighbor_solution(inst, &o)?.total_cost
        }
    })
}

fn bound_of(inst: &Instance<f64>, mode: LowerBoundMode) -> Result<f64> {
    let o = road_distances(inst, crate::baselines::bound_sources(inst))?;
    lower_bound(inst, &o, mode)
}

/// Rows for one already loaded instance.
pub fn bench_instance(name: &str, inst: &Instance<f64>, cfg: &BenchConfig, report: &mut BenchReport) {
    for k in or_own(&cfg.drones, inst.drones_per_truck) {
        for speed in or_own(&cfg.drone_speeds_kmh, inst.drone_speed) {
            for range in or_own(&cfg.ranges_km, inst.drone_range) {
                let mut point = inst.clone();
                point.drones_per_truck = k;
                point.drone_speed = speed;
                point.drone_range = range;
                let bound = match cfg.lower_bound.map(|mode| bound_of(&point, mode)) {
                    Some(Ok(b)) => Some(b),
                    Some(Err(e)) => {
                        log::warn!("{name}: lower bound failed: {e}");
                        report.failures.push((name.to_string(), format!("lower bound: {e}")));
                        None
                    }
                    None => None,
                };
                for &method in &cfg.methods {
                    let clock = Instant::now();
                    match run_method(&point, method, cfg) {
                        Ok(cost) => report.rows.push(BenchRow {
                            instance: name.to_string(),
                            method: method.name().to_string(),
                            drones: k,
                            drone_speed_kmh: speed,
                            drone_range_km: range,
                            cost_h: cost,
                            wall_s: clock.elapsed().as_secs_f64(),
                            lower_bound_h: bound,
                            gap_percent: bound.filter(|&b| b > 0.0).map(|b| (cost - b) / b * 100.0),
                        }),
                        Err(e) => {
                            log::warn!("{name}: {method} failed: {e}");
                            report.failures.push((name.to_string(), format!("{method}: {e}")));
                        }
                    }
                }
            }
        }
    }
}

/// Instance files (`*.json`) of a suite directory in name order.
pub fn suite_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every method at every sweep point on every instance of `dir`.
/// Unreadable instances and failed runs are recorded and skipped.
pub fn bench(dir: &Path, cfg: &BenchConfig) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for path in suite_files(dir)? {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match load_instance::<f64>(&path) {
            Ok(inst) => bench_instance(&name, &inst, cfg, &mut report),
            Err(e) => {
                log::warn!("{name}: {e}");
                report.failures.push((name, e.to_string()));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{generate_instance, save_instance, GenSpec};

    fn suite(n: u64) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for seed in 0..n {
            let inst: Instance<f64> = generate_instance(&GenSpec::grid(4, 4, 0.5, 1, 3), seed).unwrap();
            save_instance(&inst, dir.path().join(format!("g{seed}.json"))).unwrap();
        }
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        dir
    }

    #[test]
    fn one_row_per_instance_and_method() {
        let dir = suite(3);
        let cfg =
            BenchConfig { methods: vec![BenchMethod::Pipeline, BenchMethod::TruckOnly], ..BenchConfig::default() };
        let report = bench(dir.path(), &cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert!(report.failures.is_empty());
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(
            "instance,method,drones,drone_speed_kmh,drone_range_km,cost_h,wall_s,lower_bound_h,gap_percent\n"
        ));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn broken_files_are_reported() {
        let dir = suite(1);
        std::fs::write(dir.path().join("bad.json"), "{").unwrap();
        let report = bench(dir.path(), &BenchConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].0, "bad");
    }

    #[test]
    fn drone_sweep_never_increases_cost() {
        let dir = suite(1);
        let cfg = BenchConfig {
            drones: (0..=3).collect(),
            lower_bound: Some(LowerBoundMode::Relaxed),
            ..BenchConfig::default()
        };
        let report = bench(dir.path(), &cfg).unwrap();
        let costs: Vec<f64> = report.rows.iter().map(|r| r.cost_h).collect();
        assert_eq!(costs.len(), 4);
        assert!(costs.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{costs:?}");
        assert!(report.rows.iter().all(|r| r.lower_bound_h.unwrap() <= r.cost_h + 1e-9));
    }
}
