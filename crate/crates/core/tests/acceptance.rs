//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any fails. Pass criterion numbers as arguments to run
//! a subset.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{
    best_schedule, brute_set_tour, check_full_counts, check_set_counts, highs_command, set_fixture, small_fixture,
};
use mafstsp_core::baselines::{bound_sources, hc_vns_solve, lower_bound, LowerBoundMode, VnsConfig};
use mafstsp_core::decode::decode_route;
use mafstsp_core::eval::{delta_percent, timing, validate_solution, FindingCode};
use mafstsp_core::fullmilp::{brute_force_exact, build_full_milp, BruteForceCaps, FullModelConfig};
use mafstsp_core::milp::{canonical, parse_lp, to_lp_string};
use mafstsp_core::pipeline::{pipeline_sources, solve, solve_with_oracle, RunConfig};
use mafstsp_core::roadnet::{generate_instance, line_instance, neighbor_set, road_distances, GenSpec, Instance};
use mafstsp_core::settsp::{
    build_set_system, build_set_tsp_milp, solve_set_tsp, Backend, SetCosts, SetMode, SolveOptions,
};
use mafstsp_core::solution::{Delivery, Solution, TruckGroupRoute, VisitOrder};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn all_pairs(inst: &Instance<f64>) -> mafstsp_core::DistanceOracle {
    road_distances(inst, 0..inst.network.len()).unwrap()
}

fn decode_matches_enumeration() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = 1 + (seed % 4) as usize;
        let k = (seed % 3) as usize;
        let inst = small_fixture(1000 + seed, n, k, 6);
        ensure(inst.network.len() <= 12, || format!("seed {seed}: fixture too large"))?;
        let o = all_pairs(&inst);
        let order = VisitOrder { depot: inst.depots[0], order: inst.customers.clone() };
        let route = decode_route(&inst, &o, &order, k).map_err(|e| e.to_string())?;
        let sol = Solution::from_groups(vec![route]);
        ensure(validate_solution(&inst, &sol).is_clean(), || format!("seed {seed}: decoded route is infeasible"))?;
        let oracle = best_schedule(&inst, &o, order.depot, &order.order, k);
        let gap = (sol.total_cost - oracle).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("seed {seed}: decoder {} vs enumeration {oracle}", sol.total_cost))?;
    }
    Ok(format!("50 fixtures, max |difference| {worst:.1e} h"))
}

fn set_tour_exactness() -> Outcome {
    let highs = highs_command();
    let mut worst: f64 = 0.0;
    let mut milp_worst: f64 = 0.0;
    for seed in 0..30u64 {
        let n = 1 + (seed % 6) as usize;
        let inst = set_fixture(2000 + seed, n, 4);
        let depot = inst.depots[0];
        let o = all_pairs(&inst);
        let sys = build_set_system(&inst, depot, &inst.customers, inst.drone_range, SetMode::Full);
        let costs = SetCosts::new(&inst, &o, &sys);
        let dp =
            solve_set_tsp(&sys, &costs, &SolveOptions::with_backend(Backend::ExactDp)).map_err(|e| e.to_string())?;
        let sets: Vec<(usize, Vec<usize>)> = sys.sets.iter().map(|s| (s.center, s.members.clone())).collect();
        ensure(sets.iter().all(|s| s.1.len() <= 4), || format!("seed {seed}: set too large"))?;
        let brute = brute_set_tour(&inst, &o, depot, &sets);
        worst = worst.max((dp.cost - brute).abs());
        ensure((dp.cost - brute).abs() <= 1e-9, || format!("seed {seed}: dp {} vs enumeration {brute}", dp.cost))?;
        if let Some(cmd) = &highs {
            let opts = SolveOptions {
                budget_s: 120.0,
                ..SolveOptions::with_backend(Backend::ExternalMilp { cmd: cmd.clone() })
            };
            let milp = solve_set_tsp(&sys, &costs, &opts).map_err(|e| e.to_string())?;
            milp_worst = milp_worst.max((milp.cost - dp.cost).abs());
            ensure((milp.cost - dp.cost).abs() <= 1e-6, || {
                format!("seed {seed}: MILP {} vs dp {}", milp.cost, dp.cost)
            })?;
        }
    }
    Ok(match highs {
        Some(_) => format!("30 systems, enumeration gap {worst:.1e} h, MILP gap {milp_worst:.1e} h"),
        None => format!("30 systems, enumeration gap {worst:.1e} h; no external solver, MILP comparison skipped"),
    })
}

fn pipeline_against_optimum() -> Outcome {
    let mut gaps = Vec::new();
    for seed in 0..20u64 {
        let n = 1 + (seed % 4) as usize;
        let k = (seed % 3) as usize;
        let mut inst = small_fixture(3000 + seed, n, k, 6);
        if seed % 2 == 1 {
            let spare = (0..inst.network.len()).rev().find(|v| !inst.depots.contains(v) && !inst.is_customer(*v));
            inst.depots.extend(spare);
        }
        let o = all_pairs(&inst);
        let opt = brute_force_exact(&inst, &o, &BruteForceCaps::default()).map_err(|e| e.to_string())?.total_cost;
        let (pipe, _) = solve(&inst, &RunConfig::default()).map_err(|e| e.to_string())?;
        let lb = lower_bound(&inst, &road_distances(&inst, bound_sources(&inst)).unwrap(), LowerBoundMode::ExactSmall)
            .map_err(|e| e.to_string())?;
        let vns = hc_vns_solve(&inst, &VnsConfig { seed, ..VnsConfig::default() }).map_err(|e| e.to_string())?;
        ensure(validate_solution(&inst, &vns).is_clean(), || format!("seed {seed}: local search result infeasible"))?;
        let tag = format!(
            "seed {seed}: bound {lb:.6}, optimum {opt:.6}, pipeline {:.6}, local search {:.6}",
            pipe.total_cost, vns.total_cost
        );
        ensure(pipe.total_cost >= opt - 1e-9, || format!("{tag}: pipeline below optimum"))?;
        ensure(lb <= opt + 1e-9, || format!("{tag}: bound above optimum"))?;
        ensure(vns.total_cost >= opt - 1e-9, || format!("{tag}: local search below optimum"))?;
        if opt > 0.0 {
            gaps.push((pipe.total_cost - opt) / opt * 100.0);
        }
    }
    let mean_gap = mean(&gaps);
    ensure(mean_gap <= 25.0, || format!("mean gap {mean_gap:.2}% exceeds 25%"))?;
    Ok(format!("20 fixtures, mean pipeline gap {mean_gap:.2}%, ordering holds on all"))
}

fn acceleration_quality() -> Outcome {
    let mut inflation = Vec::new();
    let mut speedup = Vec::new();
    for seed in 0..30u64 {
        let inst: Instance<f64> = generate_instance(&GenSpec::grid(25, 25, 0.1, 1, 8), 4000 + seed).unwrap();
        let base = RunConfig { backend: Backend::ExactDp, budget_s: 600.0, threads: Some(1), ..RunConfig::default() };
        let o = road_distances(&inst, pipeline_sources(&inst, &base)).unwrap();
        let run = |mode| solve_with_oracle(&inst, &o, &RunConfig { mode, ..base.clone() }).map_err(|e| e.to_string());
        let (full, full_m) = run(SetMode::Full)?;
        let (both, both_m) = run(SetMode::Both)?;
        inflation.push((both.total_cost - full.total_cost) / full.total_cost * 100.0);
        speedup.push(full_m.set_tour_s / both_m.set_tour_s.max(1e-9));
    }
    speedup.sort_by(f64::total_cmp);
    let median = (speedup[14] + speedup[15]) / 2.0;
    let mean_inflation = mean(&inflation);
    ensure(mean_inflation <= 5.0, || format!("mean cost inflation {mean_inflation:.2}% exceeds 5%"))?;
    ensure(median >= 5.0, || format!("median set-tour speedup {median:.1}x below 5x"))?;
    Ok(format!("30 instances, mean inflation {mean_inflation:.2}%, median speedup {median:.1}x"))
}

fn drone_count_trend() -> Outcome {
    let ks = 0..=5usize;
    let mut deltas = vec![Vec::new(); 5];
    for seed in 0..20u64 {
        let inst: Instance<f64> = generate_instance(&GenSpec::grid(25, 25, 0.1, 2, 30), 5000 + seed).unwrap();
        let o = road_distances(&inst, pipeline_sources(&inst, &RunConfig::default())).unwrap();
        let mut costs = Vec::new();
        for k in ks.clone() {
            let cfg = RunConfig { drones: Some(k), ..RunConfig::default() };
            costs.push(solve_with_oracle(&inst, &o, &cfg).map_err(|e| e.to_string())?.0.total_cost);
        }
        for k in 0..5 {
            ensure(costs[k + 1] <= costs[k] + 1e-9, || {
                format!("seed {seed}: cost rises from k={k} to k={}: {costs:?}", k + 1)
            })?;
            deltas[k].push(costs[k] - costs[k + 1]);
        }
    }
    let means: Vec<f64> = deltas.iter().map(|d| mean(d)).collect();
    ensure(means.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
        format!("mean decrease per extra drone not diminishing: {means:?}")
    })?;
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
    Ok(format!("20 instances non-increasing in k; mean decrease per extra drone [{}] h", shown.join(", ")))
}

fn drone_speed_trend() -> Outcome {
    let speeds = [10.0, 30.0, 48.0, 70.0, 110.0];
    let mut totals = vec![0.0; speeds.len()];
    for seed in 0..10u64 {
        let mut inst: Instance<f64> = generate_instance(&GenSpec::grid(25, 25, 0.1, 2, 20), 6000 + seed).unwrap();
        inst.truck_speed = 30.0;
        inst.drone_range = 1.5;
        let o = road_distances(&inst, pipeline_sources(&inst, &RunConfig::default())).unwrap();
        for (i, &s) in speeds.iter().enumerate() {
            inst.drone_speed = s;
            totals[i] += solve_with_oracle(&inst, &o, &RunConfig::default()).map_err(|e| e.to_string())?.0.total_cost;
        }
    }
    let means: Vec<f64> = totals.iter().map(|t| t / 10.0).collect();
    ensure(means.windows(2).all(|w| w[1] < w[0]), || format!("mean cost not strictly decreasing: {means:?}"))?;
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
    Ok(format!("mean cost over speeds {speeds:?}: [{}] h", shown.join(", ")))
}

fn neighbor_set_scaling() -> Outcome {
    let mut lines = Vec::new();
    for (size, block) in [(41usize, 1.0), (61, 0.1)] {
        let inst: Instance<f64> = generate_instance(&GenSpec::grid(size, size, block, 1, 1), 1).unwrap();
        let center = (size / 2) * size + size / 2;
        for steps in [3.0, 4.0, 5.0, 7.0] {
            let theta = steps * block;
            let small = neighbor_set(&inst, center, theta);
            let large = neighbor_set(&inst, center, 2.0 * theta);
            let members = large.len() as f64 / small.len() as f64;
            let boundary = large.boundary.len() as f64 / small.boundary.len() as f64;
            ensure((3.0..=5.0).contains(&members), || format!("theta {theta}: member ratio {members:.2}"))?;
            ensure((1.5..=2.5).contains(&boundary), || format!("theta {theta}: boundary ratio {boundary:.2}"))?;
            lines.push(format!("{members:.2}/{boundary:.2}"));
        }
    }
    Ok(format!("member/boundary ratios on doubling theta: {}", lines.join(" ")))
}

fn model_audits() -> Outcome {
    for seed in 0..5u64 {
        let mut inst = small_fixture(7000 + seed, 1 + (seed % 3) as usize, 1 + (seed % 2) as usize, 6);
        if seed % 2 == 1 {
            let spare = (0..inst.network.len()).find(|v| !inst.depots.contains(v) && !inst.is_customer(*v)).unwrap();
            inst.depots.push(spare);
        }
        let o = all_pairs(&inst);
        let cfg = FullModelConfig::for_instance(&inst, &o).map_err(|e| e.to_string())?;
        let m = build_full_milp(&inst, &o, &cfg).map_err(|e| e.to_string())?;
        check_full_counts(&m, inst.depots.len(), inst.network.len(), inst.customers.len(), cfg.horizon);
        let back = parse_lp(&to_lp_string(&m)).map_err(|e| e.to_string())?;
        ensure(canonical(&back) == canonical(&m), || format!("seed {seed}: full model changed through LP text"))?;
    }
    for seed in 0..5u64 {
        let inst = set_fixture(7100 + seed, 2 + (seed % 4) as usize, 5);
        let o = all_pairs(&inst);
        for mode in [SetMode::Full, SetMode::Both] {
            let sys = build_set_system(&inst, inst.depots[0], &inst.customers, inst.drone_range, mode);
            let costs = SetCosts::new(&inst, &o, &sys);
            let sizes: Vec<usize> = costs.verts.iter().map(Vec::len).collect();
            let (m, _) = build_set_tsp_milp(&costs);
            check_set_counts(&m, &sizes);
            let back = parse_lp(&to_lp_string(&m)).map_err(|e| e.to_string())?;
            ensure(canonical(&back) == canonical(&m), || {
                format!("seed {seed} {mode}: set model changed through LP text")
            })?;
        }
    }
    Ok("5 full models and 10 set-tour models match closed-form counts and survive LP round trips".into())
}

fn validator_mutants() -> Outcome {
    let mut inst = line_instance::<f64>(5, 0.1);
    inst.customers = vec![3, 4];
    inst.drones_per_truck = 1;
    inst.drone_range = 1.5;
    let costed = |mut g: TruckGroupRoute<f64>| {
        g.cost = timing(&inst, &g).cost;
        Solution::from_groups(vec![g])
    };
    let base = TruckGroupRoute {
        depot: 0,
        truck_route: vec![0, 1, 2, 1, 0],
        deliveries: vec![
            Delivery { takeoff_index: 0, customer: 3, landing_index: 2, drone: 0 },
            Delivery { takeoff_index: 2, customer: 4, landing_index: 2, drone: 0 },
        ],
        cost: 0.0,
    };
    let clean = costed(base.clone());
    ensure(validate_solution(&inst, &clean).is_clean(), || "base fixture is not clean".into())?;

    let mut mutants: Vec<(&str, Instance<f64>, Solution<f64>, FindingCode)> = Vec::new();
    let mut g = base.clone();
    g.deliveries.pop();
    mutants.push(("coverage", inst.clone(), costed(g), FindingCode::CoverageMissing));
    let mut short = inst.clone();
    short.drone_range = 0.3;
    mutants.push(("range", short, clean.clone(), FindingCode::Range));
    let mut g = base.clone();
    g.deliveries[1] = Delivery { takeoff_index: 1, customer: 4, landing_index: 2, drone: 1 };
    mutants.push(("airborne cap", inst.clone(), costed(g), FindingCode::AirborneCap));
    let mut g = base.clone();
    g.truck_route = vec![0, 1, 3, 1, 0];
    mutants.push(("arc adjacency", inst.clone(), costed(g), FindingCode::ArcAdjacency));
    let mut wrong = clean.clone();
    wrong.groups[0].cost += 0.01;
    wrong.total_cost += 0.01;
    mutants.push(("timing consistency", inst.clone(), wrong, FindingCode::CostMismatch));

    for (name, inst, sol, want) in &mutants {
        let codes = validate_solution(inst, sol).codes();
        ensure(codes == vec![*want], || format!("{name} mutant gave {codes:?}, expected [{want:?}]"))?;
    }
    Ok(format!("{} mutants each raise exactly their finding", mutants.len()))
}

fn delta_arithmetic() -> Outcome {
    let cases = [((39.64, 25.02), "36.88"), ((43.57, 27.04), "37.94")];
    let mut shown = Vec::new();
    for ((a, b), want) in cases {
        let got = format!("{:.2}", delta_percent(a, b).ok_or("undefined delta")?);
        ensure(got == want, || format!("delta({a}, {b}) = {got}%, expected {want}%"))?;
        shown.push(format!("{got}%"));
    }
    Ok(shown.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "route decoding is optimal for its order", decode_matches_enumeration),
        (2, "set tours are exact", set_tour_exactness),
        (3, "pipeline against the exhaustive optimum", pipeline_against_optimum),
        (4, "reduced sets keep quality and save time", acceleration_quality),
        (5, "more drones never cost more, with diminishing returns", drone_count_trend),
        (6, "faster drones lower the mean cost", drone_speed_trend),
        (7, "neighbor sets grow quadratically, boundaries linearly", neighbor_set_scaling),
        (8, "model sizes and LP round trips", model_audits),
        (9, "validator mutants", validator_mutants),
        (10, "percentage improvement arithmetic", delta_arithmetic),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let clock = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(panic) => Err(panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({title}): {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({title}): {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
