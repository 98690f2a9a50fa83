//! Independent brute-force oracles and fixture builders shared by the
//! integration suites.
#![allow(dead_code)]

use mafstsp_core::eval::{timing, validate_solution};
use mafstsp_core::milp::MilpModel;
use mafstsp_core::roadnet::{generate_instance, neighbor_set, DistanceOracle, GenSpec, Instance};
use mafstsp_core::solution::{Delivery, Solution, TruckGroupRoute};

/// Small random road graph whose customers all have at most `max_ball`
/// vertices within drone range.
pub fn small_fixture(seed: u64, customers: usize, k: usize, max_ball: usize) -> Instance<f64> {
    let vertices = 9 + (seed % 4) as usize;
    let spec = GenSpec::random_geometric(vertices, 2.0, 0.8, 1, customers);
    let mut inst: Instance<f64> = generate_instance(&spec, seed).unwrap();
    inst.drones_per_truck = k;
    inst.drone_speed = [40.0, 48.0, 60.0, 90.0][(seed % 4) as usize];
    inst.drone_range = 0.6 + 0.1 * (seed % 7) as f64;
    while inst.customers.iter().any(|&c| neighbor_set(&inst, c, inst.drone_range).len() > max_ball) {
        inst.drone_range *= 0.85;
    }
    inst
}

enum Block {
    Truck(usize),
    Batch { takeoff: usize, landings: Vec<usize>, customers: Vec<usize> },
}

/// Route from a block list: stops are joined by shortest paths and equal
/// consecutive stops share an index.
fn build(inst: &Instance<f64>, o: &DistanceOracle<f64>, depot: usize, blocks: &[Block]) -> TruckGroupRoute<f64> {
    let mut events: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut seq: Vec<usize> = vec![depot];
    for b in blocks {
        match b {
            Block::Truck(c) => seq.push(*c),
            Block::Batch { takeoff, landings, customers } => {
                seq.push(*takeoff);
                let x = seq.len() - 1;
                for (j, (&w, &c)) in landings.iter().zip(customers).enumerate() {
                    seq.push(w);
                    events.push((x, c, seq.len() - 1, j));
                }
            }
        }
    }
    seq.push(depot);
    let mut route = vec![depot];
    let mut idx = Vec::new();
    for &v in &seq {
        let last = *route.last().unwrap();
        if v != last {
            let p = o.path(&inst.network, last, v).unwrap();
            route.extend_from_slice(&p[1..]);
        }
        idx.push(route.len() - 1);
    }
    let deliveries = events
        .iter()
        .map(|&(x, c, y, d)| Delivery { takeoff_index: idx[x], customer: c, landing_index: idx[y], drone: d })
        .collect();
    let mut g = TruckGroupRoute { depot, truck_route: route, deliveries, cost: 0.0 };
    g.cost = timing(inst, &g).cost;
    g
}

/// Minimum validator-timed cost over every simultaneous-dispatch schedule
/// serving `order` in sequence: each customer is truck-served or belongs to a
/// batch of up to `k` drones launched together and landing in order.
pub fn best_schedule(inst: &Instance<f64>, o: &DistanceOracle<f64>, depot: usize, order: &[usize], k: usize) -> f64 {
    let mut best = f64::INFINITY;
    let mut blocks = Vec::new();
    recurse(inst, o, depot, order, k, 0, &mut blocks, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    inst: &Instance<f64>,
    o: &DistanceOracle<f64>,
    depot: usize,
    order: &[usize],
    k: usize,
    i: usize,
    blocks: &mut Vec<Block>,
    best: &mut f64,
) {
    if i == order.len() {
        let g = build(inst, o, depot, blocks);
        let sol = Solution::from_groups(vec![g]);
        if validate_solution(inst, &sol).is_clean() && sol.total_cost < *best {
            *best = sol.total_cost;
        }
        return;
    }
    blocks.push(Block::Truck(order[i]));
    recurse(inst, o, depot, order, k, i + 1, blocks, best);
    blocks.pop();
    let n = inst.network.len();
    for t in 1..=k.min(order.len() - i) {
        let customers = order[i..i + t].to_vec();
        for u in 0..n {
            let options: Vec<Vec<usize>> =
                customers.iter().map(|&c| (0..n).filter(|&w| inst.sortie_feasible(u, c, w)).collect()).collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut pick = vec![0usize; t];
            loop {
                let landings = pick.iter().zip(&options).map(|(&p, opt)| opt[p]).collect();
                blocks.push(Block::Batch { takeoff: u, landings, customers: customers.clone() });
                recurse(inst, o, depot, order, k, i + t, blocks, best);
                blocks.pop();
                let mut j = 0;
                while j < t {
                    pick[j] += 1;
                    if pick[j] < options[j].len() {
                        break;
                    }
                    pick[j] = 0;
                    j += 1;
                }
                if j == t {
                    break;
                }
            }
        }
    }
}

/// Customer sets at half the drone range, shrinking the range until every
/// set has at most `max_set` vertices.
pub fn set_fixture(seed: u64, customers: usize, max_set: usize) -> Instance<f64> {
    let mut inst = small_fixture(seed, customers, 1, 12);
    inst.drone_range = 0.5 + 0.15 * (seed % 5) as f64;
    while inst.customers.iter().any(|&c| neighbor_set(&inst, c, inst.drone_range / 2.0).len() > max_set) {
        inst.drone_range *= 0.85;
    }
    inst
}

/// Time to enter customer `c`'s area at `u` and leave at `v`, written out
/// from first principles.
pub fn service_time(inst: &Instance<f64>, o: &DistanceOracle<f64>, c: usize, u: usize, v: usize) -> f64 {
    let truck = (o.road(u, c) + o.road(c, v)) / inst.truck_speed;
    let fly_km = inst.euclid(u, c) + inst.euclid(c, v);
    if fly_km > inst.drone_range + 1e-9 {
        return truck;
    }
    truck.min((fly_km / inst.drone_speed).max(o.road(u, v) / inst.truck_speed))
}

/// Exhaustive set tour: every customer order and every entry/exit pair per
/// set, pruned only by partial cost (all terms are nonnegative).
pub fn brute_set_tour(
    inst: &Instance<f64>,
    o: &DistanceOracle<f64>,
    depot: usize,
    sets: &[(usize, Vec<usize>)],
) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn go(
        inst: &Instance<f64>,
        o: &DistanceOracle<f64>,
        depot: usize,
        sets: &[(usize, Vec<usize>)],
        used: &mut Vec<bool>,
        at: usize,
        acc: f64,
        best: &mut f64,
    ) {
        if acc >= *best {
            return;
        }
        if used.iter().all(|&b| b) {
            *best = best.min(acc + o.road(at, depot) / inst.truck_speed);
            return;
        }
        for i in 0..sets.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let (c, members) = &sets[i];
            for &u in members {
                for &v in members {
                    let step = o.road(at, u) / inst.truck_speed + service_time(inst, o, *c, u, v);
                    go(inst, o, depot, sets, used, v, acc + step, best);
                }
            }
            used[i] = false;
        }
    }
    let mut best = f64::INFINITY;
    go(inst, o, depot, sets, &mut vec![false; sets.len()], depot, 0.0, &mut best);
    best
}

/// Command running the bundled HiGHS wrapper, when python and highspy exist.
pub fn highs_command() -> Option<String> {
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../tools/highs_solve.py");
    let ok = std::process::Command::new("python3")
        .args(["-c", "import highspy"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    ok.then(|| format!("python3 {script}"))
}

/// Closed-form variable and row counts of the full model per family, with
/// `true` marking variable families.
pub fn full_model_counts(p: usize, v: usize, c: usize, t: usize) -> Vec<(&'static str, usize, bool)> {
    let t1 = t + 1;
    vec![
        ("alpha", p * c, true),
        ("arc", p * v * v * t1, true),
        ("beta", c, true),
        ("x", v * c * t1, true),
        ("y", v * c * t1, true),
        ("l", p * t, true),
        ("tau", p * v * t1, true),
        ("zx", p * v * c * t1, true),
        ("zy", p * v * c * t1, true),
        ("partition", c, false),
        ("edgestart", p, false),
        ("onearc", p * t1, false),
        ("arcmono", p * t, false),
        ("flowbal", p * v, false),
        ("arcchain", p * v * t, false),
        ("takeoff", c, false),
        ("land", c, false),
        ("order", c * t1, false),
        ("range", c, false),
        ("truckvisit", p * c, false),
        ("synctakeoff", p * v * t1, false),
        ("syncland", p * v * t1, false),
        ("cycle", p * v, false),
        ("dronestart", p, false),
        ("droneend", p, false),
        ("dronecap", p * t, false),
        ("dronestep", p * (t - 1), false),
        ("timemono", p * v * t, false),
        ("trucktime", p * v * v * (t - 1), false),
        ("dronetime", p * v * v * c * t * t1 / 2, false),
        ("linx", 3 * p * v * c * t1, false),
        ("liny", 3 * p * v * c * t1, false),
    ]
}

pub fn check_full_counts(m: &MilpModel, p: usize, v: usize, c: usize, t: usize) {
    for (fam, want, is_var) in full_model_counts(p, v, c, t) {
        let got = if is_var { m.var_count(fam) } else { m.constraint_count(fam) };
        assert_eq!(got, want, "{fam} with P={p} V={v} C={c} T={t}");
    }
    let vars: usize = full_model_counts(p, v, c, t).iter().filter(|e| e.2).map(|e| e.1).sum();
    let rows: usize = full_model_counts(p, v, c, t).iter().filter(|e| !e.2).map(|e| e.1).sum();
    assert_eq!(m.vars().len(), vars);
    assert_eq!(m.constraints().len(), rows);
}

/// Closed-form counts of the set-tour model given the vertex count of every
/// set, the depot first.
pub fn set_model_counts(sizes: &[usize]) -> Vec<(&'static str, usize, bool)> {
    let n = sizes.len();
    let total: usize = sizes.iter().sum();
    let squares: usize = sizes.iter().map(|s| s * s).sum();
    vec![
        ("beta", n * n, true),
        ("flow", n * n, true),
        ("gamma", squares - sizes[0] * sizes[0], true),
        ("delta", total * total - squares, true),
        ("noself", 2 * n, false),
        ("outdeg", n, false),
        ("indeg", n, false),
        ("flowcap", n * n, false),
        ("flowsrc", 1, false),
        ("flowsink", 1, false),
        ("flowstep", n - 1, false),
        ("visit", n - 1, false),
        ("align", n * (n - 1), false),
        ("syncin", total, false),
        ("syncout", total, false),
    ]
}

pub fn check_set_counts(m: &MilpModel, sizes: &[usize]) {
    let want = set_model_counts(sizes);
    for &(fam, count, is_var) in &want {
        let got = if is_var { m.var_count(fam) } else { m.constraint_count(fam) };
        assert_eq!(got, count, "{fam} with set sizes {sizes:?}");
    }
    assert_eq!(m.vars().len(), want.iter().filter(|e| e.2).map(|e| e.1).sum::<usize>());
    assert_eq!(m.constraints().len(), want.iter().filter(|e| !e.2).map(|e| e.1).sum::<usize>());
}
