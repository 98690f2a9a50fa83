use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::eval::{timing, validate_solution};
use crate::roadnet::{DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::{Delivery, Solution, TruckGroupRoute};

/// Size limits for [`brute_force_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceCaps {
    pub max_customers: usize,
    pub max_drones: usize,
    pub max_vertices: usize,
}

impl Default for BruteForceCaps {
    fn default() -> Self {
        BruteForceCaps { max_customers: 4, max_drones: 2, max_vertices: 12 }
    }
}

#[derive(Debug, Clone, Default)]
struct Stop {
    vertex: usize,
    /// Customer and whether the drone comes back to this same stop.
    launches: Vec<(usize, bool)>,
    landings: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Airborne {
    target: usize,
    from: usize,
    at: f64,
}

type Key = (usize, u32, Vec<(usize, usize)>);

struct Search<'a, S> {
    inst: &'a Instance<S>,
    oracle: &'a DistanceOracle<S>,
    depot: usize,
    targets: Vec<usize>,
    k: usize,
    full: u32,
    best: f64,
    plan: Option<Vec<Stop>>,
    labels: HashMap<Key, Vec<Vec<f64>>>,
    path: Vec<Stop>,
}

impl<S: Scalar> Search<'_, S> {
    fn e(&self, a: usize, b: usize) -> f64 {
        self.inst.euclid(a, b).as_f64()
    }

    fn range(&self) -> f64 {
        self.inst.drone_range.as_f64() + 1e-9
    }

    fn drive(&self, a: usize, b: usize) -> f64 {
        (self.oracle.road(a, b) / self.inst.truck_speed).as_f64()
    }

    fn can_land(&self, a: &Airborne, w: usize) -> bool {
        self.e(a.from, a.target) + self.e(a.target, w) <= self.range()
    }

    fn can_launch(&self, v: usize, c: usize) -> bool {
        (0..self.inst.network.len()).any(|w| self.e(v, c) + self.e(c, w) <= self.range())
    }

    /// Dominance filter; returns false when an earlier label is no worse.
    fn admit(&mut self, key: Key, label: Vec<f64>) -> bool {
        let list = self.labels.entry(key).or_default();
        if list.iter().any(|o| o.iter().zip(&label).all(|(a, b)| a <= b)) {
            return false;
        }
        list.retain(|o| !label.iter().zip(o).all(|(a, b)| a <= b));
        list.push(label);
        true
    }

    fn visit(&mut self, v: usize, arrival: f64, served: u32, airborne: &[Airborne]) {
        let s_dr = self.inst.drone_speed.as_f64();
        let first = self.path.is_empty();
        let n_air = airborne.len();
        for land_mask in 0u32..(1 << n_air) {
            let landing: Vec<&Airborne> =
                (0..n_air).filter(|i| land_mask >> i & 1 == 1).map(|i| &airborne[i]).collect();
            if landing.iter().any(|a| !self.can_land(a, v)) {
                continue;
            }
            let ready = landing
                .iter()
                .map(|a| a.at + (self.e(a.from, a.target) + self.e(a.target, v)) / s_dr)
                .fold(arrival, f64::max);
            let staying: Vec<Airborne> = (0..n_air).filter(|i| land_mask >> i & 1 == 0).map(|i| airborne[i]).collect();
            let mut served = served;
            let mut truck_served = false;
            if let Some(i) = self.targets.iter().position(|&c| c == v) {
                if served >> i & 1 == 0 {
                    served |= 1 << i;
                    truck_served = true;
                }
            }
            let open: Vec<usize> = (0..self.targets.len()).filter(|i| served >> i & 1 == 0).collect();
            let free = self.k - staying.len();
            let combos = 3usize.pow(open.len() as u32);
            for code in 0..combos {
                let mut launches = Vec::new();
                let mut rest = code;
                let mut ok = true;
                for &i in &open {
                    let choice = rest % 3;
                    rest /= 3;
                    let c = self.targets[i];
                    match choice {
                        1 if self.can_launch(v, c) => launches.push((i, false)),
                        2 if 2.0 * self.e(v, c) <= self.range() => launches.push((i, true)),
                        0 => {}
                        _ => ok = false,
                    }
                }
                if !ok || launches.len() > free {
                    continue;
                }
                if !(first || v == self.depot || land_mask != 0 || truck_served || !launches.is_empty()) {
                    continue;
                }
                let departure = launches
                    .iter()
                    .filter(|l| l.1)
                    .map(|&(i, _)| ready + 2.0 * self.e(v, self.targets[i]) / s_dr)
                    .fold(ready, f64::max);
                let mut now_served = served;
                let mut air = staying.clone();
                for &(i, round) in &launches {
                    now_served |= 1 << i;
                    if !round {
                        air.push(Airborne { target: self.targets[i], from: v, at: ready });
                    }
                }
                let stop = Stop {
                    vertex: v,
                    launches: launches.iter().map(|&(i, r)| (self.targets[i], r)).collect(),
                    landings: landing.iter().map(|a| a.target).collect(),
                };
                self.path.push(stop);
                if v == self.depot && air.is_empty() && now_served == self.full {
                    if departure < self.best {
                        self.best = departure;
                        self.plan = Some(self.path.clone());
                    }
                } else if departure + self.drive(v, self.depot) < self.best {
                    air.sort_by_key(|a| a.target);
                    let key = (v, now_served, air.iter().map(|a| (a.target, a.from)).collect());
                    let label = std::iter::once(departure).chain(air.iter().map(|a| a.at)).collect();
                    if self.admit(key, label) {
                        for w in 0..self.inst.network.len() {
                            if w != v && self.useful(w, now_served, &air) {
                                let t = departure + self.drive(v, w);
                                if t < self.best {
                                    self.visit(w, t, now_served, &air);
                                }
                            }
                        }
                    }
                }
                self.path.pop();
            }
        }
    }

    fn useful(&self, w: usize, served: u32, air: &[Airborne]) -> bool {
        w == self.depot
            || air.iter().any(|a| self.can_land(a, w))
            || (0..self.targets.len())
                .any(|i| served >> i & 1 == 0 && (self.targets[i] == w || self.can_launch(w, self.targets[i])))
    }
}

/// Cheapest plan for one depot serving exactly `targets`.
fn best_group<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    depot: usize,
    targets: &[usize],
) -> (f64, Vec<Stop>) {
    if targets.is_empty() {
        return (0.0, vec![Stop { vertex: depot, ..Stop::default() }]);
    }
    let mut search = Search {
        inst,
        oracle,
        depot,
        targets: targets.to_vec(),
        k: inst.drones_per_truck,
        full: (1u32 << targets.len()) - 1,
        best: f64::INFINITY,
        plan: None,
        labels: HashMap::new(),
        path: Vec::new(),
    };
    search.visit(depot, 0.0, 0, &[]);
    (search.best, search.plan.unwrap_or_default())
}

fn materialize<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    depot: usize,
    plan: &[Stop],
) -> Result<TruckGroupRoute<S>> {
    let mut route = vec![depot];
    let mut index = Vec::with_capacity(plan.len());
    for stop in plan {
        let last = *route.last().unwrap();
        if stop.vertex != last {
            route.extend_from_slice(&oracle.path(&inst.network, last, stop.vertex)?[1..]);
        }
        index.push(route.len() - 1);
    }
    let mut sorties: Vec<(usize, usize, usize)> = Vec::new();
    for (i, stop) in plan.iter().enumerate() {
        for &(c, round) in &stop.launches {
            let land = if round {
                i
            } else {
                (i + 1..plan.len()).find(|&j| plan[j].landings.contains(&c)).expect("every launched drone lands")
            };
            sorties.push((index[i], c, index[land]));
        }
    }
    let deliveries = sorties
        .into_iter()
        .map(|(x, c, y)| Delivery { takeoff_index: x, customer: c, landing_index: y, drone: 0 })
        .collect();
    let mut g = TruckGroupRoute { depot, truck_route: route, deliveries, cost: S::zero() };
    g.assign_drones();
    g.cost = timing(inst, &g).cost;
    Ok(g)
}

/// Optimal solution of a tiny instance by exhaustive search over stop
/// sequences, drone launches and landings, and customer-to-depot
/// assignments. Stops are joined by shortest road paths, so the optimum is
/// over all truck routes.
pub fn brute_force_exact<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    caps: &BruteForceCaps,
) -> Result<Solution<S>> {
    let n = inst.customers.len();
    if n > caps.max_customers || inst.drones_per_truck > caps.max_drones || inst.network.len() > caps.max_vertices {
        return Err(Error::CapsExceeded(format!(
            "exhaustive search handles at most {} customers, {} drones per truck and {} vertices (got {}, {}, {})",
            caps.max_customers,
            caps.max_drones,
            caps.max_vertices,
            n,
            inst.drones_per_truck,
            inst.network.len()
        )));
    }
    if inst.depots.is_empty() {
        return Err(Error::InvalidInstance("no depots".into()));
    }
    let m = inst.depots.len();
    let subsets = 1usize << n;
    let table: Vec<Vec<(f64, Vec<Stop>)>> = inst
        .depots
        .iter()
        .map(|&p| {
            (0..subsets)
                .map(|mask| {
                    let targets: Vec<usize> =
                        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| inst.customers[i]).collect();
                    best_group(inst, oracle, p, &targets)
                })
                .collect()
        })
        .collect();

    let mut best = (f64::INFINITY, Vec::new());
    let mut assign = vec![0usize; n];
    loop {
        let mut masks = vec![0usize; m];
        for (i, &a) in assign.iter().enumerate() {
            masks[a] |= 1 << i;
        }
        let total: f64 = masks.iter().enumerate().map(|(d, &mask)| table[d][mask].0).sum();
        if total < best.0 {
            best = (total, masks);
        }
        let mut i = 0;
        while i < n {
            assign[i] += 1;
            if assign[i] < m {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Infeasible("no route serves every customer".into()));
    }
    let groups = inst
        .depots
        .iter()
        .enumerate()
        .map(|(d, &p)| materialize(inst, oracle, p, &table[d][best.1[d]].1))
        .collect::<Result<Vec<_>>>()?;
    let sol = Solution::from_groups(groups);
    let report = validate_solution(inst, &sol);
    if !report.is_clean() {
        return Err(Error::Validation(report.messages()));
    }
    debug_assert!((sol.total_cost.as_f64() - best.0).abs() < 1e-6);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{line_instance, road_distances};

    fn pair(k: usize, range: f64) -> (Instance<f64>, DistanceOracle<f64>) {
        let mut inst = line_instance::<f64>(2, 1.0);
        inst.drones_per_truck = k;
        inst.drone_range = range;
        inst.drone_speed = 60.0;
        let o = road_distances(&inst, 0..2).unwrap();
        (inst, o)
    }

    #[test]
    fn truck_only_out_and_back() {
        let (inst, o) = pair(0, 10.0);
        let sol = brute_force_exact(&inst, &o, &BruteForceCaps::default()).unwrap();
        assert!((sol.total_cost - 2.0 / 30.0).abs() < 1e-12);
        assert_eq!(sol.groups[0].truck_route, vec![0, 1, 0]);
    }

    #[test]
    fn drone_from_parked_truck() {
        let (inst, o) = pair(1, 10.0);
        let sol = brute_force_exact(&inst, &o, &BruteForceCaps::default()).unwrap();
        let want = (2.0f64 / 30.0).min(2.0 / 60.0);
        assert!((sol.total_cost - want).abs() < 1e-12);
        assert_eq!(sol.groups[0].truck_route, vec![0]);
        assert_eq!(sol.groups[0].deliveries.len(), 1);
    }

    #[test]
    fn caps_are_enforced() {
        let (inst, o) = pair(3, 10.0);
        assert!(matches!(brute_force_exact(&inst, &o, &BruteForceCaps::default()), Err(Error::CapsExceeded(_))));
    }
}
