use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decode::{materialize, StopSortie};
use crate::error::{Error, Result};
use crate::eval::timing;
use crate::roadnet::{neighbor_set, road_distances, DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::{Solution, TruckGroupRoute};

use super::initial::nearest_depot_groups;

/// Local move families of the hill climber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VnsOperator {
    /// Move a drone's takeoff or landing vertex.
    MoveEndpoint,
    /// Serve a truck customer by drone instead.
    TruckToDrone,
    /// Swap two consecutive customers in the service order.
    SwapConsecutive,
}

impl VnsOperator {
    pub const ALL: [VnsOperator; 3] =
        [VnsOperator::MoveEndpoint, VnsOperator::TruckToDrone, VnsOperator::SwapConsecutive];

    pub fn name(self) -> &'static str {
        match self {
            VnsOperator::MoveEndpoint => "move-endpoint",
            VnsOperator::TruckToDrone => "truck-to-drone",
            VnsOperator::SwapConsecutive => "swap-consecutive",
        }
    }
}

impl fmt::Display for VnsOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VnsOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VnsOperator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Infeasible(format!("unknown operator {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VnsConfig {
    /// Cap on improving steps plus shakes.
    pub max_iterations: usize,
    /// Consecutive shakes without improvement before stopping.
    pub no_improve_patience: usize,
    /// Shaking cycles through these operators in order.
    pub order: [VnsOperator; 3],
    pub seed: u64,
}

impl Default for VnsConfig {
    fn default() -> Self {
        VnsConfig { max_iterations: 1000, no_improve_patience: 50, order: VnsOperator::ALL, seed: 0 }
    }
}

impl VnsConfig {
    pub fn check(&self) -> Result<()> {
        if self.no_improve_patience == 0 {
            return Err(Error::Infeasible("patience must be at least 1".into()));
        }
        let distinct: HashSet<_> = self.order.iter().collect();
        if distinct.len() != 3 {
            return Err(Error::Infeasible("operator order must list each operator once".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Service {
    Truck(usize),
    Drone { customer: usize, takeoff: usize, landing: usize },
}

impl Service {
    fn customer(self) -> usize {
        match self {
            Service::Truck(c) => c,
            Service::Drone { customer, .. } => customer,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Set { item: usize, takeoff: usize, landing: usize },
    Swap(usize),
}

#[derive(Clone)]
struct Group<S> {
    depot: usize,
    items: Vec<Service>,
    route: TruckGroupRoute<S>,
}

struct Climber<'a, S: Scalar> {
    inst: &'a Instance<S>,
    oracle: DistanceOracle<S>,
    /// Range ball of every vertex that is a customer, by vertex id.
    balls: Vec<Vec<usize>>,
}

impl<'a, S: Scalar> Climber<'a, S> {
    fn new(inst: &'a Instance<S>) -> Result<Self> {
        let mut balls = vec![Vec::new(); inst.network.len()];
        let mut sources: Vec<usize> = inst.depots.iter().chain(&inst.customers).copied().collect();
        if inst.drones_per_truck > 0 {
            for &c in &inst.customers {
                balls[c] = neighbor_set(inst, c, inst.drone_range).members;
                sources.extend(&balls[c]);
            }
        }
        sources.sort_unstable();
        sources.dedup();
        let oracle = road_distances(inst, sources)?;
        Ok(Climber { inst, oracle, balls })
    }

    /// Route for a service list, or `None` when it needs more drones than
    /// the truck carries.
    fn build(&self, depot: usize, items: &[Service]) -> Result<Option<TruckGroupRoute<S>>> {
        let mut stops = Vec::with_capacity(items.len() * 2);
        let mut sorties = Vec::new();
        for &item in items {
            match item {
                Service::Truck(c) => stops.push(c),
                Service::Drone { customer, takeoff, landing } => {
                    stops.push(takeoff);
                    stops.push(landing);
                    sorties.push(StopSortie { takeoff: stops.len() - 2, customer, landing: stops.len() - 1, drone: 0 });
                }
            }
        }
        let mut route = materialize(self.inst, &self.oracle, depot, &stops, &sorties)?;
        if route.assign_drones() > self.inst.drones_per_truck {
            return Ok(None);
        }
        let trace = timing(self.inst, &route);
        if trace.airborne.iter().any(|&a| a > self.inst.drones_per_truck) {
            return Ok(None);
        }
        Ok(Some(route))
    }

    fn group(&self, depot: usize, items: Vec<Service>) -> Result<Option<Group<S>>> {
        Ok(self.build(depot, &items)?.map(|route| Group { depot, items, route }))
    }

    /// Truck position just before and just after `item`.
    fn around(&self, g: &Group<S>, item: usize) -> (usize, usize) {
        let before = match item.checked_sub(1).map(|i| g.items[i]) {
            None => g.depot,
            Some(Service::Truck(c)) => c,
            Some(Service::Drone { landing, .. }) => landing,
        };
        let after = match g.items.get(item + 1) {
            None => g.depot,
            Some(Service::Truck(c)) => *c,
            Some(Service::Drone { takeoff, .. }) => *takeoff,
        };
        (before, after)
    }

    fn moves(&self, g: &Group<S>, op: VnsOperator) -> Vec<Move> {
        let inst = self.inst;
        let mut out = Vec::new();
        match op {
            VnsOperator::SwapConsecutive => out.extend((0..g.items.len().saturating_sub(1)).map(Move::Swap)),
            VnsOperator::MoveEndpoint => {
                let mut near: HashSet<usize> = g.route.truck_route.iter().copied().collect();
                for &v in &g.route.truck_route {
                    near.extend(inst.network.adjacent(v));
                }
                for (i, item) in g.items.iter().enumerate() {
                    let Service::Drone { customer, takeoff, landing } = *item else { continue };
                    for &v in self.balls[customer].iter().filter(|v| near.contains(v)) {
                        if v != takeoff && inst.sortie_feasible(v, customer, landing) {
                            out.push(Move::Set { item: i, takeoff: v, landing });
                        }
                        if v != landing && inst.sortie_feasible(takeoff, customer, v) {
                            out.push(Move::Set { item: i, takeoff, landing: v });
                        }
                    }
                }
            }
            VnsOperator::TruckToDrone => {
                if inst.drones_per_truck == 0 {
                    return out;
                }
                for (i, item) in g.items.iter().enumerate() {
                    let Service::Truck(c) = *item else { continue };
                    let (before, after) = self.around(g, i);
                    let mut ends = vec![before, after];
                    let closest =
                        g.route.truck_route.iter().copied().filter(|&v| v != c && self.balls[c].contains(&v)).min_by(
                            |&a, &b| inst.euclid(a, c).partial_cmp(&inst.euclid(b, c)).unwrap().then(a.cmp(&b)),
                        );
                    ends.extend(closest);
                    ends.dedup();
                    for &a in &ends {
                        for &b in &ends {
                            if a != c && b != c && inst.sortie_feasible(a, c, b) {
                                out.push(Move::Set { item: i, takeoff: a, landing: b });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn apply(&self, g: &Group<S>, mv: Move) -> Result<Option<Group<S>>> {
        let mut items = g.items.clone();
        match mv {
            Move::Swap(i) => items.swap(i, i + 1),
            Move::Set { item, takeoff, landing } => {
                items[item] = Service::Drone { customer: items[item].customer(), takeoff, landing };
            }
        }
        self.group(g.depot, items)
    }

    /// Best strictly improving neighbor over all groups and operators.
    fn best_step(&self, groups: &[Group<S>]) -> Result<Option<(usize, Group<S>)>> {
        let mut best: Option<(S, usize, Group<S>)> = None;
        for (gi, g) in groups.iter().enumerate() {
            for op in VnsOperator::ALL {
                for mv in self.moves(g, op) {
                    let Some(cand) = self.apply(g, mv)? else { continue };
                    let gain = g.route.cost - cand.route.cost;
                    if gain > S::tol() && best.as_ref().is_none_or(|b| gain > b.0) {
                        best = Some((gain, gi, cand));
                    }
                }
            }
        }
        Ok(best.map(|(_, gi, g)| (gi, g)))
    }
}

fn total<S: Scalar>(groups: &[Group<S>]) -> S {
    groups.iter().map(|g| g.route.cost).sum()
}

fn to_solution<S: Scalar>(groups: &[Group<S>]) -> Solution<S> {
    Solution::from_groups(groups.iter().map(|g| g.route.clone()).collect())
}

/// Hill climbing with variable-neighborhood shaking, starting from
/// nearest-depot groups with nearest-neighbor truck tours. `on_accept` sees
/// the starting solution and every later incumbent.
pub fn hc_vns_with<S: Scalar>(
    inst: &Instance<S>,
    cfg: &VnsConfig,
    mut on_accept: impl FnMut(&Solution<S>),
) -> Result<Solution<S>> {
    cfg.check()?;
    let climber = Climber::new(inst)?;
    let mut groups = Vec::with_capacity(inst.depots.len());
    for (depot, customers) in nearest_depot_groups(inst, &climber.oracle) {
        let mut left = customers;
        let mut at = depot;
        let mut items = Vec::with_capacity(left.len());
        while !left.is_empty() {
            let (i, _) = left
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    let (da, db) = (climber.oracle.road(at, *a.1), climber.oracle.road(at, *b.1));
                    da.partial_cmp(&db).unwrap().then(a.1.cmp(b.1))
                })
                .expect("nonempty");
            at = left.swap_remove(i);
            items.push(Service::Truck(at));
        }
        groups.push(climber.group(depot, items)?.expect("truck-only routes need no drones"));
    }
    on_accept(&to_solution(&groups));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut iterations = 0;
    let descend = |groups: &mut Vec<Group<S>>, iterations: &mut usize| -> Result<bool> {
        let mut moved = false;
        while *iterations < cfg.max_iterations {
            let Some((gi, g)) = climber.best_step(groups)? else { break };
            *iterations += 1;
            groups[gi] = g;
            moved = true;
        }
        Ok(moved)
    };
    if descend(&mut groups, &mut iterations)? {
        on_accept(&to_solution(&groups));
    }

    let mut stale = 0;
    let mut next_op = 0;
    while stale < cfg.no_improve_patience && iterations < cfg.max_iterations {
        iterations += 1;
        let op = cfg.order[next_op];
        let mut options: Vec<(usize, Move)> = Vec::new();
        for (gi, g) in groups.iter().enumerate() {
            options.extend(climber.moves(g, op).into_iter().map(|m| (gi, m)));
        }
        options.shuffle(&mut rng);
        let mut trial = None;
        for (gi, mv) in options {
            if let Some(g) = climber.apply(&groups[gi], mv)? {
                let mut shaken = groups.clone();
                shaken[gi] = g;
                trial = Some(shaken);
                break;
            }
        }
        let improved = match trial {
            Some(mut shaken) => {
                descend(&mut shaken, &mut iterations)?;
                if total(&shaken) < total(&groups) - S::tol() {
                    groups = shaken;
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        if improved {
            on_accept(&to_solution(&groups));
            stale = 0;
            next_op = 0;
        } else {
            stale += 1;
            next_op = (next_op + 1) % cfg.order.len();
        }
    }
    Ok(to_solution(&groups))
}

/// [`hc_vns_with`] without an observer.
pub fn hc_vns_solve<S: Scalar>(inst: &Instance<S>, cfg: &VnsConfig) -> Result<Solution<S>> {
    hc_vns_with(inst, cfg, |_| {})
}
