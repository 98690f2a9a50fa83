use crate::roadnet::{DistanceOracle, Instance};
use crate::scalar::Scalar;

use super::system::SetSystem;

/// Time for the truck group to enter customer `c`'s set at `u` and leave it
/// at `v`: either the drone serves `c` while the truck drives `u -> v`, or
/// the truck detours through `c`.
pub fn service_cost<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>, c: usize, u: usize, v: usize) -> S {
    let truck = (oracle.road(u, c) + oracle.road(c, v)) / inst.truck_speed;
    if !inst.sortie_feasible(u, c, v) {
        return truck;
    }
    let flight = (inst.euclid(u, c) + inst.euclid(c, v)) / inst.drone_speed;
    flight.max(oracle.road(u, v) / inst.truck_speed).min(truck)
}

/// Cost of the step `u -> v` in the set tour: the service cost when both lie
/// in one customer's set (cheapest such set), else plain driving time.
pub fn edge_cost<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    system: &SetSystem<S>,
    u: usize,
    v: usize,
) -> S {
    system
        .sets
        .iter()
        .filter(|s| s.contains(u) && s.contains(v))
        .map(|s| service_cost(inst, oracle, s.center, u, v))
        .reduce(S::min)
        .unwrap_or_else(|| oracle.road(u, v) / inst.truck_speed)
}

/// Cost tables of one set system. Set 0 is the depot singleton; set `i >= 1`
/// belongs to the `(i-1)`-th customer.
pub struct SetCosts<'a, S> {
    pub(crate) oracle: &'a DistanceOracle<S>,
    pub(crate) inv_speed: S,
    pub depot: usize,
    /// Customer of each set; `None` for the depot.
    pub owners: Vec<Option<usize>>,
    /// Entry and exit vertices of each set.
    pub verts: Vec<Vec<usize>>,
    /// Row-major `|verts[i]|²` service times.
    pub service: Vec<Vec<S>>,
    /// Takeoff and landing vertex achieving each service entry.
    pub service_pair: Vec<Vec<(usize, usize)>>,
}

impl<'a, S: Scalar> SetCosts<'a, S> {
    /// Service times per the system's mode. In boundary modes an entry
    /// `(a, b)` is the best way to go from boundary vertex `a` to boundary
    /// vertex `b` serving the customer anywhere inside the set.
    pub fn new(inst: &Instance<S>, oracle: &'a DistanceOracle<S>, system: &SetSystem<S>) -> Self {
        let inv_speed = S::one() / inst.truck_speed;
        let mut costs = SetCosts {
            oracle,
            inv_speed,
            depot: system.depot,
            owners: vec![None],
            verts: vec![vec![system.depot]],
            service: vec![vec![S::zero()]],
            service_pair: vec![vec![(system.depot, system.depot)]],
        };
        for (set, kept) in system.sets.iter().zip(&system.retained) {
            let c = set.center;
            let inner = &set.members;
            let m = inner.len();
            let mut w = vec![S::zero(); m * m];
            for (i, &u) in inner.iter().enumerate() {
                for (j, &v) in inner.iter().enumerate() {
                    w[i * m + j] = service_cost(inst, oracle, c, u, v);
                }
            }
            let (service, pairs) = if system.mode.boundary() {
                shortcut(oracle, inv_speed, inner, &w, kept)
            } else {
                let pairs = inner.iter().flat_map(|&u| inner.iter().map(move |&v| (u, v))).collect();
                (w, pairs)
            };
            costs.owners.push(Some(c));
            costs.verts.push(kept.clone());
            costs.service.push(service);
            costs.service_pair.push(pairs);
        }
        costs
    }

    /// Tables where visiting a set means passing any of `sets[i]`'s vertices
    /// and service is free.
    pub fn truck_only(
        inst: &Instance<S>,
        oracle: &'a DistanceOracle<S>,
        depot: usize,
        customers: &[usize],
        sets: &[Vec<usize>],
    ) -> Self {
        let mut costs = SetCosts {
            oracle,
            inv_speed: S::one() / inst.truck_speed,
            depot,
            owners: vec![None],
            verts: vec![vec![depot]],
            service: vec![vec![S::zero()]],
            service_pair: vec![vec![(depot, depot)]],
        };
        for (&c, set) in customers.iter().zip(sets) {
            let m = set.len();
            let mut w = vec![S::infinity(); m * m];
            for i in 0..m {
                w[i * m + i] = S::zero();
            }
            costs.owners.push(Some(c));
            costs.verts.push(set.clone());
            costs.service.push(w);
            costs.service_pair.push(set.iter().flat_map(|&u| set.iter().map(move |&v| (u, v))).collect());
        }
        costs
    }

    pub fn n_sets(&self) -> usize {
        self.verts.len()
    }

    #[inline]
    pub fn travel(&self, u: usize, v: usize) -> S {
        self.oracle.road(u, v) * self.inv_speed
    }

    #[inline]
    pub fn service_at(&self, set: usize, a: usize, b: usize) -> S {
        self.service[set][a * self.verts[set].len() + b]
    }
}

/// For boundary vertices `a, b`: `min_{u,v} travel(a,u) + w(u,v) + travel(v,b)`
/// over the full member list, with the `(u, v)` achieving it.
fn shortcut<S: Scalar>(
    oracle: &DistanceOracle<S>,
    inv_speed: S,
    inner: &[usize],
    w: &[S],
    kept: &[usize],
) -> (Vec<S>, Vec<(usize, usize)>) {
    let m = inner.len();
    let k = kept.len();
    let mut out = vec![S::infinity(); k * k];
    let mut pairs = vec![(0, 0); k * k];
    let mut reach = vec![(S::infinity(), 0usize); m];
    for (ai, &a) in kept.iter().enumerate() {
        for (vi, slot) in reach.iter_mut().enumerate() {
            *slot = (S::infinity(), 0);
            for (ui, &u) in inner.iter().enumerate() {
                let cand = oracle.road(a, u) * inv_speed + w[ui * m + vi];
                if cand < slot.0 {
                    *slot = (cand, ui);
                }
            }
        }
        for (bi, &b) in kept.iter().enumerate() {
            let mut best = (S::infinity(), (0, 0));
            for (vi, &v) in inner.iter().enumerate() {
                let cand = reach[vi].0 + oracle.road(v, b) * inv_speed;
                if cand < best.0 {
                    best = (cand, (inner[reach[vi].1], v));
                }
            }
            out[ai * k + bi] = best.0;
            pairs[ai * k + bi] = best.1;
        }
    }
    (out, pairs)
}
