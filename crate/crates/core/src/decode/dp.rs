use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::roadnet::{neighbor_set, DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::{Solution, TruckGroupRoute, VisitOrder};

use super::plan::{materialize, StopSortie};

/// Vertices the decoder needs road distances from: the depot and every
/// member of each customer's range ball.
pub fn decode_sources<S: Scalar>(inst: &Instance<S>, depot: usize, customers: &[usize]) -> Vec<usize> {
    let mut out = vec![depot];
    for &c in customers {
        out.extend(neighbor_set(inst, c, inst.drone_range).members);
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Start,
    From(usize),
    FromRoundTrips,
}

/// Landing-time tables of one drone batch launched from a fixed vertex.
struct Chain<S> {
    /// `timed[j][i]`: truck ready at the `i`-th vertex of the set of the
    /// batch's `j`-th customer with drones `0..=j` landed, excluding the
    /// schedule where every landing so far happened at the takeoff vertex.
    timed: Vec<Vec<S>>,
    back: Vec<Vec<Back>>,
    /// Same quantity when every drone so far flew a round trip.
    round_trips: Vec<S>,
}

#[derive(Debug, Clone, Copy)]
enum Choice {
    Start,
    Truck { from_flag: usize },
    Batch { t: usize, u: usize, w: usize, round_trips: bool },
}

struct Decoder<'a, S> {
    inst: &'a Instance<S>,
    oracle: &'a DistanceOracle<S>,
    depot: usize,
    order: &'a [usize],
    sets: Vec<Vec<usize>>,
    universe: Vec<usize>,
    pos: Vec<usize>,
}

impl<'a, S: Scalar> Decoder<'a, S> {
    fn new(inst: &'a Instance<S>, oracle: &'a DistanceOracle<S>, depot: usize, order: &'a [usize]) -> Result<Self> {
        let sets: Vec<Vec<usize>> = order.iter().map(|&c| neighbor_set(inst, c, inst.drone_range).members).collect();
        let universe = decode_sources(inst, depot, order);
        if let Some(&u) = universe.iter().find(|&&u| !oracle.covers(u)) {
            return Err(Error::NotASource(u));
        }
        let mut pos = vec![usize::MAX; inst.network.len()];
        for (i, &u) in universe.iter().enumerate() {
            pos[u] = i;
        }
        Ok(Decoder { inst, oracle, depot, order, sets, universe, pos })
    }

    #[inline]
    fn drive(&self, a: usize, b: usize) -> S {
        self.oracle.road(a, b) / self.inst.truck_speed
    }

    /// Drone time for `u -> c -> v`, or infinity when out of range.
    #[inline]
    fn fly(&self, u: usize, c: usize, v: usize) -> S {
        if self.inst.sortie_feasible(u, c, v) {
            (self.inst.euclid(u, c) + self.inst.euclid(c, v)) / self.inst.drone_speed
        } else {
            S::infinity()
        }
    }

    fn chain(&self, start: usize, u: usize, len: usize) -> Chain<S> {
        let inf = S::infinity();
        let c0 = self.order[start];
        let first: Vec<S> = self.sets[start]
            .iter()
            .map(|&v| if v == u { inf } else { self.fly(u, c0, v).max(self.drive(u, v)) })
            .collect();
        let mut timed = vec![first];
        let mut back = vec![vec![Back::Start; self.sets[start].len()]];
        let mut round_trips = vec![self.fly(u, c0, u)];
        for j in 1..len {
            let c = self.order[start + j];
            let (prev_set, set) = (&self.sets[start + j - 1], &self.sets[start + j]);
            let prev = &timed[j - 1];
            let prev_rt = round_trips[j - 1];
            let mut row = Vec::with_capacity(set.len());
            let mut brow = Vec::with_capacity(set.len());
            for &v in set {
                let flight = self.fly(u, c, v);
                if flight.is_infinite() {
                    row.push(inf);
                    brow.push(Back::Start);
                    continue;
                }
                let mut best = inf;
                let mut arg = Back::Start;
                for (wi, &w) in prev_set.iter().enumerate() {
                    if prev[wi].is_finite() {
                        let cand = prev[wi] + self.drive(w, v);
                        if cand < best {
                            best = cand;
                            arg = Back::From(wi);
                        }
                    }
                }
                if v != u && prev_rt.is_finite() {
                    let cand = prev_rt + self.drive(u, v);
                    if cand < best {
                        best = cand;
                        arg = Back::FromRoundTrips;
                    }
                }
                row.push(if best.is_finite() { best.max(flight) } else { inf });
                brow.push(arg);
            }
            timed.push(row);
            back.push(brow);
            round_trips.push(prev_rt.max(self.fly(u, c, u)));
        }
        Chain { timed, back, round_trips }
    }

    fn solve(&self, k: usize) -> Result<TruckGroupRoute<S>> {
        let n = self.order.len();
        if n == 0 {
            return Ok(TruckGroupRoute::trivial(self.depot));
        }
        let inf = S::infinity();
        let nu = self.universe.len();
        // value[s][flag][v]; flag 1 means the truck has not moved since a
        // batch of same-vertex round trips at v.
        let mut value = vec![[vec![inf; nu], vec![inf; nu]]; n + 1];
        let mut choice = vec![[vec![Choice::Start; nu], vec![Choice::Start; nu]]; n + 1];
        for (i, &v) in self.universe.iter().enumerate() {
            value[0][0][i] = self.drive(self.depot, v);
        }

        for start in 0..n {
            let c = self.order[start];
            let cp = self.pos[c];
            for flag in 0..2 {
                let base = value[start][flag][cp];
                if base.is_infinite() {
                    continue;
                }
                for (i, &v) in self.universe.iter().enumerate() {
                    let nf = usize::from(flag == 1 && v == c);
                    let cand = base + self.drive(c, v);
                    if cand < value[start + 1][nf][i] {
                        value[start + 1][nf][i] = cand;
                        choice[start + 1][nf][i] = Choice::Truck { from_flag: flag };
                    }
                }
            }

            let tmax = k.min(n - start);
            if tmax == 0 {
                continue;
            }
            // best[t-1][wi] = (time, takeoff) over takeoffs for landing set index wi.
            let mut best: Vec<Vec<(S, usize)>> =
                (0..tmax).map(|t| vec![(inf, usize::MAX); self.sets[start + t].len()]).collect();
            let mut rt: Vec<Vec<(usize, S)>> = vec![Vec::new(); tmax];
            for &u in &self.sets[start] {
                let base = value[start][0][self.pos[u]];
                if base.is_infinite() {
                    continue;
                }
                let chain = self.chain(start, u, tmax);
                for t in 0..tmax {
                    for (wi, &bt) in chain.timed[t].iter().enumerate() {
                        let cand = base + bt;
                        if cand < best[t][wi].0 {
                            best[t][wi] = (cand, u);
                        }
                    }
                    if chain.round_trips[t].is_finite() {
                        rt[t].push((u, base + chain.round_trips[t]));
                    }
                }
            }
            for t in 0..tmax {
                let s = start + t + 1;
                let set = &self.sets[start + t];
                for (i, &v) in self.universe.iter().enumerate() {
                    for (wi, &(m, u)) in best[t].iter().enumerate() {
                        if m.is_infinite() {
                            continue;
                        }
                        let w = set[wi];
                        let cand = m + self.drive(w, v);
                        if cand < value[s][0][i] {
                            value[s][0][i] = cand;
                            choice[s][0][i] = Choice::Batch { t: t + 1, u, w, round_trips: false };
                        }
                    }
                    for &(u, m) in &rt[t] {
                        let flag = usize::from(v == u);
                        let cand = m + self.drive(u, v);
                        if cand < value[s][flag][i] {
                            value[s][flag][i] = cand;
                            choice[s][flag][i] = Choice::Batch { t: t + 1, u, w: u, round_trips: true };
                        }
                    }
                }
            }
        }

        let dp = self.pos[self.depot];
        let mut flag = usize::from(value[n][1][dp] < value[n][0][dp]);
        let optimum = value[n][flag][dp];
        if optimum.is_infinite() {
            return Err(Error::Infeasible(format!("no route for depot {}", self.depot)));
        }

        // Walk back to collect (layer, choice, anchor) triples.
        let mut steps = Vec::with_capacity(n + 1);
        let mut s = n;
        let mut v = self.depot;
        loop {
            let ch = choice[s][flag][self.pos[v]];
            steps.push((s, ch, v));
            match ch {
                Choice::Start => break,
                Choice::Truck { from_flag } => {
                    v = self.order[s - 1];
                    flag = from_flag;
                    s -= 1;
                }
                Choice::Batch { t, u, .. } => {
                    v = u;
                    flag = 0;
                    s -= t;
                }
            }
        }
        steps.reverse();

        let mut stops = vec![self.depot];
        let mut sorties = Vec::new();
        for (s, ch, anchor) in steps {
            match ch {
                Choice::Start | Choice::Truck { .. } => {}
                Choice::Batch { t, u, w, round_trips } => {
                    let start = s - t;
                    let takeoff = stops.len() - 1;
                    let landings = if round_trips { vec![u; t] } else { self.landings(start, u, t, w) };
                    for (j, &l) in landings.iter().enumerate() {
                        stops.push(l);
                        sorties.push(StopSortie {
                            takeoff,
                            customer: self.order[start + j],
                            landing: stops.len() - 1,
                            drone: j,
                        });
                    }
                }
            }
            stops.push(anchor);
        }
        let route = materialize(self.inst, self.oracle, self.depot, &stops, &sorties)?;
        debug_assert!(
            (route.cost - optimum).abs().as_f64() <= 1e-6,
            "timed route {} disagrees with recurrence {}",
            route.cost,
            optimum
        );
        Ok(route)
    }

    fn landings(&self, start: usize, u: usize, t: usize, w: usize) -> Vec<usize> {
        let chain = self.chain(start, u, t);
        let mut out = vec![w; t];
        let mut wi = self.sets[start + t - 1].binary_search(&w).expect("landing inside its set");
        for j in (1..t).rev() {
            match chain.back[j][wi] {
                Back::From(prev) => {
                    wi = prev;
                    out[j - 1] = self.sets[start + j - 1][prev];
                }
                Back::FromRoundTrips => {
                    out[..j].fill(u);
                    break;
                }
                Back::Start => unreachable!("finite chain entry has a predecessor"),
            }
        }
        out
    }
}

/// Minimum time for the truck group, launching all drones of a batch at `u`,
/// to serve the `t` customers `order[s-1..s-1+t]` and be ready at `v`.
///
/// With `t == 1` the truck itself serves the customer whenever the sortie is
/// out of range. Longer batches are pure drone batches and are infinite when
/// any sortie is out of range.
pub fn time_batch<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    order: &[usize],
    u: usize,
    v: usize,
    s: usize,
    t: usize,
) -> Result<S> {
    if s == 0 || t == 0 || s + t - 1 > order.len() {
        return Err(Error::OutOfRange(format!("batch of {t} starting at position {s} in an order of {}", order.len())));
    }
    if t > inst.drones_per_truck {
        return Err(Error::OutOfRange(format!("batch of {t} exceeds {} drones per truck", inst.drones_per_truck)));
    }
    let drive = |a: usize, b: usize| -> Result<S> { Ok(oracle.try_road(a, b)? / inst.truck_speed) };
    let fly = |a: usize, c: usize, b: usize| {
        if inst.sortie_feasible(a, c, b) {
            (inst.euclid(a, c) + inst.euclid(c, b)) / inst.drone_speed
        } else {
            S::infinity()
        }
    };
    let c = order[s - 1];
    if t == 1 {
        let f = fly(u, c, v);
        return Ok(if f.is_infinite() { drive(u, c)? + drive(c, v)? } else { f.max(drive(u, v)?) });
    }
    let ball = |i: usize| neighbor_set(inst, order[i], inst.drone_range).members;
    let mut prev_set = ball(s - 1);
    let mut prev: Vec<S> =
        prev_set.iter().map(|&w| -> Result<S> { Ok(fly(u, c, w).max(drive(u, w)?)) }).collect::<Result<_>>()?;
    for j in 1..t {
        let cj = order[s - 1 + j];
        let targets = if j + 1 == t { vec![v] } else { ball(s - 1 + j) };
        let mut row = Vec::with_capacity(targets.len());
        for &x in &targets {
            let f = fly(u, cj, x);
            let mut best = S::infinity();
            for (wi, &w) in prev_set.iter().enumerate() {
                if prev[wi].is_finite() {
                    best = best.min(prev[wi] + drive(w, x)?);
                }
            }
            row.push(if f.is_finite() && best.is_finite() { best.max(f) } else { S::infinity() });
        }
        prev = row;
        prev_set = targets;
    }
    Ok(prev[0])
}

/// Best simultaneous-dispatch route serving `order` with at most `k` drones
/// per batch.
pub fn decode_route<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    order: &VisitOrder,
    k: usize,
) -> Result<TruckGroupRoute<S>> {
    Decoder::new(inst, oracle, order.depot, &order.order)?.solve(k)
}

/// Decodes every group; the solution lists groups in the order given.
pub fn decode_all<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    orders: &[VisitOrder],
    k: usize,
) -> Result<Solution<S>> {
    let groups = orders.par_iter().map(|o| decode_route(inst, oracle, o, k)).collect::<Result<Vec<_>>>()?;
    Ok(Solution::from_groups(groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::validate_solution;
    use crate::roadnet::{line_instance, road_distances};

    fn line(n: usize) -> (Instance<f64>, DistanceOracle<f64>) {
        let inst = line_instance::<f64>(n, 1.0);
        let oracle = road_distances(&inst, 0..n).unwrap();
        (inst, oracle)
    }

    #[test]
    fn out_of_range_single_falls_back_to_truck() {
        let (mut inst, o) = line(4);
        inst.drone_range = 1.0;
        let t = time_batch(&inst, &o, &[3], 0, 0, 1, 1).unwrap();
        assert!((t - 0.2).abs() < 1e-12);
    }

    #[test]
    fn single_sortie_waits_for_slower_side() {
        let (mut inst, o) = line(4);
        inst.drone_range = 2.0;
        inst.drone_speed = 60.0;
        let t = time_batch(&inst, &o, &[2], 1, 3, 1, 1).unwrap();
        assert!((t - 1.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_second_sortie_is_infinite() {
        let (mut inst, o) = line(6);
        inst.drone_range = 2.0;
        let t = time_batch(&inst, &o, &[1, 5], 0, 1, 1, 2).unwrap();
        assert!(t.is_infinite());
        assert!(time_batch(&inst, &o, &[1, 5], 0, 1, 2, 2).is_err());
    }

    #[test]
    fn empty_order_stays_home() {
        let (inst, o) = line(3);
        let r = decode_route(&inst, &o, &VisitOrder { depot: 0, order: vec![] }, 2).unwrap();
        assert_eq!(r.truck_route, vec![0]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn unreachable_by_drone_goes_by_truck() {
        let (mut inst, o) = line(2);
        inst.drone_range = 0.0;
        let r = decode_route(&inst, &o, &VisitOrder { depot: 0, order: vec![1] }, 2).unwrap();
        assert_eq!(r.truck_route, vec![0, 1, 0]);
        assert!(r.deliveries.is_empty());
        assert!((r.cost - 2.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn drone_round_trip_from_depot() {
        let (mut inst, o) = line(2);
        inst.drone_range = 2.0;
        let r = decode_route(&inst, &o, &VisitOrder { depot: 0, order: vec![1] }, 1).unwrap();
        assert_eq!(r.truck_route, vec![0]);
        assert!((r.cost - 2.0 / 48.0).abs() < 1e-12);
        let sol = Solution::from_groups(vec![r]);
        assert!(validate_solution(&inst, &sol).is_clean());
    }

    #[test]
    fn sequential_round_trips_need_truck_movement() {
        // Two customers reachable only as round trips from the depot, one
        // drone: the truck cannot launch twice from one route index.
        let mut inst = line_instance::<f64>(5, 0.1);
        inst.customers = vec![1, 2];
        inst.drone_range = 0.4;
        let o = road_distances(&inst, 0..5).unwrap();
        let order = VisitOrder { depot: 0, order: vec![1, 2] };
        let r = decode_route(&inst, &o, &order, 1).unwrap();
        let sol = Solution::from_groups(vec![r.clone()]);
        let report = validate_solution(&inst, &sol);
        assert!(report.is_clean(), "{:?} {:?}", report.messages(), r);
    }

    #[test]
    fn more_drones_never_hurt() {
        let inst =
            crate::roadnet::generate_instance::<f64>(&crate::roadnet::GenSpec::grid(8, 8, 0.5, 1, 6), 5).unwrap();
        let o = road_distances(&inst, 0..64).unwrap();
        let order = VisitOrder { depot: inst.depots[0], order: inst.customers.clone() };
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let r = decode_route(&inst, &o, &order, k).unwrap();
            assert!(r.cost <= last + 1e-9);
            let sol = Solution::from_groups(vec![r.clone()]);
            assert!(validate_solution(&inst.clone().with_drones(k), &sol).is_clean());
            last = r.cost;
        }
    }
}
