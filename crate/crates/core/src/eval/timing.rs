use serde::Serialize;

use crate::roadnet::Instance;
use crate::scalar::Scalar;
use crate::solution::TruckGroupRoute;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortieTiming<S> {
    pub takeoff_time: S,
    pub landing_time: S,
    pub flight_km: S,
}

/// Event times along one truck-group route, in hours.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingTrace<S> {
    /// Time the truck reaches each route index and every drone due there
    /// has landed.
    pub arrival: Vec<S>,
    /// Time the truck leaves each route index.
    pub departure: Vec<S>,
    /// Parallel to the route's deliveries.
    pub sorties: Vec<SortieTiming<S>>,
    /// Drones away from the truck while it is at (or leaving) each index.
    pub airborne: Vec<usize>,
    pub cost: S,
}

/// Flight distance of the sortie `takeoff -> customer -> landing`, in km.
pub fn flight_km<S: Scalar>(inst: &Instance<S>, takeoff: usize, customer: usize, landing: usize) -> S {
    inst.euclid(takeoff, customer) + inst.euclid(customer, landing)
}

fn leg_km<S: Scalar>(inst: &Instance<S>, u: usize, v: usize) -> S {
    if u == v {
        return S::zero();
    }
    inst.network.arc_length(u, v).unwrap_or_else(S::infinity)
}

/// Times a route. Drones leave when the truck is ready at their takeoff
/// index; the truck leaves an index only after every drone landing there has
/// returned. Deliveries with out-of-range indices are ignored.
pub fn timing<S: Scalar>(inst: &Instance<S>, route: &TruckGroupRoute<S>) -> TimingTrace<S> {
    let path = &route.truck_route;
    let n = path.len();
    let valid = |x: usize, y: usize| x <= y && y < n;
    let flights: Vec<S> = route
        .deliveries
        .iter()
        .map(|d| {
            if valid(d.takeoff_index, d.landing_index) {
                flight_km(inst, path[d.takeoff_index], d.customer, path[d.landing_index])
            } else {
                S::zero()
            }
        })
        .collect();

    let mut landing_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, d) in route.deliveries.iter().enumerate() {
        if valid(d.takeoff_index, d.landing_index) {
            landing_at[d.landing_index].push(i);
        }
    }

    let mut arrival = vec![S::zero(); n];
    let mut departure = vec![S::zero(); n];
    let mut sorties = vec![
        SortieTiming { takeoff_time: S::zero(), landing_time: S::zero(), flight_km: S::zero() };
        route.deliveries.len()
    ];
    for t in 0..n {
        let mut ready =
            if t == 0 { S::zero() } else { departure[t - 1] + leg_km(inst, path[t - 1], path[t]) / inst.truck_speed };
        for &i in &landing_at[t] {
            let d = &route.deliveries[i];
            if d.takeoff_index < t {
                let back = arrival[d.takeoff_index] + flights[i] / inst.drone_speed;
                ready = ready.max(back);
            }
        }
        arrival[t] = ready;
        let mut leave = ready;
        for &i in &landing_at[t] {
            if route.deliveries[i].takeoff_index == t {
                leave = leave.max(ready + flights[i] / inst.drone_speed);
            }
        }
        departure[t] = leave;
    }
    for (i, d) in route.deliveries.iter().enumerate() {
        if valid(d.takeoff_index, d.landing_index) {
            let takeoff_time = arrival[d.takeoff_index];
            sorties[i] = SortieTiming {
                takeoff_time,
                landing_time: takeoff_time + flights[i] / inst.drone_speed,
                flight_km: flights[i],
            };
        }
    }

    let mut airborne = vec![0usize; n];
    for d in &route.deliveries {
        if !valid(d.takeoff_index, d.landing_index) {
            continue;
        }
        if d.takeoff_index == d.landing_index {
            airborne[d.takeoff_index] += 1;
        } else {
            for a in &mut airborne[d.takeoff_index..d.landing_index] {
                *a += 1;
            }
        }
    }

    let cost = departure.last().copied().unwrap_or_else(S::zero);
    TimingTrace { arrival, departure, sorties, airborne, cost }
}
