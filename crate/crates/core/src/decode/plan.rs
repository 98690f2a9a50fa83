use crate::error::Result;
use crate::eval::timing;
use crate::roadnet::{DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::{Delivery, TruckGroupRoute};

/// A sortie whose takeoff and landing refer to positions in a stop list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopSortie {
    pub takeoff: usize,
    pub customer: usize,
    pub landing: usize,
    pub drone: usize,
}

/// Turns a list of stops (vertices the truck must pass in order, starting and
/// ending at the depot) into an arc-level route. Consecutive equal stops
/// share one route index; legs follow shortest road paths. The returned cost
/// is the route's exact timing.
pub fn materialize<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    depot: usize,
    stops: &[usize],
    sorties: &[StopSortie],
) -> Result<TruckGroupRoute<S>> {
    let mut route = vec![depot];
    let mut index_of = Vec::with_capacity(stops.len());
    for &stop in stops {
        let last = *route.last().expect("route nonempty");
        if stop != last {
            let leg = oracle.path(&inst.network, last, stop)?;
            route.extend_from_slice(&leg[1..]);
        }
        index_of.push(route.len() - 1);
    }
    if *route.last().expect("route nonempty") != depot {
        let leg = oracle.path(&inst.network, *route.last().unwrap(), depot)?;
        route.extend_from_slice(&leg[1..]);
    }
    let deliveries = sorties
        .iter()
        .map(|s| Delivery {
            takeoff_index: index_of[s.takeoff],
            customer: s.customer,
            landing_index: index_of[s.landing],
            drone: s.drone,
        })
        .collect();
    let mut group = TruckGroupRoute { depot, truck_route: route, deliveries, cost: S::zero() };
    group.cost = timing(inst, &group).cost;
    Ok(group)
}
