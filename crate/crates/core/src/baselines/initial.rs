use std::collections::BTreeMap;

use crate::decode::materialize;
use crate::error::Result;
use crate::partition::{build_meta_graph, partition_nn, MetaMetric};
use crate::roadnet::{DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::{Solution, TruckGroupRoute};

/// Customers of each depot under nearest-depot road distance.
pub fn nearest_depot_groups<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> BTreeMap<usize, Vec<usize>> {
    let meta = build_meta_graph(inst, oracle, MetaMetric::Node, S::zero());
    partition_nn(&meta, &inst.depots, &inst.customers, false)
}

/// Truck-only route visiting `customers` by repeatedly driving to the
/// nearest unvisited one.
pub fn nearest_neighbor_route<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    depot: usize,
    customers: &[usize],
) -> Result<TruckGroupRoute<S>> {
    let mut left = customers.to_vec();
    let mut at = depot;
    let mut stops = Vec::with_capacity(left.len());
    while !left.is_empty() {
        let (i, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| oracle.road(at, *a.1).partial_cmp(&oracle.road(at, *b.1)).unwrap().then(a.1.cmp(b.1)))
            .unwrap();
        at = left.swap_remove(i);
        stops.push(at);
    }
    materialize(inst, oracle, depot, &stops, &[])
}

/// Nearest-depot assignment with a nearest-neighbor truck tour per depot.
pub fn nearest_neighbor_solution<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> Result<Solution<S>> {
    let groups = nearest_depot_groups(inst, oracle);
    let routes =
        groups.iter().map(|(&p, cs)| nearest_neighbor_route(inst, oracle, p, cs)).collect::<Result<Vec<_>>>()?;
    Ok(Solution::from_groups(routes))
}
