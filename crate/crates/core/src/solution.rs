//! Routes and solutions shared by every solver.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered customers served by the truck group of `depot`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitOrder {
    pub depot: usize,
    pub order: Vec<usize>,
}

/// One drone sortie: takes off at route index `takeoff_index`, serves
/// `customer`, lands at `landing_index` on the same truck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Delivery {
    pub takeoff_index: usize,
    pub customer: usize,
    pub landing_index: usize,
    pub drone: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TruckGroupRoute<S> {
    pub depot: usize,
    pub truck_route: Vec<usize>,
    pub deliveries: Vec<Delivery>,
    #[serde(rename = "cost_h")]
    pub cost: S,
}

impl<S: Scalar> TruckGroupRoute<S> {
    /// Route that never leaves the depot.
    pub fn trivial(depot: usize) -> Self {
        TruckGroupRoute { depot, truck_route: vec![depot], deliveries: Vec::new(), cost: S::zero() }
    }

    /// Sorts deliveries by takeoff and gives each the lowest-numbered drone
    /// that is back on the truck by then. Returns the number of drones used.
    pub fn assign_drones(&mut self) -> usize {
        self.deliveries.sort_unstable_by_key(|d| (d.takeoff_index, d.landing_index, d.customer));
        let mut busy_until: Vec<usize> = Vec::new();
        for d in &mut self.deliveries {
            let end = if d.takeoff_index == d.landing_index { d.takeoff_index + 1 } else { d.landing_index };
            d.drone = match busy_until.iter().position(|&b| b <= d.takeoff_index) {
                Some(slot) => slot,
                None => {
                    busy_until.push(0);
                    busy_until.len() - 1
                }
            };
            busy_until[d.drone] = end;
        }
        busy_until.len()
    }

    /// Customers served by a drone.
    pub fn drone_customers(&self) -> impl Iterator<Item = usize> + '_ {
        self.deliveries.iter().map(|d| d.customer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Solution<S> {
    pub groups: Vec<TruckGroupRoute<S>>,
    #[serde(rename = "total_cost_h")]
    pub total_cost: S,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl<S: Scalar> Solution<S> {
    /// Wraps groups and sets the total to the sum of their costs.
    pub fn from_groups(groups: Vec<TruckGroupRoute<S>>) -> Self {
        let total_cost = groups.iter().map(|g| g.cost).sum();
        Solution { groups, total_cost, meta: Map::new() }
    }

    pub fn group(&self, depot: usize) -> Option<&TruckGroupRoute<S>> {
        self.groups.iter().find(|g| g.depot == depot)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}
