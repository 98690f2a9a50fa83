use crate::scalar::Scalar;

use super::network::RoadNetwork;

pub const DEFAULT_TRUCK_SPEED_KMH: f64 = 30.0;
pub const DEFAULT_DRONE_SPEED_KMH: f64 = 48.0;
pub const DEFAULT_DRONE_RANGE_KM: f64 = 1.5;
pub const DEFAULT_DRONES_PER_TRUCK: usize = 2;

/// A routing problem: road graph, depots, customers and fleet parameters.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    pub network: RoadNetwork<S>,
    pub depots: Vec<usize>,
    pub customers: Vec<usize>,
    /// km/h
    pub truck_speed: S,
    /// km/h
    pub drone_speed: S,
    /// Maximum flight distance of one sortie, km.
    pub drone_range: S,
    pub drones_per_truck: usize,
    /// Neighbor-set radius for customer assignment; `None` means `drone_range / 2`.
    pub theta_partition: Option<S>,
    pub seed: u64,
}

impl<S: Scalar> Instance<S> {
    /// An instance with the default fleet parameters.
    pub fn new(network: RoadNetwork<S>, depots: Vec<usize>, customers: Vec<usize>) -> Self {
        Instance {
            network,
            depots,
            customers,
            truck_speed: S::lit(DEFAULT_TRUCK_SPEED_KMH),
            drone_speed: S::lit(DEFAULT_DRONE_SPEED_KMH),
            drone_range: S::lit(DEFAULT_DRONE_RANGE_KM),
            drones_per_truck: DEFAULT_DRONES_PER_TRUCK,
            theta_partition: None,
            seed: 0,
        }
    }

    pub fn euclid(&self, u: usize, v: usize) -> S {
        self.network.euclid(u, v)
    }

    /// Radius used by the assignment phase.
    pub fn partition_theta(&self) -> S {
        self.theta_partition.unwrap_or_else(|| self.drone_range / S::lit(2.0))
    }

    /// Whether a sortie `takeoff -> customer -> landing` fits in the range.
    pub fn sortie_feasible(&self, takeoff: usize, customer: usize, landing: usize) -> bool {
        (self.euclid(takeoff, customer) + self.euclid(customer, landing)).le_tol(self.drone_range)
    }

    pub fn is_customer(&self, v: usize) -> bool {
        self.customers.contains(&v)
    }

    pub fn with_drones(mut self, k: usize) -> Self {
        self.drones_per_truck = k;
        self
    }

    pub fn with_drone_speed(mut self, kmh: S) -> Self {
        self.drone_speed = kmh;
        self
    }

    pub fn with_drone_range(mut self, km: S) -> Self {
        self.drone_range = km;
        self
    }
}
