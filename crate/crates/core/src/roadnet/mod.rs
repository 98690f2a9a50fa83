//! Road networks, instances, distances and neighbor sets.

mod distance;
mod generate;
mod instance;
mod io;
mod neighbor;
mod network;
mod validate;

pub use distance::road_distances;
pub use distance::DistanceOracle;
pub use generate::{generate_instance, line_instance, GenSpec, NetworkSpec, DEFAULT_BLOCK_KM};
pub use instance::{
    Instance, DEFAULT_DRONES_PER_TRUCK, DEFAULT_DRONE_RANGE_KM, DEFAULT_DRONE_SPEED_KMH, DEFAULT_TRUCK_SPEED_KMH,
};
pub use io::{instance_to_json, load_instance, parse_instance, save_instance};
pub use neighbor::{boundary_of, neighbor_set, NeighborSet};
pub use network::{Metric, RoadArc, RoadNetwork, Vertex};
pub use validate::{strong_connectivity_witness, validate_instance, InstanceFinding, InstanceIssue, InstanceReport};
