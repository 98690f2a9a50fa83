//! Instance JSON reading and writing.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::instance::{self, Instance};
use super::network::{Metric, RoadNetwork, Vertex};
use super::validate::validate_instance;

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct InstanceFile<S> {
    nodes: Vec<NodeRec<S>>,
    edges: Vec<EdgeRec<S>>,
    depots: Vec<usize>,
    customers: Vec<usize>,
    #[serde(default)]
    params: ParamsRec<S>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct NodeRec<S> {
    id: usize,
    x: S,
    y: S,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct EdgeRec<S> {
    u: usize,
    v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<S>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct ParamsRec<S> {
    #[serde(default = "default_truck_speed")]
    truck_speed_kmh: S,
    #[serde(default = "default_drone_speed")]
    drone_speed_kmh: S,
    #[serde(default = "default_drone_range")]
    drone_range_km: S,
    #[serde(default = "default_drones")]
    drones_per_truck: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_partition_km: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "is_planar")]
    metric: Metric,
}

impl<S: Scalar> Default for ParamsRec<S> {
    fn default() -> Self {
        ParamsRec {
            truck_speed_kmh: default_truck_speed(),
            drone_speed_kmh: default_drone_speed(),
            drone_range_km: default_drone_range(),
            drones_per_truck: default_drones(),
            theta_partition_km: None,
            seed: None,
            metric: Metric::Planar,
        }
    }
}

fn default_truck_speed<S: Scalar>() -> S {
    S::lit(instance::DEFAULT_TRUCK_SPEED_KMH)
}
fn default_drone_speed<S: Scalar>() -> S {
    S::lit(instance::DEFAULT_DRONE_SPEED_KMH)
}
fn default_drone_range<S: Scalar>() -> S {
    S::lit(instance::DEFAULT_DRONE_RANGE_KM)
}
fn default_drones() -> i64 {
    instance::DEFAULT_DRONES_PER_TRUCK as i64
}
fn is_planar(m: &Metric) -> bool {
    *m == Metric::Planar
}

/// Parses instance JSON without checking invariants.
pub fn parse_instance<S: Scalar>(text: &str, context: &str) -> Result<Instance<S>> {
    let file: InstanceFile<S> = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.params.drones_per_truck < 0 {
        return Err(Error::InvalidInstance(format!(
            "drones_per_truck must be ≥ 0 (got {})",
            file.params.drones_per_truck
        )));
    }
    let vertices = file.nodes.into_iter().map(|n| Vertex { id: n.id, x: n.x, y: n.y }).collect();
    let network = RoadNetwork::new(vertices, file.edges.into_iter().map(|e| (e.u, e.v, e.length)), file.params.metric);
    Ok(Instance {
        network,
        depots: file.depots,
        customers: file.customers,
        truck_speed: file.params.truck_speed_kmh,
        drone_speed: file.params.drone_speed_kmh,
        drone_range: file.params.drone_range_km,
        drones_per_truck: file.params.drones_per_truck as usize,
        theta_partition: file.params.theta_partition_km,
        seed: file.params.seed.unwrap_or(0),
    })
}

/// Reads, parses and validates an instance file.
pub fn load_instance<S: Scalar>(path: impl AsRef<Path>) -> Result<Instance<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let inst = parse_instance(&text, &path.display().to_string())?;
    let report = validate_instance(&inst);
    if !report.is_clean() {
        let msgs: Vec<String> = report.findings.iter().map(|f| f.message.clone()).collect();
        return Err(Error::InvalidInstance(msgs.join("; ")));
    }
    Ok(inst)
}

/// Serializes an instance; arc lengths are always written explicitly.
pub fn instance_to_json<S: Scalar>(inst: &Instance<S>) -> String {
    let file = InstanceFile {
        nodes: inst.network.vertices().iter().map(|v| NodeRec { id: v.id, x: v.x, y: v.y }).collect(),
        edges: inst.network.arcs().iter().map(|a| EdgeRec { u: a.tail, v: a.head, length: Some(a.length) }).collect(),
        depots: inst.depots.clone(),
        customers: inst.customers.clone(),
        params: ParamsRec {
            truck_speed_kmh: inst.truck_speed,
            drone_speed_kmh: inst.drone_speed,
            drone_range_km: inst.drone_range,
            drones_per_truck: inst.drones_per_truck as i64,
            theta_partition_km: inst.theta_partition,
            seed: Some(inst.seed),
            metric: inst.network.metric(),
        },
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}

pub fn save_instance<S: Scalar>(inst: &Instance<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(inst)).map_err(|e| Error::io(path, e))
}
