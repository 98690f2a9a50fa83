//! Seeded synthetic instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::instance::{self, Instance};
use super::network::{Metric, RoadNetwork, Vertex};

pub const DEFAULT_BLOCK_KM: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkSpec {
    /// `rows x cols` lattice with bidirectional arcs of `block_km`.
    Grid { rows: usize, cols: usize, block_km: f64 },
    /// Uniform points in a `side_km` square joined when closer than
    /// `link_km`; components are then bridged by their closest pair.
    RandomGeometric { vertices: usize, side_km: f64, link_km: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub network: NetworkSpec,
    pub depots: usize,
    pub customers: usize,
    pub truck_speed_kmh: f64,
    pub drone_speed_kmh: f64,
    pub drone_range_km: f64,
    pub drones_per_truck: usize,
    pub theta_partition_km: Option<f64>,
}

impl GenSpec {
    /// Grid spec with default fleet parameters.
    pub fn grid(rows: usize, cols: usize, block_km: f64, depots: usize, customers: usize) -> Self {
        GenSpec {
            network: NetworkSpec::Grid { rows, cols, block_km },
            depots,
            customers,
            truck_speed_kmh: instance::DEFAULT_TRUCK_SPEED_KMH,
            drone_speed_kmh: instance::DEFAULT_DRONE_SPEED_KMH,
            drone_range_km: instance::DEFAULT_DRONE_RANGE_KM,
            drones_per_truck: instance::DEFAULT_DRONES_PER_TRUCK,
            theta_partition_km: None,
        }
    }

    pub fn random_geometric(vertices: usize, side_km: f64, link_km: f64, depots: usize, customers: usize) -> Self {
        GenSpec {
            network: NetworkSpec::RandomGeometric { vertices, side_km, link_km },
            ..Self::grid(0, 0, DEFAULT_BLOCK_KM, depots, customers)
        }
    }
}

fn grid_network<S: Scalar>(rows: usize, cols: usize, block: f64) -> RoadNetwork<S> {
    let id = |r: usize, c: usize| r * cols + c;
    let vertices = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| Vertex { id: id(r, c), x: S::lit(c as f64 * block), y: S::lit(r as f64 * block) })
        .collect();
    let mut arcs = Vec::new();
    let len = Some(S::lit(block));
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                arcs.push((id(r, c), id(r, c + 1), len));
                arcs.push((id(r, c + 1), id(r, c), len));
            }
            if r + 1 < rows {
                arcs.push((id(r, c), id(r + 1, c), len));
                arcs.push((id(r + 1, c), id(r, c), len));
            }
        }
    }
    RoadNetwork::new(vertices, arcs, Metric::Planar)
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn random_geometric_network<S: Scalar>(n: usize, side: f64, link: f64, rng: &mut ChaCha8Rng) -> RoadNetwork<S> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect();
    let dist = |a: usize, b: usize| (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1);
    let mut parent: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if dist(a, b) <= link {
                pairs.push((a, b));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    // Bridge every component to the one holding vertex 0 by its closest pair.
    loop {
        let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let Some(other) = roots.iter().copied().find(|&r| r != roots[0]) else {
            break;
        };
        let (a, b) = (0..n)
            .filter(|&a| roots[a] == roots[0])
            .flat_map(|a| (0..n).filter(|&b| roots[b] == other).map(move |b| (a, b)))
            .min_by(|&(a, b), &(c, d)| dist(a, b).total_cmp(&dist(c, d)).then((a, b).cmp(&(c, d))))
            .expect("both components nonempty");
        pairs.push((a.min(b), a.max(b)));
        parent[other] = roots[0];
    }
    let vertices = pts.iter().enumerate().map(|(id, &(x, y))| Vertex { id, x: S::lit(x), y: S::lit(y) }).collect();
    let arcs = pairs.into_iter().flat_map(|(a, b)| {
        let len = Some(S::lit(dist(a, b)));
        [(a, b, len), (b, a, len)]
    });
    RoadNetwork::new(vertices, arcs, Metric::Planar)
}

/// Builds a deterministic instance for `spec` and `seed`.
pub fn generate_instance<S: Scalar>(spec: &GenSpec, seed: u64) -> Result<Instance<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let network = match spec.network {
        NetworkSpec::Grid { rows, cols, block_km } => grid_network(rows, cols, block_km),
        NetworkSpec::RandomGeometric { vertices, side_km, link_km } => {
            random_geometric_network(vertices, side_km, link_km, &mut rng)
        }
    };
    let wanted = spec.depots + spec.customers;
    if wanted > network.len() {
        return Err(Error::Infeasible(format!(
            "{} depots + {} customers exceed the {} vertices of the network",
            spec.depots,
            spec.customers,
            network.len()
        )));
    }
    let picked = sample(&mut rng, network.len(), wanted).into_vec();
    let mut inst = Instance::new(network, picked[..spec.depots].to_vec(), picked[spec.depots..].to_vec());
    inst.truck_speed = S::lit(spec.truck_speed_kmh);
    inst.drone_speed = S::lit(spec.drone_speed_kmh);
    inst.drone_range = S::lit(spec.drone_range_km);
    inst.drones_per_truck = spec.drones_per_truck;
    inst.theta_partition = spec.theta_partition_km.map(S::lit);
    inst.seed = seed;
    Ok(inst)
}

/// Bidirectional path `0 - 1 - ... - (n-1)` along the x axis with depot 0 and
/// customer `n - 1`.
pub fn line_instance<S: Scalar>(n: usize, block_km: f64) -> Instance<S> {
    let vertices = (0..n).map(|i| Vertex { id: i, x: S::lit(i as f64 * block_km), y: S::zero() }).collect();
    let arcs = (0..n.saturating_sub(1)).flat_map(|i| [(i, i + 1, None), (i + 1, i, None)]);
    let network = RoadNetwork::new(vertices, arcs, Metric::Planar);
    Instance::new(network, vec![0], vec![n - 1])
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::roadnet::distance::road_distances;
    use crate::roadnet::io::instance_to_json;
    use crate::roadnet::validate::validate_instance;

    pub(crate) fn line_instance(n: usize, block: f64) -> Instance<f64> {
        super::line_instance(n, block)
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = GenSpec::grid(2, 2, DEFAULT_BLOCK_KM, 1, 1);
        let a: Instance<f64> = generate_instance(&spec, 7).unwrap();
        let b: Instance<f64> = generate_instance(&spec, 7).unwrap();
        assert_eq!(instance_to_json(&a), instance_to_json(&b));
    }

    #[test]
    fn grid_counts() {
        let spec = GenSpec::grid(20, 20, DEFAULT_BLOCK_KM, 5, 50);
        let inst: Instance<f64> = generate_instance(&spec, 1).unwrap();
        assert_eq!(inst.network.len(), 400);
        assert_eq!(inst.depots.len(), 5);
        assert_eq!(inst.customers.len(), 50);
        assert!(validate_instance(&inst).is_clean());
    }

    #[test]
    fn grid_corner_to_corner() {
        let spec = GenSpec::grid(3, 3, 0.1, 1, 1);
        let inst: Instance<f64> = generate_instance(&spec, 0).unwrap();
        let o = road_distances(&inst, [0]).unwrap();
        assert!((o.road(0, 8) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn too_many_points_is_an_error() {
        let spec = GenSpec::grid(2, 2, 0.1, 2, 3);
        assert!(matches!(generate_instance::<f64>(&spec, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn random_geometric_is_connected() {
        let spec = GenSpec::random_geometric(40, 2.0, 0.2, 2, 6);
        let inst: Instance<f64> = generate_instance(&spec, 11).unwrap();
        assert!(validate_instance(&inst).is_clean());
        let again: Instance<f64> = generate_instance(&spec, 11).unwrap();
        assert_eq!(instance_to_json(&inst), instance_to_json(&again));
    }
}
