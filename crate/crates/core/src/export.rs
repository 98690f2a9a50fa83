//! GeoJSON rendering of instances and solutions.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::roadnet::Instance;
use crate::scalar::Scalar;
use crate::solution::Solution;

fn point<S: Scalar>(inst: &Instance<S>, v: usize) -> Value {
    let (x, y) = inst.network.coords(v);
    json!([x.as_f64(), y.as_f64()])
}

/// Feature collection with one line per truck route and per drone sortie,
/// plus a point for every depot and customer.
pub fn geojson_value<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>) -> Value {
    let mut features = Vec::new();
    for g in &sol.groups {
        let coords: Vec<Value> = g.truck_route.iter().map(|&v| point(inst, v)).collect();
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {"role": "truck", "depot": g.depot, "cost_h": g.cost.as_f64()},
        }));
        for d in &g.deliveries {
            let path = [g.truck_route[d.takeoff_index], d.customer, g.truck_route[d.landing_index]];
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": path.iter().map(|&v| point(inst, v)).collect::<Vec<_>>()},
                "properties": {"role": "drone", "depot": g.depot, "customer": d.customer, "drone": d.drone},
            }));
        }
    }
    for (role, list) in [("depot", &inst.depots), ("customer", &inst.customers)] {
        for &v in list {
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": point(inst, v)},
                "properties": {"role": role, "id": v},
            }));
        }
    }
    json!({"type": "FeatureCollection", "features": features})
}

pub fn export_geojson<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&geojson_value(inst, sol)).expect("geojson serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
