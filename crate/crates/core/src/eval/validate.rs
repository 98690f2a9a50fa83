use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::roadnet::Instance;
use crate::scalar::Scalar;
use crate::solution::Solution;

use super::timing::{flight_km, timing};

/// Declared and recomputed costs may differ by this much, in hours.
pub const COST_TOLERANCE_H: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingCode {
    ArcAdjacency,
    DepotEndpoints,
    CoverageMissing,
    CoverageDuplicate,
    UnknownCustomer,
    Range,
    AirborneCap,
    IndexOrder,
    DroneSlot,
    CostMismatch,
    TotalMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub code: FindingCode,
    /// Index into `Solution::groups`, when the finding is group-local.
    pub group: Option<usize>,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.group {
            Some(g) => write!(f, "[group {g}] {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    /// Distinct finding codes, sorted.
    pub fn codes(&self) -> Vec<FindingCode> {
        let mut codes: Vec<FindingCode> = self.findings.iter().map(|f| f.code).collect();
        codes.sort();
        codes.dedup();
        codes
    }

    pub fn messages(&self) -> Vec<String> {
        self.findings.iter().map(ToString::to_string).collect()
    }
}

/// Checks every feasibility rule and recomputes each group's cost.
pub fn validate_solution<S: Scalar>(inst: &Instance<S>, sol: &Solution<S>) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |code, group, message: String| out.push(Finding { code, group, message });
    let k = inst.drones_per_truck;
    let mut visits: BTreeMap<usize, usize> = inst.customers.iter().map(|&c| (c, 0)).collect();
    let mut on_route: BTreeMap<usize, bool> = inst.customers.iter().map(|&c| (c, false)).collect();

    for (gi, g) in sol.groups.iter().enumerate() {
        let g_idx = Some(gi);
        let path = &g.truck_route;
        let n = path.len();
        let mut structural = false;

        if !inst.depots.contains(&g.depot) {
            structural = true;
            push(FindingCode::DepotEndpoints, g_idx, format!("vertex {} is not a depot", g.depot));
        }
        if path.first() != Some(&g.depot) || path.last() != Some(&g.depot) {
            structural = true;
            push(FindingCode::DepotEndpoints, g_idx, format!("truck route must start and end at depot {}", g.depot));
        }
        if let Some(&bad) = path.iter().find(|&&v| !inst.network.contains(v)) {
            structural = true;
            push(FindingCode::ArcAdjacency, g_idx, format!("vertex {bad} is not in the network"));
        } else {
            for (i, w) in path.windows(2).enumerate() {
                if inst.network.arc_length(w[0], w[1]).is_none() {
                    structural = true;
                    push(
                        FindingCode::ArcAdjacency,
                        g_idx,
                        format!("no arc {}→{} between route indices {} and {}", w[0], w[1], i, i + 1),
                    );
                }
            }
        }
        for &v in path {
            if let Some(seen) = on_route.get_mut(&v) {
                *seen = true;
            }
        }

        let mut index_ok = true;
        for d in &g.deliveries {
            let tuple = format!("(x={}, c={}, y={})", d.takeoff_index, d.customer, d.landing_index);
            if d.landing_index >= n || d.takeoff_index > d.landing_index {
                index_ok = false;
                push(FindingCode::IndexOrder, g_idx, format!("delivery {tuple} needs takeoff ≤ landing < {n}"));
                continue;
            }
            match visits.get_mut(&d.customer) {
                Some(count) => *count += 1,
                None => {
                    push(
                        FindingCode::UnknownCustomer,
                        g_idx,
                        format!("delivery {tuple} targets vertex {} which is not a customer", d.customer),
                    );
                    continue;
                }
            }
            if !inst.network.contains(d.customer) || path.iter().any(|&v| !inst.network.contains(v)) {
                continue;
            }
            let f = flight_km(inst, path[d.takeoff_index], d.customer, path[d.landing_index]);
            if !f.le_tol(inst.drone_range) {
                push(
                    FindingCode::Range,
                    g_idx,
                    format!(
                        "delivery {tuple} flies {f:.6} km, exceeding range {} km by {:.6} km",
                        inst.drone_range,
                        f - inst.drone_range
                    ),
                );
            }
        }
        if !index_ok || path.iter().any(|&v| !inst.network.contains(v)) {
            continue;
        }

        let trace = timing(inst, g);
        if let Some((t, &count)) = trace.airborne.iter().enumerate().find(|(_, &a)| a > k) {
            push(FindingCode::AirborneCap, g_idx, format!("{count} drones airborne at route index {t}, limit {k}"));
        }
        let occupies = |x: usize, y: usize| if x == y { x..x + 1 } else { x..y };
        for (i, a) in g.deliveries.iter().enumerate() {
            for b in &g.deliveries[i + 1..] {
                if a.drone != b.drone {
                    continue;
                }
                let (ra, rb) = (occupies(a.takeoff_index, a.landing_index), occupies(b.takeoff_index, b.landing_index));
                if ra.start < rb.end && rb.start < ra.end {
                    push(
                        FindingCode::DroneSlot,
                        g_idx,
                        format!(
                            "drone {} serves customers {} and {} at overlapping times",
                            a.drone, a.customer, b.customer
                        ),
                    );
                }
            }
        }
        if !structural && (trace.cost - g.cost).abs().as_f64() > COST_TOLERANCE_H {
            push(
                FindingCode::CostMismatch,
                g_idx,
                format!("declared cost {} h but route takes {} h", g.cost, trace.cost),
            );
        }
    }

    for (&c, &count) in &visits {
        let count = if count > 0 { count } else { usize::from(on_route[&c]) };
        match count {
            0 => push(FindingCode::CoverageMissing, None, format!("customer {c} not visited")),
            1 => {}
            n => push(FindingCode::CoverageDuplicate, None, format!("customer {c} visited {n} times")),
        }
    }

    let sum: S = sol.groups.iter().map(|g| g.cost).sum();
    if (sum - sol.total_cost).abs().as_f64() > COST_TOLERANCE_H {
        push(
            FindingCode::TotalMismatch,
            None,
            format!("total cost {} h differs from group sum {} h", sol.total_cost, sum),
        );
    }
    ValidationReport { findings: out }
}
