use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::scalar::Scalar;

use super::instance::Instance;
use super::network::RoadNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstanceIssue {
    DuplicateVertexId,
    NonDenseVertexIds,
    UnknownArcEndpoint,
    SelfLoop,
    ArcShorterThanStraightLine,
    NotStronglyConnected,
    UnknownVertex,
    DuplicateDepot,
    DuplicateCustomer,
    DepotCustomerOverlap,
    MissingDepot,
    NonPositiveSpeed,
    NegativeRange,
    NegativeTheta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFinding {
    pub code: InstanceIssue,
    pub message: String,
}

impl fmt::Display for InstanceFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Diagnostics for an instance; empty means every invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InstanceReport {
    pub findings: Vec<InstanceFinding>,
}

impl InstanceReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, code: InstanceIssue) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    fn push(&mut self, code: InstanceIssue, message: String) {
        self.findings.push(InstanceFinding { code, message });
    }
}

/// Checks every structural and parametric invariant of an instance.
pub fn validate_instance<S: Scalar>(inst: &Instance<S>) -> InstanceReport {
    let mut report = InstanceReport::default();
    check_network(&inst.network, &mut report);

    let net = &inst.network;
    for (role, list, dup_code) in [
        ("depot", &inst.depots, InstanceIssue::DuplicateDepot),
        ("customer", &inst.customers, InstanceIssue::DuplicateCustomer),
    ] {
        let mut seen = HashSet::new();
        for &v in list {
            if !net.contains(v) {
                report.push(InstanceIssue::UnknownVertex, format!("{role} {v} is not a vertex of the network"));
            }
            if !seen.insert(v) {
                report.push(dup_code, format!("{role} {v} listed more than once"));
            }
        }
    }
    let depots: HashSet<usize> = inst.depots.iter().copied().collect();
    for &c in &inst.customers {
        if depots.contains(&c) {
            report.push(
                InstanceIssue::DepotCustomerOverlap,
                format!("depots and customers must be disjoint: vertex {c} is both"),
            );
        }
    }
    if inst.depots.is_empty() && !inst.customers.is_empty() {
        report.push(InstanceIssue::MissingDepot, "at least one depot is required to serve customers".into());
    }

    if !(inst.truck_speed > S::zero()) {
        report.push(InstanceIssue::NonPositiveSpeed, format!("truck_speed must be > 0 (got {})", inst.truck_speed));
    }
    if !(inst.drone_speed > S::zero()) {
        report.push(InstanceIssue::NonPositiveSpeed, format!("drone_speed must be > 0 (got {})", inst.drone_speed));
    }
    if !(inst.drone_range >= S::zero()) {
        report.push(InstanceIssue::NegativeRange, format!("drone_range must be ≥ 0 (got {})", inst.drone_range));
    }
    if let Some(theta) = inst.theta_partition {
        if !(theta >= S::zero()) {
            report.push(InstanceIssue::NegativeTheta, format!("theta_partition must be ≥ 0 (got {theta})"));
        }
    }
    report
}

fn check_network<S: Scalar>(net: &RoadNetwork<S>, report: &mut InstanceReport) {
    let mut ids_ok = true;
    for (pos, v) in net.vertices().iter().enumerate() {
        if pos > 0 && net.vertices()[pos - 1].id == v.id {
            report.push(InstanceIssue::DuplicateVertexId, format!("vertex id {} appears more than once", v.id));
            ids_ok = false;
        } else if v.id != pos && ids_ok {
            report.push(
                InstanceIssue::NonDenseVertexIds,
                format!("vertex ids must be dense 0..{}; found {} at position {pos}", net.len(), v.id),
            );
            ids_ok = false;
        }
    }

    for a in net.arcs() {
        if !net.contains(a.tail) || !net.contains(a.head) {
            report.push(
                InstanceIssue::UnknownArcEndpoint,
                format!("arc {}→{} references a missing vertex", a.tail, a.head),
            );
            continue;
        }
        if a.tail == a.head {
            report.push(InstanceIssue::SelfLoop, format!("self-loop arc at vertex {}", a.tail));
            continue;
        }
        if !ids_ok {
            continue;
        }
        let straight = net.euclid(a.tail, a.head);
        if !straight.le_tol(a.length) {
            report.push(
                InstanceIssue::ArcShorterThanStraightLine,
                format!("arc {}→{} has length {} below straight-line distance {}", a.tail, a.head, a.length, straight),
            );
        }
    }

    if ids_ok && net.len() > 1 {
        if let Some((from, to)) = strong_connectivity_witness(net) {
            report.push(InstanceIssue::NotStronglyConnected, format!("not strongly connected: no path {from}→{to}"));
        }
    }
}

/// Returns a pair `(from, to)` with no directed path, if the graph is not
/// strongly connected. Pairs always involve vertex 0; the largest unreachable
/// id is reported.
pub fn strong_connectivity_witness<S: Scalar>(net: &RoadNetwork<S>) -> Option<(usize, usize)> {
    let reach = |forward: bool| {
        let mut seen = vec![false; net.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            let next = if forward { net.out_arcs(v) } else { net.in_arcs(v) };
            for &(w, _) in next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    if let Some(v) = reach(true).iter().rposition(|s| !s) {
        return Some((0, v));
    }
    reach(false).iter().rposition(|s| !s).map(|v| (v, 0))
}
