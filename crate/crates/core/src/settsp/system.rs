use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::roadnet::{boundary_of, neighbor_set, Instance, NeighborSet};
use crate::scalar::Scalar;

/// Which preprocessing shrinks the sets before the tour search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SetMode {
    /// Raw neighbor sets.
    Full,
    /// Vertices shared by several sets go to the nearest customer only.
    NoOverlap,
    /// Tours enter and leave sets through boundary vertices only.
    BoundaryOnly,
    /// Overlap removal followed by boundary restriction.
    #[default]
    Both,
}

impl SetMode {
    pub const ALL: [SetMode; 4] = [SetMode::Full, SetMode::NoOverlap, SetMode::BoundaryOnly, SetMode::Both];

    pub fn name(self) -> &'static str {
        match self {
            SetMode::Full => "full",
            SetMode::NoOverlap => "no_overlap",
            SetMode::BoundaryOnly => "boundary_only",
            SetMode::Both => "both",
        }
    }

    pub fn removes_overlap(self) -> bool {
        matches!(self, SetMode::NoOverlap | SetMode::Both)
    }

    pub fn boundary(self) -> bool {
        matches!(self, SetMode::BoundaryOnly | SetMode::Both)
    }
}

impl fmt::Display for SetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown set mode {s:?} (expected full, no_overlap, boundary_only or both)"))
    }
}

/// Location sets of one truck group: one per customer plus the depot.
#[derive(Debug, Clone, Serialize)]
pub struct SetSystem<S> {
    pub depot: usize,
    pub customers: Vec<usize>,
    pub mode: SetMode,
    pub theta: S,
    /// Per customer, after overlap removal when enabled; `boundary` is
    /// recomputed on the reduced members.
    pub sets: Vec<NeighborSet<S>>,
    /// Per customer, the vertices a tour may enter or leave through.
    pub retained: Vec<Vec<usize>>,
    /// Vertex to owning customer; filled only when overlap is removed.
    pub ownership: BTreeMap<usize, usize>,
}

impl<S: Scalar> SetSystem<S> {
    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    /// Every vertex that appears in some set, plus the depot.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.sets.iter().flat_map(|s| s.members.iter().copied()).collect();
        out.push(self.depot);
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn max_retained(&self) -> usize {
        self.retained.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Builds the sets `S_c(r / 2)` for the customers of one group.
pub fn build_set_system<S: Scalar>(
    inst: &Instance<S>,
    depot: usize,
    customers: &[usize],
    range: S,
    mode: SetMode,
) -> SetSystem<S> {
    let theta = range / S::lit(2.0);
    let mut sets: Vec<NeighborSet<S>> = customers.iter().map(|&c| neighbor_set(inst, c, theta)).collect();
    let mut ownership = BTreeMap::new();

    if mode.removes_overlap() {
        let mut claims: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for s in &sets {
            for &v in &s.members {
                claims.entry(v).or_default().push(s.center);
            }
        }
        for (v, owners) in claims {
            let owner = if customers.contains(&v) {
                v
            } else {
                *owners
                    .iter()
                    .min_by(|&&a, &&b| {
                        let (da, db) = (inst.euclid(v, a), inst.euclid(v, b));
                        if da.approx_eq(db) {
                            a.cmp(&b)
                        } else {
                            da.partial_cmp(&db).unwrap()
                        }
                    })
                    .expect("claimed by at least one set")
            };
            ownership.insert(v, owner);
        }
        for s in &mut sets {
            s.members.retain(|v| ownership[v] == s.center);
            s.boundary = boundary_of(&inst.network, &s.members, s.center, theta);
        }
    }

    let retained = sets
        .iter()
        .map(|s| {
            // A set spanning its whole component has no boundary to pass through.
            if mode.boundary() && !s.boundary.is_empty() {
                s.boundary.clone()
            } else {
                s.members.clone()
            }
        })
        .collect();
    SetSystem { depot, customers: customers.to_vec(), mode, theta, sets, retained, ownership }
}
