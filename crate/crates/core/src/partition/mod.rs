//! Customer-to-depot assignment: nearest depot or spanning-tree split, under
//! plain road distance or a drone-aware set distance.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roadnet::{neighbor_set, DistanceOracle, Instance};
use crate::scalar::{Ordered, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    Nn,
    Mst,
    SetNn,
    #[default]
    SetMst,
}

impl PartitionMethod {
    pub const ALL: [PartitionMethod; 4] =
        [PartitionMethod::Nn, PartitionMethod::Mst, PartitionMethod::SetNn, PartitionMethod::SetMst];

    pub fn name(self) -> &'static str {
        match self {
            PartitionMethod::Nn => "nn",
            PartitionMethod::Mst => "mst",
            PartitionMethod::SetNn => "set_nn",
            PartitionMethod::SetMst => "set_mst",
        }
    }

    pub fn metric(self) -> MetaMetric {
        match self {
            PartitionMethod::Nn | PartitionMethod::Mst => MetaMetric::Node,
            PartitionMethod::SetNn | PartitionMethod::SetMst => MetaMetric::Set,
        }
    }

    pub fn is_mst(self) -> bool {
        matches!(self, PartitionMethod::Mst | PartitionMethod::SetMst)
    }
}

impl fmt::Display for PartitionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartitionMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PartitionMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown partition method {s:?} (expected nn, mst, set_nn or set_mst)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaMetric {
    /// Road distance between the two vertices.
    Node,
    /// Road distance between the best pair of drone-reachable vertices, with
    /// the drone legs converted to truck-equivalent kilometres.
    Set,
}

/// Customer groups keyed by depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub method: PartitionMethod,
    pub theta_km: f64,
    /// Every depot of the instance has a key; groups may be empty.
    pub groups: BTreeMap<usize, Vec<usize>>,
}

impl Assignment {
    pub fn group(&self, depot: usize) -> &[usize] {
        self.groups.get(&depot).map_or(&[], Vec::as_slice)
    }

    /// Checks that the groups partition the instance's customers over its depots.
    pub fn check<S: Scalar>(&self, inst: &Instance<S>) -> Result<()> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (&p, group) in &self.groups {
            if !inst.depots.contains(&p) {
                return Err(Error::InvalidInstance(format!("assignment key {p} is not a depot")));
            }
            for &c in group {
                if let Some(q) = seen.insert(c, p) {
                    return Err(Error::InvalidInstance(format!("customer {c} assigned to depots {q} and {p}")));
                }
                if !inst.is_customer(c) {
                    return Err(Error::InvalidInstance(format!("{c} is not a customer")));
                }
            }
        }
        if let Some(c) = inst.customers.iter().find(|c| !seen.contains_key(c)) {
            return Err(Error::InvalidInstance(format!("customer {c} is not assigned")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: "assignment".into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Distance between the neighbor sets of `a` and `b` (depots count as their
/// own singleton set), in truck-equivalent kilometres.
pub fn set_distance<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>, a: usize, b: usize, theta: S) -> S {
    let ball = |c: usize| {
        if inst.depots.contains(&c) {
            vec![c]
        } else {
            neighbor_set(inst, c, theta).members
        }
    };
    let (sa, sb) = (ball(a), ball(b));
    let mut best = S::infinity();
    for &v in &sa {
        for &w in &sb {
            let t = inst.euclid(a, v) / inst.drone_speed
                + oracle.road(v, w) / inst.truck_speed
                + inst.euclid(w, b) / inst.drone_speed;
            best = best.min(t);
        }
    }
    best * inst.truck_speed
}

/// Vertices whose road distances the meta graph needs.
pub fn meta_sources<S: Scalar>(inst: &Instance<S>, metric: MetaMetric, theta: S) -> Vec<usize> {
    let mut out: Vec<usize> = inst.depots.iter().chain(&inst.customers).copied().collect();
    if metric == MetaMetric::Set {
        for &c in &inst.customers {
            out.extend(neighbor_set(inst, c, theta).members);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Complete directed weight table over depots and customers.
#[derive(Debug, Clone)]
pub struct MetaGraph<S> {
    /// Depots first, then customers, in instance order.
    pub nodes: Vec<usize>,
    index: HashMap<usize, usize>,
    weights: Vec<S>,
}

impl<S: Scalar> MetaGraph<S> {
    pub fn weight(&self, a: usize, b: usize) -> S {
        self.weights[self.index[&a] * self.nodes.len() + self.index[&b]]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_meta_graph<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    metric: MetaMetric,
    theta: S,
) -> MetaGraph<S> {
    let nodes: Vec<usize> = inst.depots.iter().chain(&inst.customers).copied().collect();
    let index = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = nodes.len();
    let weights = match metric {
        MetaMetric::Node => nodes.iter().flat_map(|&a| nodes.iter().map(move |&b| oracle.road(a, b))).collect(),
        MetaMetric::Set => {
            let balls: Vec<Vec<usize>> = nodes
                .iter()
                .map(|&c| if inst.depots.contains(&c) { vec![c] } else { neighbor_set(inst, c, theta).members })
                .collect();
            let nv = inst.network.len();
            let rows: Vec<Vec<S>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let a = nodes[i];
                    // reach[w] = best time from a to vertex w via a drone hop then road.
                    let mut reach = vec![S::infinity(); nv];
                    for &v in &balls[i] {
                        let hop = inst.euclid(a, v) / inst.drone_speed;
                        let row = oracle.row(v).expect("set member covered by the oracle");
                        for (w, r) in reach.iter_mut().enumerate() {
                            *r = r.min(hop + row[w] / inst.truck_speed);
                        }
                    }
                    (0..n)
                        .map(|j| {
                            if i == j {
                                return S::zero();
                            }
                            let b = nodes[j];
                            balls[j]
                                .iter()
                                .map(|&w| reach[w] + inst.euclid(w, b) / inst.drone_speed)
                                .fold(S::infinity(), S::min)
                                * inst.truck_speed
                        })
                        .collect()
                })
                .collect();
            rows.concat()
        }
    };
    MetaGraph { nodes, index, weights }
}

fn empty_groups(depots: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    depots.iter().map(|&p| (p, Vec::new())).collect()
}

/// Each customer goes to the depot with the smallest `weight(p, c)`
/// (plus `weight(c, p)` when `round_trip`); ties go to the lower depot id.
pub fn partition_nn<S: Scalar>(
    meta: &MetaGraph<S>,
    depots: &[usize],
    customers: &[usize],
    round_trip: bool,
) -> BTreeMap<usize, Vec<usize>> {
    let mut groups = empty_groups(depots);
    for &c in customers {
        let dist = |p: usize| {
            let w = meta.weight(p, c);
            if round_trip {
                w + meta.weight(c, p)
            } else {
                w
            }
        };
        let best = depots
            .iter()
            .copied()
            .min_by(|&p, &q| dist(p).partial_cmp(&dist(q)).unwrap().then(p.cmp(&q)))
            .expect("at least one depot");
        groups.get_mut(&best).unwrap().push(c);
    }
    groups
}

/// Minimum spanning tree over depots and customers, cut at the heaviest
/// depot-to-depot path edge until every component holds one depot.
pub fn partition_mst<S: Scalar>(
    meta: &MetaGraph<S>,
    depots: &[usize],
    customers: &[usize],
) -> BTreeMap<usize, Vec<usize>> {
    let nodes: Vec<usize> = depots.iter().chain(customers).copied().collect();
    let n = nodes.len();
    let key = |i: usize, j: usize| {
        let (a, b) = (nodes[i], nodes[j]);
        let w = meta.weight(a, b).min(meta.weight(b, a));
        (Ordered(w), a.min(b), a.max(b))
    };
    let mut edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    edges.sort_by_key(|&(a, b)| key(a, b));
    let mut uf = UnionFind::<usize>::new(n);
    let mut tree: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    for (i, j) in edges {
        if uf.union(i, j) {
            tree.push((i, j));
        }
    }

    let is_depot: Vec<bool> = (0..n).map(|i| i < depots.len()).collect();
    loop {
        let mut adj = vec![Vec::new(); n];
        for (e, &(i, j)) in tree.iter().enumerate() {
            adj[i].push((j, e));
            adj[j].push((i, e));
        }
        // An edge lies on a depot-to-depot path iff both sides hold a depot.
        let mut cut: Option<usize> = None;
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            let mut order = vec![root];
            let mut parent = vec![(usize::MAX, usize::MAX); n];
            seen[root] = true;
            let mut k = 0;
            while k < order.len() {
                let u = order[k];
                k += 1;
                for &(w, e) in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = (u, e);
                        order.push(w);
                    }
                }
            }
            let mut below = vec![0usize; n];
            for &u in order.iter().rev() {
                below[u] += usize::from(is_depot[u]);
                if parent[u].0 != usize::MAX {
                    below[parent[u].0] += below[u];
                }
            }
            let total = below[root];
            for &u in &order[1..] {
                let e = parent[u].1;
                if below[u] >= 1 && total - below[u] >= 1 {
                    let (a, b) = tree[e];
                    if cut.is_none_or(|c| key(a, b) > key(tree[c].0, tree[c].1)) {
                        cut = Some(e);
                    }
                }
            }
        }
        match cut {
            Some(e) => {
                tree.swap_remove(e);
            }
            None => break,
        }
    }

    let mut uf = UnionFind::<usize>::new(n);
    for &(i, j) in &tree {
        uf.union(i, j);
    }
    let owner: HashMap<usize, usize> = (0..depots.len()).map(|d| (uf.find(d), depots[d])).collect();
    let mut groups = empty_groups(depots);
    for (ci, &c) in customers.iter().enumerate() {
        let p = owner[&uf.find(depots.len() + ci)];
        groups.get_mut(&p).unwrap().push(c);
    }
    groups
}

/// Phase-1 assignment with the given method at partition radius `theta`.
pub fn partition<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    method: PartitionMethod,
    theta: S,
) -> Result<Assignment> {
    if inst.depots.is_empty() {
        return Err(Error::InvalidInstance("no depots".into()));
    }
    let meta = build_meta_graph(inst, oracle, method.metric(), theta);
    let groups = if method.is_mst() {
        partition_mst(&meta, &inst.depots, &inst.customers)
    } else {
        partition_nn(&meta, &inst.depots, &inst.customers, false)
    };
    Ok(Assignment { method, theta_km: theta.as_f64(), groups })
}
