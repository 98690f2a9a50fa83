use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// How vertex coordinates are turned into straight-line distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `x`, `y` are kilometres on a plane.
    #[default]
    Planar,
    /// `x` is longitude and `y` latitude, in degrees.
    Haversine,
}

const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<S> {
    pub id: usize,
    pub x: S,
    pub y: S,
}

/// A directed road segment.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadArc<S> {
    pub tail: usize,
    pub head: usize,
    pub length: S,
}

/// Directed road graph with compressed forward and reverse adjacency.
///
/// Construction never fails: arcs that reference unknown vertices are kept in
/// [`RoadNetwork::arcs`] (so validation can report them) but left out of the
/// adjacency lists.
#[derive(Debug, Clone)]
pub struct RoadNetwork<S> {
    vertices: Vec<Vertex<S>>,
    arcs: Vec<RoadArc<S>>,
    metric: Metric,
    out_start: Vec<usize>,
    out_adj: Vec<(usize, S)>,
    in_start: Vec<usize>,
    in_adj: Vec<(usize, S)>,
}

impl<S: Scalar> RoadNetwork<S> {
    /// Builds the network. Missing arc lengths default to the straight-line
    /// distance between the endpoints.
    pub fn new(
        mut vertices: Vec<Vertex<S>>,
        arcs: impl IntoIterator<Item = (usize, usize, Option<S>)>,
        metric: Metric,
    ) -> Self {
        vertices.sort_by_key(|v| v.id);
        let n = vertices.len();
        let coord = |id: usize| vertices.get(id).filter(|v| v.id == id).map(|v| (v.x, v.y));
        let arcs: Vec<RoadArc<S>> = arcs
            .into_iter()
            .map(|(tail, head, length)| {
                let length = length.unwrap_or_else(|| match (coord(tail), coord(head)) {
                    (Some(a), Some(b)) => metric_distance(metric, a, b),
                    _ => S::zero(),
                });
                RoadArc { tail, head, length }
            })
            .collect();

        let valid = |a: &&RoadArc<S>| a.tail < n && a.head < n;
        let mut fwd: Vec<&RoadArc<S>> = arcs.iter().filter(valid).collect();
        fwd.sort_by_key(|a| (a.tail, a.head));
        let mut out_start = vec![0; n + 1];
        for a in &fwd {
            out_start[a.tail + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
        }
        let out_adj = fwd.iter().map(|a| (a.head, a.length)).collect();

        let mut rev: Vec<&RoadArc<S>> = arcs.iter().filter(valid).collect();
        rev.sort_by_key(|a| (a.head, a.tail));
        let mut in_start = vec![0; n + 1];
        for a in &rev {
            in_start[a.head + 1] += 1;
        }
        for i in 0..n {
            in_start[i + 1] += in_start[i];
        }
        let in_adj = rev.iter().map(|a| (a.tail, a.length)).collect();

        RoadNetwork { vertices, arcs, metric, out_start, out_adj, in_start, in_adj }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex<S>] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[RoadArc<S>] {
        &self.arcs
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.vertices.len()
    }

    pub fn coords(&self, v: usize) -> (S, S) {
        let p = &self.vertices[v];
        (p.x, p.y)
    }

    /// Straight-line distance `d(u, v)` in km.
    pub fn euclid(&self, u: usize, v: usize) -> S {
        metric_distance(self.metric, self.coords(u), self.coords(v))
    }

    /// Outgoing `(head, length)` pairs of `v`, sorted by head.
    pub fn out_arcs(&self, v: usize) -> &[(usize, S)] {
        &self.out_adj[self.out_start[v]..self.out_start[v + 1]]
    }

    /// Incoming `(tail, length)` pairs of `v`, sorted by tail.
    pub fn in_arcs(&self, v: usize) -> &[(usize, S)] {
        &self.in_adj[self.in_start[v]..self.in_start[v + 1]]
    }

    /// Length of the shortest arc `u -> v`, if any.
    pub fn arc_length(&self, u: usize, v: usize) -> Option<S> {
        if !self.contains(u) || !self.contains(v) {
            return None;
        }
        let out = self.out_arcs(u);
        let lo = out.partition_point(|&(h, _)| h < v);
        out[lo..].iter().take_while(|&&(h, _)| h == v).map(|&(_, l)| l).reduce(S::min)
    }

    /// Every vertex joined to `v` by an arc in either direction.
    pub fn adjacent(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_arcs(v).iter().chain(self.in_arcs(v)).map(|&(w, _)| w)
    }
}

pub(crate) fn metric_distance<S: Scalar>(metric: Metric, a: (S, S), b: (S, S)) -> S {
    match metric {
        Metric::Planar => (a.0 - b.0).hypot(a.1 - b.1),
        Metric::Haversine => {
            let rad = S::lit(std::f64::consts::PI / 180.0);
            let (lon1, lat1) = (a.0 * rad, a.1 * rad);
            let (lon2, lat2) = (b.0 * rad, b.1 * rad);
            let two = S::lit(2.0);
            let h = ((lat2 - lat1) / two).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / two).sin().powi(2);
            two * S::lit(EARTH_RADIUS_KM) * h.sqrt().min(S::one()).asin()
        }
    }
}
