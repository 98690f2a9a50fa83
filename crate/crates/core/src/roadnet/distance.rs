//! Shortest road distances from a declared set of sources.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Ordered, Scalar};

use super::instance::Instance;
use super::network::RoadNetwork;

/// Dense road-distance rows for every source, plus lazily cached reverse rows
/// used to expand legs into explicit vertex paths.
#[derive(Debug)]
pub struct DistanceOracle<S> {
    sources: Vec<usize>,
    row_of: Vec<Option<usize>>,
    rows: Vec<Vec<S>>,
    reverse: Mutex<HashMap<usize, Arc<Vec<S>>>>,
}

/// Single-source Dijkstra over outgoing (`forward`) or incoming arcs.
pub(crate) fn dijkstra<S: Scalar>(net: &RoadNetwork<S>, source: usize, forward: bool) -> Vec<S> {
    let mut dist = vec![S::infinity(); net.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = S::zero();
    heap.push(Reverse((Ordered(S::zero()), source)));
    while let Some(Reverse((Ordered(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        let arcs = if forward { net.out_arcs(u) } else { net.in_arcs(u) };
        for &(w, len) in arcs {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((Ordered(nd), w)));
            }
        }
    }
    dist
}

/// Computes road distances from each vertex in `sources` to every vertex.
///
/// Duplicate sources are ignored. Fails on the first (source, target) pair
/// without a directed path, in ascending order.
pub fn road_distances<S: Scalar>(
    inst: &Instance<S>,
    sources: impl IntoIterator<Item = usize>,
) -> Result<DistanceOracle<S>> {
    let net = &inst.network;
    let mut sources: Vec<usize> = sources.into_iter().collect();
    sources.sort_unstable();
    sources.dedup();
    if let Some(&bad) = sources.iter().find(|&&s| !net.contains(s)) {
        return Err(Error::OutOfRange(format!("source vertex {bad} not in network")));
    }
    let rows: Vec<Vec<S>> = sources.par_iter().map(|&s| dijkstra(net, s, true)).collect();
    for (&s, row) in sources.iter().zip(&rows) {
        if let Some(t) = row.iter().position(|d| d.is_infinite()) {
            return Err(Error::Unreachable { from: s, to: t });
        }
    }
    let mut row_of = vec![None; net.len()];
    for (i, &s) in sources.iter().enumerate() {
        row_of[s] = Some(i);
    }
    Ok(DistanceOracle { sources, row_of, rows, reverse: Mutex::new(HashMap::new()) })
}

impl<S: Scalar> DistanceOracle<S> {
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn covers(&self, u: usize) -> bool {
        self.row_of.get(u).is_some_and(Option::is_some)
    }

    /// Distances from `u` to every vertex, if `u` is a source.
    pub fn row(&self, u: usize) -> Option<&[S]> {
        self.row_of.get(u).copied().flatten().map(|i| self.rows[i].as_slice())
    }

    pub fn try_road(&self, u: usize, v: usize) -> Result<S> {
        let row = self.row(u).ok_or(Error::NotASource(u))?;
        row.get(v).copied().ok_or_else(|| Error::OutOfRange(format!("vertex {v} not in network")))
    }

    /// Road distance `u -> v` in km.
    ///
    /// # Panics
    /// If `u` is not a source.
    #[inline]
    pub fn road(&self, u: usize, v: usize) -> S {
        match self.row_of[u] {
            Some(i) => self.rows[i][v],
            None => panic!("vertex {u} is not a distance source"),
        }
    }

    fn reverse_row(&self, net: &RoadNetwork<S>, v: usize) -> Arc<Vec<S>> {
        let mut cache = self.reverse.lock().expect("reverse cache poisoned");
        cache.entry(v).or_insert_with(|| Arc::new(dijkstra(net, v, false))).clone()
    }

    /// Lexicographically smallest among the shortest `u -> v` vertex paths,
    /// both endpoints included.
    pub fn path(&self, net: &RoadNetwork<S>, u: usize, v: usize) -> Result<Vec<usize>> {
        let to_v = self.reverse_row(net, v);
        if to_v[u].is_infinite() {
            return Err(Error::Unreachable { from: u, to: v });
        }
        let mut path = vec![u];
        let mut visited = vec![false; net.len()];
        visited[u] = true;
        let mut cur = u;
        while cur != v {
            let remaining = to_v[cur];
            let next = net
                .out_arcs(cur)
                .iter()
                .filter(|&&(w, len)| !visited[w] && (len + to_v[w]).approx_eq(remaining))
                .map(|&(w, _)| w)
                .min()
                .ok_or(Error::Unreachable { from: cur, to: v })?;
            visited[next] = true;
            path.push(next);
            cur = next;
        }
        Ok(path)
    }
}
