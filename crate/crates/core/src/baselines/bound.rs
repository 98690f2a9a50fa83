use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::roadnet::{neighbor_set, DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::settsp::{HeldKarp, SetCosts};

pub const EXACT_BOUND_MAX_CUSTOMERS: usize = 10;
pub const EXACT_BOUND_MAX_DEPOTS: usize = 3;
const THRESHOLD_ENUMERATION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundMode {
    /// Optimal truck tours that only need to reach each customer's
    /// half-range area, over every customer-to-depot split.
    ExactSmall,
    /// Per group, the farthest such area as a single round trip.
    Relaxed,
}

impl fmt::Display for LowerBoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerBoundMode::ExactSmall => "exact_small",
            LowerBoundMode::Relaxed => "relaxed",
        })
    }
}

impl FromStr for LowerBoundMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact_small" => Ok(LowerBoundMode::ExactSmall),
            "relaxed" => Ok(LowerBoundMode::Relaxed),
            _ => Err(format!("unknown bound mode {s:?} (expected exact_small or relaxed)")),
        }
    }
}

/// Entry points of each customer's half-range area: a truck route that
/// first reaches the area does so at a boundary vertex or at its depot.
fn entry_sets<S: Scalar>(inst: &Instance<S>, depot: usize) -> Vec<Vec<usize>> {
    let theta = inst.drone_range / S::lit(2.0);
    inst.customers
        .iter()
        .map(|&c| {
            let set = neighbor_set(inst, c, theta);
            let mut out = set.boundary.clone();
            if set.contains(depot) {
                out.push(depot);
            }
            out.push(c);
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect()
}

/// Vertices whose road distances the bounds need.
pub fn bound_sources<S: Scalar>(inst: &Instance<S>) -> Vec<usize> {
    let mut out: Vec<usize> = inst.depots.clone();
    for &p in &inst.depots {
        out.extend(entry_sets(inst, p).into_iter().flatten());
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A time no feasible solution can beat.
pub fn lower_bound<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>, mode: LowerBoundMode) -> Result<S> {
    if inst.depots.is_empty() {
        return Err(Error::InvalidInstance("no depots".into()));
    }
    match mode {
        LowerBoundMode::ExactSmall => exact_small(inst, oracle),
        LowerBoundMode::Relaxed => Ok(relaxed(inst, oracle)),
    }
}

fn exact_small<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> Result<S> {
    let (n, m) = (inst.customers.len(), inst.depots.len());
    if n > EXACT_BOUND_MAX_CUSTOMERS || m > EXACT_BOUND_MAX_DEPOTS {
        return Err(Error::CapsExceeded(format!(
            "exact_small handles at most {EXACT_BOUND_MAX_CUSTOMERS} customers and {EXACT_BOUND_MAX_DEPOTS} depots \
             (got {n} and {m}); use the relaxed bound"
        )));
    }
    let full = (1usize << n) - 1;
    // best[mask]: cheapest way for the depots seen so far to cover `mask`.
    let mut best: Vec<S> = vec![S::infinity(); full + 1];
    for (i, &p) in inst.depots.iter().enumerate() {
        let sets = entry_sets(inst, p);
        let costs = SetCosts::truck_only(inst, oracle, p, &inst.customers, &sets);
        let hk = HeldKarp::run(&costs, None)?;
        let tour: Vec<S> = (0..=full).map(|mask| hk.close(&costs, mask).0).collect();
        if i == 0 {
            best = tour;
            continue;
        }
        let prev = best.clone();
        for mask in 0..=full {
            let mut sub = mask;
            loop {
                let cand = prev[mask ^ sub] + tour[sub];
                if cand < best[mask] {
                    best[mask] = cand;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
    }
    Ok(best[full])
}

/// Cheapest depot round trip touching customer `c`'s half-range area.
fn round_trip<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>, p: usize, c: usize) -> S {
    let theta = inst.drone_range / S::lit(2.0);
    let set = neighbor_set(inst, c, theta);
    if set.contains(p) {
        return S::zero();
    }
    set.boundary
        .iter()
        .chain([&c])
        .map(|&v| (oracle.road(p, v) + oracle.road(v, p)) / inst.truck_speed)
        .fold(S::infinity(), S::min)
}

fn relaxed<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> S {
    let (n, m) = (inst.customers.len(), inst.depots.len());
    if n == 0 {
        return S::zero();
    }
    let rt: Vec<Vec<S>> =
        inst.depots.iter().map(|&p| inst.customers.iter().map(|&c| round_trip(inst, oracle, p, c)).collect()).collect();
    if ((n + 1) as f64).powi(m as i32) > THRESHOLD_ENUMERATION_LIMIT {
        return (0..n).map(|ci| (0..m).map(|pi| rt[pi][ci]).fold(S::infinity(), S::min)).fold(S::zero(), S::max);
    }
    // Each depot pays its largest assigned round trip; enumerate those caps.
    let options: Vec<Vec<S>> = rt
        .iter()
        .map(|row| {
            let mut v: Vec<S> = std::iter::once(S::zero()).chain(row.iter().copied()).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v.dedup();
            v
        })
        .collect();
    let mut pick = vec![0usize; m];
    let mut best = S::infinity();
    loop {
        let covered = (0..n).all(|ci| (0..m).any(|pi| rt[pi][ci] <= options[pi][pick[pi]]));
        if covered {
            let total = (0..m).map(|pi| options[pi][pick[pi]]).fold(S::zero(), |a, b| a + b);
            if total < best {
                best = total;
            }
        }
        let mut i = 0;
        while i < m {
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    best
}
