use serde::Serialize;

use crate::scalar::Scalar;
use crate::solution::Solution;

/// Relative saving of `b` over `a`, in percent of `a`. `None` when `a` is 0.
pub fn delta_percent<S: Scalar>(cost_a: S, cost_b: S) -> Option<f64> {
    let a = cost_a.as_f64();
    (a != 0.0).then(|| (a - cost_b.as_f64()) / a * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDelta {
    pub depot: usize,
    pub delta_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub delta_percent: Option<f64>,
    pub groups: Vec<GroupDelta>,
}

/// Compares two solutions of the same instance, matching groups by depot.
pub fn compare<S: Scalar>(a: &Solution<S>, b: &Solution<S>) -> Comparison {
    let groups = a
        .groups
        .iter()
        .map(|ga| GroupDelta {
            depot: ga.depot,
            delta_percent: b.group(ga.depot).and_then(|gb| delta_percent(ga.cost, gb.cost)),
        })
        .collect();
    Comparison { delta_percent: delta_percent(a.total_cost, b.total_cost), groups }
}
