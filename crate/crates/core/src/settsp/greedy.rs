use std::time::Instant;

use crate::scalar::Scalar;

use super::costs::SetCosts;
use super::tour::{best_for_order, build_tour, SetTour};

/// Cheapest insertion on customer vertices, then 2-opt and single-set moves
/// re-optimizing entry and exit vertices after each move.
pub(crate) fn solve_greedy<S: Scalar>(costs: &SetCosts<'_, S>, budget_s: f64, start: Instant) -> SetTour<S> {
    let n = costs.n_sets() - 1;
    if n == 0 {
        return SetTour::empty(costs.depot, "greedy_ls");
    }
    let rep = |set: usize| costs.owners[set].unwrap_or(costs.depot);
    let at = |order: &[usize], i: usize| if i == 0 || i > order.len() { costs.depot } else { rep(order[i - 1]) };

    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut left: Vec<usize> = (1..=n).collect();
    while !left.is_empty() {
        let mut best = (S::infinity(), 0, 0);
        for (li, &set) in left.iter().enumerate() {
            let c = rep(set);
            for pos in 0..=order.len() {
                let (x, y) = (at(&order, pos), at(&order, pos + 1));
                let delta = costs.travel(x, c) + costs.travel(c, y) - costs.travel(x, y);
                if delta < best.0 {
                    best = (delta, li, pos);
                }
            }
        }
        let set = left.remove(best.1);
        order.insert(best.2, set);
    }

    let (mut cost, _) = best_for_order(costs, &order);
    let out_of_time = || start.elapsed().as_secs_f64() > budget_s;
    'improve: loop {
        for i in 0..n {
            for j in i + 1..n {
                let mut cand = order.clone();
                cand[i..=j].reverse();
                let (c, _) = best_for_order(costs, &cand);
                if c < cost - S::tol() {
                    (order, cost) = (cand, c);
                    continue 'improve;
                }
            }
            if out_of_time() {
                break 'improve;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut cand = order.clone();
                let set = cand.remove(i);
                cand.insert(j, set);
                let (c, _) = best_for_order(costs, &cand);
                if c < cost - S::tol() {
                    (order, cost) = (cand, c);
                    continue 'improve;
                }
            }
            if out_of_time() {
                break 'improve;
            }
        }
        break;
    }
    let (_, visits) = best_for_order(costs, &order);
    build_tour(costs, &visits, "greedy_ls")
}
