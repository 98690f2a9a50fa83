use std::time::Instant;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::costs::SetCosts;
use super::tour::Visit;

const NONE: u32 = u32::MAX;

/// Held-Karp tables over (visited customer sets, last set, exit vertex).
pub(crate) struct HeldKarp<S> {
    n: usize,
    /// Offset of customer set `j` (1-based) inside a mask row.
    off: Vec<usize>,
    width: usize,
    value: Vec<S>,
    /// Entry vertex index used in the last set.
    enter: Vec<u32>,
    /// Flat `(set, exit)` index of the previous set, `NONE` for the depot.
    prev: Vec<u32>,
}

impl<S: Scalar> HeldKarp<S> {
    pub(crate) fn run(costs: &SetCosts<'_, S>, deadline: Option<(Instant, f64)>) -> Result<Self> {
        let n = costs.n_sets() - 1;
        let mut off = vec![0; n + 2];
        for j in 1..=n {
            off[j + 1] = off[j] + costs.verts[j].len();
        }
        let width = off[n + 1];
        let masks = 1usize << n;
        let mut hk = HeldKarp {
            n,
            off,
            width,
            value: vec![S::infinity(); masks * width],
            enter: vec![NONE; masks * width],
            prev: vec![NONE; masks * width],
        };
        let owner_of: Vec<usize> = (1..=n).flat_map(|j| std::iter::repeat_n(j, costs.verts[j].len())).collect();
        let mut entry: Vec<(S, u32)> = Vec::new();

        for mask in 0..masks {
            if let Some((start, budget)) = deadline {
                if mask % 64 == 0 && start.elapsed().as_secs_f64() > budget {
                    return Err(Error::Backend {
                        backend: "exact_dp".into(),
                        budget_s: budget,
                        reason: "time budget exhausted".into(),
                    });
                }
            }
            let row = mask * width;
            for j in 1..=n {
                let bit = 1usize << (j - 1);
                if mask & bit != 0 {
                    continue;
                }
                let targets = &costs.verts[j];
                entry.clear();
                entry.resize(targets.len(), (S::infinity(), NONE));
                if mask == 0 {
                    for (ai, &a) in targets.iter().enumerate() {
                        entry[ai] = (costs.travel(costs.depot, a), NONE);
                    }
                } else {
                    for g in 0..width {
                        let i = owner_of[g];
                        if mask & (1 << (i - 1)) == 0 {
                            continue;
                        }
                        let base = hk.value[row + g];
                        if base.is_infinite() {
                            continue;
                        }
                        let b = costs.verts[i][g - hk.off[i]];
                        let road = costs.oracle.row(b).expect("set vertex is a distance source");
                        for (ai, &a) in targets.iter().enumerate() {
                            let cand = base + road[a] * costs.inv_speed;
                            if cand < entry[ai].0 {
                                entry[ai] = (cand, g as u32);
                            }
                        }
                    }
                }
                let next = (mask | bit) * width + hk.off[j];
                let m = targets.len();
                for (ai, &(e, from)) in entry.iter().enumerate() {
                    if e.is_infinite() {
                        continue;
                    }
                    let w = &costs.service[j][ai * m..(ai + 1) * m];
                    for bi in 0..m {
                        let cand = e + w[bi];
                        if cand < hk.value[next + bi] {
                            hk.value[next + bi] = cand;
                            hk.enter[next + bi] = ai as u32;
                            hk.prev[next + bi] = from;
                        }
                    }
                }
            }
        }
        Ok(hk)
    }

    fn owner(&self, g: usize) -> usize {
        (1..=self.n).find(|&j| g < self.off[j + 1]).expect("flat index in range")
    }

    /// Cheapest closed tour through exactly the sets in `mask`, with its
    /// final flat index.
    pub(crate) fn close(&self, costs: &SetCosts<'_, S>, mask: usize) -> (S, Option<usize>) {
        if mask == 0 {
            return (S::zero(), None);
        }
        let row = mask * self.width;
        let mut best = (S::infinity(), None);
        for g in 0..self.width {
            let v = self.value[row + g];
            if v.is_infinite() {
                continue;
            }
            let j = self.owner(g);
            let b = costs.verts[j][g - self.off[j]];
            let cand = v + costs.travel(b, costs.depot);
            if cand < best.0 {
                best = (cand, Some(g));
            }
        }
        best
    }

    /// Visits of the optimal tour through `mask`.
    pub(crate) fn tour(&self, costs: &SetCosts<'_, S>, mask: usize) -> (S, Vec<Visit>) {
        let (cost, last) = self.close(costs, mask);
        let mut visits = Vec::new();
        let mut cur = last;
        let mut mask = mask;
        while let Some(g) = cur {
            let j = self.owner(g);
            let idx = mask * self.width + g;
            visits.push(Visit { set: j, enter: self.enter[idx] as usize, leave: g - self.off[j] });
            mask &= !(1 << (j - 1));
            cur = (self.prev[idx] != NONE).then_some(self.prev[idx] as usize);
        }
        visits.reverse();
        (cost, visits)
    }

    pub(crate) fn full_mask(&self) -> usize {
        (1usize << self.n) - 1
    }
}
