use crate::milp::{MilpModel, Sense, VarId};
use crate::scalar::Scalar;

use super::costs::SetCosts;

/// Variable handles of a set-tour model, indexed by set (0 = depot).
pub struct SetTourVars {
    pub beta: Vec<Vec<VarId>>,
    pub flow: Vec<Vec<VarId>>,
    /// `gamma[c][a * m + b]` for customer sets, empty for the depot.
    pub gamma: Vec<Vec<VarId>>,
}

/// Set-level arcs with single-commodity flow subtour elimination, service
/// pair selection inside each customer set and vertex-level arcs between
/// sets that tie the two levels together.
pub fn build_set_tsp_milp<S: Scalar>(costs: &SetCosts<'_, S>) -> (MilpModel, SetTourVars) {
    let n = costs.n_sets();
    let verts = &costs.verts;
    let mut m = MilpModel::new(format!("set_tour_depot_{}", costs.depot));
    m.describe("beta", "β: set-level arc i→j");
    m.describe("flow", "y: commodity flow on set-level arc i→j");
    m.describe("gamma", "γ: service pair (takeoff u, landing v) of a set");
    m.describe("delta", "δ: vertex-level arc between two sets");

    let beta: Vec<Vec<VarId>> = (0..n).map(|i| (0..n).map(|j| m.binary(format!("beta_{i}_{j}"))).collect()).collect();
    let cap = (n - 1) as f64;
    let flow: Vec<Vec<VarId>> =
        (0..n).map(|i| (0..n).map(|j| m.continuous(format!("flow_{i}_{j}"), 0.0, f64::INFINITY)).collect()).collect();
    let mut gamma: Vec<Vec<VarId>> = vec![Vec::new()];
    for c in 1..n {
        let mut g = Vec::with_capacity(verts[c].len().pow(2));
        for &u in &verts[c] {
            for &v in &verts[c] {
                g.push(m.binary(format!("gamma_{c}_{u}_{v}")));
            }
        }
        gamma.push(g);
    }
    // delta[i][j][a * |R_j| + b]
    let mut delta: Vec<Vec<Vec<VarId>>> = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for &a in &verts[i] {
                for &b in &verts[j] {
                    delta[i][j].push(m.binary(format!("delta_{i}_{a}_{j}_{b}")));
                }
            }
        }
    }

    let mut objective = Vec::new();
    for c in 1..n {
        let k = verts[c].len();
        for a in 0..k {
            for b in 0..k {
                objective.push((gamma[c][a * k + b], costs.service_at(c, a, b).as_f64()));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let kj = verts[j].len();
            for (ai, &a) in verts[i].iter().enumerate() {
                for (bi, &b) in verts[j].iter().enumerate() {
                    objective.push((delta[i][j][ai * kj + bi], costs.travel(a, b).as_f64()));
                }
            }
        }
    }
    m.set_objective(objective);

    for i in 0..n {
        m.add_constraint(format!("noself_beta_{i}"), [(beta[i][i], 1.0)], Sense::Eq, 0.0);
        m.add_constraint(format!("noself_flow_{i}"), [(flow[i][i], 1.0)], Sense::Eq, 0.0);
    }
    for i in 0..n {
        m.add_constraint(format!("outdeg_{i}"), (0..n).map(|j| (beta[i][j], 1.0)), Sense::Eq, 1.0);
    }
    for j in 0..n {
        m.add_constraint(format!("indeg_{j}"), (0..n).map(|i| (beta[i][j], 1.0)), Sense::Eq, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            m.add_constraint(format!("flowcap_{i}_{j}"), [(flow[i][j], 1.0), (beta[i][j], -cap)], Sense::Le, 0.0);
        }
    }
    m.add_constraint("flowsrc_0", (0..n).map(|j| (flow[0][j], 1.0)), Sense::Eq, cap);
    m.add_constraint("flowsink_0", (0..n).map(|i| (flow[i][0], 1.0)), Sense::Eq, 0.0);
    for c in 1..n {
        let terms = (0..n).map(|i| (flow[i][c], 1.0)).chain((0..n).map(|j| (flow[c][j], -1.0)));
        m.add_constraint(format!("flowstep_{c}"), terms, Sense::Eq, 1.0);
    }
    for c in 1..n {
        m.add_constraint(format!("visit_{c}"), gamma[c].iter().map(|&g| (g, 1.0)), Sense::Eq, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let terms = delta[i][j].iter().map(|&d| (d, 1.0)).chain([(beta[i][j], -1.0)]);
                m.add_constraint(format!("align_{i}_{j}"), terms, Sense::Eq, 0.0);
            }
        }
    }
    for c in 0..n {
        let k = verts[c].len();
        for (ui, &u) in verts[c].iter().enumerate() {
            let mut into = Vec::new();
            let mut out = Vec::new();
            for i in (0..n).filter(|&i| i != c) {
                let ki = verts[i].len();
                for ai in 0..ki {
                    into.push((delta[i][c][ai * k + ui], 1.0));
                    out.push((delta[c][i][ui * ki + ai], 1.0));
                }
            }
            if c == 0 {
                m.add_constraint(format!("syncin_{c}_{u}"), into, Sense::Eq, 1.0);
                m.add_constraint(format!("syncout_{c}_{u}"), out, Sense::Eq, 1.0);
            } else {
                into.extend((0..k).map(|vi| (gamma[c][ui * k + vi], -1.0)));
                out.extend((0..k).map(|wi| (gamma[c][wi * k + ui], -1.0)));
                m.add_constraint(format!("syncin_{c}_{u}"), into, Sense::Eq, 0.0);
                m.add_constraint(format!("syncout_{c}_{u}"), out, Sense::Eq, 0.0);
            }
        }
    }
    (m, SetTourVars { beta, flow, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{generate_instance, line_instance, road_distances, GenSpec, Instance};
    use crate::settsp::{build_set_system, SetMode};

    #[test]
    fn one_customer_counts() {
        let inst = line_instance::<f64>(3, 1.0);
        let o = road_distances(&inst, 0..3).unwrap();
        let sys = build_set_system(&inst, 0, &[2], 0.0, SetMode::Full);
        let costs = SetCosts::new(&inst, &o, &sys);
        let (m, _) = build_set_tsp_milp(&costs);
        assert_eq!(m.var_count("beta"), 4);
        assert_eq!(m.var_count("gamma"), 1);
        assert_eq!(m.var_count("delta"), 2);
        let mut vals = vec![0.0; m.vars().len()];
        for name in ["beta_0_1", "beta_1_0", "flow_0_1", "gamma_1_2_2", "delta_0_0_1_2", "delta_1_2_0_0"] {
            vals[m.var_id(name).unwrap().0] = 1.0;
        }
        assert!(m.violations(&vals, 1e-9).is_empty());
        assert!((m.evaluate(&vals) - 4.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn counts_follow_set_sizes() {
        let mut inst: Instance<f64> = generate_instance(&GenSpec::grid(12, 12, 0.1, 1, 3), 4).unwrap();
        inst.drone_range = 0.5;
        let o = road_distances(&inst, 0..inst.network.len()).unwrap();
        for mode in SetMode::ALL {
            let sys = build_set_system(&inst, inst.depots[0], &inst.customers, 0.5, mode);
            let costs = SetCosts::new(&inst, &o, &sys);
            let (m, _) = build_set_tsp_milp(&costs);
            let n = sys.len() + 1;
            let sizes: Vec<usize> = costs.verts.iter().map(Vec::len).collect();
            let sum: usize = sizes[1..].iter().sum();
            let sq: usize = sizes[1..].iter().map(|s| s * s).sum();
            let cross: usize = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| sizes[i] * sizes[j])
                .sum();
            assert_eq!(m.var_count("beta"), n * n);
            assert_eq!(m.var_count("flow"), n * n);
            assert_eq!(m.var_count("gamma"), sq);
            assert_eq!(m.var_count("delta"), cross);
            assert_eq!(m.constraint_count("noself"), 2 * n);
            assert_eq!(m.constraint_count("flowcap"), n * n);
            assert_eq!(m.constraint_count("align"), n * (n - 1));
            assert_eq!(m.constraint_count("syncin"), sum + 1);
            assert_eq!(m.constraint_count("syncout"), sum + 1);
        }
    }

    #[test]
    fn boundary_mode_at_least_halves_gamma() {
        let inst: Instance<f64> = generate_instance(&GenSpec::grid(20, 20, 0.1, 1, 4), 9).unwrap();
        let o = road_distances(&inst, 0..inst.network.len()).unwrap();
        let count = |mode| {
            let sys = build_set_system(&inst, inst.depots[0], &inst.customers, 1.0, mode);
            let costs = SetCosts::new(&inst, &o, &sys);
            build_set_tsp_milp(&costs).0.var_count("gamma")
        };
        assert!(2 * count(SetMode::BoundaryOnly) <= count(SetMode::Full));
    }
}
