use serde::{Deserialize, Serialize};

use crate::baselines::nearest_neighbor_solution;
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Sense, VarId, VarKind};
use crate::roadnet::{DistanceOracle, Instance};
use crate::scalar::Scalar;
use crate::solution::Solution;

/// Horizon and big-M constant of the full model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullModelConfig {
    /// Route positions `0..=horizon`.
    pub horizon: usize,
    pub big_m: f64,
}

impl FullModelConfig {
    /// Twice the nearest-neighbor tour's longest route, and twice its
    /// slowest group time plus a maximal drone flight.
    pub fn for_instance<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> Result<Self> {
        let (vertices, hours) = nn_extent(inst, oracle)?;
        let flight = (inst.drone_range / inst.drone_speed).as_f64();
        Ok(FullModelConfig { horizon: (2 * vertices).max(2), big_m: 2.0 * hours + 2.0 * flight + 1.0 })
    }
}

/// Longest route (in vertices) and total time of the nearest-neighbor tour.
fn nn_extent<S: Scalar>(inst: &Instance<S>, oracle: &DistanceOracle<S>) -> Result<(usize, f64)> {
    let sol = nearest_neighbor_solution(inst, oracle)?;
    let vertices = sol.groups.iter().map(|g| g.truck_route.len()).max().unwrap_or(1);
    Ok((vertices, sol.total_cost.as_f64()))
}

struct Names;

impl Names {
    pub fn alpha(p: usize, c: usize) -> String {
        format!("alpha_{p}_{c}")
    }
    pub fn arc(p: usize, u: usize, v: usize, t: usize) -> String {
        format!("arc_{p}_{u}_{v}_{t}")
    }
    pub fn beta(c: usize) -> String {
        format!("beta_{c}")
    }
    pub fn x(u: usize, c: usize, t: usize) -> String {
        format!("x_{u}_{c}_{t}")
    }
    pub fn y(u: usize, c: usize, t: usize) -> String {
        format!("y_{u}_{c}_{t}")
    }
    pub fn l(p: usize, t: usize) -> String {
        format!("l_{p}_{t}")
    }
    pub fn tau(p: usize, u: usize, t: usize) -> String {
        format!("tau_{p}_{u}_{t}")
    }
    pub fn zx(p: usize, u: usize, c: usize, t: usize) -> String {
        format!("zx_{p}_{u}_{c}_{t}")
    }
    pub fn zy(p: usize, u: usize, c: usize, t: usize) -> String {
        format!("zy_{p}_{u}_{c}_{t}")
    }
}

/// Dense handles, indexed by positions in the depot, vertex and customer
/// lists.
struct Handles {
    nv: usize,
    nc: usize,
    t1: usize,
    alpha: Vec<VarId>,
    arc: Vec<VarId>,
    beta: Vec<VarId>,
    x: Vec<VarId>,
    y: Vec<VarId>,
    l: Vec<VarId>,
    tau: Vec<VarId>,
    zx: Vec<VarId>,
    zy: Vec<VarId>,
}

impl Handles {
    fn alpha(&self, p: usize, c: usize) -> VarId {
        self.alpha[p * self.nc + c]
    }
    fn arc(&self, p: usize, u: usize, v: usize, t: usize) -> VarId {
        self.arc[((p * self.nv + u) * self.nv + v) * self.t1 + t]
    }
    fn x(&self, u: usize, c: usize, t: usize) -> VarId {
        self.x[(u * self.nc + c) * self.t1 + t]
    }
    fn y(&self, u: usize, c: usize, t: usize) -> VarId {
        self.y[(u * self.nc + c) * self.t1 + t]
    }
    /// `t` in `1..=T`.
    fn l(&self, p: usize, t: usize) -> VarId {
        self.l[p * (self.t1 - 1) + t - 1]
    }
    fn tau(&self, p: usize, u: usize, t: usize) -> VarId {
        self.tau[(p * self.nv + u) * self.t1 + t]
    }
    fn zx(&self, p: usize, u: usize, c: usize, t: usize) -> VarId {
        self.zx[((p * self.nv + u) * self.nc + c) * self.t1 + t]
    }
    fn zy(&self, p: usize, u: usize, c: usize, t: usize) -> VarId {
        self.zy[((p * self.nv + u) * self.nc + c) * self.t1 + t]
    }
}

/// The complete routing model over `horizon + 1` route positions per truck.
/// Positions 0 and 1 are waits at the depot; real driving starts at 2.
pub fn build_full_milp<S: Scalar>(
    inst: &Instance<S>,
    oracle: &DistanceOracle<S>,
    cfg: &FullModelConfig,
) -> Result<MilpModel> {
    let nv = inst.network.len();
    if (0..nv).any(|v| !oracle.covers(v)) {
        return Err(Error::InvalidInstance("the full model needs road distances from every vertex".into()));
    }
    let required = nn_extent(inst, oracle)?.0.max(2);
    if cfg.horizon < required {
        return Err(Error::HorizonTooSmall { given: cfg.horizon, required });
    }
    let t_max = cfg.horizon;
    let t1 = t_max + 1;
    let depots = &inst.depots;
    let customers = &inst.customers;
    let (np, nc) = (depots.len(), customers.len());
    let k = inst.drones_per_truck as f64;
    let big_m = cfg.big_m;
    let s_tr = inst.truck_speed.as_f64();
    let s_dr = inst.drone_speed.as_f64();
    let d = |u: usize, v: usize| inst.euclid(u, v).as_f64();
    let dtr = |u: usize, v: usize| oracle.road(u, v).as_f64();

    let mut m = MilpModel::new("ma_fstsp");
    for (fam, sym) in [
        ("alpha", "α_{p,c}: customer c in the group of depot p"),
        ("arc", "e_{p,u,v,t}: truck of p moves u→v at position t"),
        ("beta", "β_c: customer c served by drone"),
        ("x", "x_{u,c,t}: drone for c takes off at position t-1 = u"),
        ("y", "y_{u,c,t}: drone for c lands at position t = u"),
        ("l", "l_{p,t}: drones on the truck of p at position t"),
        ("tau", "τ_{p,u,t}: arrival time of the truck of p at position t = u"),
        ("zx", "x_{u,c,t}·α_{p,c}"),
        ("zy", "y_{u,c,t}·α_{p,c}"),
    ] {
        m.describe(fam, sym);
    }

    let mut h = Handles {
        nv,
        nc,
        t1,
        alpha: Vec::new(),
        arc: Vec::new(),
        beta: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
        l: Vec::new(),
        tau: Vec::new(),
        zx: Vec::new(),
        zy: Vec::new(),
    };
    for &p in depots {
        for &c in customers {
            h.alpha.push(m.binary(Names::alpha(p, c)));
        }
    }
    for &p in depots {
        for u in 0..nv {
            for v in 0..nv {
                for t in 0..t1 {
                    let id = m.binary(Names::arc(p, u, v, t));
                    if t <= 1 && (u != p || v != p) {
                        m.set_bounds(id, 0.0, 0.0);
                    }
                    h.arc.push(id);
                }
            }
        }
    }
    for &c in customers {
        h.beta.push(m.binary(Names::beta(c)));
    }
    for (name, store) in [(Names::x as fn(usize, usize, usize) -> String, 0), (Names::y, 1)] {
        for u in 0..nv {
            for &c in customers {
                for t in 0..t1 {
                    let id = m.binary(name(u, c, t));
                    if t == 0 {
                        m.set_bounds(id, 0.0, 0.0);
                    }
                    if store == 0 {
                        h.x.push(id)
                    } else {
                        h.y.push(id)
                    }
                }
            }
        }
    }
    for &p in depots {
        for t in 1..=t_max {
            h.l.push(m.add_var(Names::l(p, t), VarKind::Continuous, 0.0, k));
        }
    }
    for &p in depots {
        for u in 0..nv {
            for t in 0..t1 {
                h.tau.push(m.continuous(Names::tau(p, u, t), 0.0, f64::INFINITY));
            }
        }
    }
    for (name, store) in [(Names::zx as fn(usize, usize, usize, usize) -> String, 0), (Names::zy, 1)] {
        for &p in depots {
            for u in 0..nv {
                for &c in customers {
                    for t in 0..t1 {
                        let id = m.binary(name(p, u, c, t));
                        if store == 0 {
                            h.zx.push(id)
                        } else {
                            h.zy.push(id)
                        }
                    }
                }
            }
        }
    }

    m.set_objective((0..np).map(|pi| (h.tau(pi, depots[pi], t_max), 1.0)));

    for ci in 0..nc {
        m.add_constraint(
            format!("partition_{}", customers[ci]),
            (0..np).map(|pi| (h.alpha(pi, ci), 1.0)),
            Sense::Eq,
            1.0,
        );
    }
    for (pi, &p) in depots.iter().enumerate() {
        let terms = (0..nv).map(|u| (h.arc(pi, p, u, 0), nc as f64)).chain((0..nc).map(|ci| (h.alpha(pi, ci), -1.0)));
        m.add_constraint(format!("edgestart_{p}"), terms, Sense::Ge, 0.0);
    }
    let all_arcs = |h: &Handles, pi: usize, t: usize| -> Vec<(VarId, f64)> {
        (0..nv).flat_map(|u| (0..nv).map(move |v| (u, v))).map(|(u, v)| (h.arc(pi, u, v, t), 1.0)).collect()
    };
    for (pi, &p) in depots.iter().enumerate() {
        for t in 0..t1 {
            m.add_constraint(format!("onearc_{p}_{t}"), all_arcs(&h, pi, t), Sense::Le, 1.0);
        }
        for t in 0..t_max {
            let terms =
                all_arcs(&h, pi, t + 1).into_iter().chain(all_arcs(&h, pi, t).into_iter().map(|(v, a)| (v, -a)));
            m.add_constraint(format!("arcmono_{p}_{t}"), terms, Sense::Le, 0.0);
        }
        for v in 0..nv {
            let mut terms = Vec::new();
            for u in 0..nv {
                for t in 0..t1 {
                    terms.push((h.arc(pi, u, v, t), 1.0));
                    terms.push((h.arc(pi, v, u, t), -1.0));
                }
            }
            m.add_constraint(format!("flowbal_{p}_{v}"), terms, Sense::Eq, 0.0);
        }
        for v in 0..nv {
            for t in 0..t_max {
                let terms =
                    (0..nv).map(|u| (h.arc(pi, u, v, t), 1.0)).chain((0..nv).map(|u| (h.arc(pi, v, u, t + 1), -1.0)));
                m.add_constraint(format!("arcchain_{p}_{v}_{t}"), terms, Sense::Eq, 0.0);
            }
        }
    }
    for (ci, &c) in customers.iter().enumerate() {
        let xs = (0..nv).flat_map(|u| (0..t1).map(move |t| (u, t))).map(|(u, t)| (h.x(u, ci, t), 1.0));
        m.add_constraint(format!("takeoff_{c}"), xs.chain([(h.beta[ci], -1.0)]), Sense::Eq, 0.0);
        let ys = (0..nv).flat_map(|u| (0..t1).map(move |t| (u, t))).map(|(u, t)| (h.y(u, ci, t), 1.0));
        m.add_constraint(format!("land_{c}"), ys.chain([(h.beta[ci], -1.0)]), Sense::Eq, 0.0);
        for t in 0..t1 {
            let mut terms = Vec::new();
            for u in 0..nv {
                for s in 0..=t {
                    terms.push((h.x(u, ci, s), 1.0));
                    terms.push((h.y(u, ci, s), -1.0));
                }
            }
            m.add_constraint(format!("order_{c}_{t}"), terms, Sense::Ge, 0.0);
        }
        let mut terms = Vec::new();
        for u in 0..nv {
            for t in 0..t1 {
                terms.push((h.x(u, ci, t), d(u, c)));
                terms.push((h.y(u, ci, t), d(c, u)));
            }
        }
        m.add_constraint(format!("range_{c}"), terms, Sense::Le, inst.drone_range.as_f64());
    }
    for (pi, &p) in depots.iter().enumerate() {
        for (ci, &c) in customers.iter().enumerate() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for t in 0..t1 {
                for u in (0..nv).filter(|&u| u != c) {
                    terms.push((h.arc(pi, c, u, t), 1.0));
                }
            }
            terms.push((h.beta[ci], 1.0));
            terms.push((h.alpha(pi, ci), -1.0));
            m.add_constraint(format!("truckvisit_{p}_{c}"), terms, Sense::Ge, 0.0);
        }
    }
    for (pi, &p) in depots.iter().enumerate() {
        for v in 0..nv {
            for t in 0..t1 {
                let terms =
                    (0..nv).map(|u| (h.arc(pi, v, u, t), k)).chain((0..nc).map(|ci| (h.zx(pi, v, ci, t), -1.0)));
                m.add_constraint(format!("synctakeoff_{p}_{v}_{t}"), terms, Sense::Ge, 0.0);
            }
        }
        for v in 0..nv {
            for t in 0..t1 {
                let terms =
                    (0..nv).map(|u| (h.arc(pi, u, v, t), k)).chain((0..nc).map(|ci| (h.zy(pi, v, ci, t), -1.0)));
                m.add_constraint(format!("syncland_{p}_{v}_{t}"), terms, Sense::Ge, 0.0);
            }
        }
        let big = 2.0 * nc as f64;
        for u in 0..nv {
            let mut terms = Vec::new();
            for t in 0..t1 {
                for v in (0..nv).filter(|&v| v != u) {
                    terms.push((h.arc(pi, u, v, t), big));
                }
                for ci in 0..nc {
                    terms.push((h.zx(pi, u, ci, t), -1.0));
                    terms.push((h.zy(pi, u, ci, t), -1.0));
                }
            }
            m.add_constraint(format!("cycle_{p}_{u}"), terms, Sense::Ge, 0.0);
        }
        let start = [(h.l(pi, 1), 1.0)].into_iter().chain((0..nc).map(|ci| (h.zx(pi, p, ci, 1), 1.0)));
        m.add_constraint(format!("dronestart_{p}"), start, Sense::Eq, k);
        m.add_constraint(format!("droneend_{p}"), [(h.l(pi, t_max), 1.0)], Sense::Eq, k);
        for t in 1..=t_max {
            m.add_constraint(format!("dronecap_{p}_{t}"), [(h.l(pi, t), 1.0)], Sense::Le, k);
        }
        for t in 2..=t_max {
            let mut terms = vec![(h.l(pi, t), 1.0), (h.l(pi, t - 1), -1.0)];
            for u in 0..nv {
                for ci in 0..nc {
                    terms.push((h.zy(pi, u, ci, t), -1.0));
                    terms.push((h.zx(pi, u, ci, t), 1.0));
                }
            }
            m.add_constraint(format!("dronestep_{p}_{t}"), terms, Sense::Eq, 0.0);
        }
        for u in 0..nv {
            for t in 0..t_max {
                m.add_constraint(
                    format!("timemono_{p}_{u}_{t}"),
                    [(h.tau(pi, u, t), 1.0), (h.tau(pi, u, t + 1), -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
        for u in 0..nv {
            for v in 0..nv {
                let leg = dtr(v, u) / s_tr;
                for t in 2..=t_max {
                    m.add_constraint(
                        format!("trucktime_{p}_{u}_{v}_{t}"),
                        [(h.tau(pi, u, t), 1.0), (h.tau(pi, v, t - 1), -1.0), (h.arc(pi, v, u, t), -(leg + big_m))],
                        Sense::Ge,
                        -big_m,
                    );
                }
            }
        }
        for u in 0..nv {
            for v in 0..nv {
                for (ci, &c) in customers.iter().enumerate() {
                    for t in 1..=t_max {
                        for s in 0..t {
                            m.add_constraint(
                                format!("dronetime_{p}_{u}_{v}_{c}_{s}_{t}"),
                                [
                                    (h.tau(pi, u, t), 1.0),
                                    (h.tau(pi, v, s), -1.0),
                                    (h.zx(pi, v, ci, s + 1), -d(v, c) / s_dr),
                                    (h.zy(pi, u, ci, t), -d(c, u) / s_dr),
                                    (h.x(v, ci, s + 1), -big_m),
                                    (h.y(u, ci, t), -big_m),
                                ],
                                Sense::Ge,
                                -2.0 * big_m,
                            );
                        }
                    }
                }
            }
        }
        for u in 0..nv {
            for ci in 0..nc {
                for t in 0..t1 {
                    for (fam, z, w) in
                        [("linx", h.zx(pi, u, ci, t), h.x(u, ci, t)), ("liny", h.zy(pi, u, ci, t), h.y(u, ci, t))]
                    {
                        let a = h.alpha(pi, ci);
                        let c = customers[ci];
                        m.add_constraint(
                            format!("{fam}_a_{p}_{u}_{c}_{t}"),
                            [(z, 1.0), (w, -1.0), (a, -1.0)],
                            Sense::Ge,
                            -1.0,
                        );
                        m.add_constraint(format!("{fam}_b_{p}_{u}_{c}_{t}"), [(z, 1.0), (w, -1.0)], Sense::Le, 0.0);
                        m.add_constraint(format!("{fam}_c_{p}_{u}_{c}_{t}"), [(z, 1.0), (a, -1.0)], Sense::Le, 0.0);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Model values reproducing a validator-feasible solution: positions 0 and
/// 1 wait at the depot, each route index becomes one position (two when
/// drones make round trips there), and the tail waits at the depot.
pub fn encode_solution<S: Scalar>(
    inst: &Instance<S>,
    model: &MilpModel,
    cfg: &FullModelConfig,
    sol: &Solution<S>,
) -> Result<Vec<f64>> {
    let t_max = cfg.horizon;
    let k = inst.drones_per_truck as f64;
    let mut values = vec![0.0; model.vars().len()];
    let mut set = |name: String, value: f64| -> Result<()> {
        let id = model.var_id(&name).ok_or_else(|| Error::InvalidInstance(format!("no variable {name}")))?;
        values[id.0] = value;
        Ok(())
    };
    let mut owner: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for g in &sol.groups {
        for d in &g.deliveries {
            owner.insert(d.customer, g.depot);
        }
    }
    for g in &sol.groups {
        for &v in &g.truck_route {
            if inst.is_customer(v) {
                owner.entry(v).or_insert(g.depot);
            }
        }
    }
    for &c in &inst.customers {
        let p = *owner.get(&c).ok_or_else(|| Error::Infeasible(format!("customer {c} is not served")))?;
        set(Names::alpha(p, c), 1.0)?;
    }
    for &p in &inst.depots {
        for t in 1..=t_max {
            set(Names::l(p, t), k)?;
        }
    }

    for g in &sol.groups {
        let p = g.depot;
        let route = &g.truck_route;
        let trace = crate::eval::timing(inst, g);
        if route.len() == 1 {
            if !g.deliveries.is_empty() {
                return Err(Error::Infeasible(format!(
                    "group {p} launches drones without leaving the depot, which the model cannot express"
                )));
            }
            continue;
        }
        // Positions per route index: (first, second copy when round trips).
        let mut first = Vec::with_capacity(route.len());
        let mut seq: Vec<(usize, f64)> = vec![(p, 0.0), (p, 0.0)];
        for (j, &v) in route.iter().enumerate() {
            let a = trace.arrival[j].as_f64();
            if j == 0 {
                first.push(1);
            } else {
                first.push(seq.len());
                seq.push((v, a));
            }
            if g.deliveries.iter().any(|d| d.takeoff_index == j && d.landing_index == j) {
                seq.push((v, trace.departure[j].as_f64()));
            }
        }
        if seq.len() > t_max + 1 {
            return Err(Error::HorizonTooSmall { given: t_max, required: seq.len() - 1 });
        }
        let end = seq.last().unwrap().1;
        while seq.len() <= t_max {
            seq.push((p, end));
        }
        set(Names::arc(p, p, p, 0), 1.0)?;
        for t in 1..=t_max {
            set(Names::arc(p, seq[t - 1].0, seq[t].0, t), 1.0)?;
        }
        for (t, &(_, time)) in seq.iter().enumerate() {
            for u in 0..inst.network.len() {
                set(Names::tau(p, u, t), time)?;
            }
        }
        let mut delta = vec![0.0; t_max + 1];
        for d in &g.deliveries {
            let c = d.customer;
            let s = first[d.takeoff_index];
            let t = if d.takeoff_index == d.landing_index { s + 1 } else { first[d.landing_index] };
            let (u, w) = (route[d.takeoff_index], route[d.landing_index]);
            set(Names::beta(c), 1.0)?;
            set(Names::x(u, c, s + 1), 1.0)?;
            set(Names::y(w, c, t), 1.0)?;
            set(Names::zx(p, u, c, s + 1), 1.0)?;
            set(Names::zy(p, w, c, t), 1.0)?;
            delta[s + 1] -= 1.0;
            delta[t] += 1.0;
        }
        let mut l = k + delta[1];
        set(Names::l(p, 1), l)?;
        for (t, dl) in delta.iter().enumerate().skip(2) {
            l += dl;
            set(Names::l(p, t), l)?;
        }
    }
    Ok(values)
}
