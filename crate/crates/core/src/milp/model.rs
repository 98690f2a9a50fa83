use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Solver-agnostic linear model that minimizes its objective.
///
/// Names follow `family_index_index...`; the family is the part before the
/// first underscore and never contains one itself.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MilpModel {
    pub name: String,
    vars: Vec<Variable>,
    #[serde(skip)]
    index: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    /// Family name to the mathematical symbol it stands for.
    pub symbols: BTreeMap<String, String>,
}

/// Family part of a variable or constraint name.
pub fn family(name: &str) -> &str {
    name.split('_').next().unwrap_or(name)
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        MilpModel { name: name.into(), ..Default::default() }
    }

    /// Declares a variable.
    ///
    /// # Panics
    /// On a duplicate name.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> VarId {
        let name = name.into();
        let id = VarId(self.vars.len());
        let prev = self.index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate variable {name}");
        self.vars.push(Variable { name, kind, lower, upper });
        id
    }

    pub fn binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    /// Adds `sum(terms) sense rhs`, merging repeated variables and dropping
    /// zero coefficients.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        self.constraints.push(Constraint { name: name.into(), terms: normalize(terms), sense, rhs });
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) {
        let v = &mut self.vars[id.0];
        v.lower = lower;
        v.upper = upper;
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (VarId, f64)>) {
        self.objective = normalize(terms);
    }

    pub fn describe(&mut self, family: &str, symbol: &str) {
        self.symbols.insert(family.to_string(), symbol.to_string());
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    /// Number of variables per family.
    pub fn var_counts(&self) -> BTreeMap<String, usize> {
        count(self.vars.iter().map(|v| family(&v.name)))
    }

    /// Number of constraints per family.
    pub fn constraint_counts(&self) -> BTreeMap<String, usize> {
        count(self.constraints.iter().map(|c| family(&c.name)))
    }

    pub fn var_count(&self, fam: &str) -> usize {
        self.vars.iter().filter(|v| family(&v.name) == fam).count()
    }

    pub fn constraint_count(&self, fam: &str) -> usize {
        self.constraints.iter().filter(|c| family(&c.name) == fam).count()
    }

    /// Objective value of an assignment indexed like `vars()`.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Names of constraints an assignment violates by more than `tol`.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for v in &self.vars {
            let x = values[self.index[&v.name].0];
            let integral = v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol;
            if x < v.lower - tol || x > v.upper + tol || !integral {
                out.push(format!("bounds of {}", v.name));
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v.0]).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + tol,
                Sense::Ge => lhs >= c.rhs - tol,
                Sense::Eq => (lhs - c.rhs).abs() <= tol,
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }
}

fn normalize(terms: impl IntoIterator<Item = (VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut merged: Vec<(VarId, f64)> = Vec::new();
    let mut slot: HashMap<VarId, usize> = HashMap::new();
    for (v, a) in terms {
        match slot.get(&v) {
            Some(&i) => merged[i].1 += a,
            None => {
                slot.insert(v, merged.len());
                merged.push((v, a));
            }
        }
    }
    merged.retain(|&(_, a)| a != 0.0);
    merged
}

fn count<'a>(families: impl Iterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for f in families {
        *out.entry(f.to_string()).or_insert(0) += 1;
    }
    out
}
