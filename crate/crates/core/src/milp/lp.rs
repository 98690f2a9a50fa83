//! CPLEX LP text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::model::{MilpModel, Sense, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(VarId, f64)]) {
    if terms.is_empty() {
        if let Some(v) = model.vars().first() {
            let _ = write!(out, " 0 {}", v.name);
        }
        return;
    }
    for (i, &(v, a)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if a < 0.0 { "-" } else { "+" };
        if i == 0 && a >= 0.0 {
            let _ = write!(out, " {} {}", a, model.var(v).name);
        } else {
            let _ = write!(out, " {} {} {}", sign, a.abs(), model.var(v).name);
        }
    }
}

fn bound(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Renders the model. Identical models give identical text.
pub fn to_lp_string(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", model.name);
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, model.objective());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.vars() {
        if v.kind == VarKind::Binary {
            if v.lower != 0.0 || v.upper != 1.0 {
                let _ = writeln!(out, " {} <= {} <= {}", bound(v.lower), v.name, bound(v.upper));
            }
            continue;
        }
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if v.lower != 0.0 || v.upper != f64::INFINITY {
            let _ = writeln!(out, " {} <= {} <= {}", bound(v.lower), v.name, bound(v.upper));
        }
    }
    let binaries: Vec<&str> =
        model.vars().iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn export_lp(model: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_lp_string(model)).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, PartialEq)]
#[repr(u8)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Done,
}

fn lp_error(message: impl Into<String>) -> Error {
    Error::Parse { context: "LP model".into(), line: 0, column: 0, message: message.into() }
}

fn parse_number(tok: &str) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "+inf" | "inf" | "+infinity" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| lp_error(format!("bad number {tok:?}"))),
    }
}

fn is_sense(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "=<" | "<" => Some(Sense::Le),
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

/// Parses a linear expression made of `[sign] [coef] name` groups.
fn parse_expr(tokens: &[String]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in tokens {
        match tok.as_str() {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t if t.parse::<f64>().is_ok() => coef = Some(t.parse().unwrap()),
            name => {
                out.push((name.to_string(), sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
        }
    }
    Ok(out)
}

/// Reads LP text written by [`to_lp_string`] (and the common subset of the
/// format it uses). Variables are declared in order of first appearance.
pub fn parse_lp(text: &str) -> Result<MilpModel> {
    let mut name = String::new();
    let mut section = None;
    let mut tokens: BTreeMap<u8, Vec<String>> = BTreeMap::new();
    for raw in text.lines() {
        let line = match raw.find('\\') {
            Some(i) => {
                if i == 0 && name.is_empty() {
                    name = raw[1..].trim().to_string();
                }
                &raw[..i]
            }
            None => raw,
        };
        let key = match line.trim().to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." | "such that" => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "end" => Some(Section::Done),
            "" => continue,
            _ => None,
        };
        if let Some(k) = key {
            section = Some(k);
            continue;
        }
        let sec = section.ok_or_else(|| lp_error(format!("content before any section: {line:?}")))?;
        let toks = tokens.entry(sec as u8).or_default();
        toks.extend(line.split_whitespace().map(str::to_string));
        if sec == Section::Bounds {
            toks.push(";".into());
        }
    }
    let take = |s: Section| tokens.get(&(s as u8)).cloned().unwrap_or_default();

    let mut model = MilpModel::new(name);
    let mut kinds: BTreeMap<String, (VarKind, f64, f64)> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let see = |n: &str, order: &mut Vec<String>, kinds: &mut BTreeMap<String, (VarKind, f64, f64)>| {
        if !kinds.contains_key(n) {
            kinds.insert(n.to_string(), (VarKind::Continuous, 0.0, f64::INFINITY));
            order.push(n.to_string());
        }
    };

    let mut obj_tokens = take(Section::Objective);
    if obj_tokens.first().is_some_and(|t| t.ends_with(':')) {
        obj_tokens.remove(0);
    }
    let objective = parse_expr(&obj_tokens)?;
    for (n, _) in &objective {
        see(n, &mut order, &mut kinds);
    }

    let mut rows = Vec::new();
    let cons = take(Section::Constraints);
    let mut i = 0;
    while i < cons.len() {
        let label = cons[i]
            .strip_suffix(':')
            .ok_or_else(|| lp_error(format!("expected constraint name, found {:?}", cons[i])))?
            .to_string();
        let start = i + 1;
        let mut j = start;
        while j < cons.len() && is_sense(&cons[j]).is_none() {
            j += 1;
        }
        if j + 1 >= cons.len() {
            return Err(lp_error(format!("constraint {label} has no right-hand side")));
        }
        let terms = parse_expr(&cons[start..j])?;
        for (n, _) in &terms {
            see(n, &mut order, &mut kinds);
        }
        rows.push((label, terms, is_sense(&cons[j]).unwrap(), parse_number(&cons[j + 1])?));
        i = j + 2;
    }

    let mut bounded = std::collections::HashSet::new();
    for b in take(Section::Bounds).split(|t| t == ";") {
        match b {
            [] => {}
            [v, free] if free.eq_ignore_ascii_case("free") => {
                see(v, &mut order, &mut kinds);
                bounded.insert(v.clone());
                let e = kinds.get_mut(v.as_str()).unwrap();
                e.1 = f64::NEG_INFINITY;
                e.2 = f64::INFINITY;
            }
            [lo, s1, v, s2, hi] if is_sense(s1) == Some(Sense::Le) && is_sense(s2) == Some(Sense::Le) => {
                see(v, &mut order, &mut kinds);
                bounded.insert(v.clone());
                let e = kinds.get_mut(v.as_str()).unwrap();
                e.1 = parse_number(lo)?;
                e.2 = parse_number(hi)?;
            }
            [v, s, x] => {
                see(v, &mut order, &mut kinds);
                bounded.insert(v.clone());
                let x = parse_number(x)?;
                let e = kinds.get_mut(v.as_str()).unwrap();
                match is_sense(s) {
                    Some(Sense::Le) => e.2 = x,
                    Some(Sense::Ge) => e.1 = x,
                    Some(Sense::Eq) => (e.1, e.2) = (x, x),
                    None => return Err(lp_error(format!("bad bound {b:?}"))),
                }
            }
            other => return Err(lp_error(format!("bad bound {other:?}"))),
        }
    }
    for v in take(Section::Binaries) {
        see(&v, &mut order, &mut kinds);
        let e = kinds.get_mut(v.as_str()).unwrap();
        *e = if bounded.contains(&v) {
            (VarKind::Binary, e.1.max(0.0), e.2.min(1.0))
        } else {
            (VarKind::Binary, 0.0, 1.0)
        };
    }

    for n in &order {
        let (kind, lo, hi) = kinds[n];
        model.add_var(n.clone(), kind, lo, hi);
    }
    let id = |n: &str| model.var_id(n).expect("declared above");
    let objective: Vec<(VarId, f64)> = objective.iter().map(|(n, a)| (id(n), *a)).collect();
    let rows: Vec<_> = rows
        .into_iter()
        .map(|(l, t, s, r)| (l, t.iter().map(|(n, a)| (id(n), *a)).collect::<Vec<_>>(), s, r))
        .collect();
    model.set_objective(objective);
    for (l, t, s, r) in rows {
        model.add_constraint(l, t, s, r);
    }
    Ok(model)
}

/// Order-independent view of a model used to compare a model with its
/// re-parsed export.
#[derive(Debug, PartialEq)]
pub struct CanonicalModel {
    pub vars: BTreeMap<String, (VarKind, f64, f64)>,
    pub constraints: BTreeMap<String, (BTreeMap<String, f64>, Sense, f64)>,
    pub objective: BTreeMap<String, f64>,
}

pub fn canonical(model: &MilpModel) -> CanonicalModel {
    let named = |terms: &[(VarId, f64)]| -> BTreeMap<String, f64> {
        terms.iter().map(|&(v, a)| (model.var(v).name.clone(), a)).collect()
    };
    CanonicalModel {
        vars: model.vars().iter().map(|v| (v.name.clone(), (v.kind, v.lower, v.upper))).collect(),
        constraints: model.constraints().iter().map(|c| (c.name.clone(), (named(&c.terms), c.sense, c.rhs))).collect(),
        objective: named(model.objective()),
    }
}
