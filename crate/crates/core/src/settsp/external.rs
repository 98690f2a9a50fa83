use std::fs;
use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::milp::{export_lp, MilpModel};
use crate::scalar::Scalar;

use super::costs::SetCosts;
use super::model::build_set_tsp_milp;
use super::system::SetSystem;
use super::tour::{build_tour, SetTour, Visit};

fn backend_error(budget_s: f64, reason: impl Into<String>) -> Error {
    Error::Backend { backend: "external_milp".into(), budget_s, reason: reason.into() }
}

/// Writes `model` as LP, runs `<cmd> model.lp solution.out` (killed once the
/// budget runs out) and reads back the `name value` lines.
pub fn run_external(model: &MilpModel, cmd: &str, budget_s: f64) -> Result<Vec<f64>> {
    let dir = tempfile::tempdir().map_err(|e| backend_error(budget_s, format!("temp dir: {e}")))?;
    let lp = dir.path().join("model.lp");
    let out = dir.path().join("solution.out");
    export_lp(model, &lp)?;
    let mut parts = cmd.split_whitespace();
    let program = parts.next().ok_or_else(|| backend_error(budget_s, "empty solver command"))?;
    let mut child = Command::new(program)
        .args(parts)
        .arg(&lp)
        .arg(&out)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| backend_error(budget_s, format!("cannot start {program:?}: {e}")))?;
    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait().map_err(|e| backend_error(budget_s, e.to_string()))? {
            break status;
        }
        if start.elapsed().as_secs_f64() > budget_s {
            let _ = child.kill();
            let _ = child.wait();
            return Err(backend_error(budget_s, "timed out"));
        }
        thread::sleep(Duration::from_millis(5));
    };
    if !status.success() {
        let mut err = String::new();
        if let Some(mut s) = child.stderr.take() {
            let _ = s.read_to_string(&mut err);
        }
        return Err(backend_error(budget_s, format!("solver exited with {status}: {}", err.trim())));
    }
    let text = fs::read_to_string(&out).map_err(|e| backend_error(budget_s, format!("no solution file: {e}")))?;
    parse_solution(model, &text)
}

/// Values indexed like `model.vars()`; unlisted variables are zero.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<Vec<f64>> {
    let mut values = vec![0.0; model.vars().len()];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(value), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::InvalidSolverOutput(format!("line {}: expected `name value`", ln + 1)));
        };
        let value: f64 =
            value.parse().map_err(|_| Error::InvalidSolverOutput(format!("line {}: bad value {value:?}", ln + 1)))?;
        if let Some(id) = model.var_id(name) {
            values[id.0] = value;
        }
    }
    Ok(values)
}

pub(crate) fn solve_external<S: Scalar>(
    system: &SetSystem<S>,
    costs: &SetCosts<'_, S>,
    cmd: &str,
    budget_s: f64,
) -> Result<SetTour<S>> {
    if system.is_empty() {
        return Ok(SetTour::empty(system.depot, "external_milp"));
    }
    let (model, vars) = build_set_tsp_milp(costs);
    let values = run_external(&model, cmd, budget_s)?;
    let on = |v: crate::milp::VarId| values[v.0] > 0.5;
    let n = costs.n_sets();

    let mut order = Vec::with_capacity(n - 1);
    let mut cur = 0;
    for _ in 0..n {
        let next: Vec<usize> = (0..n).filter(|&j| on(vars.beta[cur][j])).collect();
        let [next] = next[..] else {
            return Err(Error::InvalidSolverOutput(format!("set {cur} has {} successors", next.len())));
        };
        if next == 0 {
            break;
        }
        if order.contains(&next) {
            return Err(Error::InvalidSolverOutput("subtour among set-level arcs".into()));
        }
        order.push(next);
        cur = next;
    }
    if order.len() != n - 1 {
        return Err(Error::InvalidSolverOutput(format!(
            "tour from the depot covers {} of {} sets (subtour)",
            order.len(),
            n - 1
        )));
    }
    let mut visits = Vec::with_capacity(order.len());
    for &c in &order {
        let k = costs.verts[c].len();
        let chosen: Vec<usize> = (0..k * k).filter(|&i| on(vars.gamma[c][i])).collect();
        let [pick] = chosen[..] else {
            return Err(Error::InvalidSolverOutput(format!("set {c} has {} service pairs", chosen.len())));
        };
        visits.push(Visit { set: c, enter: pick / k, leave: pick % k });
    }
    Ok(build_tour(costs, &visits, "external_milp"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::{line_instance, road_distances};
    use crate::settsp::{build_set_system, SetMode};

    fn script(dir: &std::path::Path, body: &str) -> String {
        let path = dir.join("solver.sh");
        fs::write(&path, body).unwrap();
        format!("sh {}", path.display())
    }

    #[test]
    fn subtour_is_rejected() {
        let inst = line_instance::<f64>(4, 1.0);
        let o = road_distances(&inst, 0..4).unwrap();
        let sys = build_set_system(&inst, 0, &[2, 3], 0.0, SetMode::Full);
        let costs = SetCosts::new(&inst, &o, &sys);
        let dir = tempfile::tempdir().unwrap();
        let cmd = script(dir.path(), "printf 'beta_0_0 1\\nbeta_1_2 1\\nbeta_2_1 1\\n' > \"$2\"\n");
        let err = solve_external(&sys, &costs, &cmd, 10.0).unwrap_err();
        assert!(matches!(err, Error::InvalidSolverOutput(_)), "{err}");
        assert!(err.to_string().contains("invalid solver output"));
    }

    #[test]
    fn slow_solver_is_killed() {
        let inst = line_instance::<f64>(3, 1.0);
        let o = road_distances(&inst, 0..3).unwrap();
        let sys = build_set_system(&inst, 0, &[2], 0.0, SetMode::Full);
        let costs = SetCosts::new(&inst, &o, &sys);
        let dir = tempfile::tempdir().unwrap();
        let cmd = script(dir.path(), "sleep 5\n");
        let start = std::time::Instant::now();
        let err = solve_external(&sys, &costs, &cmd, 0.3).unwrap_err();
        assert!(start.elapsed().as_secs_f64() < 3.0);
        let msg = err.to_string();
        assert!(msg.contains("external_milp") && msg.contains("0.3"), "{msg}");
    }

    #[test]
    fn missing_solver_names_backend() {
        let inst = line_instance::<f64>(3, 1.0);
        let o = road_distances(&inst, 0..3).unwrap();
        let sys = build_set_system(&inst, 0, &[2], 0.0, SetMode::Full);
        let costs = SetCosts::new(&inst, &o, &sys);
        let err = solve_external(&sys, &costs, "/nonexistent/solver", 5.0).unwrap_err();
        assert!(err.to_string().contains("external_milp"));
    }
}
