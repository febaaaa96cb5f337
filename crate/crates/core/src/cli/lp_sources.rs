//! LP sources for the cutting-plane loop: replay of point files and an
//! external solver driven through LP files.

use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::cuts::{LpSolution, LpSource};
use crate::formulations::{export_lp, MipModel, VarId, VarValueMap};

/// Reads `<varname> <value>` lines. Lines that do not name a model variable
/// are skipped; `objective <value>` (or `obj`) sets the objective.
pub fn read_point(text: &str) -> (VarValueMap, Option<f64>) {
    let mut point = VarValueMap::new();
    let mut objective = None;
    for line in text.lines() {
        let mut words = line.split_whitespace();
        let (Some(name), Some(value), None) = (words.next(), words.next(), words.next()) else {
            continue;
        };
        let Ok(value) = value.parse::<f64>() else {
            continue;
        };
        if name.eq_ignore_ascii_case("objective") || name.eq_ignore_ascii_case("obj") {
            objective = Some(value);
        } else if let Ok(id) = name.parse::<VarId>() {
            point.insert(id, value);
        }
    }
    (point, objective)
}

/// Replays a fixed sequence of points, repeating the last one.
pub struct Replay {
    points: Vec<(VarValueMap, Option<f64>)>,
    next: usize,
}

impl Replay {
    pub fn new(points: Vec<(VarValueMap, Option<f64>)>) -> Self {
        Self { points, next: 0 }
    }
}

impl LpSource for Replay {
    fn solve(&mut self, model: &MipModel) -> Result<LpSolution, String> {
        let Some(last) = self.points.len().checked_sub(1) else {
            return Err("no points to replay".into());
        };
        let (point, objective) = &self.points[self.next.min(last)];
        self.next += 1;
        Ok(LpSolution {
            objective: objective.or_else(|| Some(model.objective_value(point))),
            point: point.clone(),
        })
    }
}

/// Runs a shell command template on each relaxation. `{lp}` is replaced by
/// the path of the exported LP file and `{sol}` by the path the command
/// must write its `<varname> <value>` solution to.
pub struct ExternalSolver {
    pub template: String,
    pub workdir: PathBuf,
}

static CALLS: AtomicUsize = AtomicUsize::new(0);

impl ExternalSolver {
    pub fn new(template: impl Into<String>) -> Self {
        Self { template: template.into(), workdir: std::env::temp_dir() }
    }
}

impl LpSource for ExternalSolver {
    fn solve(&mut self, model: &MipModel) -> Result<LpSolution, String> {
        let n = CALLS.fetch_add(1, Ordering::Relaxed);
        let stem = format!("lotforge-{}-{n}", std::process::id());
        let lp = self.workdir.join(format!("{stem}.lp"));
        let sol = self.workdir.join(format!("{stem}.sol"));
        std::fs::write(&lp, export_lp(&model.relaxed())).map_err(|e| format!("writing {}: {e}", lp.display()))?;
        let cmd = self
            .template
            .replace("{lp}", &lp.to_string_lossy())
            .replace("{sol}", &sol.to_string_lossy());
        let status = Command::new("sh").arg("-c").arg(&cmd).status();
        let _ = std::fs::remove_file(&lp);
        let status = status.map_err(|e| format!("running `{cmd}`: {e}"))?;
        let text = std::fs::read_to_string(&sol);
        let _ = std::fs::remove_file(&sol);
        if !status.success() {
            return Err(format!("`{cmd}` exited with {status}"));
        }
        let text = text.map_err(|e| format!("reading {}: {e}", sol.display()))?;
        let (point, objective) = read_point(&text);
        if point.is_empty() {
            return Err("solver wrote no variable values".into());
        }
        Ok(LpSolution { objective: objective.or_else(|| Some(model.objective_value(&point))), point })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::FacilityId;

    #[test]
    fn point_files_skip_noise() {
        let (p, obj) = read_point("# header\nobjective 12.5\nx_p_t1 3\nnot_a_var 4\ny_p_t1 1 extra\n");
        assert_eq!(obj, Some(12.5));
        assert_eq!(p.len(), 1);
        assert_eq!(p[&VarId::X { facility: FacilityId::PLANT, period: 0 }], 3.0);
    }

    #[test]
    fn replay_repeats_the_last_point() {
        let dims = crate::formulations::ModelDims { periods: 1, warehouses: 1, retailers: 1 };
        let m = MipModel::new(crate::formulations::Formulation::Std, dims);
        let mut r = Replay::new(vec![(VarValueMap::new(), Some(1.0)), (VarValueMap::new(), Some(2.0))]);
        let objs: Vec<_> = (0..3).map(|_| r.solve(&m).unwrap().objective).collect();
        assert_eq!(objs, vec![Some(1.0), Some(2.0), Some(2.0)]);
        assert!(Replay::new(vec![]).solve(&m).is_err());
    }
}
