use std::collections::HashSet;

use super::{separate, Cut, CutConfig, CutError, CutFamily, CutParams};
use crate::formulations::{Formulation, MipModel, Sense, VarValueMap};
use crate::instance::Instance;

/// Relaxation optimum reported by an [`LpSource`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub point: VarValueMap,
    pub objective: Option<f64>,
}

/// Solves the LP relaxation of a model (rows of the model plus the current
/// cut pool). An error means no solution is available this round.
pub trait LpSource {
    fn solve(&mut self, model: &MipModel) -> Result<LpSolution, String>;
}

impl<F> LpSource for F
where
    F: FnMut(&MipModel) -> Result<LpSolution, String>,
{
    fn solve(&mut self, model: &MipModel) -> Result<LpSolution, String> {
        self(model)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopStatus {
    /// A round found no new violated cut.
    Converged,
    /// Every allowed round added cuts.
    RoundLimit,
    /// The LP source failed; the pool holds what earlier rounds found.
    LpUnavailable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutLoopOutcome {
    pub pool: Vec<Cut>,
    pub rounds: usize,
    /// LP objective of each round that got a solution.
    pub objectives: Vec<Option<f64>>,
    pub status: LoopStatus,
}

impl CutLoopOutcome {
    pub fn final_objective(&self) -> Option<f64> {
        self.objectives.last().copied().flatten()
    }
}

/// `model` with the pool appended as `>=` rows named `cut_<family>_<n>`, `n` 1-based.
pub fn model_with_cuts(model: &MipModel, pool: &[Cut]) -> MipModel {
    let mut m = model.clone();
    for (n, cut) in pool.iter().enumerate() {
        m.add_constraint(format!("cut_{}_{}", cut.family, n + 1), cut.expr.clone(), Sense::Ge, cut.rhs);
    }
    m
}

/// Rounds `1..=max_rounds`: solve the relaxation with the current pool,
/// separate single-level cuts every round, two-level cuts on multiples of
/// `two_level_every` and three-level cuts on multiples of
/// `three_level_every`, and add every new violated cut. Stops at the first
/// round that adds nothing.
pub fn cutting_plane_loop(
    instance: &Instance,
    model: &MipModel,
    lp_source: &mut dyn LpSource,
    config: &CutConfig,
) -> Result<CutLoopOutcome, CutError> {
    config.validate()?;
    let families: [CutFamily; 3] = match model.formulation {
        Formulation::Std => [CutFamily::SingleLevelStd, CutFamily::TwoLevelStd, CutFamily::ThreeLevelStd],
        Formulation::ThreeLevel => [CutFamily::SingleLevel3lf, CutFamily::TwoLevel3lf, CutFamily::ThreeLevel3lf],
        Formulation::Mc => {
            return Err(CutError::Config("cuts are defined for the std and 3lf formulations only".into()));
        }
    };

    let mut pool: Vec<Cut> = Vec::new();
    let mut seen: HashSet<CutParams> = HashSet::new();
    let mut objectives = Vec::new();
    let mut rounds = 0;
    let mut status = LoopStatus::RoundLimit;

    for round in 1..=config.max_rounds {
        let lp = match lp_source.solve(&model_with_cuts(model, &pool)) {
            Ok(lp) => lp,
            Err(reason) => {
                status = LoopStatus::LpUnavailable(reason);
                break;
            }
        };
        rounds = round;
        objectives.push(lp.objective);

        let mut found = separate(instance, families[0], &lp.point, config.violation_tol);
        if round % config.two_level_every == 0 {
            found.extend(separate(instance, families[1], &lp.point, config.violation_tol));
        }
        if round % config.three_level_every == 0 {
            found.extend(separate(instance, families[2], &lp.point, config.violation_tol));
        }
        let before = pool.len();
        for cut in found {
            if seen.insert(cut.params.clone()) {
                pool.push(cut);
            }
        }
        if pool.len() == before {
            status = LoopStatus::Converged;
            break;
        }
    }
    Ok(CutLoopOutcome { pool, rounds, objectives, status })
}
