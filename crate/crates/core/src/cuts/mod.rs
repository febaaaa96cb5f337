//! (l,S)-type valid inequalities in the STD and 3LF spaces, their separation
//! by inspection, and a cutting-plane driver.
//!
//! Every inequality of the six families is a sum of *slots*. A slot owns a
//! run of periods `first..=last` of one variable source (a facility in STD,
//! a `(level, retailer)` pair in 3LF) and a subset `S` of those periods: a
//! period in `S` contributes `d_{k,l} y_k`, any other period contributes `x_k`.
//! The right-hand side is the cumulative demand over `0..=l` of the anchor
//! facility or retailer. For fixed structure (anchor, `l`, split points) the
//! most violated member takes, period by period, the smaller of the two terms.

mod driver;
mod separation;

use std::fmt;

use thiserror::Error;

use crate::formulations::{LinExpr, VarId, VarValueMap};
use crate::instance::{CumulativeDemand, Instance};

pub use driver::{cutting_plane_loop, model_with_cuts, CutLoopOutcome, LoopStatus, LpSolution, LpSource};
pub use separation::{
    most_violated, separate, separate_single_level_3lf, separate_single_level_std, separate_three_level_3lf,
    separate_three_level_std, separate_two_level_3lf, separate_two_level_std, structures,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    SingleLevelStd,
    TwoLevelStd,
    ThreeLevelStd,
    SingleLevel3lf,
    TwoLevel3lf,
    ThreeLevel3lf,
}

impl CutFamily {
    pub const ALL: [CutFamily; 6] = [
        CutFamily::SingleLevelStd,
        CutFamily::TwoLevelStd,
        CutFamily::ThreeLevelStd,
        CutFamily::SingleLevel3lf,
        CutFamily::TwoLevel3lf,
        CutFamily::ThreeLevel3lf,
    ];

    pub fn is_std(self) -> bool {
        matches!(self, CutFamily::SingleLevelStd | CutFamily::TwoLevelStd | CutFamily::ThreeLevelStd)
    }

    /// Number of echelons the inequality spans.
    pub fn depth(self) -> usize {
        match self {
            CutFamily::SingleLevelStd | CutFamily::SingleLevel3lf => 1,
            CutFamily::TwoLevelStd | CutFamily::TwoLevel3lf => 2,
            CutFamily::ThreeLevelStd | CutFamily::ThreeLevel3lf => 3,
        }
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutFamily::SingleLevelStd => "sl_std",
            CutFamily::TwoLevelStd => "tl_std",
            CutFamily::ThreeLevelStd => "thl_std",
            CutFamily::SingleLevel3lf => "sl_3lf",
            CutFamily::TwoLevel3lf => "tl_3lf",
            CutFamily::ThreeLevel3lf => "thl_3lf",
        })
    }
}

/// Structural parameters of an inequality: everything except the `S` sets.
/// Facilities are flat indices, periods 0-based; `l` is the last period
/// covered and each split is the last period of the segment before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    SingleLevelStd { facility: usize, l: usize },
    /// `lower` is the level of the successors summed in the second segment.
    TwoLevelStd { facility: usize, lower: u8, l: usize, split: usize },
    ThreeLevelStd { l: usize, plant_split: usize, warehouse_split: usize },
    SingleLevel3lf { retailer: usize, level: u8, l: usize },
    TwoLevel3lf { retailer: usize, upper: u8, lower: u8, l: usize, split: usize },
    ThreeLevel3lf { retailer: usize, l: usize, split0: usize, split1: usize },
}

impl Structure {
    pub fn family(&self) -> CutFamily {
        match self {
            Structure::SingleLevelStd { .. } => CutFamily::SingleLevelStd,
            Structure::TwoLevelStd { .. } => CutFamily::TwoLevelStd,
            Structure::ThreeLevelStd { .. } => CutFamily::ThreeLevelStd,
            Structure::SingleLevel3lf { .. } => CutFamily::SingleLevel3lf,
            Structure::TwoLevel3lf { .. } => CutFamily::TwoLevel3lf,
            Structure::ThreeLevel3lf { .. } => CutFamily::ThreeLevel3lf,
        }
    }

    pub fn l(&self) -> usize {
        match *self {
            Structure::SingleLevelStd { l, .. }
            | Structure::TwoLevelStd { l, .. }
            | Structure::ThreeLevelStd { l, .. }
            | Structure::SingleLevel3lf { l, .. }
            | Structure::TwoLevel3lf { l, .. }
            | Structure::ThreeLevel3lf { l, .. } => l,
        }
    }

    /// Slots in canonical order, one `S` set per slot in [`CutParams::sets`].
    pub fn slots(&self, instance: &Instance) -> Vec<Slot> {
        let l = self.l();
        let fac = |facility: usize, first: usize, last: usize| Slot { source: Source::Facility(facility), first, last };
        let ret = |retailer: usize, level: u8, first: usize, last: usize| Slot {
            source: Source::Retailer { retailer, level },
            first,
            last,
        };
        match *self {
            Structure::SingleLevelStd { facility, .. } => vec![fac(facility, 0, l)],
            Structure::TwoLevelStd { facility, lower, split, .. } => {
                let mut v = vec![fac(facility, 0, split)];
                v.extend(successors_at(instance, facility, lower).into_iter().map(|j| fac(j, split + 1, l)));
                v
            }
            Structure::ThreeLevelStd { plant_split, warehouse_split, .. } => {
                let mut v = vec![fac(0, 0, plant_split)];
                v.extend(
                    (0..instance.num_warehouses())
                        .map(|w| fac(instance.warehouse_index(w), plant_split + 1, warehouse_split)),
                );
                v.extend((0..instance.num_retailers()).map(|r| fac(instance.retailer_index(r), warehouse_split + 1, l)));
                v
            }
            Structure::SingleLevel3lf { retailer, level, .. } => vec![ret(retailer, level, 0, l)],
            Structure::TwoLevel3lf { retailer, upper, lower, split, .. } => {
                vec![ret(retailer, upper, 0, split), ret(retailer, lower, split + 1, l)]
            }
            Structure::ThreeLevel3lf { retailer, split0, split1, .. } => vec![
                ret(retailer, 0, 0, split0),
                ret(retailer, 1, split0 + 1, split1),
                ret(retailer, 2, split1 + 1, l),
            ],
        }
    }

    /// Right-hand side `d_{0..=l}` of the anchor facility (plant for the
    /// three-level STD family) or retailer.
    pub fn rhs(&self, instance: &Instance, cd: &CumulativeDemand) -> f64 {
        let l = self.l();
        let anchor = match *self {
            Structure::SingleLevelStd { facility, .. } | Structure::TwoLevelStd { facility, .. } => facility,
            Structure::ThreeLevelStd { .. } => 0,
            Structure::SingleLevel3lf { retailer, .. }
            | Structure::TwoLevel3lf { retailer, .. }
            | Structure::ThreeLevel3lf { retailer, .. } => instance.retailer_index(retailer),
        };
        cd.get(anchor, 0, l) as f64
    }
}

/// Facilities at `level` below `facility` (direct successors or, for the
/// plant and level 2, every retailer).
pub(crate) fn successors_at(instance: &Instance, facility: usize, level: u8) -> Vec<usize> {
    let own = instance.facility_id(facility).level();
    if level as usize == own + 1 {
        instance.successors(facility)
    } else {
        instance
            .descendant_retailers(facility)
            .into_iter()
            .map(|r| instance.retailer_index(r))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Facility(usize),
    Retailer { retailer: usize, level: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub source: Source,
    pub first: usize,
    pub last: usize,
}

impl Slot {
    /// Flow variable, setup variable and setup coefficient for period `k`.
    pub fn terms(&self, instance: &Instance, cd: &CumulativeDemand, l: usize, k: usize) -> (VarId, VarId, f64) {
        match self.source {
            Source::Facility(i) => {
                let facility = instance.facility_id(i);
                (
                    VarId::X { facility, period: k },
                    VarId::Y { facility, period: k },
                    cd.get(i, k, l) as f64,
                )
            }
            Source::Retailer { retailer, level } => {
                let holder = instance.facility_id(instance.predecessor_at_level(retailer, level as usize));
                (
                    VarId::X3 { level, retailer, period: k },
                    VarId::Y { facility: holder, period: k },
                    cd.get(instance.retailer_index(retailer), k, l) as f64,
                )
            }
        }
    }
}

/// Structure plus the `S` set (sorted 0-based periods) of every slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutParams {
    pub structure: Structure,
    pub sets: Vec<Vec<usize>>,
}

/// Inequality `expr >= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub params: CutParams,
    pub expr: LinExpr,
    pub rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum CutError {
    #[error("set {set:?} of slot {slot} is not inside periods {first}..={last}")]
    BadSet { slot: usize, set: Vec<usize>, first: usize, last: usize },
    #[error("expected {expected} sets, got {found}")]
    SetCount { expected: usize, found: usize },
    #[error("point has no value for `{0}`")]
    Missing(VarId),
    #[error("{0}")]
    Config(String),
}

impl Cut {
    /// The inequality with the given structure and `S` sets.
    pub fn build(instance: &Instance, cd: &CumulativeDemand, params: CutParams) -> Result<Cut, CutError> {
        let slots = params.structure.slots(instance);
        if slots.len() != params.sets.len() {
            return Err(CutError::SetCount { expected: slots.len(), found: params.sets.len() });
        }
        let l = params.structure.l();
        let mut expr = LinExpr::new();
        for (n, (slot, set)) in slots.iter().zip(&params.sets).enumerate() {
            if set.iter().any(|&k| k < slot.first || k > slot.last) || set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CutError::BadSet { slot: n, set: set.clone(), first: slot.first, last: slot.last });
            }
            for k in slot.first..=slot.last {
                let (x, y, d) = slot.terms(instance, cd, l, k);
                if set.binary_search(&k).is_ok() {
                    expr.add(y, d);
                } else {
                    expr.add(x, 1.0);
                }
            }
        }
        Ok(Cut {
            family: params.structure.family(),
            rhs: params.structure.rhs(instance, cd),
            params,
            expr,
        })
    }

    /// Amount by which the point violates the cut (negative when satisfied).
    pub fn violation(&self, point: &VarValueMap) -> f64 {
        self.rhs - self.expr.value(point)
    }
}

/// Signed slack `lhs - rhs` of the cut at `point`; nonnegative when satisfied.
pub fn eval_inequality(cut: &Cut, point: &VarValueMap) -> Result<f64, CutError> {
    Ok(cut.expr.try_value(point).map_err(CutError::Missing)? - cut.rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutConfig {
    /// Absolute violation a cut must exceed to be returned.
    pub violation_tol: f64,
    pub max_rounds: usize,
    pub two_level_every: usize,
    pub three_level_every: usize,
}

impl Default for CutConfig {
    fn default() -> Self {
        Self { violation_tol: 10.0, max_rounds: 20, two_level_every: 5, three_level_every: 10 }
    }
}

impl CutConfig {
    pub fn validate(&self) -> Result<(), CutError> {
        if !(self.violation_tol.is_finite() && self.violation_tol >= 0.0) {
            return Err(CutError::Config(format!("violation tolerance must be nonnegative, got {}", self.violation_tol)));
        }
        if self.two_level_every == 0 || self.three_level_every == 0 {
            return Err(CutError::Config("separation intervals must be positive".into()));
        }
        Ok(())
    }
}
