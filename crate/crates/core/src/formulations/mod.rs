//! Solver-agnostic MIP models for the standard (STD), multi-commodity (MC)
//! and three-level lot-sizing (3LF) formulations, with LP-format export.

mod builders;
mod lp;
mod mapping;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::instance::FacilityId;

pub use builders::{build_3lf, build_mc, build_std, ModelSize};
pub use lp::{export_lp, export_mip_start, parse_lp, LpParseError};
pub use mapping::{
    map_3lf_to_std, routes_to_3lf_point, routes_to_mc_point, solution_to_std_point, MappingError,
};

/// Variable of one of the three formulations. Periods are 0-based; the
/// `level` of MC and 3LF variables is 0 (plant), 1 (warehouse) or 2 (retailer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    /// STD inbound quantity `x^i_t`.
    X { facility: FacilityId, period: usize },
    /// STD end-of-period stock `s^i_t`.
    S { facility: FacilityId, period: usize },
    /// Setup indicator `y^i_t`, shared by all formulations.
    Y { facility: FacilityId, period: usize },
    /// MC flow at `level` in period `k` for retailer demand of period `t`.
    W { level: u8, retailer: usize, k: usize, t: usize },
    /// MC stock at `level` at the end of `k` for retailer demand of period `t`.
    Sigma { level: u8, retailer: usize, k: usize, t: usize },
    /// 3LF flow at `level` in `period` dedicated to `retailer`.
    X3 { level: u8, retailer: usize, period: usize },
    /// 3LF stock at `level` at the end of `period` dedicated to `retailer`.
    S3 { level: u8, retailer: usize, period: usize },
}

/// LP name, bijective with the variable: `x_w3_t7`, `y_p_t1`,
/// `w2_r12_k3_t9`, `sig0_r1_k2_t5`, `x1_r4_t3`, `s2_r4_t3`. Periods 1-based.
impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarId::X { facility, period } => write!(f, "x_{facility}_t{}", period + 1),
            VarId::S { facility, period } => write!(f, "s_{facility}_t{}", period + 1),
            VarId::Y { facility, period } => write!(f, "y_{facility}_t{}", period + 1),
            VarId::W { level, retailer, k, t } => write!(f, "w{level}_r{retailer}_k{}_t{}", k + 1, t + 1),
            VarId::Sigma { level, retailer, k, t } => {
                write!(f, "sig{level}_r{retailer}_k{}_t{}", k + 1, t + 1)
            }
            VarId::X3 { level, retailer, period } => write!(f, "x{level}_r{retailer}_t{}", period + 1),
            VarId::S3 { level, retailer, period } => write!(f, "s{level}_r{retailer}_t{}", period + 1),
        }
    }
}

impl std::str::FromStr for VarId {
    type Err = String;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        let bad = || format!("`{name}` is not a model variable name");
        let parts: Vec<&str> = name.split('_').collect();
        let period = |s: &str, prefix: char| -> Result<usize, String> {
            let n: usize = s.strip_prefix(prefix).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            n.checked_sub(1).ok_or_else(bad)
        };
        let retailer = |s: &str| -> Result<usize, String> {
            s.strip_prefix('r').ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let level = |s: &str| -> Result<u8, String> {
            match s {
                "0" => Ok(0),
                "1" => Ok(1),
                "2" => Ok(2),
                _ => Err(bad()),
            }
        };
        match parts.as_slice() {
            [fam @ ("x" | "s" | "y"), fac, t] => {
                let facility: FacilityId = fac.parse().map_err(|_| bad())?;
                let period = period(t, 't')?;
                Ok(match *fam {
                    "x" => VarId::X { facility, period },
                    "s" => VarId::S { facility, period },
                    _ => VarId::Y { facility, period },
                })
            }
            [fam, r, k, t] if fam.starts_with('w') || fam.starts_with("sig") => {
                let (is_w, lvl) = match fam.strip_prefix("sig") {
                    Some(l) => (false, l),
                    None => (true, &fam[1..]),
                };
                let level = level(lvl)?;
                let (retailer, k, t) = (retailer(r)?, period(k, 'k')?, period(t, 't')?);
                if k > t || (!is_w && k == t) {
                    return Err(bad());
                }
                Ok(if is_w {
                    VarId::W { level, retailer, k, t }
                } else {
                    VarId::Sigma { level, retailer, k, t }
                })
            }
            [fam, r, t] if fam.len() == 2 && (fam.starts_with('x') || fam.starts_with('s')) => {
                let level = level(&fam[1..])?;
                let (retailer, period) = (retailer(r)?, period(t, 't')?);
                Ok(if fam.starts_with('x') {
                    VarId::X3 { level, retailer, period }
                } else {
                    VarId::S3 { level, retailer, period }
                })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Std,
    Mc,
    ThreeLevel,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Std => "std",
            Formulation::Mc => "mc",
            Formulation::ThreeLevel => "3lf",
        })
    }
}

impl std::str::FromStr for Formulation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "std" => Ok(Formulation::Std),
            "mc" => Ok(Formulation::Mc),
            "3lf" => Ok(Formulation::ThreeLevel),
            _ => Err(format!("unknown formulation `{s}` (expected std, mc or 3lf)")),
        }
    }
}

/// Linear expression as an ordered list of `(variable, coefficient)` terms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a term; zero coefficients are dropped.
    pub fn add(&mut self, var: VarId, coef: f64) -> &mut Self {
        if coef != 0.0 {
            self.terms.push((var, coef));
        }
        self
    }

    pub fn with(mut self, var: VarId, coef: f64) -> Self {
        self.add(var, coef);
        self
    }

    /// Value at `point`; variables absent from the point count as zero.
    pub fn value(&self, point: &VarValueMap) -> f64 {
        self.terms
            .iter()
            .map(|(v, c)| c * point.get(v).copied().unwrap_or(0.0))
            .sum()
    }

    /// Like [`LinExpr::value`] but fails on the first missing variable.
    pub fn try_value(&self, point: &VarValueMap) -> Result<f64, VarId> {
        let mut total = 0.0;
        for (v, c) in &self.terms {
            total += c * point.get(v).copied().ok_or(*v)?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// Signed amount by which the row is violated at `point` (0 when satisfied).
    pub fn violation(&self, point: &VarValueMap) -> f64 {
        let lhs = self.expr.value(point);
        match self.sense {
            Sense::Eq => (lhs - self.rhs).abs(),
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
        }
    }
}

pub type VarValueMap = HashMap<VarId, f64>;

/// Network dimensions a model was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    pub periods: usize,
    pub warehouses: usize,
    pub retailers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipModel {
    pub formulation: Formulation,
    pub dims: ModelDims,
    pub variables: Vec<Variable>,
    pub objective: LinExpr,
    pub constraints: Vec<Constraint>,
    index: HashMap<VarId, usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("variable `{0}` declared twice")]
    Duplicate(VarId),
    #[error("row `{row}` uses undeclared variable `{var}`")]
    Undeclared { row: String, var: VarId },
}

impl MipModel {
    pub fn new(formulation: Formulation, dims: ModelDims) -> Self {
        Self {
            formulation,
            dims,
            variables: Vec::new(),
            objective: LinExpr::new(),
            constraints: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, id: VarId, lower: f64, upper: f64, integer: bool) -> Result<(), ModelError> {
        if self.index.contains_key(&id) {
            return Err(ModelError::Duplicate(id));
        }
        self.index.insert(id, self.variables.len());
        self.variables.push(Variable { id, lower, upper, integer });
        Ok(())
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, expr: LinExpr, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { name: name.into(), expr, sense, rhs });
    }

    pub fn variable(&self, id: &VarId) -> Option<&Variable> {
        self.index.get(id).map(|&i| &self.variables[i])
    }

    pub fn variable_mut(&mut self, id: &VarId) -> Option<&mut Variable> {
        self.index.get(id).map(|&i| &mut self.variables[i])
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.integer).count()
    }

    /// Checks that every variable used in the objective or a row is declared.
    pub fn check(&self) -> Result<(), ModelError> {
        let rows = std::iter::once(("objective", &self.objective))
            .chain(self.constraints.iter().map(|c| (c.name.as_str(), &c.expr)));
        for (row, expr) in rows {
            if let Some((var, _)) = expr.terms.iter().find(|(v, _)| !self.index.contains_key(v)) {
                return Err(ModelError::Undeclared { row: row.to_string(), var: *var });
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, point: &VarValueMap) -> f64 {
        self.objective.value(point)
    }

    /// Same model with integrality dropped.
    pub fn relaxed(&self) -> MipModel {
        let mut m = self.clone();
        for v in &mut m.variables {
            v.integer = false;
        }
        m
    }
}

/// A row or bound that a point violates by more than the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum PointViolation {
    Row { name: String, amount: f64 },
    Lower { var: VarId, value: f64, bound: f64 },
    Upper { var: VarId, value: f64, bound: f64 },
}

impl fmt::Display for PointViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointViolation::Row { name, amount } => write!(f, "row {name} violated by {amount}"),
            PointViolation::Lower { var, value, bound } => write!(f, "{var} = {value} below {bound}"),
            PointViolation::Upper { var, value, bound } => write!(f, "{var} = {value} above {bound}"),
        }
    }
}

/// Every row and bound of `model` violated at `point` by more than `tol`.
/// Variables missing from the point are read as zero; integrality is not checked.
pub fn evaluate_point(model: &MipModel, point: &VarValueMap, tol: f64) -> Vec<PointViolation> {
    let mut out = Vec::new();
    for v in &model.variables {
        let value = point.get(&v.id).copied().unwrap_or(0.0);
        if value < v.lower - tol {
            out.push(PointViolation::Lower { var: v.id, value, bound: v.lower });
        }
        if value > v.upper + tol {
            out.push(PointViolation::Upper { var: v.id, value, bound: v.upper });
        }
    }
    for c in &model.constraints {
        let amount = c.violation(point);
        if amount > tol {
            out.push(PointViolation::Row { name: c.name.clone(), amount });
        }
    }
    out
}
