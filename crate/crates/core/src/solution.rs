//! Solutions in the space of the standard formulation: per facility and
//! period, the inbound quantity `x`, the setup indicator `y` and the
//! end-of-period stock `s`. Stock before the first period is zero.

use std::fmt;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::instance::{FacilityId, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<bool>>,
    pub s: Vec<Vec<f64>>,
    pub cost: f64,
}

impl Solution {
    pub fn zeros(instance: &Instance) -> Self {
        let nf = instance.num_facilities();
        let t = instance.num_periods();
        Self {
            x: vec![vec![0.0; t]; nf],
            y: vec![vec![false; t]; nf],
            s: vec![vec![0.0; t]; nf],
            cost: 0.0,
        }
    }

    /// Every demand produced and shipped in its own period, with a setup
    /// wherever something moves.
    pub fn lot_for_lot(instance: &Instance) -> Self {
        let cd = instance.cumulative_demand();
        let mut sol = Self::zeros(instance);
        for i in 0..instance.num_facilities() {
            for t in 0..instance.num_periods() {
                let d = cd.period(i, t) as f64;
                sol.x[i][t] = d;
                sol.y[i][t] = d > 0.0;
            }
        }
        sol.cost = evaluate_cost(instance, &sol);
        sol
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionError {
    #[error("solution has {found} facility rows in `{field}`, instance has {expected}")]
    FacilityCount { field: &'static str, expected: usize, found: usize },
    #[error("solution row {row} of `{field}` has {found} periods, instance has {expected}")]
    PeriodCount { field: &'static str, row: usize, expected: usize, found: usize },
    #[error("route for retailer {retailer}, period {period} is not ordered: {route:?}")]
    BadRoute { retailer: usize, period: usize, route: Route },
    #[error("no route for positive demand of retailer {retailer} in period {period}")]
    MissingRoute { retailer: usize, period: usize },
    #[error("route matrix has wrong shape")]
    RouteShape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityViolation {
    Negative { field: &'static str, facility: FacilityId, period: usize, value: f64 },
    Balance { facility: FacilityId, period: usize, residual: f64 },
    Setup { facility: FacilityId, period: usize, quantity: f64 },
    Capacity { facility: FacilityId, period: usize, quantity: f64, limit: f64 },
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityViolation::Negative { field, facility, period, value } => {
                write!(f, "{field} of {facility} in period {} is negative ({value})", period + 1)
            }
            FeasibilityViolation::Balance { facility, period, residual } => write!(
                f,
                "flow balance of {facility} in period {} is off by {residual}",
                period + 1
            ),
            FeasibilityViolation::Setup { facility, period, quantity } => write!(
                f,
                "{facility} moves {quantity} units in period {} without a setup",
                period + 1
            ),
            FeasibilityViolation::Capacity { facility, period, quantity, limit } => write!(
                f,
                "{facility} moves {quantity} units in period {}, above remaining demand {limit}",
                period + 1
            ),
        }
    }
}

fn check_dims(instance: &Instance, sol: &Solution) -> Result<(), SolutionError> {
    let nf = instance.num_facilities();
    let t = instance.num_periods();
    let rows: [(&'static str, Vec<usize>); 3] = [
        ("x", sol.x.iter().map(Vec::len).collect()),
        ("y", sol.y.iter().map(Vec::len).collect()),
        ("s", sol.s.iter().map(Vec::len).collect()),
    ];
    for (field, lens) in rows {
        if lens.len() != nf {
            return Err(SolutionError::FacilityCount { field, expected: nf, found: lens.len() });
        }
        if let Some((row, &found)) = lens.iter().enumerate().find(|(_, &l)| l != t) {
            return Err(SolutionError::PeriodCount { field, row, expected: t, found });
        }
    }
    Ok(())
}

/// Lists every violated flow-balance, setup or sign condition, each checked
/// with absolute tolerance `tol`.
pub fn check_feasible(
    instance: &Instance,
    sol: &Solution,
    tol: f64,
) -> Result<Vec<FeasibilityViolation>, SolutionError> {
    check_dims(instance, sol)?;
    let cd = instance.cumulative_demand();
    let mut out = Vec::new();
    for i in 0..instance.num_facilities() {
        let id = instance.facility_id(i);
        let succ = instance.successors(i);
        for t in 0..instance.num_periods() {
            let x = sol.x[i][t];
            let s = sol.s[i][t];
            for (field, value) in [("x", x), ("s", s)] {
                if value < -tol {
                    out.push(FeasibilityViolation::Negative { field, facility: id, period: t, value });
                }
            }
            let prev = if t == 0 { 0.0 } else { sol.s[i][t - 1] };
            let outflow = match id.kind {
                crate::instance::FacilityKind::Retailer => instance.demand(id.index, t) as f64,
                _ => succ.iter().map(|&j| sol.x[j][t]).sum(),
            };
            let residual = prev + x - outflow - s;
            if residual.abs() > tol {
                out.push(FeasibilityViolation::Balance { facility: id, period: t, residual });
            }
            if x > tol && !sol.y[i][t] {
                out.push(FeasibilityViolation::Setup { facility: id, period: t, quantity: x });
            }
            let limit = cd.to_end(i, t) as f64;
            if x > limit + tol {
                out.push(FeasibilityViolation::Capacity { facility: id, period: t, quantity: x, limit });
            }
        }
    }
    Ok(out)
}

/// Total setup plus holding cost of the solution, recomputed from `y` and `s`.
pub fn evaluate_cost(instance: &Instance, sol: &Solution) -> f64 {
    let mut total = 0.0;
    for i in 0..instance.num_facilities() {
        for t in 0..instance.num_periods() {
            if sol.y[i][t] {
                total += instance.setup_cost(i, t);
            }
            total += instance.holding_cost(i, t) * sol.s[i][t];
        }
    }
    total
}

/// The periods in which one unit of demand leaves the plant (`k0`), enters
/// the warehouse (`k1`) and enters the retailer (`k2`). All 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Route {
    pub k0: usize,
    pub k1: usize,
    pub k2: usize,
}

impl Route {
    pub fn new(k0: usize, k1: usize, k2: usize) -> Self {
        Self { k0, k1, k2 }
    }

    pub fn is_ordered_for(&self, period: usize) -> bool {
        self.k0 <= self.k1 && self.k1 <= self.k2 && self.k2 <= period
    }

    /// All routes for demand in `period`, lexicographically ascending.
    pub fn all_for(period: usize) -> impl Iterator<Item = Route> {
        (0..=period).flat_map(move |k0| {
            (k0..=period).flat_map(move |k1| (k1..=period).map(move |k2| Route::new(k0, k1, k2)))
        })
    }
}

/// One route per retailer and period; `None` where the demand is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteAssignment {
    pub routes: Vec<Vec<Option<Route>>>,
}

impl RouteAssignment {
    pub fn empty(instance: &Instance) -> Self {
        Self {
            routes: vec![vec![None; instance.num_periods()]; instance.num_retailers()],
        }
    }

    /// Every demand served in its own period at every level.
    pub fn lot_for_lot(instance: &Instance) -> Self {
        let mut ra = Self::empty(instance);
        for r in 0..instance.num_retailers() {
            for t in 0..instance.num_periods() {
                if instance.demand(r, t) > 0 {
                    ra.routes[r][t] = Some(Route::new(t, t, t));
                }
            }
        }
        ra
    }

    /// A uniformly random route for every positive demand.
    pub fn sample<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Self {
        let mut ra = Self::empty(instance);
        for r in 0..instance.num_retailers() {
            for t in 0..instance.num_periods() {
                if instance.demand(r, t) > 0 {
                    let mut ks = [
                        rng.random_range(0..=t),
                        rng.random_range(0..=t),
                        rng.random_range(0..=t),
                    ];
                    ks.sort_unstable();
                    ra.routes[r][t] = Some(Route::new(ks[0], ks[1], ks[2]));
                }
            }
        }
        ra
    }
}

/// Per-unit holding cost of moving retailer `r`'s demand of period `t` along `route`.
pub fn route_unit_cost(instance: &Instance, retailer: usize, t: usize, route: Route) -> f64 {
    let w = instance.warehouse_index(instance.warehouse_of(retailer));
    let ri = instance.retailer_index(retailer);
    let span = |i: usize, from: usize, to: usize| (from..to).map(|u| instance.holding_cost(i, u)).sum::<f64>();
    span(0, route.k0, route.k1) + span(w, route.k1, route.k2) + span(ri, route.k2, t)
}

/// Builds the solution induced by shipping each positive demand along its
/// route. Routes attached to zero demands carry nothing and open nothing.
pub fn from_routes(instance: &Instance, routes: &RouteAssignment) -> Result<Solution, SolutionError> {
    let t_len = instance.num_periods();
    if routes.routes.len() != instance.num_retailers()
        || routes.routes.iter().any(|row| row.len() != t_len)
    {
        return Err(SolutionError::RouteShape);
    }
    let mut sol = Solution::zeros(instance);
    for r in 0..instance.num_retailers() {
        let w = instance.warehouse_index(instance.warehouse_of(r));
        let ri = instance.retailer_index(r);
        for t in 0..t_len {
            let d = instance.demand(r, t);
            if d <= 0 {
                continue;
            }
            let route = routes.routes[r][t].ok_or(SolutionError::MissingRoute { retailer: r, period: t })?;
            if !route.is_ordered_for(t) {
                return Err(SolutionError::BadRoute { retailer: r, period: t, route });
            }
            let d = d as f64;
            for (i, from, to) in [(0, route.k0, route.k1), (w, route.k1, route.k2), (ri, route.k2, t)] {
                sol.x[i][from] += d;
                sol.y[i][from] = true;
                for u in from..to {
                    sol.s[i][u] += d;
                }
            }
        }
    }
    sol.cost = evaluate_cost(instance, &sol);
    Ok(sol)
}

/// CSV with rows `facility,period,x,y,s` (periods 1-based) and a final `cost,<value>` line.
pub fn write_csv(instance: &Instance, sol: &Solution) -> String {
    let mut out = String::from("facility,period,x,y,s\n");
    for i in 0..instance.num_facilities() {
        let id = instance.facility_id(i);
        for t in 0..instance.num_periods() {
            writeln!(
                out,
                "{id},{},{},{},{}",
                t + 1,
                sol.x[i][t],
                u8::from(sol.y[i][t]),
                sol.s[i][t]
            )
            .unwrap();
        }
    }
    writeln!(out, "cost,{}", sol.cost).unwrap();
    out
}

#[derive(Debug, Error, PartialEq)]
#[error("solution CSV line {line}: {reason}")]
pub struct CsvError {
    pub line: usize,
    pub reason: String,
}

/// Reads the CSV produced by [`write_csv`].
pub fn read_csv(instance: &Instance, text: &str) -> Result<Solution, CsvError> {
    let mut sol = Solution::zeros(instance);
    let mut cost = None;
    for (n, line) in text.lines().enumerate().skip(1) {
        let line_no = n + 1;
        let err = |reason: String| CsvError { line: line_no, reason };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == "cost" && fields.len() == 2 {
            cost = Some(fields[1].parse::<f64>().map_err(|e| err(e.to_string()))?);
            continue;
        }
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let id: FacilityId = fields[0].parse().map_err(err)?;
        let i = instance.facility_index(id);
        let t: usize = fields[1].parse().map_err(|_| err(format!("bad period `{}`", fields[1])))?;
        if i >= instance.num_facilities() || t == 0 || t > instance.num_periods() {
            return Err(err(format!("cell {id},{t} is outside the instance")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("`{s}`: {e}")));
        sol.x[i][t - 1] = num(fields[2])?;
        sol.y[i][t - 1] = num(fields[3])? > 0.5;
        sol.s[i][t - 1] = num(fields[4])?;
    }
    sol.cost = cost.ok_or(CsvError { line: 0, reason: "missing cost line".into() })?;
    Ok(sol)
}
