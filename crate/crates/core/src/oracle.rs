//! Exact solver for tiny instances by enumeration of setup patterns.
//!
//! With the setups fixed and no capacities, nothing couples two demands: each
//! unit of `d^r_t` independently travels along the cheapest route
//! `k0 <= k1 <= k2 <= t` (plant setup in `k0`, warehouse receipt in `k1`,
//! retailer receipt in `k2`) through open setups. The optimum is therefore the
//! minimum over all setup patterns of the pattern's setup cost plus the sum of
//! per-demand cheapest route costs.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::instance::{Instance, InstanceError};
use crate::solution::{evaluate_cost, from_routes, route_unit_cost, Route, RouteAssignment, Solution};

pub const DEFAULT_MAX_SETUP_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_setup_bits: usize,
    /// Retailer shipments `(retailer, k2, t)` that may not be used: demand
    /// `t` of `retailer` cannot enter the retailer in period `k2`.
    pub forbidden: HashSet<(usize, usize, usize)>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_setup_bits: DEFAULT_MAX_SETUP_BITS, forbidden: HashSet::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub cost: f64,
    pub solution: Solution,
    pub routes: RouteAssignment,
    /// Winning setup pattern, bit `facility * T + period`.
    pub pattern: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {bits} setup variables, the oracle is limited to {max}")]
    SizeGuard { bits: usize, max: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("no setup pattern serves every demand under the forbidden shipments")]
    Infeasible,
}

struct Tables<'a> {
    instance: &'a Instance,
    t: usize,
    forbidden: &'a HashSet<(usize, usize, usize)>,
    // prefix[i][u] = holding cost of facility i over periods 0..u
    prefix: Vec<Vec<f64>>,
    setup: Vec<f64>,
}

impl Tables<'_> {
    fn open(&self, mask: u64, facility: usize, period: usize) -> bool {
        mask >> (facility * self.t + period) & 1 == 1
    }

    fn setup_cost(&self, mask: u64) -> f64 {
        self.setup
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, c)| c)
            .sum()
    }

    /// Pattern cost, or `None` when some demand has no route.
    fn cost(&self, mask: u64, setup: f64) -> Option<f64> {
        let inst = self.instance;
        let t = self.t;
        let span = |i: usize, a: usize, b: usize| self.prefix[i][b] - self.prefix[i][a];
        let min_over = |k: usize, open: &dyn Fn(usize) -> bool, val: &dyn Fn(usize) -> f64| {
            (0..=k).filter(|&j| open(j)).map(val).fold(f64::INFINITY, f64::min)
        };

        // cheapest plant-to-warehouse-arrival holding for each arrival period
        let plant: Vec<f64> = (0..t)
            .map(|k1| min_over(k1, &|k0| self.open(mask, 0, k0), &|k0| span(0, k0, k1)))
            .collect();
        let mut total = setup;
        for w in 0..inst.num_warehouses() {
            let wi = inst.warehouse_index(w);
            let at_warehouse: Vec<f64> = (0..t)
                .map(|k2| min_over(k2, &|k1| self.open(mask, wi, k1), &|k1| plant[k1] + span(wi, k1, k2)))
                .collect();
            for &r in inst.retailers_of(w) {
                let ri = inst.retailer_index(r);
                for period in 0..t {
                    let d = inst.demand(r, period);
                    if d == 0 {
                        continue;
                    }
                    let best = min_over(
                        period,
                        &|k2| self.open(mask, ri, k2) && !self.forbidden.contains(&(r, k2, period)),
                        &|k2| at_warehouse[k2] + span(ri, k2, period),
                    );
                    if best.is_infinite() {
                        return None;
                    }
                    total += d as f64 * best;
                }
            }
        }
        Some(total)
    }
}

/// Cheapest lexicographically smallest route for every positive demand
/// through the setups of `mask`.
fn witness_routes(tables: &Tables<'_>, mask: u64) -> RouteAssignment {
    let inst = tables.instance;
    let mut ra = RouteAssignment::empty(inst);
    for r in 0..inst.num_retailers() {
        let wi = inst.warehouse_index(inst.warehouse_of(r));
        let ri = inst.retailer_index(r);
        for t in 0..tables.t {
            if inst.demand(r, t) == 0 {
                continue;
            }
            let mut best: Option<(f64, Route)> = None;
            for route in Route::all_for(t) {
                if !(tables.open(mask, 0, route.k0) && tables.open(mask, wi, route.k1) && tables.open(mask, ri, route.k2))
                    || tables.forbidden.contains(&(r, route.k2, t))
                {
                    continue;
                }
                let c = route_unit_cost(inst, r, t, route);
                if best.is_none_or(|(b, _)| c < b) {
                    best = Some((c, route));
                }
            }
            ra.routes[r][t] = best.map(|(_, route)| route);
        }
    }
    ra
}

pub fn solve_exact(instance: &Instance, config: &OracleConfig) -> Result<OracleResult, OracleError> {
    instance.ensure_valid()?;
    let t = instance.num_periods();
    let bits = instance.num_facilities() * t;
    if bits > config.max_setup_bits || bits > 40 {
        return Err(OracleError::SizeGuard { bits, max: config.max_setup_bits.min(40) });
    }
    let prefix = (0..instance.num_facilities())
        .map(|i| {
            let mut p = vec![0.0; t + 1];
            for u in 0..t {
                p[u + 1] = p[u] + instance.holding_cost(i, u);
            }
            p
        })
        .collect();
    let setup = (0..instance.num_facilities())
        .flat_map(|i| (0..t).map(move |u| instance.setup_cost(i, u)))
        .collect();
    let tables = Tables { instance, t, forbidden: &config.forbidden, prefix, setup };

    // Chunks of consecutive patterns run in parallel, each with its own
    // incumbent; a pattern whose setup cost alone reaches the incumbent is
    // skipped. Results reduce by (cost, pattern).
    let total: u64 = 1 << bits;
    let chunk = (total / 256).max(1);
    let best = (0..total.div_ceil(chunk))
        .into_par_iter()
        .filter_map(|c| {
            let mut local: Option<(f64, u64)> = None;
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                let setup = tables.setup_cost(mask);
                if local.is_some_and(|(b, _)| setup >= b) {
                    continue;
                }
                if let Some(cost) = tables.cost(mask, setup) {
                    if local.is_none_or(|(b, _)| cost < b) {
                        local = Some((cost, mask));
                    }
                }
            }
            local
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or(OracleError::Infeasible)?;

    let routes = witness_routes(&tables, best.1);
    let solution = from_routes(instance, &routes).expect("witness routes are ordered and complete");
    Ok(OracleResult { cost: evaluate_cost(instance, &solution), solution, routes, pattern: best.1 })
}
