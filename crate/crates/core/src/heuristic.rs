//! Multi-start randomized bottom-up DP heuristic.
//!
//! Every iteration perturbs the warehouse and retailer setup costs by a
//! random factor in `[0, alpha)`, then plans the network level by level from
//! the bottom: one Wagner-Whitin problem per retailer, one per warehouse on
//! the shipments its retailers asked for, and one for the plant on the
//! warehouse shipments with its original costs. The assembled plan is priced
//! with the original costs and the cheapest iteration wins.
//!
//! Iteration `i` draws from ChaCha8 seeded with `config.seed` on stream `i`,
//! so results do not depend on whether iterations run serially or in parallel.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::instance::{Instance, InstanceError};
use crate::lotsizing::{solve_uls, UlsError};
use crate::solution::{evaluate_cost, Solution};

pub const DEFAULT_ALPHA: f64 = 0.20;
pub const DEFAULT_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicConfig {
    pub alpha: f64,
    pub iterations: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HeuristicResult {
    pub best: Solution,
    pub best_cost: f64,
    pub best_iteration: usize,
    pub per_iteration_costs: Vec<f64>,
    pub wall_time: f64,
}

impl HeuristicResult {
    pub fn average_cost(&self) -> f64 {
        self.per_iteration_costs.iter().sum::<f64>() / self.per_iteration_costs.len() as f64
    }
}

#[derive(Debug, Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("alpha must be finite and nonnegative, got {0}")]
    BadAlpha(f64),
    #[error("at least one iteration is required")]
    NoIterations,
    #[error("lot-sizing subproblem failed: {0}")]
    Subproblem(#[from] UlsError),
}

/// One line of the iteration log.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub cost: f64,
    pub seed: u64,
}

pub fn iteration_rng(seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng
}

/// Setup costs with every warehouse and retailer entry scaled by `1 + u`,
/// `u ~ U[0, alpha)`. The plant row is copied unchanged. Draws go warehouses
/// ascending, then retailers ascending, periods ascending within each.
pub fn randomize_setup_costs<R: Rng + ?Sized>(instance: &Instance, alpha: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let mut costs = instance.setup_matrix().to_vec();
    for row in costs.iter_mut().skip(1) {
        for c in row.iter_mut() {
            let u = if alpha > 0.0 { rng.random_range(0.0..alpha) } else { 0.0 };
            *c += u * *c;
        }
    }
    costs
}

fn check_config(instance: &Instance, config: &HeuristicConfig) -> Result<(), HeuristicError> {
    instance.ensure_valid()?;
    if !(config.alpha.is_finite() && config.alpha >= 0.0) {
        return Err(HeuristicError::BadAlpha(config.alpha));
    }
    if config.iterations == 0 {
        return Err(HeuristicError::NoIterations);
    }
    Ok(())
}

/// Plans the network bottom-up with the given setup costs and returns the
/// solution priced at the instance's original costs.
pub fn bottom_up_plan(instance: &Instance, setup_costs: &[Vec<f64>]) -> Result<Solution, HeuristicError> {
    let t = instance.num_periods();
    let mut sol = Solution::zeros(instance);

    let plan_facility = |i: usize, demand: &[f64], setup: &[f64], sol: &mut Solution| -> Result<(), UlsError> {
        let plan = solve_uls(demand, setup, instance.holding_matrix()[i].as_slice())?;
        sol.s[i] = plan.stock(demand);
        sol.x[i] = plan.produce;
        sol.y[i] = plan.setup;
        Ok(())
    };

    let mut warehouse_demand = vec![vec![0.0; t]; instance.num_warehouses()];
    for r in 0..instance.num_retailers() {
        let ri = instance.retailer_index(r);
        let demand: Vec<f64> = instance.demand_matrix()[r].iter().map(|&d| d as f64).collect();
        plan_facility(ri, &demand, &setup_costs[ri], &mut sol)?;
        let w = instance.warehouse_of(r);
        for (acc, q) in warehouse_demand[w].iter_mut().zip(&sol.x[ri]) {
            *acc += q;
        }
    }

    let mut plant_demand = vec![0.0; t];
    for (w, demand) in warehouse_demand.iter().enumerate() {
        let wi = instance.warehouse_index(w);
        plan_facility(wi, demand, &setup_costs[wi], &mut sol)?;
        for (acc, q) in plant_demand.iter_mut().zip(&sol.x[wi]) {
            *acc += q;
        }
    }

    plan_facility(0, &plant_demand, &instance.setup_matrix()[0], &mut sol)?;
    sol.cost = evaluate_cost(instance, &sol);
    Ok(sol)
}

/// The solution built by iteration `iteration` of a run with `config`.
pub fn construct_iteration(
    instance: &Instance,
    config: &HeuristicConfig,
    iteration: usize,
) -> Result<Solution, HeuristicError> {
    let mut rng = iteration_rng(config.seed, iteration);
    let costs = randomize_setup_costs(instance, config.alpha, &mut rng);
    bottom_up_plan(instance, &costs)
}

pub fn run(instance: &Instance, config: &HeuristicConfig) -> Result<HeuristicResult, HeuristicError> {
    check_config(instance, config)?;
    let started = Instant::now();
    let cost_of = |i: usize| construct_iteration(instance, config, i).map(|s| s.cost);
    let per_iteration_costs: Vec<f64> = if config.parallel {
        (0..config.iterations)
            .into_par_iter()
            .map(cost_of)
            .collect::<Result<_, _>>()?
    } else {
        (0..config.iterations).map(cost_of).collect::<Result<_, _>>()?
    };

    let mut best_iteration = 0;
    for (i, &c) in per_iteration_costs.iter().enumerate() {
        if c < per_iteration_costs[best_iteration] {
            best_iteration = i;
        }
    }
    let best = construct_iteration(instance, config, best_iteration)?;
    Ok(HeuristicResult {
        best_cost: best.cost,
        best,
        best_iteration,
        per_iteration_costs,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Iteration log as JSON lines (`{"iter":..,"cost":..,"seed":..}`), iterations 1-based.
pub fn iteration_log(result: &HeuristicResult, config: &HeuristicConfig) -> String {
    result
        .per_iteration_costs
        .iter()
        .enumerate()
        .map(|(i, &cost)| {
            let rec = IterationRecord { iter: i + 1, cost, seed: config.seed };
            serde_json::to_string(&rec).expect("record serializes") + "\n"
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::check_feasible;

    fn two_retailers() -> Instance {
        Instance::new(
            3,
            1,
            vec![0, 0],
            vec![vec![10, 0, 20], vec![5, 5, 5]],
            vec![vec![500.0; 3], vec![50.0; 3], vec![8.0, 9.0, 10.0], vec![6.0; 3]],
            vec![vec![0.25; 3], vec![0.5; 3], vec![1.0; 3], vec![0.9; 3]],
        )
        .unwrap()
    }

    #[test]
    fn zero_alpha_keeps_costs() {
        let inst = two_retailers();
        let mut rng = iteration_rng(3, 0);
        assert_eq!(randomize_setup_costs(&inst, 0.0, &mut rng), inst.setup_matrix().to_vec());
    }

    #[test]
    fn perturbation_stays_in_range_and_spares_the_plant() {
        let inst = two_retailers();
        let mut rng = iteration_rng(11, 4);
        let c = randomize_setup_costs(&inst, 0.2, &mut rng);
        assert_eq!(c[0], inst.setup_matrix()[0]);
        for (row, orig) in c.iter().zip(inst.setup_matrix()).skip(1) {
            for (a, b) in row.iter().zip(orig) {
                assert!(*a >= *b && *a <= 1.2 * b);
            }
        }
    }

    #[test]
    fn same_stream_same_costs() {
        let inst = two_retailers();
        let a = randomize_setup_costs(&inst, 0.2, &mut iteration_rng(5, 2));
        let b = randomize_setup_costs(&inst, 0.2, &mut iteration_rng(5, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_decomposition_matches_hand_composition() {
        let inst = two_retailers();
        let cfg = HeuristicConfig { alpha: 0.0, iterations: 1, seed: 0, parallel: false };
        let res = run(&inst, &cfg).unwrap();

        let r0 = solve_uls(&[10.0, 0.0, 20.0], &[8.0, 9.0, 10.0], &[1.0; 3]).unwrap();
        let r1 = solve_uls(&[5.0; 3], &[6.0; 3], &[0.9; 3]).unwrap();
        let wd: Vec<f64> = (0..3).map(|t| r0.produce[t] + r1.produce[t]).collect();
        let w = solve_uls(&wd, &[50.0; 3], &[0.5; 3]).unwrap();
        let p = solve_uls(&w.produce, &[500.0; 3], &[0.25; 3]).unwrap();
        let expected = r0.cost + r1.cost + w.cost + p.cost;
        assert!((res.best_cost - expected).abs() < 1e-9);
        assert!(check_feasible(&inst, &res.best, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_config() {
        let inst = two_retailers();
        let bad = HeuristicConfig { alpha: f64::NAN, ..Default::default() };
        assert!(matches!(run(&inst, &bad), Err(HeuristicError::BadAlpha(_))));
        let none = HeuristicConfig { iterations: 0, ..Default::default() };
        assert!(matches!(run(&inst, &none), Err(HeuristicError::NoIterations)));
    }

    #[test]
    fn log_has_one_line_per_iteration() {
        let inst = two_retailers();
        let cfg = HeuristicConfig { iterations: 4, seed: 9, ..Default::default() };
        let res = run(&inst, &cfg).unwrap();
        let log = iteration_log(&res, &cfg);
        assert_eq!(log.lines().count(), 4);
        assert!(log.starts_with("{\"iter\":1,\"cost\":"));
    }
}
