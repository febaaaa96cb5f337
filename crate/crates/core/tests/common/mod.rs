//! Independent reference implementations and instance samplers shared by the
//! integration tests.

#![allow(dead_code)]

use lotforge::instance::Instance;
use rand::Rng;

/// Exhaustive single-facility lot-sizing: every subset of setup periods,
/// each demand served from the latest open period at or before it.
pub fn brute_force_uls(demand: &[f64], setup: &[f64], holding: &[f64]) -> f64 {
    let t = demand.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << t) {
        let mut cost = 0.0;
        let mut ok = true;
        let mut last_open: Option<usize> = None;
        for p in 0..t {
            if mask >> p & 1 == 1 {
                last_open = Some(p);
                cost += setup[p];
            }
            if demand[p] > 0.0 {
                match last_open {
                    Some(k) => cost += demand[p] * holding[k..p].iter().sum::<f64>(),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok && cost < best {
            best = cost;
        }
    }
    best
}

/// Unit cost of moving one unit of retailer demand `t` through the plant in
/// `k0`, the warehouse in `k1` and the retailer in `k2`.
fn route_cost(inst: &Instance, r: usize, t: usize, k0: usize, k1: usize, k2: usize) -> f64 {
    let w = inst.warehouse_index(inst.warehouse_of(r));
    let ri = inst.retailer_index(r);
    let h = |i: usize, a: usize, b: usize| (a..b).map(|u| inst.holding_cost(i, u)).sum::<f64>();
    h(0, k0, k1) + h(w, k1, k2) + h(ri, k2, t)
}

/// Exact optimum by direct route enumeration.
///
/// Plant and warehouse setup patterns are enumerated; for each pattern every
/// retailer independently picks one route per positive demand among all
/// route combinations whose upper-level periods are open, paying its own
/// setups and holding. `forbidden(r, k2, t)` excludes retailer receipts.
pub fn route_enumeration_optimum(inst: &Instance, forbidden: &dyn Fn(usize, usize, usize) -> bool) -> f64 {
    let t_len = inst.num_periods();
    let upper_bits = (1 + inst.num_warehouses()) * t_len;
    assert!(upper_bits <= 16, "too many upper-level setups for enumeration");

    // per retailer: (needed upper mask, own setup + holding cost) of every route combination
    let mut options: Vec<Vec<(u32, f64)>> = Vec::new();
    for r in 0..inst.num_retailers() {
        let w = inst.warehouse_of(r);
        let ri = inst.retailer_index(r);
        let demands: Vec<usize> = (0..t_len).filter(|&t| inst.demand(r, t) > 0).collect();
        let mut combos: Vec<(u32, u32, f64)> = vec![(0, 0, 0.0)];
        for &t in &demands {
            let d = inst.demand(r, t) as f64;
            let mut next = Vec::new();
            for &(upper, own, cost) in &combos {
                for k0 in 0..=t {
                    for k1 in k0..=t {
                        for k2 in k1..=t {
                            if forbidden(r, k2, t) {
                                continue;
                            }
                            let need = 1 << k0 | 1 << ((1 + w) * t_len + k1);
                            next.push((upper | need, own | 1 << k2, cost + d * route_cost(inst, r, t, k0, k1, k2)));
                        }
                    }
                }
            }
            combos = next;
        }
        options.push(
            combos
                .into_iter()
                .map(|(upper, own, cost)| {
                    let setups: f64 = (0..t_len).filter(|k| own >> k & 1 == 1).map(|k| inst.setup_cost(ri, k)).sum();
                    (upper, cost + setups)
                })
                .collect(),
        );
    }

    let mut best = f64::INFINITY;
    for pattern in 0u32..(1 << upper_bits) {
        let mut total: f64 = (0..upper_bits)
            .filter(|b| pattern >> b & 1 == 1)
            .map(|b| inst.setup_cost(b / t_len, b % t_len))
            .sum();
        for opts in &options {
            let m = opts
                .iter()
                .filter(|(need, _)| need & !pattern == 0)
                .map(|&(_, c)| c)
                .fold(f64::INFINITY, f64::min);
            total += m;
        }
        best = best.min(total);
    }
    best
}

/// Random multiple of 1/64 in `[0, max]`.
pub fn dyadic<R: Rng>(rng: &mut R, max: f64) -> f64 {
    rng.random_range(0..=(max * 64.0) as u32) as f64 / 64.0
}

/// Instance with integer demands and setups and dyadic holding costs, so
/// that every cost sum is exact in floating point. Retailer `r < warehouses`
/// goes to warehouse `r`, the others to random warehouses.
pub fn sized_dyadic<R: Rng>(rng: &mut R, warehouses: usize, retailers: usize, periods: usize) -> Instance {
    let facilities = 1 + warehouses + retailers;
    let assign: Vec<usize> = (0..retailers).map(|r| if r < warehouses { r } else { rng.random_range(0..warehouses) }).collect();
    let demand = (0..retailers)
        .map(|_| (0..periods).map(|_| if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=30) }).collect())
        .collect();
    let setup_scale = [400, 100, 20];
    let setup = (0..facilities)
        .map(|i| {
            let level = if i == 0 { 0 } else if i <= warehouses { 1 } else { 2 };
            (0..periods).map(|_| rng.random_range(0..=setup_scale[level]) as f64).collect()
        })
        .collect();
    let holding = (0..facilities).map(|_| (0..periods).map(|_| dyadic(rng, 2.0)).collect()).collect();
    Instance::new(periods, warehouses, assign, demand, setup, holding).expect("sampled instance is valid")
}

/// [`sized_dyadic`] with `|W| <= 2`, `|R| <= 3`, `T <= 4` and at most 20 setup variables.
pub fn tiny_dyadic<R: Rng>(rng: &mut R) -> Instance {
    let warehouses = rng.random_range(1..=2);
    let retailers = rng.random_range(warehouses..=3);
    let periods = rng.random_range(1..=4).min(20 / (1 + warehouses + retailers));
    sized_dyadic(rng, warehouses, retailers, periods)
}
