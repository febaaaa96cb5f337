//! Wagner-Whitin dynamic program for single-facility uncapacitated lot-sizing.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct UlsPlan {
    pub produce: Vec<f64>,
    pub setup: Vec<bool>,
    pub cost: f64,
}

impl UlsPlan {
    /// End-of-period stock implied by the plan and the demand it serves.
    pub fn stock(&self, demand: &[f64]) -> Vec<f64> {
        let mut s = 0.0;
        self.produce
            .iter()
            .zip(demand)
            .map(|(p, d)| {
                s += p - d;
                s
            })
            .collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum UlsError {
    #[error("input vectors have different lengths (demand {demand}, setup {setup}, holding {holding})")]
    LengthMismatch { demand: usize, setup: usize, holding: usize },
    #[error("{what} in period {period} is negative or not finite ({value})")]
    BadValue { what: &'static str, period: usize, value: f64 },
}

/// Cost-minimal plan for `min Σ sc_t y_t + hc_t s_t` under flow balance with
/// zero initial stock and no capacity.
///
/// `F(t) = min_k F(k-1) + sc_k [D(k,t) > 0] + Σ_{l=k..t} d_l (HC_l - HC_k)`
/// where `HC` is the prefix sum of holding costs. A block that ships nothing
/// pays no setup. Ties go to the earliest production period.
pub fn solve_uls(demand: &[f64], setup_cost: &[f64], holding_cost: &[f64]) -> Result<UlsPlan, UlsError> {
    let n = demand.len();
    if setup_cost.len() != n || holding_cost.len() != n {
        return Err(UlsError::LengthMismatch {
            demand: n,
            setup: setup_cost.len(),
            holding: holding_cost.len(),
        });
    }
    for (what, v) in [("demand", demand), ("setup cost", setup_cost), ("holding cost", holding_cost)] {
        if let Some((period, &value)) = v.iter().enumerate().find(|(_, &x)| !(x >= 0.0 && x.is_finite())) {
            return Err(UlsError::BadValue { what, period, value });
        }
    }

    // hc_prefix[l] = Σ_{u<l} hc_u, dem[l] = Σ_{u<l} d_u, weighted[l] = Σ_{u<l} d_u hc_prefix[u]
    let mut hc_prefix = vec![0.0; n + 1];
    let mut dem = vec![0.0; n + 1];
    let mut weighted = vec![0.0; n + 1];
    for l in 0..n {
        hc_prefix[l + 1] = hc_prefix[l] + holding_cost[l];
        dem[l + 1] = dem[l] + demand[l];
        weighted[l + 1] = weighted[l] + demand[l] * hc_prefix[l];
    }

    let mut best = vec![0.0; n + 1];
    let mut start = vec![0usize; n + 1];
    for t in 1..=n {
        let mut value = f64::INFINITY;
        let mut arg = 0;
        for k in 0..t {
            let qty = dem[t] - dem[k];
            let setup = if qty > 0.0 { setup_cost[k] } else { 0.0 };
            let holding = (weighted[t] - weighted[k]) - hc_prefix[k] * qty;
            let cand = best[k] + setup + holding;
            if cand < value {
                value = cand;
                arg = k;
            }
        }
        best[t] = value;
        start[t] = arg;
    }

    let mut produce = vec![0.0; n];
    let mut setup = vec![false; n];
    let mut t = n;
    while t > 0 {
        let k = start[t];
        let qty: f64 = demand[k..t].iter().sum();
        if qty > 0.0 {
            produce[k] = qty;
            setup[k] = true;
        }
        t = k;
    }

    let mut plan = UlsPlan { produce, setup, cost: 0.0 };
    let stock = plan.stock(demand);
    plan.cost = (0..n)
        .map(|t| if plan.setup[t] { setup_cost[t] } else { 0.0 } + holding_cost[t] * stock[t])
        .sum();
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_demand_costs_nothing() {
        let plan = solve_uls(&[0.0; 3], &[5.0, 1.0, 7.0], &[1.0; 3]).unwrap();
        assert_eq!(plan.cost, 0.0);
        assert!(plan.setup.iter().all(|&s| !s));
    }

    #[test]
    fn single_period() {
        let plan = solve_uls(&[12.0], &[40.0], &[3.0]).unwrap();
        assert_eq!(plan.cost, 40.0);
        assert_eq!(plan.produce, vec![12.0]);
    }

    #[test]
    fn classic_five_period_example() {
        // Enumerating all 32 setup subsets (serving each period from the
        // latest open setup) gives 500, reached by {1,3,4,5} and by
        // {1,2,3,4,5}; the earliest-period tie-break picks the former.
        let plan = solve_uls(
            &[60.0, 100.0, 140.0, 200.0, 120.0],
            &[100.0; 5],
            &[1.0; 5],
        )
        .unwrap();
        assert_eq!(plan.cost, 500.0);
        assert_eq!(plan.setup, vec![true, false, true, true, true]);
        assert_eq!(plan.produce, vec![160.0, 0.0, 140.0, 200.0, 120.0]);
    }

    #[test]
    fn ties_prefer_earliest_production() {
        // producing both units in period 1 or one in each period costs the same
        let plan = solve_uls(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(plan.cost, 2.0);
        assert_eq!(plan.setup, vec![true, false]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            solve_uls(&[1.0, 2.0], &[1.0], &[1.0, 1.0]),
            Err(UlsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            solve_uls(&[1.0, -2.0], &[1.0, 1.0], &[1.0, 1.0]),
            Err(UlsError::BadValue { what: "demand", period: 1, .. })
        ));
    }

    #[test]
    fn stock_follows_balance() {
        let demand = [60.0, 100.0, 140.0, 200.0, 120.0];
        let plan = solve_uls(&demand, &[100.0; 5], &[1.0; 5]).unwrap();
        assert_eq!(plan.stock(&demand), vec![100.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
