//! Cost-based elimination of retailer-level MC flow variables.
//!
//! Shipping demand `t` to retailer `r` as early as period `k` is never needed
//! when holding it at the retailer over `k..t` costs at least as much as
//! holding it at the warehouse over the same periods plus a separate retailer
//! setup in `t`:
//!
//! `d^r_t · HC^r[k,t) >= d^r_t · HC^w[k,t) + sc^r_t`
//!
//! The first such `t` after `k` also rules out every later demand period for
//! shipments in `k`, so `w2_{r,k,t'}` is fixed to zero for all `t' >= t_min`.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formulations::{Formulation, MipModel, VarId};
use crate::instance::Instance;

/// First demand period `t_min[r][k]` excluded for retailer shipments in `k`,
/// or `None` when nothing is excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalSet {
    pub num_periods: usize,
    pub t_min: Vec<Vec<Option<usize>>>,
}

impl RemovalSet {
    /// Removed `(retailer, k, t')` triples, ascending.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.t_min.iter().enumerate().flat_map(move |(r, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(k, t)| t.map(|t| (k, t)))
                .flat_map(move |(k, t)| (t..self.num_periods).map(move |tp| (r, k, tp)))
        })
    }

    pub fn contains(&self, retailer: usize, k: usize, t: usize) -> bool {
        self.t_min[retailer][k].is_some_and(|m| t >= m)
    }

    /// Number of fixed variables.
    pub fn np(&self) -> usize {
        self.t_min
            .iter()
            .flatten()
            .map(|t| t.map_or(0, |m| self.num_periods - m))
            .sum()
    }

    /// Candidate variables `w2_{r,k,t}` with `k < t`.
    pub fn pot(&self) -> usize {
        self.t_min.len() * self.num_periods * self.num_periods.saturating_sub(1) / 2
    }

    /// Percentage of candidates removed.
    pub fn red(&self) -> f64 {
        let pot = self.pot();
        if pot == 0 {
            0.0
        } else {
            100.0 * self.np() as f64 / pot as f64
        }
    }

    /// The removals as forbidden `(retailer, k, t)` retailer shipments.
    pub fn forbidden(&self) -> HashSet<(usize, usize, usize)> {
        self.triples().collect()
    }
}

/// Whether the elimination condition holds for `(r, k, t)`, `k < t`.
///
/// Besides the cost inequality, retailer holding over `k..t` must be at least
/// warehouse holding. That follows from the inequality whenever `d^r_t > 0`;
/// for zero demand it keeps later periods from being removed on the strength
/// of a free setup alone.
pub fn condition_holds(instance: &Instance, retailer: usize, k: usize, t: usize) -> bool {
    let ri = instance.retailer_index(retailer);
    let wi = instance.warehouse_index(instance.warehouse_of(retailer));
    let hr: f64 = (k..t).map(|l| instance.holding_cost(ri, l)).sum();
    let hw: f64 = (k..t).map(|l| instance.holding_cost(wi, l)).sum();
    let d = instance.demand(retailer, t) as f64;
    d * hr >= d * hw + instance.setup_cost(ri, t) && hr >= hw
}

pub fn compute_removals(instance: &Instance) -> RemovalSet {
    let t_len = instance.num_periods();
    let t_min = (0..instance.num_retailers())
        .map(|r| {
            let ri = instance.retailer_index(r);
            let wi = instance.warehouse_index(instance.warehouse_of(r));
            (0..t_len)
                .map(|k| {
                    // running sums over k..t, accumulated in the same order as condition_holds
                    let (mut hr, mut hw) = (0.0, 0.0);
                    (k + 1..t_len).find(|&t| {
                        hr += instance.holding_cost(ri, t - 1);
                        hw += instance.holding_cost(wi, t - 1);
                        let d = instance.demand(r, t) as f64;
                        d * hr >= d * hw + instance.setup_cost(ri, t) && hr >= hw
                    })
                })
                .collect()
        })
        .collect();
    RemovalSet { num_periods: t_len, t_min }
}

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("expected an MC model, got {0}")]
    NotMc(Formulation),
    #[error("model has {model_periods} periods and {model_retailers} retailers, removals have {periods} and {retailers}")]
    Dimensions { model_periods: usize, model_retailers: usize, periods: usize, retailers: usize },
    #[error("model has no variable `{0}`")]
    Missing(VarId),
}

/// Copy of an MC model with the upper bound of every removed `w2` variable set to 0.
pub fn apply_removals(mc_model: &MipModel, removals: &RemovalSet) -> Result<MipModel, PreprocessError> {
    if mc_model.formulation != Formulation::Mc {
        return Err(PreprocessError::NotMc(mc_model.formulation));
    }
    let dims = mc_model.dims;
    if dims.periods != removals.num_periods || dims.retailers != removals.t_min.len() {
        return Err(PreprocessError::Dimensions {
            model_periods: dims.periods,
            model_retailers: dims.retailers,
            periods: removals.num_periods,
            retailers: removals.t_min.len(),
        });
    }
    let mut model = mc_model.clone();
    for (retailer, k, t) in removals.triples() {
        let id = VarId::W { level: 2, retailer, k, t };
        model.variable_mut(&id).ok_or(PreprocessError::Missing(id))?.upper = 0.0;
    }
    Ok(model)
}

/// CSV rows `retailer,k,t_min` (1-based periods) followed by `np,pot,red`.
pub fn removal_report(removals: &RemovalSet) -> String {
    let mut out = String::from("retailer,k,t_min\n");
    for (r, row) in removals.t_min.iter().enumerate() {
        for (k, t) in row.iter().enumerate() {
            if let Some(t) = t {
                let _ = writeln!(out, "{r},{},{}", k + 1, t + 1);
            }
        }
    }
    let _ = writeln!(out, "np,pot,red\n{},{},{}", removals.np(), removals.pot(), removals.red());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::build_mc;

    fn flat(t: usize, hr: f64, hw: f64, sc: f64, d: i64) -> Instance {
        Instance::new(
            t,
            1,
            vec![0],
            vec![vec![d; t]],
            vec![vec![100.0; t], vec![50.0; t], vec![sc; t]],
            vec![vec![0.25; t], vec![hw; t], vec![hr; t]],
        )
        .unwrap()
    }

    #[test]
    fn cheap_warehouse_removes_everything_after_k() {
        // 10 * 1.0 >= 10 * 0.5 + 0 already for t = k + 1
        let inst = flat(4, 1.0, 0.5, 0.0, 10);
        let rs = compute_removals(&inst);
        assert_eq!(rs.t_min[0], vec![Some(1), Some(2), Some(3), None]);
        assert_eq!(rs.np(), 6);
        assert_eq!(rs.pot(), 6);
        assert_eq!(rs.red(), 100.0);
        assert!(rs.contains(0, 0, 3));
        assert!(!rs.contains(0, 1, 1));
    }

    #[test]
    fn cheap_retailer_removes_nothing() {
        let inst = flat(5, 0.4, 0.5, 3.0, 10);
        let rs = compute_removals(&inst);
        assert_eq!(rs.np(), 0);
        assert_eq!(rs.red(), 0.0);
    }

    #[test]
    fn setup_cost_delays_t_min() {
        // 10 * 0.5 * (t - k) >= 12 first holds at t - k = 3
        let inst = flat(5, 1.0, 0.5, 12.0, 10);
        let rs = compute_removals(&inst);
        assert_eq!(rs.t_min[0][0], Some(3));
        assert_eq!(rs.t_min[0][1], Some(4));
        assert_eq!(rs.t_min[0][2], None);
    }

    #[test]
    fn free_setup_on_zero_demand_needs_cheaper_warehouse_holding() {
        let inst = flat(3, 0.4, 0.5, 0.0, 0);
        assert!(!condition_holds(&inst, 0, 0, 1));
        assert_eq!(compute_removals(&inst).np(), 0);
    }

    #[test]
    fn prefix_sums_agree_with_direct_condition() {
        let inst = flat(6, 0.8, 0.5, 7.0, 9);
        let rs = compute_removals(&inst);
        for k in 0..6 {
            let first = (k + 1..6).find(|&t| condition_holds(&inst, 0, k, t));
            assert_eq!(rs.t_min[0][k], first);
        }
    }

    #[test]
    fn apply_fixes_only_listed_variables() {
        let inst = flat(3, 1.0, 0.5, 0.0, 10);
        let mc = build_mc(&inst);
        let empty = RemovalSet { num_periods: 3, t_min: vec![vec![None; 3]] };
        assert_eq!(apply_removals(&mc, &empty).unwrap(), mc);

        let rs = compute_removals(&inst);
        let reduced = apply_removals(&mc, &rs).unwrap();
        let fixed: Vec<String> = reduced
            .variables
            .iter()
            .filter(|v| v.upper == 0.0 && matches!(v.id, VarId::W { .. }))
            .map(|v| v.id.to_string())
            .collect();
        assert_eq!(fixed, vec!["w2_r0_k1_t2", "w2_r0_k1_t3", "w2_r0_k2_t3"]);
        assert_eq!(reduced.variables.len(), mc.variables.len());
    }

    #[test]
    fn report_format() {
        let inst = flat(3, 1.0, 0.5, 0.0, 10);
        let text = removal_report(&compute_removals(&inst));
        assert_eq!(text, "retailer,k,t_min\n0,1,2\n0,2,3\nnp,pot,red\n3,3,100\n");
    }
}
