use rayon::prelude::*;

use super::{Cut, CutFamily, CutParams, Structure};
use crate::formulations::VarValueMap;
use crate::instance::{CumulativeDemand, Instance};

/// Every structural parameter choice of a family on this instance.
pub fn structures(instance: &Instance, family: CutFamily) -> Vec<Structure> {
    let t = instance.num_periods();
    let mut out = Vec::new();
    match family {
        CutFamily::SingleLevelStd => {
            for facility in 0..instance.num_facilities() {
                for l in 0..t {
                    out.push(Structure::SingleLevelStd { facility, l });
                }
            }
        }
        CutFamily::TwoLevelStd => {
            for facility in 0..=instance.num_warehouses() {
                let own = instance.facility_id(facility).level() as u8;
                for lower in own + 1..=2 {
                    for l in 1..t {
                        for split in 0..l {
                            out.push(Structure::TwoLevelStd { facility, lower, l, split });
                        }
                    }
                }
            }
        }
        CutFamily::ThreeLevelStd => {
            for l in 2..t {
                for plant_split in 0..l - 1 {
                    for warehouse_split in plant_split + 1..l {
                        out.push(Structure::ThreeLevelStd { l, plant_split, warehouse_split });
                    }
                }
            }
        }
        CutFamily::SingleLevel3lf => {
            for retailer in 0..instance.num_retailers() {
                for level in 0..3 {
                    for l in 0..t {
                        out.push(Structure::SingleLevel3lf { retailer, level, l });
                    }
                }
            }
        }
        CutFamily::TwoLevel3lf => {
            for retailer in 0..instance.num_retailers() {
                for (upper, lower) in [(0, 1), (0, 2), (1, 2)] {
                    for l in 1..t {
                        for split in 0..l {
                            out.push(Structure::TwoLevel3lf { retailer, upper, lower, l, split });
                        }
                    }
                }
            }
        }
        CutFamily::ThreeLevel3lf => {
            for retailer in 0..instance.num_retailers() {
                for l in 2..t {
                    for split0 in 0..l - 1 {
                        for split1 in split0 + 1..l {
                            out.push(Structure::ThreeLevel3lf { retailer, l, split0, split1 });
                        }
                    }
                }
            }
        }
    }
    out
}

/// The member of `structure` most violated at `point`: period `k` of a slot
/// goes into `S` when `d_{k,l} ŷ_k <= x̂_k`. Missing values read as zero.
pub fn most_violated(instance: &Instance, cd: &CumulativeDemand, structure: Structure, point: &VarValueMap) -> Cut {
    let l = structure.l();
    let value = |v| point.get(&v).copied().unwrap_or(0.0);
    let sets = structure
        .slots(instance)
        .iter()
        .map(|slot| {
            (slot.first..=slot.last)
                .filter(|&k| {
                    let (x, y, d) = slot.terms(instance, cd, l, k);
                    d * value(y) <= value(x)
                })
                .collect()
        })
        .collect();
    Cut::build(instance, cd, CutParams { structure, sets }).expect("sets lie inside their slots")
}

/// Most violated member of every structure of `family` whose violation exceeds `tol`.
pub fn separate(instance: &Instance, family: CutFamily, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    let cd = instance.cumulative_demand();
    structures(instance, family)
        .into_par_iter()
        .filter_map(|s| {
            let cut = most_violated(instance, &cd, s, point);
            (cut.violation(point) > tol).then_some(cut)
        })
        .collect()
}

pub fn separate_single_level_std(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::SingleLevelStd, point, tol)
}

pub fn separate_two_level_std(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::TwoLevelStd, point, tol)
}

pub fn separate_three_level_std(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::ThreeLevelStd, point, tol)
}

pub fn separate_single_level_3lf(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::SingleLevel3lf, point, tol)
}

pub fn separate_two_level_3lf(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::TwoLevel3lf, point, tol)
}

pub fn separate_three_level_3lf(instance: &Instance, point: &VarValueMap, tol: f64) -> Vec<Cut> {
    separate(instance, CutFamily::ThreeLevel3lf, point, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{solution_to_std_point, VarId};
    use crate::instance::FacilityId;
    use crate::solution::Solution;

    fn one_warehouse_two_retailers(t: usize) -> Instance {
        Instance::new(
            t,
            1,
            vec![0, 0],
            vec![(0..t as i64).map(|k| 100 + 50 * k).collect(), vec![150; t]],
            vec![vec![1000.0; t], vec![100.0; t], vec![10.0; t], vec![10.0; t]],
            vec![vec![0.25; t], vec![0.5; t], vec![0.8; t], vec![0.9; t]],
        )
        .unwrap()
    }

    fn all_families(inst: &Instance, point: &VarValueMap, tol: f64) -> usize {
        CutFamily::ALL.iter().map(|&f| separate(inst, f, point, tol).len()).sum()
    }

    #[test]
    fn lot_for_lot_with_open_setups_is_not_cut() {
        let inst = one_warehouse_two_retailers(4);
        let mut sol = Solution::lot_for_lot(&inst);
        for row in &mut sol.y {
            row.fill(true);
        }
        let mut point = solution_to_std_point(&inst, &sol);
        for r in 0..2 {
            for level in 0..3u8 {
                for k in 0..4 {
                    let d = inst.demand(r, k) as f64;
                    point.insert(VarId::X3 { level, retailer: r, period: k }, d);
                }
            }
        }
        assert_eq!(all_families(&inst, &point, 0.0), 0);
    }

    #[test]
    fn closed_network_violates_by_the_cumulative_demand() {
        let inst = one_warehouse_two_retailers(3);
        let point = VarValueMap::new();
        let cd = inst.cumulative_demand();
        for cut in separate_single_level_std(&inst, &point, 10.0) {
            let Structure::SingleLevelStd { facility, l } = cut.params.structure else { unreachable!() };
            assert_eq!(cut.violation(&point), cd.get(facility, 0, l) as f64);
            assert_eq!(cut.params.sets, vec![(0..=l).collect::<Vec<_>>()]);
        }
        let three = separate_three_level_std(&inst, &point, 10.0);
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].violation(&point), cd.get(0, 0, 2) as f64);
        for cut in separate_two_level_std(&inst, &point, 10.0) {
            let Structure::TwoLevelStd { facility, l, .. } = cut.params.structure else { unreachable!() };
            assert_eq!(cut.violation(&point), cd.get(facility, 0, l) as f64);
        }
    }

    #[test]
    fn tolerance_is_strict() {
        let inst = one_warehouse_two_retailers(1);
        // plant demand in period 1 is 250
        let point = VarValueMap::new();
        let plant_cuts = |tol| {
            separate_single_level_std(&inst, &point, tol)
                .into_iter()
                .filter(|c| c.params.structure == Structure::SingleLevelStd { facility: 0, l: 0 })
                .count()
        };
        assert_eq!(plant_cuts(249.0), 1);
        assert_eq!(plant_cuts(250.0), 0);
    }

    #[test]
    fn ties_go_into_s() {
        let inst = one_warehouse_two_retailers(1);
        let cd = inst.cumulative_demand();
        let p = FacilityId::PLANT;
        let mut point = VarValueMap::new();
        point.insert(VarId::X { facility: p, period: 0 }, 125.0);
        point.insert(VarId::Y { facility: p, period: 0 }, 0.5);
        let cut = most_violated(&inst, &cd, Structure::SingleLevelStd { facility: 0, l: 0 }, &point);
        assert_eq!(cut.params.sets, vec![vec![0]]);
        assert_eq!(cut.violation(&point), 125.0);
    }

    #[test]
    fn structure_counts() {
        let inst = one_warehouse_two_retailers(4);
        let n = |f| structures(&inst, f).len();
        assert_eq!(n(CutFamily::SingleLevelStd), 4 * 4);
        // plant to warehouses, plant to retailers, warehouse to retailers; 6 (l, split) pairs each
        assert_eq!(n(CutFamily::TwoLevelStd), 3 * 6);
        // l=3: 1 split pair; l=4: 3
        assert_eq!(n(CutFamily::ThreeLevelStd), 4);
        assert_eq!(n(CutFamily::SingleLevel3lf), 2 * 3 * 4);
        assert_eq!(n(CutFamily::TwoLevel3lf), 2 * 3 * 6);
        assert_eq!(n(CutFamily::ThreeLevel3lf), 2 * 4);
    }
}
