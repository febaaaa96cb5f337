//! Points in one formulation's variable space built from another's.

use thiserror::Error;

use super::{VarId, VarValueMap};
use crate::instance::Instance;
use crate::solution::{from_routes, RouteAssignment, Solution, SolutionError};

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("point has no value for `{0}`")]
    Missing(VarId),
    #[error(transparent)]
    Routes(#[from] SolutionError),
}

/// STD values of a solution; `y` as 0/1.
pub fn solution_to_std_point(instance: &Instance, sol: &Solution) -> VarValueMap {
    let mut point = VarValueMap::new();
    for i in 0..instance.num_facilities() {
        let facility = instance.facility_id(i);
        for t in 0..instance.num_periods() {
            point.insert(VarId::X { facility, period: t }, sol.x[i][t]);
            point.insert(VarId::S { facility, period: t }, sol.s[i][t]);
            point.insert(VarId::Y { facility, period: t }, if sol.y[i][t] { 1.0 } else { 0.0 });
        }
    }
    point
}

fn setups(instance: &Instance, sol: &Solution, point: &mut VarValueMap) {
    for i in 0..instance.num_facilities() {
        let facility = instance.facility_id(i);
        for t in 0..instance.num_periods() {
            point.insert(VarId::Y { facility, period: t }, if sol.y[i][t] { 1.0 } else { 0.0 });
        }
    }
}

/// 3LF point that ships every demand along its route. Every 3LF variable gets a value.
pub fn routes_to_3lf_point(instance: &Instance, routes: &RouteAssignment) -> Result<VarValueMap, MappingError> {
    let sol = from_routes(instance, routes)?;
    let t_len = instance.num_periods();
    let mut point = VarValueMap::new();
    setups(instance, &sol, &mut point);
    for r in 0..instance.num_retailers() {
        for level in 0..3u8 {
            for t in 0..t_len {
                point.insert(VarId::X3 { level, retailer: r, period: t }, 0.0);
                point.insert(VarId::S3 { level, retailer: r, period: t }, 0.0);
            }
        }
        for t in 0..t_len {
            let d = instance.demand(r, t) as f64;
            let Some(route) = routes.routes[r][t].filter(|_| d > 0.0) else {
                continue;
            };
            for (level, from, to) in [(0u8, route.k0, route.k1), (1, route.k1, route.k2), (2, route.k2, t)] {
                *point.get_mut(&VarId::X3 { level, retailer: r, period: from }).unwrap() += d;
                for u in from..to {
                    *point.get_mut(&VarId::S3 { level, retailer: r, period: u }).unwrap() += d;
                }
            }
        }
    }
    Ok(point)
}

/// MC point that ships every demand along its route. Every MC variable gets a value.
pub fn routes_to_mc_point(instance: &Instance, routes: &RouteAssignment) -> Result<VarValueMap, MappingError> {
    let sol = from_routes(instance, routes)?;
    let mut point = VarValueMap::new();
    setups(instance, &sol, &mut point);
    for r in 0..instance.num_retailers() {
        for t in 0..instance.num_periods() {
            for level in 0..3u8 {
                for k in 0..=t {
                    point.insert(VarId::W { level, retailer: r, k, t }, 0.0);
                }
                for k in 0..t {
                    point.insert(VarId::Sigma { level, retailer: r, k, t }, 0.0);
                }
            }
            let d = instance.demand(r, t) as f64;
            let Some(route) = routes.routes[r][t].filter(|_| d > 0.0) else {
                continue;
            };
            for (level, from, to) in [(0u8, route.k0, route.k1), (1, route.k1, route.k2), (2, route.k2, t)] {
                point.insert(VarId::W { level, retailer: r, k: from, t }, d);
                for k in from..to {
                    point.insert(VarId::Sigma { level, retailer: r, k, t }, d);
                }
            }
        }
    }
    Ok(point)
}

/// Aggregates a 3LF point into STD space: each facility's flow and stock is
/// the sum of the per-retailer flows and stocks it handles; setups pass through.
pub fn map_3lf_to_std(instance: &Instance, point: &VarValueMap) -> Result<VarValueMap, MappingError> {
    let get = |id: VarId| point.get(&id).copied().ok_or(MappingError::Missing(id));
    let t_len = instance.num_periods();
    let mut out = VarValueMap::new();
    for i in 0..instance.num_facilities() {
        let facility = instance.facility_id(i);
        let level = facility.level() as u8;
        let retailers = instance.descendant_retailers(i);
        for t in 0..t_len {
            let (mut x, mut s) = (0.0, 0.0);
            for &r in &retailers {
                x += get(VarId::X3 { level, retailer: r, period: t })?;
                s += get(VarId::S3 { level, retailer: r, period: t })?;
            }
            out.insert(VarId::X { facility, period: t }, x);
            out.insert(VarId::S { facility, period: t }, s);
            let y = VarId::Y { facility, period: t };
            out.insert(y, get(y)?);
        }
    }
    Ok(out)
}
