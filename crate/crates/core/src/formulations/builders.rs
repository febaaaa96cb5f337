use super::{Formulation, LinExpr, MipModel, ModelDims, Sense, VarId};
use crate::instance::{FacilityId, FacilityKind, Instance};

/// Closed-form variable and row counts of a formulation for a network shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub variables: usize,
    pub binaries: usize,
    pub constraints: usize,
}

impl ModelSize {
    pub fn of(formulation: Formulation, dims: ModelDims) -> Self {
        let (t, r) = (dims.periods, dims.retailers);
        let f = 1 + dims.warehouses + r;
        let pairs = t * (t + 1) / 2;
        let strict_pairs = t * t.saturating_sub(1) / 2;
        match formulation {
            Formulation::Std => Self { variables: 3 * f * t, binaries: f * t, constraints: 2 * f * t },
            Formulation::Mc => Self {
                variables: 3 * r * pairs + 3 * r * strict_pairs + f * t,
                binaries: f * t,
                constraints: 6 * r * pairs,
            },
            Formulation::ThreeLevel => Self {
                variables: 6 * r * t + f * t,
                binaries: f * t,
                constraints: 6 * r * t,
            },
        }
    }

    pub fn of_model(model: &MipModel) -> Self {
        Self {
            variables: model.variables.len(),
            binaries: model.num_binaries(),
            constraints: model.constraints.len(),
        }
    }
}

fn dims(instance: &Instance) -> ModelDims {
    ModelDims {
        periods: instance.num_periods(),
        warehouses: instance.num_warehouses(),
        retailers: instance.num_retailers(),
    }
}

fn add_setup_vars(model: &mut MipModel, instance: &Instance) {
    for i in 0..instance.num_facilities() {
        let facility = instance.facility_id(i);
        for t in 0..instance.num_periods() {
            let y = VarId::Y { facility, period: t };
            model.add_var(y, 0.0, 1.0, true).expect("fresh variable");
            model.objective.add(y, instance.setup_cost(i, t));
        }
    }
}

// Stock left after the last period is pinned to zero in every formulation.
fn stock_upper(t: usize, last: usize) -> f64 {
    if t == last {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Standard formulation: per-facility flows `x`, stocks `s` and setups `y`,
/// with big-M `d^i_{t,T}` on each setup row.
pub fn build_std(instance: &Instance) -> MipModel {
    let t_len = instance.num_periods();
    let last = t_len - 1;
    let cd = instance.cumulative_demand();
    let mut model = MipModel::new(Formulation::Std, dims(instance));
    add_setup_vars(&mut model, instance);

    let ids: Vec<FacilityId> = (0..instance.num_facilities()).map(|i| instance.facility_id(i)).collect();
    for (i, &facility) in ids.iter().enumerate() {
        for t in 0..t_len {
            model
                .add_var(VarId::X { facility, period: t }, 0.0, cd.to_end(i, t) as f64, false)
                .expect("fresh variable");
            let s = VarId::S { facility, period: t };
            model.add_var(s, 0.0, stock_upper(t, last), false).expect("fresh variable");
            model.objective.add(s, instance.holding_cost(i, t));
        }
    }

    for (i, &facility) in ids.iter().enumerate() {
        let succ = instance.successors(i);
        for t in 0..t_len {
            let mut e = LinExpr::new();
            if t > 0 {
                e.add(VarId::S { facility, period: t - 1 }, 1.0);
            }
            e.add(VarId::X { facility, period: t }, 1.0);
            for &j in &succ {
                e.add(VarId::X { facility: ids[j], period: t }, -1.0);
            }
            e.add(VarId::S { facility, period: t }, -1.0);
            let rhs = if facility.kind == FacilityKind::Retailer {
                instance.demand(facility.index, t) as f64
            } else {
                0.0
            };
            model.add_constraint(format!("bal_{facility}_t{}", t + 1), e, Sense::Eq, rhs);
        }
    }

    for (i, &facility) in ids.iter().enumerate() {
        for t in 0..t_len {
            let e = LinExpr::new()
                .with(VarId::X { facility, period: t }, 1.0)
                .with(VarId::Y { facility, period: t }, -(cd.to_end(i, t) as f64));
            model.add_constraint(format!("setup_{facility}_t{}", t + 1), e, Sense::Le, 0.0);
        }
    }
    model
}

/// Multi-commodity formulation: flows and stocks disaggregated by retailer
/// and demand period.
pub fn build_mc(instance: &Instance) -> MipModel {
    let t_len = instance.num_periods();
    let mut model = MipModel::new(Formulation::Mc, dims(instance));
    add_setup_vars(&mut model, instance);

    for r in 0..instance.num_retailers() {
        let w = instance.warehouse_index(instance.warehouse_of(r));
        let holders = [0, w, instance.retailer_index(r)];
        for t in 0..t_len {
            let d = instance.demand(r, t) as f64;
            for k in 0..=t {
                for level in 0..3u8 {
                    model
                        .add_var(VarId::W { level, retailer: r, k, t }, 0.0, d, false)
                        .expect("fresh variable");
                }
            }
            for k in 0..t {
                for level in 0..3u8 {
                    let sig = VarId::Sigma { level, retailer: r, k, t };
                    model.add_var(sig, 0.0, f64::INFINITY, false).expect("fresh variable");
                    model.objective.add(sig, instance.holding_cost(holders[level as usize], k));
                }
            }
        }
    }

    for r in 0..instance.num_retailers() {
        for t in 0..t_len {
            let d = instance.demand(r, t) as f64;
            for k in 0..=t {
                for level in 0..3u8 {
                    let mut e = LinExpr::new();
                    if k > 0 {
                        e.add(VarId::Sigma { level, retailer: r, k: k - 1, t }, 1.0);
                    }
                    e.add(VarId::W { level, retailer: r, k, t }, 1.0);
                    if level < 2 {
                        e.add(VarId::W { level: level + 1, retailer: r, k, t }, -1.0);
                    }
                    if k < t {
                        e.add(VarId::Sigma { level, retailer: r, k, t }, -1.0);
                    }
                    let rhs = if level == 2 && k == t { d } else { 0.0 };
                    model.add_constraint(
                        format!("bal{level}_r{r}_k{}_t{}", k + 1, t + 1),
                        e,
                        Sense::Eq,
                        rhs,
                    );
                }
            }
        }
    }

    for r in 0..instance.num_retailers() {
        for t in 0..t_len {
            let d = instance.demand(r, t) as f64;
            for k in 0..=t {
                for level in 0..3u8 {
                    let facility = instance.facility_id(instance.predecessor_at_level(r, level as usize));
                    let e = LinExpr::new()
                        .with(VarId::W { level, retailer: r, k, t }, 1.0)
                        .with(VarId::Y { facility, period: k }, -d);
                    model.add_constraint(
                        format!("setup{level}_r{r}_k{}_t{}", k + 1, t + 1),
                        e,
                        Sense::Le,
                        0.0,
                    );
                }
            }
        }
    }
    model
}

/// Three-level lot-sizing based formulation: upper-level flows and stocks
/// disaggregated by retailer only.
pub fn build_3lf(instance: &Instance) -> MipModel {
    let t_len = instance.num_periods();
    let last = t_len - 1;
    let cd = instance.cumulative_demand();
    let mut model = MipModel::new(Formulation::ThreeLevel, dims(instance));
    add_setup_vars(&mut model, instance);

    for r in 0..instance.num_retailers() {
        let ri = instance.retailer_index(r);
        for level in 0..3u8 {
            let holder = instance.predecessor_at_level(r, level as usize);
            for t in 0..t_len {
                model
                    .add_var(VarId::X3 { level, retailer: r, period: t }, 0.0, cd.to_end(ri, t) as f64, false)
                    .expect("fresh variable");
                let s = VarId::S3 { level, retailer: r, period: t };
                model.add_var(s, 0.0, stock_upper(t, last), false).expect("fresh variable");
                model.objective.add(s, instance.holding_cost(holder, t));
            }
        }
    }

    for r in 0..instance.num_retailers() {
        for level in 0..3u8 {
            for t in 0..t_len {
                let mut e = LinExpr::new();
                if t > 0 {
                    e.add(VarId::S3 { level, retailer: r, period: t - 1 }, 1.0);
                }
                e.add(VarId::X3 { level, retailer: r, period: t }, 1.0);
                if level < 2 {
                    e.add(VarId::X3 { level: level + 1, retailer: r, period: t }, -1.0);
                }
                e.add(VarId::S3 { level, retailer: r, period: t }, -1.0);
                let rhs = if level == 2 { instance.demand(r, t) as f64 } else { 0.0 };
                model.add_constraint(format!("bal{level}_r{r}_t{}", t + 1), e, Sense::Eq, rhs);
            }
        }
    }

    for r in 0..instance.num_retailers() {
        let ri = instance.retailer_index(r);
        for level in 0..3u8 {
            let facility = instance.facility_id(instance.predecessor_at_level(r, level as usize));
            for t in 0..t_len {
                let e = LinExpr::new()
                    .with(VarId::X3 { level, retailer: r, period: t }, 1.0)
                    .with(VarId::Y { facility, period: t }, -(cd.to_end(ri, t) as f64));
                model.add_constraint(format!("setup{level}_r{r}_t{}", t + 1), e, Sense::Le, 0.0);
            }
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(demand: Vec<i64>) -> Instance {
        let t = demand.len();
        Instance::new(
            t,
            1,
            vec![0],
            vec![demand],
            vec![vec![100.0; t], vec![10.0; t], vec![1.0; t]],
            vec![vec![0.25; t], vec![0.5; t], vec![1.0; t]],
        )
        .unwrap()
    }

    #[test]
    fn std_counts_for_smallest_chain() {
        let m = build_std(&chain(vec![3, 4]));
        let count = |f: fn(&VarId) -> bool| m.variables.iter().filter(|v| f(&v.id)).count();
        assert_eq!(count(|v| matches!(v, VarId::X { .. })), 6);
        assert_eq!(count(|v| matches!(v, VarId::S { .. })), 6);
        assert_eq!(count(|v| matches!(v, VarId::Y { .. })), 6);
        assert_eq!(m.num_binaries(), 6);
        assert_eq!(m.constraints.iter().filter(|c| c.name.starts_with("bal")).count(), 6);
        assert_eq!(m.constraints.iter().filter(|c| c.name.starts_with("setup")).count(), 6);
        m.check().unwrap();
    }

    #[test]
    fn zero_demand_closes_every_flow() {
        let inst = chain(vec![0, 0, 0]);
        for m in [build_std(&inst), build_3lf(&inst)] {
            for v in &m.variables {
                if matches!(v.id, VarId::X { .. } | VarId::X3 { .. }) {
                    assert_eq!(v.upper, 0.0, "{}", v.id);
                }
            }
        }
    }

    #[test]
    fn mc_commodity_pairs() {
        let m = build_mc(&chain(vec![3, 4]));
        let w: Vec<String> = m
            .variables
            .iter()
            .filter(|v| matches!(v.id, VarId::W { .. }))
            .map(|v| v.id.to_string())
            .collect();
        assert_eq!(w.len(), 9);
        for pair in ["k1_t1", "k1_t2", "k2_t2"] {
            assert_eq!(w.iter().filter(|n| n.ends_with(pair)).count(), 3);
        }
        m.check().unwrap();
    }

    #[test]
    fn closed_form_sizes() {
        let inst = Instance::new(
            4,
            2,
            vec![0, 1, 1],
            vec![vec![1; 4]; 3],
            vec![vec![1.0; 4]; 6],
            vec![vec![1.0; 4]; 6],
        )
        .unwrap();
        for (f, m) in [
            (Formulation::Std, build_std(&inst)),
            (Formulation::Mc, build_mc(&inst)),
            (Formulation::ThreeLevel, build_3lf(&inst)),
        ] {
            assert_eq!(ModelSize::of_model(&m), ModelSize::of(f, m.dims), "{f}");
            m.check().unwrap();
        }
    }
}
