//! Problem instances for the uncapacitated three-level lot-sizing and
//! replenishment problem with a distribution structure.
//!
//! A network has a single plant (level 0), a set of warehouses (level 1) and
//! a set of retailers (level 2). Every retailer is attached to exactly one
//! warehouse. Periods are 0-based inside the crate and 1-based in every
//! external representation (files, LP names, CSV).
//!
//! Facilities are addressed either through [`FacilityId`] or through a flat
//! index: the plant is `0`, warehouse `w` is `1 + w` and retailer `r` is
//! `1 + W + r`. Cost matrices are stored in that flat order.

use std::fmt;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Magic line opening every instance file.
pub const FILE_MAGIC: &str = "3LSPD-U 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FacilityKind {
    Plant,
    Warehouse,
    Retailer,
}

impl FacilityKind {
    /// Echelon of the facility: 0 for the plant, 1 for warehouses, 2 for retailers.
    pub fn level(self) -> usize {
        match self {
            FacilityKind::Plant => 0,
            FacilityKind::Warehouse => 1,
            FacilityKind::Retailer => 2,
        }
    }
}

/// A facility addressed by kind and 0-based ordinal within its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacilityId {
    pub kind: FacilityKind,
    pub index: usize,
}

impl FacilityId {
    pub const PLANT: FacilityId = FacilityId {
        kind: FacilityKind::Plant,
        index: 0,
    };

    pub fn warehouse(index: usize) -> Self {
        Self {
            kind: FacilityKind::Warehouse,
            index,
        }
    }

    pub fn retailer(index: usize) -> Self {
        Self {
            kind: FacilityKind::Retailer,
            index,
        }
    }

    pub fn level(self) -> usize {
        self.kind.level()
    }
}

/// Short label used in files and LP variable names: `p`, `w3`, `r12`.
impl fmt::Display for FacilityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FacilityKind::Plant => write!(f, "p"),
            FacilityKind::Warehouse => write!(f, "w{}", self.index),
            FacilityKind::Retailer => write!(f, "r{}", self.index),
        }
    }
}

impl std::str::FromStr for FacilityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "p" {
            return Ok(FacilityId::PLANT);
        }
        let parse_index = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| format!("bad facility label `{s}`"))
        };
        if let Some(rest) = s.strip_prefix('w') {
            Ok(FacilityId::warehouse(parse_index(rest)?))
        } else if let Some(rest) = s.strip_prefix('r') {
            Ok(FacilityId::retailer(parse_index(rest)?))
        } else {
            Err(format!("bad facility label `{s}`"))
        }
    }
}

/// One broken instance invariant, reported by [`Instance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoPeriods,
    NoWarehouses,
    NoRetailers,
    AssignmentLength { expected: usize, found: usize },
    UnknownWarehouse { retailer: usize, warehouse: usize },
    MatrixShape { matrix: &'static str, row: usize, expected: usize, found: usize },
    MatrixRows { matrix: &'static str, expected: usize, found: usize },
    NegativeDemand { retailer: usize, period: usize, value: i64 },
    BadCost { matrix: &'static str, facility: FacilityId, period: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPeriods => write!(f, "horizon must have at least one period"),
            Violation::NoWarehouses => write!(f, "at least one warehouse is required"),
            Violation::NoRetailers => write!(f, "at least one retailer is required"),
            Violation::AssignmentLength { expected, found } => {
                write!(f, "assignment lists {found} retailers, expected {expected}")
            }
            Violation::UnknownWarehouse { retailer, warehouse } => write!(
                f,
                "retailer {retailer} is assigned to nonexistent warehouse {warehouse}"
            ),
            Violation::MatrixShape { matrix, row, expected, found } => write!(
                f,
                "{matrix} row {row} has {found} periods, expected {expected}"
            ),
            Violation::MatrixRows { matrix, expected, found } => {
                write!(f, "{matrix} has {found} rows, expected {expected}")
            }
            Violation::NegativeDemand { retailer, period, value } => write!(
                f,
                "demand of retailer {retailer} in period {} is negative ({value})",
                period + 1
            ),
            Violation::BadCost { matrix, facility, period, value } => write!(
                f,
                "{matrix} of {facility} in period {} is not a finite nonnegative number ({value})",
                period + 1
            ),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("generator spec has {warehouses} warehouses but only {retailers} retailers")]
    TooManyWarehouses { warehouses: usize, retailers: usize },
    #[error("generator spec needs at least one period, warehouse and retailer")]
    EmptySpec,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Parse failure for the instance text format. `line` is 1-based; `0` means
/// the problem is the end of input.
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

/// Immutable problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    num_periods: usize,
    num_warehouses: usize,
    num_retailers: usize,
    retailer_warehouse: Vec<usize>,
    demand: Vec<Vec<i64>>,
    setup_cost: Vec<Vec<f64>>,
    holding_cost: Vec<Vec<f64>>,
    retailers_by_warehouse: Vec<Vec<usize>>,
}

impl Instance {
    /// Assembles an instance without checking it. Use [`Instance::validate`]
    /// or [`Instance::new`] before handing it to a solver.
    ///
    /// `setup_cost` and `holding_cost` are indexed by flat facility index.
    pub fn from_parts(
        num_periods: usize,
        num_warehouses: usize,
        retailer_warehouse: Vec<usize>,
        demand: Vec<Vec<i64>>,
        setup_cost: Vec<Vec<f64>>,
        holding_cost: Vec<Vec<f64>>,
    ) -> Self {
        let num_retailers = retailer_warehouse.len();
        let mut retailers_by_warehouse = vec![Vec::new(); num_warehouses];
        for (r, &w) in retailer_warehouse.iter().enumerate() {
            if w < num_warehouses {
                retailers_by_warehouse[w].push(r);
            }
        }
        Self {
            num_periods,
            num_warehouses,
            num_retailers,
            retailer_warehouse,
            demand,
            setup_cost,
            holding_cost,
            retailers_by_warehouse,
        }
    }

    /// Like [`Instance::from_parts`] but rejects instances with violations.
    pub fn new(
        num_periods: usize,
        num_warehouses: usize,
        retailer_warehouse: Vec<usize>,
        demand: Vec<Vec<i64>>,
        setup_cost: Vec<Vec<f64>>,
        holding_cost: Vec<Vec<f64>>,
    ) -> Result<Self, InstanceError> {
        let inst = Self::from_parts(
            num_periods,
            num_warehouses,
            retailer_warehouse,
            demand,
            setup_cost,
            holding_cost,
        );
        inst.ensure_valid()?;
        Ok(inst)
    }

    /// Every invariant violation of the instance; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let t = self.num_periods;
        if t == 0 {
            out.push(Violation::NoPeriods);
        }
        if self.num_warehouses == 0 {
            out.push(Violation::NoWarehouses);
        }
        if self.num_retailers == 0 {
            out.push(Violation::NoRetailers);
        }
        for (r, &w) in self.retailer_warehouse.iter().enumerate() {
            if w >= self.num_warehouses {
                out.push(Violation::UnknownWarehouse {
                    retailer: r,
                    warehouse: w,
                });
            }
        }
        if self.demand.len() != self.num_retailers {
            out.push(Violation::MatrixRows {
                matrix: "demand",
                expected: self.num_retailers,
                found: self.demand.len(),
            });
        }
        for (r, row) in self.demand.iter().enumerate() {
            if row.len() != t {
                out.push(Violation::MatrixShape {
                    matrix: "demand",
                    row: r,
                    expected: t,
                    found: row.len(),
                });
            }
            for (p, &d) in row.iter().enumerate() {
                if d < 0 {
                    out.push(Violation::NegativeDemand {
                        retailer: r,
                        period: p,
                        value: d,
                    });
                }
            }
        }
        let nf = self.num_facilities();
        for (name, m) in [("setup cost", &self.setup_cost), ("holding cost", &self.holding_cost)] {
            if m.len() != nf {
                out.push(Violation::MatrixRows {
                    matrix: name,
                    expected: nf,
                    found: m.len(),
                });
            }
            for (i, row) in m.iter().enumerate() {
                if row.len() != t {
                    out.push(Violation::MatrixShape {
                        matrix: name,
                        row: i,
                        expected: t,
                        found: row.len(),
                    });
                }
                for (p, &c) in row.iter().enumerate() {
                    if !c.is_finite() || c < 0.0 {
                        out.push(Violation::BadCost {
                            matrix: name,
                            facility: self.facility_id(i.min(nf.saturating_sub(1))),
                            period: p,
                            value: c,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), InstanceError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(InstanceError::Invalid(v))
        }
    }

    pub fn num_periods(&self) -> usize {
        self.num_periods
    }

    pub fn num_warehouses(&self) -> usize {
        self.num_warehouses
    }

    pub fn num_retailers(&self) -> usize {
        self.num_retailers
    }

    /// `1 + W + R`.
    pub fn num_facilities(&self) -> usize {
        1 + self.num_warehouses + self.num_retailers
    }

    pub fn warehouse_of(&self, retailer: usize) -> usize {
        self.retailer_warehouse[retailer]
    }

    pub fn retailer_warehouse(&self) -> &[usize] {
        &self.retailer_warehouse
    }

    /// Retailers served by warehouse `w`, ascending.
    pub fn retailers_of(&self, warehouse: usize) -> &[usize] {
        &self.retailers_by_warehouse[warehouse]
    }

    pub fn demand(&self, retailer: usize, period: usize) -> i64 {
        self.demand[retailer][period]
    }

    pub fn demand_matrix(&self) -> &[Vec<i64>] {
        &self.demand
    }

    pub fn setup_cost(&self, facility: usize, period: usize) -> f64 {
        self.setup_cost[facility][period]
    }

    pub fn holding_cost(&self, facility: usize, period: usize) -> f64 {
        self.holding_cost[facility][period]
    }

    pub fn setup_matrix(&self) -> &[Vec<f64>] {
        &self.setup_cost
    }

    pub fn holding_matrix(&self) -> &[Vec<f64>] {
        &self.holding_cost
    }

    pub fn facility_index(&self, id: FacilityId) -> usize {
        match id.kind {
            FacilityKind::Plant => 0,
            FacilityKind::Warehouse => 1 + id.index,
            FacilityKind::Retailer => 1 + self.num_warehouses + id.index,
        }
    }

    pub fn facility_id(&self, index: usize) -> FacilityId {
        if index == 0 {
            FacilityId::PLANT
        } else if index <= self.num_warehouses {
            FacilityId::warehouse(index - 1)
        } else {
            FacilityId::retailer(index - 1 - self.num_warehouses)
        }
    }

    pub fn warehouse_index(&self, w: usize) -> usize {
        1 + w
    }

    pub fn retailer_index(&self, r: usize) -> usize {
        1 + self.num_warehouses + r
    }

    /// Flat indices of the direct successors of a facility.
    pub fn successors(&self, facility: usize) -> Vec<usize> {
        match self.facility_id(facility).kind {
            FacilityKind::Plant => (0..self.num_warehouses).map(|w| 1 + w).collect(),
            FacilityKind::Warehouse => self.retailers_of(facility - 1)
                .iter()
                .map(|&r| self.retailer_index(r))
                .collect(),
            FacilityKind::Retailer => Vec::new(),
        }
    }

    /// Retailers that are descendants of a facility (all of them for the plant).
    pub fn descendant_retailers(&self, facility: usize) -> Vec<usize> {
        let id = self.facility_id(facility);
        match id.kind {
            FacilityKind::Plant => (0..self.num_retailers).collect(),
            FacilityKind::Warehouse => self.retailers_of(id.index).to_vec(),
            FacilityKind::Retailer => vec![id.index],
        }
    }

    /// The facility that serves retailer `r` at level `level` (0, 1 or 2), as a flat index.
    pub fn predecessor_at_level(&self, retailer: usize, level: usize) -> usize {
        match level {
            0 => 0,
            1 => self.warehouse_index(self.warehouse_of(retailer)),
            2 => self.retailer_index(retailer),
            _ => panic!("level must be 0, 1 or 2"),
        }
    }

    /// Per-period demand of any facility, aggregated over its descendant retailers.
    pub fn facility_demand(&self, facility: usize, period: usize) -> i64 {
        self.descendant_retailers(facility)
            .iter()
            .map(|&r| self.demand[r][period])
            .sum()
    }

    pub fn cumulative_demand(&self) -> CumulativeDemand {
        CumulativeDemand::new(self)
    }
}

/// Cumulative demands `d^i_{kt}` for every facility, backed by prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeDemand {
    // prefix[i][t] = sum of facility i's demand over periods 0..t
    prefix: Vec<Vec<i64>>,
}

impl CumulativeDemand {
    pub fn new(instance: &Instance) -> Self {
        let t = instance.num_periods();
        let w = instance.num_warehouses();
        let nf = instance.num_facilities();
        let mut per_period = vec![vec![0i64; t]; nf];
        for r in 0..instance.num_retailers() {
            let ri = instance.retailer_index(r);
            let wi = instance.warehouse_index(instance.warehouse_of(r));
            let row: Vec<i64> = (0..t).map(|p| instance.demand(r, p)).collect();
            for (p, &d) in row.iter().enumerate() {
                per_period[wi][p] += d;
                per_period[0][p] += d;
            }
            per_period[ri] = row;
        }
        debug_assert_eq!(nf, 1 + w + instance.num_retailers());
        let prefix = per_period
            .into_iter()
            .map(|row| {
                let mut acc = Vec::with_capacity(t + 1);
                acc.push(0);
                let mut s = 0;
                for d in row {
                    s += d;
                    acc.push(s);
                }
                acc
            })
            .collect();
        Self { prefix }
    }

    pub fn num_periods(&self) -> usize {
        self.prefix.first().map_or(0, |r| r.len() - 1)
    }

    /// Demand of facility `i` over periods `k..=t` (0-based, inclusive). Zero when `k > t`.
    pub fn get(&self, facility: usize, k: usize, t: usize) -> i64 {
        if k > t {
            return 0;
        }
        self.prefix[facility][t + 1] - self.prefix[facility][k]
    }

    pub fn period(&self, facility: usize, t: usize) -> i64 {
        self.get(facility, t, t)
    }

    /// Demand of facility `i` from period `k` to the end of the horizon.
    pub fn to_end(&self, facility: usize, k: usize) -> i64 {
        let last = self.num_periods() - 1;
        self.get(facility, k, last)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variability {
    Static,
    Dynamic,
}

impl Variability {
    fn code(self) -> char {
        match self {
            Variability::Static => 'S',
            Variability::Dynamic => 'D',
        }
    }
}

impl std::str::FromStr for Variability {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "static" => Ok(Variability::Static),
            "d" | "dynamic" => Ok(Variability::Dynamic),
            _ => Err(format!("expected S or D, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkShape {
    Balanced,
    Unbalanced,
}

impl std::str::FromStr for NetworkShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b" | "balanced" => Ok(NetworkShape::Balanced),
            "u" | "unbalanced" => Ok(NetworkShape::Unbalanced),
            _ => Err(format!("expected balanced or unbalanced, got `{s}`")),
        }
    }
}

/// Parameters of a benchmark instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceSpec {
    pub num_retailers: usize,
    pub num_warehouses: usize,
    pub num_periods: usize,
    pub demand_type: Variability,
    pub fixed_cost_type: Variability,
    pub network_shape: NetworkShape,
    pub seed: u64,
}

impl InstanceSpec {
    /// Group label in the `|R|_|T|_|W|_typeD_typeF` convention, e.g. `50_15_5_DD_SF`.
    pub fn group_name(&self) -> String {
        format!(
            "{}_{}_{}_{}D_{}F",
            self.num_retailers,
            self.num_periods,
            self.num_warehouses,
            self.demand_type.code(),
            self.fixed_cost_type.code()
        )
    }
}

pub const DEMAND_RANGE: (i64, i64) = (5, 100);
pub const PLANT_SETUP_RANGE: (i64, i64) = (30_000, 45_000);
pub const WAREHOUSE_SETUP_RANGE: (i64, i64) = (1_500, 4_500);
pub const RETAILER_SETUP_RANGE: (i64, i64) = (5, 100);
pub const PLANT_HOLDING: f64 = 0.25;
pub const WAREHOUSE_HOLDING: f64 = 0.5;
pub const RETAILER_HOLDING_RANGE: (f64, f64) = (0.5, 1.0);

/// Warehouse of every retailer under the given network shape.
///
/// Balanced networks assign retailers round-robin. Unbalanced networks give
/// `floor(0.8 |R|)` retailers to the first `ceil(0.2 |W|)` warehouses and the
/// rest to the remaining warehouses; inside each group retailers are split
/// evenly with the remainder going to the group's first warehouse.
pub fn assign_retailers(num_retailers: usize, num_warehouses: usize, shape: NetworkShape) -> Vec<usize> {
    match shape {
        NetworkShape::Balanced => (0..num_retailers).map(|r| r % num_warehouses).collect(),
        NetworkShape::Unbalanced => {
            let heavy = num_warehouses.div_ceil(5).max(1);
            let (heavy_retailers, light) = if heavy >= num_warehouses {
                (num_retailers, 0)
            } else {
                (num_retailers * 4 / 5, num_warehouses - heavy)
            };
            let mut out = Vec::with_capacity(num_retailers);
            let fill = |count: usize, first: usize, groups: usize, out: &mut Vec<usize>| {
                if groups == 0 {
                    return;
                }
                let base = count / groups;
                let extra = count % groups;
                for g in 0..groups {
                    let n = base + if g == 0 { extra } else { 0 };
                    out.extend(std::iter::repeat_n(first + g, n));
                }
            };
            fill(heavy_retailers, 0, heavy, &mut out);
            fill(num_retailers - heavy_retailers, heavy, light, &mut out);
            out
        }
    }
}

/// Builds a benchmark instance. The output is a pure function of `spec`.
///
/// Sampling uses ChaCha8 seeded with `spec.seed` and draws in this order:
/// demands (retailers ascending, periods ascending; one draw per retailer when
/// demand is static), then setup costs for the plant, the warehouses and the
/// retailers (same layout, one draw per facility when fixed costs are static),
/// then one holding cost per retailer. Integer draws are inclusive of both
/// ends, real draws are half-open.
pub fn generate(spec: &InstanceSpec) -> Result<Instance, InstanceError> {
    if spec.num_periods == 0 || spec.num_warehouses == 0 || spec.num_retailers == 0 {
        return Err(InstanceError::EmptySpec);
    }
    if spec.num_warehouses > spec.num_retailers {
        return Err(InstanceError::TooManyWarehouses {
            warehouses: spec.num_warehouses,
            retailers: spec.num_retailers,
        });
    }
    let t = spec.num_periods;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let draw_row = |rng: &mut ChaCha8Rng, kind: Variability, (lo, hi): (i64, i64)| -> Vec<i64> {
        match kind {
            Variability::Static => vec![rng.random_range(lo..=hi); t],
            Variability::Dynamic => (0..t).map(|_| rng.random_range(lo..=hi)).collect(),
        }
    };

    let demand: Vec<Vec<i64>> = (0..spec.num_retailers)
        .map(|_| draw_row(&mut rng, spec.demand_type, DEMAND_RANGE))
        .collect();

    let mut setup_cost = Vec::with_capacity(1 + spec.num_warehouses + spec.num_retailers);
    let as_f64 = |row: Vec<i64>| row.into_iter().map(|c| c as f64).collect::<Vec<_>>();
    setup_cost.push(as_f64(draw_row(&mut rng, spec.fixed_cost_type, PLANT_SETUP_RANGE)));
    for _ in 0..spec.num_warehouses {
        setup_cost.push(as_f64(draw_row(&mut rng, spec.fixed_cost_type, WAREHOUSE_SETUP_RANGE)));
    }
    for _ in 0..spec.num_retailers {
        setup_cost.push(as_f64(draw_row(&mut rng, spec.fixed_cost_type, RETAILER_SETUP_RANGE)));
    }

    let mut holding_cost = Vec::with_capacity(setup_cost.len());
    holding_cost.push(vec![PLANT_HOLDING; t]);
    for _ in 0..spec.num_warehouses {
        holding_cost.push(vec![WAREHOUSE_HOLDING; t]);
    }
    for _ in 0..spec.num_retailers {
        let (lo, hi) = RETAILER_HOLDING_RANGE;
        holding_cost.push(vec![rng.random_range(lo..hi); t]);
    }

    let assignment = assign_retailers(spec.num_retailers, spec.num_warehouses, spec.network_shape);
    Instance::new(t, spec.num_warehouses, assignment, demand, setup_cost, holding_cost)
}

/// Serializes an instance in the canonical text format.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let join_f = |row: &[f64]| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{FILE_MAGIC}").unwrap();
    writeln!(out, "T {}", instance.num_periods).unwrap();
    writeln!(out, "W {}", instance.num_warehouses).unwrap();
    writeln!(out, "R {}", instance.num_retailers).unwrap();
    writeln!(out, "ASSIGN").unwrap();
    for (r, w) in instance.retailer_warehouse.iter().enumerate() {
        writeln!(out, "{r} {w}").unwrap();
    }
    writeln!(out, "DEMAND").unwrap();
    for row in &instance.demand {
        let line = row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "SETUP").unwrap();
    for row in &instance.setup_cost {
        writeln!(out, "{}", join_f(row)).unwrap();
    }
    writeln!(out, "HOLD").unwrap();
    for row in &instance.holding_cost {
        writeln!(out, "{}", join_f(row)).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Self { inner: it.peekable() }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.inner.next().ok_or_else(|| ParseError {
            line: 0,
            reason: format!("unexpected end of input, expected {what}"),
        })
    }

    fn header(&mut self, name: &str) -> Result<usize, ParseError> {
        match self.inner.next() {
            Some((n, l)) if l == name => Ok(n),
            Some((n, l)) => Err(ParseError {
                line: n,
                reason: format!("expected {name} section, found `{l}`"),
            }),
            None => Err(ParseError {
                line: 0,
                reason: format!("missing {name} section"),
            }),
        }
    }

    fn keyed_count(&mut self, key: &str) -> Result<usize, ParseError> {
        let (n, l) = self.next_line(key)?;
        let mut parts = l.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == key => v.parse().map_err(|_| ParseError {
                line: n,
                reason: format!("`{key}` expects a nonnegative integer, found `{v}`"),
            }),
            _ => Err(ParseError {
                line: n,
                reason: format!("expected `{key} <int>`, found `{l}`"),
            }),
        }
    }
}

fn parse_row<T: std::str::FromStr>(
    line_no: usize,
    line: &str,
    section: &str,
    row: usize,
    expected: usize,
) -> Result<Vec<T>, ParseError> {
    let values = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<T>().map_err(|_| ParseError {
                line: line_no,
                reason: format!("{section} row {row}: cannot parse `{tok}`"),
            })
        })
        .collect::<Result<Vec<T>, _>>()?;
    if values.len() != expected {
        return Err(ParseError {
            line: line_no,
            reason: format!(
                "{section} row {row} has {} values, expected {expected}",
                values.len()
            ),
        });
    }
    Ok(values)
}

/// Parses the instance text format. Structural problems are reported with a
/// line number; the parsed instance is then checked with [`Instance::validate`]
/// and any violation is reported as a parse error as well.
pub fn read_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    let (n, magic) = lines.next_line("magic line")?;
    if magic.split_whitespace().collect::<Vec<_>>() != FILE_MAGIC.split_whitespace().collect::<Vec<_>>() {
        return Err(ParseError {
            line: n,
            reason: format!("expected `{FILE_MAGIC}`, found `{magic}`"),
        });
    }
    let t = lines.keyed_count("T")?;
    let w = lines.keyed_count("W")?;
    let r = lines.keyed_count("R")?;

    let header_line = lines.header("ASSIGN")?;
    let mut assign = vec![usize::MAX; r];
    for i in 0..r {
        let (n, l) = lines.next_line("ASSIGN row")?;
        let v: Vec<usize> = parse_row(n, l, "ASSIGN", i, 2)?;
        if v[0] >= r {
            return Err(ParseError {
                line: n,
                reason: format!("ASSIGN row names retailer {} but R = {r}", v[0]),
            });
        }
        if assign[v[0]] != usize::MAX {
            return Err(ParseError {
                line: n,
                reason: format!("retailer {} assigned twice", v[0]),
            });
        }
        assign[v[0]] = v[1];
    }

    lines.header("DEMAND")?;
    let mut demand = Vec::with_capacity(r);
    for i in 0..r {
        let (n, l) = lines.next_line("DEMAND row")?;
        demand.push(parse_row::<i64>(n, l, "DEMAND", i, t)?);
    }
    let nf = 1 + w + r;
    lines.header("SETUP")?;
    let mut setup = Vec::with_capacity(nf);
    for i in 0..nf {
        let (n, l) = lines.next_line("SETUP row")?;
        setup.push(parse_row::<f64>(n, l, "SETUP", i, t)?);
    }
    lines.header("HOLD")?;
    let mut hold = Vec::with_capacity(nf);
    for i in 0..nf {
        let (n, l) = lines.next_line("HOLD row")?;
        hold.push(parse_row::<f64>(n, l, "HOLD", i, t)?);
    }
    if let Some((n, l)) = lines.inner.next() {
        return Err(ParseError {
            line: n,
            reason: format!("unexpected trailing content `{l}`"),
        });
    }
    let inst = Instance::from_parts(t, w, assign, demand, setup, hold);
    let violations = inst.validate();
    if let Some(v) = violations.first() {
        return Err(ParseError {
            line: header_line,
            reason: v.to_string(),
        });
    }
    Ok(inst)
}
