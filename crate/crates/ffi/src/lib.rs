//! C ABI over the lotforge core.
//!
//! Every fallible function returns an [`LfStatus`]; on failure a message is
//! available from [`lf_last_error_message`] on the same thread. Objects are
//! opaque handles released with their `_free` function, strings returned by
//! the library are released with [`lf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lotforge::formulations::{build_3lf, build_mc, build_std, export_lp};
use lotforge::heuristic::{self, HeuristicConfig, HeuristicResult};
use lotforge::instance::{generate, read_instance, write_instance, Instance, InstanceSpec, NetworkShape, Variability};
use lotforge::lotsizing::solve_uls;
use lotforge::oracle::{solve_exact, OracleConfig, OracleError};
use lotforge::preprocess::compute_removals;
use lotforge::solution::write_csv;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    SizeGuard = 5,
    Infeasible = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfFormulation {
    Std = 0,
    Mc = 1,
    ThreeLevel = 2,
}

/// Opaque problem instance.
pub struct LfInstance(Instance);

/// Opaque result of a heuristic run.
pub struct LfHeuristicResult(HeuristicResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

type Outcome = Result<(), (LfStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error (panic)");
            LfStatus::Internal
        }
    }
}

fn null(what: &str) -> (LfStatus, String) {
    (LfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn instance_ref<'a>(inst: *const LfInstance) -> Result<&'a Instance, (LfStatus, String)> {
    inst.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text).expect("library output has no nul bytes").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from text in the canonical format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_instance_parse(text: *const c_char, out: *mut *mut LfInstance) -> LfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (LfStatus::Parse, e.to_string()))?;
        let inst = read_instance(text).map_err(|e| (LfStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(LfInstance(inst))), "out")
    })
}

/// Reads an instance file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_instance_load(path: *const c_char, out: *mut *mut LfInstance) -> LfStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|e| (LfStatus::InvalidArgument, e.to_string()))?;
        let text = std::fs::read_to_string(path).map_err(|e| (LfStatus::Io, format!("{path}: {e}")))?;
        let inst = read_instance(&text).map_err(|e| (LfStatus::Parse, format!("{path}: {e}")))?;
        put(out, Box::into_raw(Box::new(LfInstance(inst))), "out")
    })
}

/// Generates a benchmark instance.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn lf_instance_generate(
    retailers: usize,
    warehouses: usize,
    periods: usize,
    dynamic_demand: bool,
    dynamic_fixed_costs: bool,
    unbalanced: bool,
    seed: u64,
    out: *mut *mut LfInstance,
) -> LfStatus {
    guard(|| {
        let kind = |dynamic: bool| if dynamic { Variability::Dynamic } else { Variability::Static };
        let spec = InstanceSpec {
            num_retailers: retailers,
            num_warehouses: warehouses,
            num_periods: periods,
            demand_type: kind(dynamic_demand),
            fixed_cost_type: kind(dynamic_fixed_costs),
            network_shape: if unbalanced { NetworkShape::Unbalanced } else { NetworkShape::Balanced },
            seed,
        };
        let inst = generate(&spec).map_err(|e| (LfStatus::InvalidArgument, e.to_string()))?;
        put(out, Box::into_raw(Box::new(LfInstance(inst))), "out")
    })
}

/// Serializes an instance; free the string with [`lf_string_free`].
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_instance_write(inst: *const LfInstance, out: *mut *mut c_char) -> LfStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        put(out, into_c_string(write_instance(inst)), "out")
    })
}

/// # Safety
/// `inst` must be a live handle. Any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn lf_instance_dims(
    inst: *const LfInstance,
    periods: *mut usize,
    warehouses: *mut usize,
    retailers: *mut usize,
) -> LfStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        for (p, v) in [(periods, inst.num_periods()), (warehouses, inst.num_warehouses()), (retailers, inst.num_retailers())] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_instance_free(inst: *mut LfInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Runs the multi-start heuristic.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_heuristic_run(
    inst: *const LfInstance,
    alpha: f64,
    iterations: usize,
    seed: u64,
    parallel: bool,
    out: *mut *mut LfHeuristicResult,
) -> LfStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        let config = HeuristicConfig { alpha, iterations, seed, parallel };
        let res = heuristic::run(inst, &config).map_err(|e| (LfStatus::InvalidArgument, e.to_string()))?;
        put(out, Box::into_raw(Box::new(LfHeuristicResult(res))), "out")
    })
}

/// Best cost of a run, NaN for a null handle.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_heuristic_best_cost(res: *const LfHeuristicResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.0.best_cost)
}

/// Copies up to `len` per-iteration costs into `buf` and returns the number
/// of iterations of the run. Pass a null `buf` to query the count.
///
/// # Safety
/// `res` must be null or a live handle; `buf` must be null or hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_heuristic_iteration_costs(res: *const LfHeuristicResult, buf: *mut f64, len: usize) -> usize {
    let Some(res) = res.as_ref() else {
        return 0;
    };
    let costs = &res.0.per_iteration_costs;
    if !buf.is_null() {
        ptr::copy_nonoverlapping(costs.as_ptr(), buf, len.min(costs.len()));
    }
    costs.len()
}

/// Best solution as CSV; free the string with [`lf_string_free`].
///
/// # Safety
/// `res` and `inst` must be live handles (the instance the run used) and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_heuristic_solution_csv(
    res: *const LfHeuristicResult,
    inst: *const LfInstance,
    out: *mut *mut c_char,
) -> LfStatus {
    guard(|| {
        let res = res.as_ref().ok_or_else(|| null("result"))?;
        let inst = instance_ref(inst)?;
        let sol = &res.0.best;
        if sol.x.len() != inst.num_facilities() || sol.x.first().map(Vec::len) != Some(inst.num_periods()) {
            return Err((LfStatus::InvalidArgument, "result does not belong to this instance".into()));
        }
        put(out, into_c_string(write_csv(inst, sol)), "out")
    })
}

/// # Safety
/// `res` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_heuristic_free(res: *mut LfHeuristicResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Exact optimum of a tiny instance. With `restricted`, retailer shipments
/// removed by preprocessing are forbidden.
///
/// # Safety
/// `inst` must be a live handle and `cost` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_oracle_solve(
    inst: *const LfInstance,
    max_setup_bits: usize,
    restricted: bool,
    cost: *mut f64,
) -> LfStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        let mut config = OracleConfig { max_setup_bits, ..OracleConfig::default() };
        if restricted {
            config.forbidden = compute_removals(inst).forbidden();
        }
        let res = solve_exact(inst, &config).map_err(|e| {
            let status = match e {
                OracleError::SizeGuard { .. } => LfStatus::SizeGuard,
                OracleError::Infeasible => LfStatus::Infeasible,
                OracleError::Instance(_) => LfStatus::InvalidArgument,
            };
            (status, e.to_string())
        })?;
        put(cost, res.cost, "cost")
    })
}

/// Preprocessing counts: removed variables, candidates and percentage.
///
/// # Safety
/// `inst` must be a live handle. Any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn lf_preprocess_reduction(
    inst: *const LfInstance,
    np: *mut usize,
    pot: *mut usize,
    red: *mut f64,
) -> LfStatus {
    guard(|| {
        let rs = compute_removals(instance_ref(inst)?);
        if !np.is_null() {
            np.write(rs.np());
        }
        if !pot.is_null() {
            pot.write(rs.pot());
        }
        if !red.is_null() {
            red.write(rs.red());
        }
        Ok(())
    })
}

/// A formulation as LP text; free the string with [`lf_string_free`].
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_export_lp(inst: *const LfInstance, formulation: LfFormulation, out: *mut *mut c_char) -> LfStatus {
    guard(|| {
        let inst = instance_ref(inst)?;
        let model = match formulation {
            LfFormulation::Std => build_std(inst),
            LfFormulation::Mc => build_mc(inst),
            LfFormulation::ThreeLevel => build_3lf(inst),
        };
        put(out, into_c_string(export_lp(&model)), "out")
    })
}

/// Single-facility uncapacitated lot-sizing over `len` periods. `produce`
/// may be null; otherwise it receives `len` production quantities.
///
/// # Safety
/// `demand`, `setup` and `holding` must hold `len` doubles; `produce` must be
/// null or hold `len` doubles; `cost` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_uls_solve(
    demand: *const f64,
    setup: *const f64,
    holding: *const f64,
    len: usize,
    produce: *mut f64,
    cost: *mut f64,
) -> LfStatus {
    guard(|| {
        let slice = |p: *const f64, what: &str| {
            if len == 0 {
                Ok(&[][..])
            } else if p.is_null() {
                Err(null(what))
            } else {
                Ok(std::slice::from_raw_parts(p, len))
            }
        };
        let plan = solve_uls(slice(demand, "demand")?, slice(setup, "setup")?, slice(holding, "holding")?)
            .map_err(|e| (LfStatus::InvalidArgument, e.to_string()))?;
        if !produce.is_null() {
            ptr::copy_nonoverlapping(plan.produce.as_ptr(), produce, len);
        }
        put(cost, plan.cost, "cost")
    })
}
