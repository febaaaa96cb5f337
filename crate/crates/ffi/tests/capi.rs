use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use lotforge_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { lf_string_free(p) };
    s
}

fn generated(retailers: usize, warehouses: usize, periods: usize, seed: u64) -> *mut LfInstance {
    let mut inst = ptr::null_mut();
    let st = unsafe { lf_instance_generate(retailers, warehouses, periods, true, true, false, seed, &mut inst) };
    assert_eq!(st, LfStatus::Ok);
    inst
}

#[test]
fn instance_lifecycle() {
    let inst = generated(6, 2, 5, 3);
    let (mut t, mut w, mut r) = (0, 0, 0);
    assert_eq!(unsafe { lf_instance_dims(inst, &mut t, &mut w, &mut r) }, LfStatus::Ok);
    assert_eq!((t, w, r), (5, 2, 6));

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { lf_instance_write(inst, &mut text) }, LfStatus::Ok);
    let text = take_string(text);
    let c = CString::new(text.clone()).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lf_instance_parse(c.as_ptr(), &mut back) }, LfStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { lf_instance_write(back, &mut again) }, LfStatus::Ok);
    assert_eq!(take_string(again), text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.inst");
    std::fs::write(&path, &text).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { lf_instance_load(cpath.as_ptr(), &mut loaded) }, LfStatus::Ok);
    let missing = CString::new(dir.path().join("none.inst").to_str().unwrap()).unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { lf_instance_load(missing.as_ptr(), &mut none) }, LfStatus::Io);
    assert!(none.is_null());

    unsafe {
        lf_instance_free(inst);
        lf_instance_free(back);
        lf_instance_free(loaded);
    }
}

#[test]
fn bad_generator_arguments() {
    let mut inst = ptr::null_mut();
    let st = unsafe { lf_instance_generate(1, 2, 3, true, true, false, 0, &mut inst) };
    assert_eq!(st, LfStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(lf_last_error_message()) }.to_str().unwrap();
    assert!(msg.contains("2 warehouses"), "{msg}");
    assert_eq!(unsafe { lf_instance_generate(1, 1, 1, true, true, false, 0, ptr::null_mut()) }, LfStatus::NullPointer);
}

#[test]
fn heuristic_matches_the_core_and_bounds_the_oracle() {
    let inst = generated(2, 1, 4, 9);
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { lf_heuristic_run(inst, 0.2, 40, 5, true, &mut res) }, LfStatus::Ok);
    let best = unsafe { lf_heuristic_best_cost(res) };

    let n = unsafe { lf_heuristic_iteration_costs(res, ptr::null_mut(), 0) };
    assert_eq!(n, 40);
    let mut costs = vec![0.0; n];
    unsafe { lf_heuristic_iteration_costs(res, costs.as_mut_ptr(), n) };
    assert_eq!(costs.iter().cloned().fold(f64::INFINITY, f64::min), best);

    let mut text = ptr::null_mut();
    unsafe { lf_instance_write(inst, &mut text) };
    let core_inst = lotforge::instance::read_instance(&take_string(text)).unwrap();
    let cfg = lotforge::heuristic::HeuristicConfig { alpha: 0.2, iterations: 40, seed: 5, parallel: false };
    assert_eq!(lotforge::heuristic::run(&core_inst, &cfg).unwrap().best_cost, best);

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { lf_heuristic_solution_csv(res, inst, &mut csv) }, LfStatus::Ok);
    assert!(take_string(csv).ends_with(&format!("cost,{best}\n")));

    let mut opt = 0.0;
    assert_eq!(unsafe { lf_oracle_solve(inst, 20, false, &mut opt) }, LfStatus::Ok);
    let mut restricted = 0.0;
    assert_eq!(unsafe { lf_oracle_solve(inst, 20, true, &mut restricted) }, LfStatus::Ok);
    assert!(best >= opt - 1e-9 * opt);
    assert!((restricted - opt).abs() <= 1e-9 * opt);

    let other = generated(3, 1, 4, 1);
    assert_eq!(unsafe { lf_heuristic_solution_csv(res, other, &mut csv) }, LfStatus::InvalidArgument);
    unsafe {
        lf_heuristic_free(res);
        lf_instance_free(inst);
        lf_instance_free(other);
    }
}

#[test]
fn oracle_size_guard() {
    let inst = generated(4, 2, 5, 1);
    let mut cost = 0.0;
    assert_eq!(unsafe { lf_oracle_solve(inst, 20, false, &mut cost) }, LfStatus::SizeGuard);
    unsafe { lf_instance_free(inst) };
}

#[test]
fn preprocessing_and_export() {
    let inst = generated(5, 2, 6, 2);
    let (mut np, mut pot, mut red) = (0, 0, 0.0);
    assert_eq!(unsafe { lf_preprocess_reduction(inst, &mut np, &mut pot, &mut red) }, LfStatus::Ok);
    assert_eq!(pot, 5 * 6 * 5 / 2);
    assert_eq!(red, 100.0 * np as f64 / pot as f64);

    for (f, tag) in [(LfFormulation::Std, "std"), (LfFormulation::Mc, "mc"), (LfFormulation::ThreeLevel, "3lf")] {
        let mut lp = ptr::null_mut();
        assert_eq!(unsafe { lf_export_lp(inst, f, &mut lp) }, LfStatus::Ok);
        let text = take_string(lp);
        assert!(text.starts_with(&format!("\\ lotforge {tag} ")), "{}", &text[..40]);
        assert!(lotforge::formulations::parse_lp(&text).is_ok());
    }
    unsafe { lf_instance_free(inst) };
}

#[test]
fn uls_over_the_abi() {
    // two periods: one setup at 10 and 5 units held at 1.0 beats two setups
    let demand = [5.0, 5.0];
    let setup = [10.0, 10.0];
    let holding = [1.0, 1.0];
    let mut produce = [0.0; 2];
    let mut cost = 0.0;
    let st = unsafe { lf_uls_solve(demand.as_ptr(), setup.as_ptr(), holding.as_ptr(), 2, produce.as_mut_ptr(), &mut cost) };
    assert_eq!(st, LfStatus::Ok);
    assert_eq!(cost, 15.0);
    assert_eq!(produce, [10.0, 0.0]);

    let negative = [-1.0, 0.0];
    let st = unsafe { lf_uls_solve(negative.as_ptr(), setup.as_ptr(), holding.as_ptr(), 2, ptr::null_mut(), &mut cost) };
    assert_eq!(st, LfStatus::InvalidArgument);
    let st = unsafe { lf_uls_solve(ptr::null(), setup.as_ptr(), holding.as_ptr(), 2, ptr::null_mut(), &mut cost) };
    assert_eq!(st, LfStatus::NullPointer);
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lotforge.h")).unwrap()
}

#[test]
fn header_declares_the_api() {
    let h = header();
    assert!(h.contains("#ifndef LOTFORGE_H"));
    assert!(h.contains("typedef struct LfInstance LfInstance;"));
    assert!(h.contains("typedef struct LfHeuristicResult LfHeuristicResult;"));
    assert!(h.contains("LF_STATUS_SIZE_GUARD = 5"));
    for f in [
        "lf_last_error_message",
        "lf_version",
        "lf_string_free",
        "lf_instance_parse",
        "lf_instance_load",
        "lf_instance_generate",
        "lf_instance_write",
        "lf_instance_dims",
        "lf_instance_free",
        "lf_heuristic_run",
        "lf_heuristic_best_cost",
        "lf_heuristic_iteration_costs",
        "lf_heuristic_solution_csv",
        "lf_heuristic_free",
        "lf_oracle_solve",
        "lf_preprocess_reduction",
        "lf_export_lp",
        "lf_uls_solve",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}/include/lotforge.h\"\nint main(void) {{ LfInstance *i = 0; return lf_instance_free(i), LF_STATUS_OK; }}\n",
            env!("CARGO_MANIFEST_DIR")
        ),
    )
    .unwrap();
    let status = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror"]).arg(&src).status().unwrap();
    assert!(status.success());
}
