use std::path::Path;
use std::process::{Command, Output};

use lotforge::formulations::{parse_lp, Formulation, VarId};
use lotforge::instance::read_instance;
use lotforge::preprocess::compute_removals;

fn lotforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lotforge"))
        .args(args)
        .env_remove("LOTFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lotforge(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn gen_tiny(dir: &Path, name: &str, seed: &str) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    ok(&["gen", "--retailers", "2", "--warehouses", "1", "--periods", "4", "--seed", seed, "-o", &p]);
    p
}

#[test]
fn gen_produces_a_parseable_balanced_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.inst");
    let p = path.to_str().unwrap();
    ok(&[
        "gen", "--retailers", "50", "--periods", "15", "--warehouses", "5", "--demand", "D", "--fixed", "D",
        "--shape", "balanced", "--seed", "1", "-o", p,
    ]);
    let inst = read_instance(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(inst.num_periods(), 15);
    for w in 0..5 {
        assert_eq!(inst.retailers_of(w).len(), 10);
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lotforge"));
        cmd.args(["gen", "--retailers", "3", "--warehouses", "1", "--periods", "3"]);
        match seed {
            Some(s) => cmd.env("LOTFORGE_SEED", s),
            None => cmd.env_remove("LOTFORGE_SEED"),
        };
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(Some("9")), ok(&["gen", "--retailers", "3", "--warehouses", "1", "--periods", "3", "--seed", "9"]));
    assert_ne!(run(Some("9")), run(None));
}

#[test]
fn heuristic_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "3");
    let args = ["heur", p.as_str(), "--alpha", "0.2", "--iters", "500", "--seed", "7"];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let mut serial = args.to_vec();
    serial.push("--serial");
    assert_eq!(first, ok(&serial));
    assert!(first.starts_with("instance,group,best,avg,best_iter,bstar,gap_bstar\n"));

    let mut timed = args.to_vec();
    timed.push("--timings");
    assert!(ok(&timed).lines().next().unwrap().ends_with(",time"));
}

#[test]
fn heuristic_is_no_better_than_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "tiny.inst", "11");
    let oracle = ok(&["oracle", &p]);
    let opt: f64 = oracle.lines().last().unwrap().strip_prefix("cost,").unwrap().parse().unwrap();

    let report = ok(&["heur", &p, "--iters", "200", "--seed", "1", "--bstar", &opt.to_string()]);
    let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
    let best: f64 = row[2].parse().unwrap();
    let gap: f64 = row[6].parse().unwrap();
    assert!(best >= opt - 1e-9 * opt);
    assert!((gap - 100.0 * (best - opt) / opt).abs() <= 1e-9);
}

#[test]
fn heuristic_writes_log_and_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "4");
    let log = dir.path().join("log.jsonl");
    let sol = dir.path().join("best.csv");
    ok(&["heur", &p, "--iters", "7", "--log", log.to_str().unwrap(), "--solution", sol.to_str().unwrap()]);
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[6]["iter"], 7);
    let inst = read_instance(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let best = lotforge::solution::read_csv(&inst, &std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert!(lotforge::solution::check_feasible(&inst, &best, 1e-9).unwrap().is_empty());
}

#[test]
fn preprocessing_report_and_reduced_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "5");
    let lp = dir.path().join("red.lp");
    let report = ok(&["pre", &p, "--lp", lp.to_str().unwrap()]);
    let inst = read_instance(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let rs = compute_removals(&inst);
    assert!(report.starts_with("retailer,k,t_min\n"));
    assert!(report.ends_with(&format!("np,pot,red\n{},{},{}\n", rs.np(), rs.pot(), rs.red())));

    let model = parse_lp(&std::fs::read_to_string(&lp).unwrap()).unwrap();
    assert_eq!(model.formulation, Formulation::Mc);
    let fixed = model.variables.iter().filter(|v| matches!(v.id, VarId::W { level: 2, .. }) && v.upper == 0.0);
    assert_eq!(fixed.count(), rs.np());
}

#[test]
fn export_round_trips_every_formulation() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "6");
    for (name, f) in [("std", Formulation::Std), ("mc", Formulation::Mc), ("3lf", Formulation::ThreeLevel)] {
        let model = parse_lp(&ok(&["export", &p, "--formulation", name])).unwrap();
        assert_eq!(model.formulation, f);
        assert!(model.num_binaries() > 0);
    }
}

#[test]
fn export_with_replayed_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "8");
    let point = dir.path().join("zero.pt");
    std::fs::write(&point, "objective 0\n").unwrap();
    let out = lotforge(&["export", &p, "--cuts", "--point", point.to_str().unwrap()]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("in 2 rounds (converged)"), "{stderr}");
    let model = parse_lp(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let cuts = model.constraints.iter().filter(|c| c.name.starts_with("cut_sl_std_")).count();
    assert!(cuts > 0);
    assert_eq!(cuts, model.constraints.iter().filter(|c| c.name.starts_with("cut_")).count());
}

#[test]
fn mip_start_names_std_variables() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_tiny(dir.path(), "g.inst", "2");
    let mst = dir.path().join("start.mst");
    let lp = ok(&["export", &p, "--mip-start", mst.to_str().unwrap()]);
    let model = parse_lp(&lp).unwrap();
    let text = std::fs::read_to_string(&mst).unwrap();
    for line in text.lines() {
        let name = line.split_whitespace().next().unwrap();
        let id: VarId = name.parse().unwrap();
        assert!(model.variable(&id).is_some(), "{name}");
    }
}

#[test]
fn bench_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("set");
    std::fs::create_dir(&d).unwrap();
    for (name, seed) in [("t_1.inst", "1"), ("t_2.inst", "2"), ("u_1.inst", "3")] {
        gen_tiny(&d, name, seed);
    }
    std::fs::write(d.join("notes.txt"), "ignored").unwrap();
    let bk = dir.path().join("bk.csv");
    std::fs::write(&bk, "instance,bstar\nt_1,1000\n").unwrap();
    let dir_s = d.to_str().unwrap();
    let args = ["bench", dir_s, "--iters", "50", "--oracle", "--best-known", bk.to_str().unwrap()];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let mut one_job = args.to_vec();
    one_job.extend(["--jobs", "1"]);
    assert_eq!(first, ok(&one_job));

    let rows: Vec<&str> = first.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("t_1,t,"));
    assert!(rows[1].contains(",1000,"));
    assert!(rows[3].starts_with("u_1,u,"));

    let mut md = args.to_vec();
    md.push("--markdown");
    let table = ok(&md);
    assert!(table.lines().any(|l| l.starts_with("| t | 2 |")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lotforge(&["--help"]).status.code(), Some(0));
    assert_eq!(lotforge(&["heur"]).status.code(), Some(1));
    assert_eq!(lotforge(&["heur", "--alpha", "-1", "x"]).status.code(), Some(1));
    assert_eq!(lotforge(&["heur", "/no/such/file.inst"]).status.code(), Some(2));

    let bad = dir.path().join("bad.inst");
    std::fs::write(&bad, "not an instance\n").unwrap();
    let out = lotforge(&["heur", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));

    let big = dir.path().join("big.inst");
    ok(&["gen", "--retailers", "4", "--warehouses", "2", "--periods", "5", "-o", big.to_str().unwrap()]);
    assert_eq!(lotforge(&["oracle", big.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(lotforge(&["oracle", big.to_str().unwrap(), "--max-bits", "10"]).status.code(), Some(3));
}
