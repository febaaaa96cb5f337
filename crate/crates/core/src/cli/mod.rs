//! The `lotforge` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 instance
//! too large for the exact oracle.

mod lp_sources;
mod report;

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::cuts::{cutting_plane_loop, model_with_cuts, CutConfig, LoopStatus, LpSource};
use crate::formulations::{build_3lf, build_mc, build_std, export_lp, export_mip_start, Formulation, MipModel};
use crate::heuristic::{self, HeuristicConfig, DEFAULT_ALPHA, DEFAULT_ITERATIONS};
use crate::instance::{generate, read_instance, write_instance, Instance, InstanceSpec, NetworkShape, Variability};
use crate::oracle::{solve_exact, OracleConfig, OracleError, DEFAULT_MAX_SETUP_BITS};
use crate::preprocess::{apply_removals, compute_removals, removal_report};
use crate::solution::write_csv;

pub use lp_sources::{read_point, ExternalSolver, Replay};
pub use report::{bench_csv, bench_markdown, gap, gap_bstar, group_of, BenchRow, RunReport};

#[derive(Debug, Parser)]
#[command(name = "lotforge", version, about = "Three-level lot-sizing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark instance
    Gen(GenArgs),
    /// Run the multi-start bottom-up heuristic
    Heur(HeurArgs),
    /// Report MC variables removable by cost-based preprocessing
    Pre(PreArgs),
    /// Write a formulation as an LP file
    Export(ExportArgs),
    /// Solve a tiny instance exactly
    Oracle(OracleArgs),
    /// Run the heuristic on every instance of a directory
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    retailers: usize,
    #[arg(long)]
    warehouses: usize,
    #[arg(long)]
    periods: usize,
    /// S (static) or D (dynamic)
    #[arg(long, default_value = "D")]
    demand: Variability,
    /// S (static) or D (dynamic)
    #[arg(long, default_value = "D")]
    fixed: Variability,
    /// balanced or unbalanced
    #[arg(long, default_value = "balanced")]
    shape: NetworkShape,
    #[arg(long, env = "LOTFORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HeurArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, env = "LOTFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Run iterations on one thread
    #[arg(long)]
    serial: bool,
    /// Best known cost; adds gap_bstar to the report
    #[arg(long)]
    bstar: Option<f64>,
    /// Write the per-iteration log as JSON lines
    #[arg(long)]
    log: Option<PathBuf>,
    /// Write the best solution as CSV
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Add wall time to the report
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct PreArgs {
    instance: PathBuf,
    /// Write the reduced MC model as an LP file
    #[arg(long)]
    lp: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Std,
    Mc,
    #[value(name = "3lf")]
    ThreeLevel,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Std => Formulation::Std,
            FormulationArg::Mc => Formulation::Mc,
            FormulationArg::ThreeLevel => Formulation::ThreeLevel,
        }
    }
}

#[derive(Debug, Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "std")]
    formulation: FormulationArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Run the cutting-plane loop and append the cut pool
    #[arg(long)]
    cuts: bool,
    /// Relaxation points to replay, one file per round; the last one repeats
    #[arg(long = "point")]
    points: Vec<PathBuf>,
    /// Shell command solving an LP file: `{lp}` is the model, `{sol}` the
    /// file to write `<var> <value>` lines to
    #[arg(long)]
    lp_solver_cmd: Option<String>,
    #[arg(long, default_value_t = CutConfig::default().max_rounds)]
    max_rounds: usize,
    #[arg(long, default_value_t = CutConfig::default().violation_tol)]
    tol: f64,
    /// Write a MIP start built from the heuristic's best solution (std only)
    #[arg(long)]
    mip_start: Option<PathBuf>,
    #[arg(long, env = "LOTFORGE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_SETUP_BITS)]
    max_bits: usize,
    /// Forbid the retailer shipments removed by preprocessing
    #[arg(long)]
    restricted: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of `.inst` files
    dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, env = "LOTFORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Instances solved at once (0: one per core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Grouped markdown table instead of CSV
    #[arg(long)]
    markdown: bool,
    /// CSV of `instance,bstar` rows
    #[arg(long)]
    best_known: Option<PathBuf>,
    /// Use the exact oracle for b* where the instance is small enough
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    timings: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    SizeGuard(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::SizeGuard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::SizeGuard(m) => m,
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    read_instance(&read_text(path)?).map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Writes to `path`, or to `out` when no path is given.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => write_text(p, text),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::SizeGuard { .. } => Failure::SizeGuard(e.to_string()),
        OracleError::Instance(_) => Failure::Io(e.to_string()),
        OracleError::Infeasible => Failure::Usage(e.to_string()),
    }
}

fn heuristic_config(alpha: f64, iterations: usize, seed: u64, parallel: bool) -> CliResult<HeuristicConfig> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Failure::Usage(format!("--alpha must be finite and nonnegative, got {alpha}")));
    }
    if iterations == 0 {
        return Err(Failure::Usage("--iters must be at least 1".into()));
    }
    Ok(HeuristicConfig { alpha, iterations, seed, parallel })
}

fn run_heuristic(instance: &Instance, config: &HeuristicConfig) -> CliResult<heuristic::HeuristicResult> {
    heuristic::run(instance, config).map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> CliResult {
    let spec = InstanceSpec {
        num_retailers: a.retailers,
        num_warehouses: a.warehouses,
        num_periods: a.periods,
        demand_type: a.demand,
        fixed_cost_type: a.fixed,
        network_shape: a.shape,
        seed: a.seed,
    };
    let inst = generate(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(out, a.output.as_deref(), &write_instance(&inst))
}

fn cmd_heur(a: HeurArgs, out: &mut dyn Write) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let config = heuristic_config(a.alpha, a.iters, a.seed, !a.serial)?;
    let res = run_heuristic(&inst, &config)?;
    if let Some(p) = &a.log {
        write_text(p, &heuristic::iteration_log(&res, &config))?;
    }
    if let Some(p) = &a.solution {
        write_text(p, &write_csv(&inst, &res.best))?;
    }
    let mut report = RunReport::new(stem(&a.instance), res.best_cost);
    if let Some(b) = a.bstar {
        report = report.with_bstar(b);
    }
    let row = BenchRow {
        report,
        average: res.average_cost(),
        best_iteration: res.best_iteration,
        bstar: a.bstar,
        time: res.wall_time,
    };
    emit(out, None, &bench_csv(&[row], a.timings))
}

fn cmd_pre(a: PreArgs, out: &mut dyn Write) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let removals = compute_removals(&inst);
    if let Some(p) = &a.lp {
        let reduced = apply_removals(&build_mc(&inst), &removals).map_err(|e| Failure::Usage(e.to_string()))?;
        write_text(p, &export_lp(&reduced))?;
    }
    emit(out, a.output.as_deref(), &removal_report(&removals))
}

fn build(inst: &Instance, f: Formulation) -> MipModel {
    match f {
        Formulation::Std => build_std(inst),
        Formulation::Mc => build_mc(inst),
        Formulation::ThreeLevel => build_3lf(inst),
    }
}

fn cmd_export(a: ExportArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let formulation = Formulation::from(a.formulation);
    let mut model = build(&inst, formulation);

    if a.cuts {
        let mut source: Box<dyn LpSource> = match (&a.lp_solver_cmd, a.points.is_empty()) {
            (Some(_), false) => return Err(Failure::Usage("--point and --lp-solver-cmd are exclusive".into())),
            (Some(cmd), true) => Box::new(ExternalSolver::new(cmd.clone())),
            (None, false) => {
                let points = a.points.iter().map(|p| read_text(p).map(|t| read_point(&t))).collect::<CliResult<_>>()?;
                Box::new(Replay::new(points))
            }
            (None, true) => return Err(Failure::Usage("--cuts needs --point files or --lp-solver-cmd".into())),
        };
        let config = CutConfig { violation_tol: a.tol, max_rounds: a.max_rounds, ..CutConfig::default() };
        let outcome = cutting_plane_loop(&inst, &model, source.as_mut(), &config)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        let status = match &outcome.status {
            LoopStatus::Converged => "converged".to_string(),
            LoopStatus::RoundLimit => "round limit".to_string(),
            LoopStatus::LpUnavailable(reason) => format!("lp unavailable: {reason}"),
        };
        let objectives: Vec<String> =
            outcome.objectives.iter().map(|o| o.map(|v| v.to_string()).unwrap_or_else(|| "-".into())).collect();
        let _ = writeln!(
            err,
            "cuts: {} in {} rounds ({status}); objectives: {}",
            outcome.pool.len(),
            outcome.rounds,
            objectives.join(" ")
        );
        model = model_with_cuts(&model, &outcome.pool);
    } else if !a.points.is_empty() || a.lp_solver_cmd.is_some() {
        return Err(Failure::Usage("--point and --lp-solver-cmd need --cuts".into()));
    }

    if let Some(p) = &a.mip_start {
        if formulation != Formulation::Std {
            return Err(Failure::Usage("--mip-start is available for the std formulation only".into()));
        }
        let config = HeuristicConfig { seed: a.seed, ..HeuristicConfig::default() };
        let res = run_heuristic(&inst, &config)?;
        write_text(p, &export_mip_start(&inst, &res.best))?;
    }
    emit(out, a.output.as_deref(), &export_lp(&model))
}

fn cmd_oracle(a: OracleArgs, out: &mut dyn Write) -> CliResult {
    let inst = load_instance(&a.instance)?;
    let mut config = OracleConfig { max_setup_bits: a.max_bits, ..OracleConfig::default() };
    if a.restricted {
        config.forbidden = compute_removals(&inst).forbidden();
    }
    let res = solve_exact(&inst, &config).map_err(oracle_failure)?;
    emit(out, a.output.as_deref(), &write_csv(&inst, &res.solution))
}

fn read_best_known(path: &Path) -> CliResult<HashMap<String, f64>> {
    let text = read_text(path)?;
    let mut map = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("instance")) {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(name, v)| v.trim().parse::<f64>().ok().map(|v| (name.trim().to_string(), v)));
        let (name, v) = parsed.ok_or_else(|| io_err(path, format!("line {}: expected `instance,bstar`", n + 1)))?;
        map.insert(name, v);
    }
    Ok(map)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> CliResult {
    let config = heuristic_config(a.alpha, a.iters, a.seed, true)?;
    let mut files: Vec<PathBuf> = fs::read_dir(&a.dir)
        .map_err(|e| io_err(&a.dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "inst"))
        .collect();
    files.sort();
    let known = match &a.best_known {
        Some(p) => read_best_known(p)?,
        None => HashMap::new(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let rows: Vec<BenchRow> = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let name = stem(path);
                let inst = load_instance(path)?;
                let res = run_heuristic(&inst, &config)?;
                let bstar = match known.get(&name) {
                    Some(&b) => Some(b),
                    None if a.oracle => match solve_exact(&inst, &OracleConfig::default()) {
                        Ok(r) => Some(r.cost),
                        Err(OracleError::SizeGuard { .. }) => None,
                        Err(e) => return Err(oracle_failure(e)),
                    },
                    None => None,
                };
                let mut report = RunReport::new(name, res.best_cost);
                if let Some(b) = bstar {
                    report = report.with_bstar(b);
                }
                Ok(BenchRow {
                    report,
                    average: res.average_cost(),
                    best_iteration: res.best_iteration,
                    bstar,
                    time: res.wall_time,
                })
            })
            .collect::<CliResult<_>>()
    })?;

    let text = if a.markdown { bench_markdown(&rows, a.timings) } else { bench_csv(&rows, a.timings) };
    emit(out, a.output.as_deref(), &text)
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Heur(a) => cmd_heur(a, out),
        Command::Pre(a) => cmd_pre(a, out),
        Command::Export(a) => cmd_export(a, out, err),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "lotforge: {}", f.message());
            f.code()
        }
    }
}

pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("lotforge").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_errors() {
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["--version"]).0, 0);
        assert_eq!(call(&[]).0, 1);
        assert_eq!(call(&["gen", "--retailers", "x"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
    }

    #[test]
    fn gen_writes_a_readable_instance() {
        let (code, out, _) = call(&["gen", "--retailers", "4", "--warehouses", "2", "--periods", "3", "--seed", "5"]);
        assert_eq!(code, 0);
        let inst = read_instance(&out).unwrap();
        assert_eq!((inst.num_retailers(), inst.num_warehouses(), inst.num_periods()), (4, 2, 3));
    }

    #[test]
    fn bad_generator_spec_is_a_usage_error() {
        let (code, _, err) = call(&["gen", "--retailers", "1", "--warehouses", "2", "--periods", "3"]);
        assert_eq!(code, 1);
        assert!(err.contains("warehouses"));
    }

    #[test]
    fn missing_files_exit_2() {
        assert_eq!(call(&["heur", "/nonexistent/x.inst"]).0, 2);
        assert_eq!(call(&["oracle", "/nonexistent/x.inst"]).0, 2);
    }

    #[test]
    fn cuts_need_a_source() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.inst");
        let (_, text, _) = call(&["gen", "--retailers", "2", "--warehouses", "1", "--periods", "3"]);
        fs::write(&path, text).unwrap();
        let p = path.to_str().unwrap();
        assert_eq!(call(&["export", p, "--cuts"]).0, 1);
        assert_eq!(call(&["export", p, "--point", p]).0, 1);
        assert_eq!(call(&["export", p, "--formulation", "mc", "--cuts", "--point", p]).0, 1);
    }

    #[test]
    fn best_known_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bk.csv");
        fs::write(&path, "instance,bstar\na_1,10.5\nb_2, 7\n").unwrap();
        let map = read_best_known(&path).unwrap();
        assert_eq!(map["a_1"], 10.5);
        assert_eq!(map["b_2"], 7.0);
        fs::write(&path, "a_1\n").unwrap();
        assert!(matches!(read_best_known(&path), Err(Failure::Io(_))));
    }
}
