use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// Open optimality gap in percent, `100 (bestsol - bestbound) / bestsol`.
pub fn gap(bestsol: f64, bestbound: f64) -> f64 {
    100.0 * (bestsol - bestbound) / bestsol
}

/// Deviation from the best known value in percent, `100 (best - b*) / b*`.
pub fn gap_bstar(best: f64, bstar: f64) -> f64 {
    100.0 * (best - bstar) / bstar
}

/// Results for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub best: f64,
    pub method_costs: Vec<(String, f64)>,
    pub gap: Option<f64>,
    pub gap_bstar: Option<f64>,
    pub red: Option<f64>,
    pub wall_times: Vec<(String, f64)>,
}

impl RunReport {
    pub fn new(instance: impl Into<String>, best: f64) -> Self {
        Self {
            instance: instance.into(),
            best,
            method_costs: Vec::new(),
            gap: None,
            gap_bstar: None,
            red: None,
            wall_times: Vec::new(),
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.gap = Some(gap(self.best, bound));
        self
    }

    pub fn with_bstar(mut self, bstar: f64) -> Self {
        self.gap_bstar = Some(gap_bstar(self.best, bstar));
        self
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Instance group: the file stem without a trailing `_<digits>` replica number.
pub fn group_of(stem: &str) -> &str {
    match stem.rsplit_once('_') {
        Some((head, tail)) if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => head,
        _ => stem,
    }
}

/// One bench row per report: `instance,group,best,avg,best_iter,bstar,gap_bstar` and
/// `time` when `timings` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub report: RunReport,
    pub average: f64,
    pub best_iteration: usize,
    pub bstar: Option<f64>,
    pub time: f64,
}

pub fn bench_csv(rows: &[BenchRow], timings: bool) -> String {
    let mut out = String::from("instance,group,best,avg,best_iter,bstar,gap_bstar");
    out.push_str(if timings { ",time\n" } else { "\n" });
    for row in rows {
        let r = &row.report;
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.instance,
            group_of(&r.instance),
            r.best,
            row.average,
            row.best_iteration + 1,
            opt(row.bstar),
            opt(r.gap_bstar)
        );
        if timings {
            let _ = write!(out, ",{:.3}", row.time);
        }
        out.push('\n');
    }
    out
}

/// Markdown table with one line per instance group: instance count, mean
/// best cost, mean `gap_b*` over instances that have a `b*`, and mean time
/// when `timings` is set.
pub fn bench_markdown(rows: &[BenchRow], timings: bool) -> String {
    let mut groups: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for row in rows {
        groups.entry(group_of(&row.report.instance)).or_default().push(row);
    }
    let mut out = String::from("| group | n | best | gap_b* (%) |");
    out.push_str(if timings { " time (s) |\n|---|---:|---:|---:|---:|\n" } else { "\n|---|---:|---:|---:|\n" });
    for (group, rows) in groups {
        let n = rows.len() as f64;
        let best = rows.iter().map(|r| r.report.best).sum::<f64>() / n;
        let gaps: Vec<f64> = rows.iter().filter_map(|r| r.report.gap_bstar).collect();
        let gap = if gaps.is_empty() {
            "-".to_string()
        } else {
            format!("{:.2}", gaps.iter().sum::<f64>() / gaps.len() as f64)
        };
        let _ = write!(out, "| {group} | {} | {best:.2} | {gap} |", rows.len());
        if timings {
            let _ = write!(out, " {:.2} |", rows.iter().map(|r| r.time).sum::<f64>() / n);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_formulas() {
        assert_eq!(gap(200.0, 150.0), 25.0);
        assert_eq!(gap_bstar(110.0, 100.0), 10.0);
        assert_eq!(gap_bstar(100.0, 100.0), 0.0);
    }

    #[test]
    fn groups_strip_replica_numbers() {
        assert_eq!(group_of("50_15_5_DD_SF_3"), "50_15_5_DD_SF");
        assert_eq!(group_of("tiny"), "tiny");
        assert_eq!(group_of("a_b"), "a_b");
    }

    #[test]
    fn markdown_groups_rows() {
        let row = |name: &str, best: f64, bstar: Option<f64>| {
            let mut report = RunReport::new(name, best);
            if let Some(b) = bstar {
                report = report.with_bstar(b);
            }
            BenchRow { report, average: best, best_iteration: 0, bstar, time: 0.0 }
        };
        let rows = vec![row("g_1", 110.0, Some(100.0)), row("g_2", 130.0, None), row("h_1", 5.0, None)];
        let md = bench_markdown(&rows, false);
        assert!(md.contains("| g | 2 | 120.00 | 10.00 |"));
        assert!(md.contains("| h | 1 | 5.00 | - |"));
        let csv = bench_csv(&rows, false);
        assert_eq!(csv.lines().nth(1), Some("g_1,g,110,110,1,100,10"));
    }
}
