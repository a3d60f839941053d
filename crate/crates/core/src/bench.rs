//! Benchmark harness: repeated seeded colony runs per instance, per-instance
//! statistics, aggregation by instance size, and report rendering.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::colony::{self, ColonyParams, ParamError};
use crate::config::ParamOverrides;
use crate::fixtures;
use crate::instance::{lookup_bks, JobShopInstance};
use crate::Time;

/// One experiment: a set of instances, a run count, a parameter template,
/// and the seed the per-run seeds derive from.
///
/// The template is a partial override set rather than one concrete
/// `ColonyParams` because instance-derived defaults (ant count, elitist
/// weight) must stay per-instance unless explicitly pinned.
#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub instances: Vec<String>,
    pub runs_per_instance: usize,
    pub overrides: ParamOverrides,
    pub base_seed: u64,
}

/// One colony run's contribution to a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub makespan: Time,
    pub evaluations_total: u64,
    pub evaluations_to_best: u64,
    pub wall_ms: f64,
}

/// Per-instance benchmark statistics. Field names double as the CSV and
/// JSON column names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub jobs: usize,
    pub machines: usize,
    pub bks: Option<Time>,
    pub best: Time,
    pub rel_err_pct: Option<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub avg_evals_to_best: f64,
    pub avg_evals_total: f64,
    pub avg_wall_ms: Option<f64>,
    #[serde(skip)]
    pub runs: Vec<RunOutcome>,
}

/// Reports plus the warnings accumulated along the way (one per skipped
/// instance).
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub reports: Vec<RunReport>,
    pub warnings: Vec<String>,
}

/// Runs the experiment: for each resolvable instance,
/// `runs_per_instance` independent colony runs, each seeded
/// `base_seed + global run index` (wrapping), so seeds are pairwise distinct
/// and the whole experiment is reproducible. Runs execute in parallel;
/// outcome order is still by instance and run index. Unresolvable instances
/// are skipped with a warning; invalid parameters abort the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ParamError> {
    if config.runs_per_instance == 0 {
        return Err(ParamError {
            field: "runs_per_instance",
            value: "0".into(),
            requirement: "must be at least 1",
        });
    }
    let mut warnings = Vec::new();
    let mut prepared: Vec<(JobShopInstance, ColonyParams<f64>)> = Vec::new();
    for (index, name) in config.instances.iter().enumerate() {
        match fixtures::resolve(name) {
            Ok(instance) => {
                let mut params = ColonyParams::for_instance(&instance);
                config.overrides.apply_to(&mut params)?;
                // Position the instance's seed block by its place in the
                // *requested* list, so one bad name does not shift every
                // later instance's seeds.
                params.seed = config
                    .base_seed
                    .wrapping_add((index * config.runs_per_instance) as u64);
                prepared.push((instance, params));
            }
            Err(error) => warnings.push(format!("skipping {name}: {error}")),
        }
    }

    let tasks: Vec<(usize, u64)> = prepared
        .iter()
        .enumerate()
        .flat_map(|(slot, (_, params))| {
            (0..config.runs_per_instance as u64).map(move |run| (slot, params.seed.wrapping_add(run)))
        })
        .collect();
    let outcomes: Vec<(usize, RunOutcome)> = tasks
        .par_iter()
        .map(|&(slot, seed)| {
            let (instance, params) = &prepared[slot];
            let mut params = params.clone();
            params.seed = seed;
            let started = Instant::now();
            let result = colony::run(instance, &params)
                .expect("parameters were validated when the experiment was prepared");
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            (
                slot,
                RunOutcome {
                    makespan: result.best_makespan,
                    evaluations_total: result.evaluations_total,
                    evaluations_to_best: result.evaluations_to_best,
                    wall_ms,
                },
            )
        })
        .collect();

    let mut reports = Vec::with_capacity(prepared.len());
    for (slot, (instance, _)) in prepared.iter().enumerate() {
        let runs: Vec<RunOutcome> = outcomes
            .iter()
            .filter(|(s, _)| *s == slot)
            .map(|(_, outcome)| *outcome)
            .collect();
        reports.push(summarize(instance, runs));
    }
    Ok(ExperimentOutcome { reports, warnings })
}

fn summarize(instance: &JobShopInstance, runs: Vec<RunOutcome>) -> RunReport {
    let n = runs.len() as f64;
    let best = runs.iter().map(|r| r.makespan).min().unwrap();
    let mean = runs.iter().map(|r| r.makespan as f64).sum::<f64>() / n;
    let variance = runs
        .iter()
        .map(|r| {
            let d = r.makespan as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let bks = lookup_bks(instance.name()).ok();
    RunReport {
        instance: instance.name().to_string(),
        jobs: instance.jobs(),
        machines: instance.machines(),
        bks,
        best,
        rel_err_pct: bks.map(|bks| 100.0 * (best - bks) as f64 / bks as f64),
        mean,
        stddev: variance.sqrt(),
        avg_evals_to_best: runs.iter().map(|r| r.evaluations_to_best as f64).sum::<f64>() / n,
        avg_evals_total: runs.iter().map(|r| r.evaluations_total as f64).sum::<f64>() / n,
        avg_wall_ms: Some(runs.iter().map(|r| r.wall_ms).sum::<f64>() / n),
        runs,
    }
}

/// Mean relative error of the reports sharing one instance size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeGroup {
    pub jobs: usize,
    pub machines: usize,
    /// Reports of this size that have a BKS (and so a relative error).
    pub count: usize,
    pub mean_rel_err_pct: f64,
}

/// Per-size means plus the grand mean over every report with a BKS.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub groups: Vec<SizeGroup>,
    pub grand_mean_rel_err_pct: Option<f64>,
}

/// Groups reports by `(jobs, machines)` and averages relative errors within
/// each group and across all reports. Reports without a BKS contribute to
/// neither; groups are sorted by size.
pub fn aggregate_by_size(reports: &[RunReport]) -> Aggregate {
    let mut sized: Vec<(usize, usize, f64)> = reports
        .iter()
        .filter_map(|r| r.rel_err_pct.map(|err| (r.jobs, r.machines, err)))
        .collect();
    sized.sort_by_key(|&(jobs, machines, _)| (jobs, machines));
    let mut groups: Vec<SizeGroup> = Vec::new();
    for (jobs, machines, err) in &sized {
        match groups.last_mut() {
            Some(group) if group.jobs == *jobs && group.machines == *machines => {
                group.count += 1;
                group.mean_rel_err_pct += err;
            }
            _ => groups.push(SizeGroup {
                jobs: *jobs,
                machines: *machines,
                count: 1,
                mean_rel_err_pct: *err,
            }),
        }
    }
    for group in &mut groups {
        group.mean_rel_err_pct /= group.count as f64;
    }
    let grand_mean_rel_err_pct = if sized.is_empty() {
        None
    } else {
        Some(sized.iter().map(|&(_, _, err)| err).sum::<f64>() / sized.len() as f64)
    };
    Aggregate {
        groups,
        grand_mean_rel_err_pct,
    }
}

/// Output format for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!(
                "unknown report format {other:?} (expected table, csv, or json)"
            )),
        }
    }
}

/// Published averages of objective-function evaluations for the solvers this
/// benchmark is usually compared against; printed under every table report.
const REFERENCE_EVALS: &str =
    "Reference #eval averages: EAS 3307, TS 11108, AIS 175058, CULT 454525";

/// Renders reports as a human table, CSV, or JSON. Pure function of its
/// inputs: equal reports yield byte-identical text.
///
/// CSV uses the fixed header
/// `instance,jobs,machines,bks,best,rel_err_pct,mean,stddev,avg_evals_to_best,avg_evals_total,avg_wall_ms`
/// with `.` decimals and empty cells for unknown values. JSON is an array of
/// report objects under the same field names.
pub fn emit_report(reports: &[RunReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(reports),
        ReportFormat::Json => {
            serde_json::to_string_pretty(reports).expect("reports serialize infallibly")
        }
        ReportFormat::Table => emit_table(reports),
    }
}

fn fmt_opt<T: std::fmt::Display>(value: &Option<T>, render: impl Fn(&T) -> String) -> String {
    value.as_ref().map(render).unwrap_or_default()
}

fn emit_csv(reports: &[RunReport]) -> String {
    let mut out = String::from(
        "instance,jobs,machines,bks,best,rel_err_pct,mean,stddev,avg_evals_to_best,avg_evals_total,avg_wall_ms\n",
    );
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.2},{:.2},{:.2},{:.2},{}",
            r.instance,
            r.jobs,
            r.machines,
            fmt_opt(&r.bks, |b| b.to_string()),
            r.best,
            fmt_opt(&r.rel_err_pct, |e| format!("{e:.2}")),
            r.mean,
            r.stddev,
            r.avg_evals_to_best,
            r.avg_evals_total,
            fmt_opt(&r.avg_wall_ms, |w| format!("{w:.3}")),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

fn emit_table(reports: &[RunReport]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:>7} {:>6} {:>6} {:>7} {:>9} {:>8} {:>12} {:>12} {:>10}",
        "instance",
        "size",
        "bks",
        "best",
        "err%",
        "mean",
        "stddev",
        "evals>best",
        "evals",
        "wall ms"
    )
    .unwrap();
    for r in reports {
        writeln!(
            out,
            "{:<10} {:>7} {:>6} {:>6} {:>7} {:>9.2} {:>8.2} {:>12.2} {:>12.2} {:>10}",
            r.instance,
            format!("{}x{}", r.jobs, r.machines),
            fmt_opt(&r.bks, |b| b.to_string()),
            r.best,
            fmt_opt(&r.rel_err_pct, |e| format!("{e:.2}")),
            r.mean,
            r.stddev,
            r.avg_evals_to_best,
            r.avg_evals_total,
            fmt_opt(&r.avg_wall_ms, |w| format!("{w:.3}")),
        )
        .unwrap();
    }
    let aggregate = aggregate_by_size(reports);
    if !aggregate.groups.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "mean relative error by size:").unwrap();
        for group in &aggregate.groups {
            writeln!(
                out,
                "  {:>7}  {:>6.2}%  ({} instances)",
                format!("{}x{}", group.jobs, group.machines),
                group.mean_rel_err_pct,
                group.count
            )
            .unwrap();
        }
        if let Some(grand) = aggregate.grand_mean_rel_err_pct {
            writeln!(out, "  {:>7}  {:>6.2}%", "all", grand).unwrap();
        }
    }
    writeln!(out).unwrap();
    writeln!(out, "{REFERENCE_EVALS}").unwrap();
    out
}
