//! `formic` — ant-colony job-shop scheduling from the command line.
//!
//! Subcommands: `solve` (one colony run), `validate` (check a schedule JSON
//! against an instance), `bench` (repeated runs with statistics), `oracle`
//! (exhaustive optimum for tiny instances), `gantt` (render a schedule).
//!
//! Exit codes: 0 success, 1 input or parameter errors, 2 constraint
//! violations found by `validate`/`gantt`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use formic_core::bench::{run_experiment, emit_report, ExperimentConfig, ReportFormat};
use formic_core::colony::{self, ElitistTarget};
use formic_core::config::ParamOverrides;
use formic_core::fixtures;
use formic_core::instance::JobShopInstance;
use formic_core::oracle;
use formic_core::schedule::{
    build_schedule, render_gantt, validate_document, ScheduleDocument, ScheduleRecord,
};
use formic_core::{Params, Time};

#[derive(Parser)]
#[command(
    name = "formic",
    version,
    about = "Elitist ant-colony solver for job-shop scheduling",
    propagate_version = true
)]
struct Cli {
    /// Base random seed; identical invocations print identical output.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cap on worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the colony parameters one-to-one. `beta` is deliberately
/// absent: it is always `1 - alpha`.
#[derive(Args, Debug, Default)]
struct ParamFlags {
    /// Trail exponent in (0, 1]; the visibility exponent is 1 - alpha.
    #[arg(long)]
    alpha: Option<f64>,

    /// Trail persistence per cycle, in (0, 1).
    #[arg(long)]
    rho: Option<f64>,

    /// Deposit numerator: an ant with makespan L deposits q / L.
    #[arg(long)]
    q: Option<f64>,

    /// Deposit multiplier for the elitist path (default: the job count).
    #[arg(long)]
    elitist_weight: Option<f64>,

    /// Construction cycles per run.
    #[arg(long)]
    cycles: Option<usize>,

    /// Ants per cycle (default: half the jobs, rounded up).
    #[arg(long)]
    ants: Option<usize>,

    /// Initial trail strength on every edge.
    #[arg(long)]
    tau0: Option<f64>,

    /// Longest machine idle gap an eligible operation may introduce.
    #[arg(long)]
    delay_limit: Option<Time>,

    /// Visibility shrink per unit of delay.
    #[arg(long)]
    delay_penalty_per_unit: Option<f64>,

    /// Which path gets the elitist deposit: cycle-best or global-best.
    #[arg(long)]
    elitist_target: Option<String>,

    /// `key = value` parameter file, applied beneath any explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ParamFlags {
    /// Layers explicit flags (and the global seed) over the optional
    /// configuration file.
    fn overrides(&self, seed: Option<u64>) -> anyhow::Result<ParamOverrides> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                ParamOverrides::parse(&text)
                    .with_context(|| format!("config file {}", path.display()))?
            }
            None => ParamOverrides::default(),
        };
        let elitist_target = self
            .elitist_target
            .as_deref()
            .map(|raw| raw.parse::<ElitistTarget>().map_err(anyhow::Error::msg))
            .transpose()?;
        let flags = ParamOverrides {
            alpha: self.alpha,
            beta: None,
            rho: self.rho,
            q: self.q,
            elitist_weight: self.elitist_weight,
            cycles: self.cycles,
            ants: self.ants,
            tau0: self.tau0,
            delay_limit: self.delay_limit,
            delay_penalty_per_unit: self.delay_penalty_per_unit,
            seed,
            elitist_target,
        };
        Ok(file.layered_under(&flags))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the ant colony once and print the best schedule found.
    Solve {
        /// Instance file path or bundled name (LA01..LA40, demo3x3).
        instance: String,

        #[command(flatten)]
        params: ParamFlags,

        /// Output format: text or json.
        #[arg(long, default_value = "text")]
        format: String,

        /// Append a Gantt chart to the text output.
        #[arg(long)]
        gantt: bool,

        /// Print one line per cycle (cycle best, running best) to the error
        /// stream.
        #[arg(long)]
        trace: bool,
    },

    /// Check a schedule JSON document against an instance.
    Validate {
        /// Instance file path or bundled name.
        instance: String,

        /// Schedule document as produced by `solve --format json`.
        schedule: PathBuf,
    },

    /// Run repeated seeded experiments and print per-instance statistics.
    Bench {
        /// Instance names or paths; `LA01..LA05`-style ranges expand.
        #[arg(long, required = true, num_args = 1..)]
        instances: Vec<String>,

        /// Colony runs per instance.
        #[arg(long, default_value_t = 30)]
        runs: usize,

        #[command(flatten)]
        params: ParamFlags,

        /// Output format: table, csv, or json.
        #[arg(long, default_value = "table")]
        format: String,

        /// Report measured wall-clock averages on the error stream. The
        /// standard-output report always leaves the wall column empty so
        /// identical invocations stay byte-identical.
        #[arg(long)]
        timing: bool,
    },

    /// Exhaustively compute the true optimum of a tiny instance.
    Oracle {
        /// Instance file path or bundled name.
        instance: String,

        /// Refuse instances with more operations than this.
        #[arg(long, default_value_t = 12)]
        op_limit: usize,

        /// Disable branch-and-bound pruning and enumerate everything.
        #[arg(long)]
        no_prune: bool,
    },

    /// Render a schedule JSON document as a text Gantt chart.
    Gantt {
        /// Instance file path or bundled name.
        instance: String,

        /// Schedule document as produced by `solve --format json`.
        schedule: PathBuf,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes early (`formic bench … | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("worker pool already initialized")?;
    }
    match cli.command {
        Command::Solve {
            instance,
            params,
            format,
            gantt,
            trace,
        } => cmd_solve(&instance, &params, cli.seed, &format, gantt, trace),
        Command::Validate { instance, schedule } => cmd_validate(&instance, &schedule),
        Command::Bench {
            instances,
            runs,
            params,
            format,
            timing,
        } => cmd_bench(&instances, runs, &params, cli.seed, &format, timing),
        Command::Oracle {
            instance,
            op_limit,
            no_prune,
        } => cmd_oracle(&instance, op_limit, no_prune),
        Command::Gantt { instance, schedule } => cmd_gantt(&instance, &schedule),
    }
}

fn resolve(spec: &str) -> anyhow::Result<JobShopInstance> {
    fixtures::resolve(spec).map_err(anyhow::Error::from)
}

fn read_schedule(path: &PathBuf) -> anyhow::Result<ScheduleDocument> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read schedule {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("schedule {} is not a valid document", path.display()))
}

/// Everything `solve --format json` emits. A superset of the schedule
/// document, so the output feeds straight back into `validate` and `gantt`.
#[derive(Serialize)]
struct SolveOutput {
    instance: String,
    jobs: usize,
    machines: usize,
    seed: u64,
    makespan: Time,
    evaluations_total: u64,
    evaluations_to_best: u64,
    operations: Vec<ScheduleRecord>,
}

fn cmd_solve(
    spec: &str,
    flags: &ParamFlags,
    seed: Option<u64>,
    format: &str,
    gantt: bool,
    trace: bool,
) -> anyhow::Result<u8> {
    let instance = resolve(spec)?;
    let mut params = Params::for_instance(&instance);
    flags
        .overrides(seed)?
        .apply_to(&mut params)
        .map_err(anyhow::Error::from)?;
    let result = colony::run(&instance, &params).map_err(anyhow::Error::from)?;
    let schedule = build_schedule(&instance, &result.best_sequence)
        .expect("solver sequences decode by construction");

    if trace {
        let mut running = Time::MAX;
        for (cycle, &best) in result.per_cycle_best.iter().enumerate() {
            running = running.min(best);
            eprintln!("cycle {:>4} best {:>6} global {:>6}", cycle + 1, best, running);
        }
    }

    match format {
        "text" => {
            println!(
                "instance {} ({} jobs, {} machines)",
                instance.name(),
                instance.jobs(),
                instance.machines()
            );
            println!("makespan {}", result.best_makespan);
            println!(
                "evaluations {} (best at {})",
                result.evaluations_total, result.evaluations_to_best
            );
            println!("sequence {}", result.best_sequence);
            if gantt {
                let chart = render_gantt(&instance, &schedule)
                    .expect("solver schedules are feasible");
                println!();
                println!("{chart}");
            }
        }
        "json" => {
            let document = ScheduleDocument::from_schedule(&instance, &schedule);
            let output = SolveOutput {
                instance: instance.name().to_string(),
                jobs: instance.jobs(),
                machines: instance.machines(),
                seed: params.seed,
                makespan: document.makespan,
                evaluations_total: result.evaluations_total,
                evaluations_to_best: result.evaluations_to_best,
                operations: document.operations,
            };
            println!("{}", serde_json::to_string_pretty(&output)?);
        }
        other => anyhow::bail!("unknown output format {other:?} (expected text or json)"),
    }
    Ok(0)
}

fn cmd_validate(spec: &str, schedule: &PathBuf) -> anyhow::Result<u8> {
    let instance = resolve(spec)?;
    let document = read_schedule(schedule)?;
    let report = validate_document(&instance, &document);
    println!("{report}");
    Ok(if report.is_feasible() { 0 } else { 2 })
}

fn cmd_bench(
    instances: &[String],
    runs: usize,
    flags: &ParamFlags,
    seed: Option<u64>,
    format: &str,
    timing: bool,
) -> anyhow::Result<u8> {
    let format: ReportFormat = format.parse().map_err(anyhow::Error::msg)?;
    let overrides = flags.overrides(seed)?;
    let config = ExperimentConfig {
        instances: expand_instances(instances),
        runs_per_instance: runs,
        base_seed: overrides.seed.unwrap_or(0),
        overrides,
    };
    let outcome = run_experiment(&config).map_err(anyhow::Error::from)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    if timing {
        for report in &outcome.reports {
            eprintln!(
                "timing: {} averaged {:.3} ms over {} runs",
                report.instance,
                report.avg_wall_ms.unwrap_or(f64::NAN),
                report.runs.len()
            );
        }
    }
    // Wall-clock numbers never reach standard output: the printed report
    // must be byte-identical across repeated invocations.
    let mut reports = outcome.reports;
    for report in &mut reports {
        report.avg_wall_ms = None;
    }
    print!("{}", emit_report(&reports, format));
    Ok(if reports.is_empty() && !outcome.warnings.is_empty() {
        1
    } else {
        0
    })
}

fn cmd_oracle(spec: &str, op_limit: usize, no_prune: bool) -> anyhow::Result<u8> {
    let instance = resolve(spec)?;
    let result = oracle::exhaustive_optimum_with(&instance, op_limit, !no_prune)
        .map_err(anyhow::Error::from)?;
    println!(
        "instance {} ({} jobs, {} machines)",
        instance.name(),
        instance.jobs(),
        instance.machines()
    );
    println!("optimum {}", result.optimal_makespan);
    println!("sequence {}", result.optimal_sequence);
    println!("nodes {}", result.nodes_explored);
    Ok(0)
}

fn cmd_gantt(spec: &str, schedule: &PathBuf) -> anyhow::Result<u8> {
    let instance = resolve(spec)?;
    let document = read_schedule(schedule)?;
    let schedule = match document.decode(&instance) {
        Ok(schedule) => schedule,
        Err(report) => {
            eprintln!("{report}");
            return Ok(2);
        }
    };
    match render_gantt(&instance, &schedule) {
        Ok(chart) => {
            println!("{chart}");
            Ok(0)
        }
        Err(err) => {
            eprintln!("{}", err.0);
            Ok(2)
        }
    }
}

/// Expands `LA01..LA05`-style ranges (same alphabetic prefix on both ends,
/// ascending, zero-padding preserved); any other token passes through
/// untouched.
fn expand_instances(specs: &[String]) -> Vec<String> {
    fn split_name(s: &str) -> Option<(&str, usize, usize)> {
        let digits = s.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        let prefix = &s[..s.len() - digits.len()];
        if prefix.is_empty() || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Some((prefix, digits.parse().ok()?, digits.len()))
    }

    let mut expanded = Vec::new();
    for spec in specs {
        if let Some((lo, hi)) = spec.split_once("..") {
            if let (Some((prefix, from, width)), Some((hi_prefix, to, _))) =
                (split_name(lo), split_name(hi))
            {
                if prefix.eq_ignore_ascii_case(hi_prefix) && from <= to {
                    for n in from..=to {
                        expanded.push(format!("{prefix}{n:0width$}"));
                    }
                    continue;
                }
            }
        }
        expanded.push(spec.clone());
    }
    expanded
}
