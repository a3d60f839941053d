//! Sequence decoding (semi-active list scheduling), constraint verification,
//! Gantt text rendering, and the JSON schedule document.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::JobShopInstance;
use crate::Time;

/// Reference to one operation as a `(job, step)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpRef {
    pub job: usize,
    pub step: usize,
}

impl OpRef {
    pub fn new(job: usize, step: usize) -> Self {
        Self { job, step }
    }
}

impl fmt::Display for OpRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.job, self.step)
    }
}

/// A total order over all operations of an instance, respecting each job's
/// technological sequence. This is what an ant constructs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSequence {
    order: Vec<OpRef>,
}

impl OperationSequence {
    pub fn new(order: Vec<OpRef>) -> Self {
        Self { order }
    }

    pub fn order(&self) -> &[OpRef] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Verifies coverage (every operation exactly once) and technological
    /// precedence (step k before step k+1 within each job).
    pub fn check(&self, instance: &JobShopInstance) -> Result<(), SequenceError> {
        if self.order.len() != instance.num_operations() {
            return Err(SequenceError::WrongLength {
                expected: instance.num_operations(),
                found: self.order.len(),
            });
        }
        let mut next = vec![0usize; instance.jobs()];
        for &op in &self.order {
            if op.job >= instance.jobs() || op.step >= instance.machines() {
                return Err(SequenceError::UnknownOperation { op });
            }
            if op.step < next[op.job] {
                return Err(SequenceError::Duplicate { op });
            }
            if op.step > next[op.job] {
                return Err(SequenceError::OutOfOrder {
                    op,
                    expected: next[op.job],
                });
            }
            next[op.job] += 1;
        }
        Ok(())
    }
}

impl FromIterator<OpRef> for OperationSequence {
    fn from_iter<I: IntoIterator<Item = OpRef>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Display for OperationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Why a sequence cannot be decoded against an instance.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("sequence has {found} entries, instance has {expected} operations")]
    WrongLength { expected: usize, found: usize },
    #[error("sequence references unknown operation {op}")]
    UnknownOperation { op: OpRef },
    #[error("operation {op} appears more than once")]
    Duplicate { op: OpRef },
    #[error("operation {op} scheduled before step {expected} of its job")]
    OutOfOrder { op: OpRef, expected: usize },
}

/// A decoded schedule: start times per operation, the makespan, and the
/// processing order realized on each machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    jobs: usize,
    machines: usize,
    starts: Vec<Time>,
    makespan: Time,
    machine_orders: Vec<Vec<OpRef>>,
}

impl Schedule {
    pub fn makespan(&self) -> Time {
        self.makespan
    }

    /// Start times in dense `job * machines + step` order.
    pub fn starts(&self) -> &[Time] {
        &self.starts
    }

    pub fn start_of(&self, op: OpRef) -> Time {
        self.starts[op.job * self.machines + op.step]
    }

    /// Processing order realized on each machine.
    pub fn machine_orders(&self) -> &[Vec<OpRef>] {
        &self.machine_orders
    }
}

/// Decodes a sequence by semi-active list scheduling: operations are placed
/// in sequence order, each starting at the later of its job predecessor's
/// completion and its machine's release time.
///
/// Pure and deterministic; the sequence is checked before any decoding.
pub fn build_schedule(
    instance: &JobShopInstance,
    sequence: &OperationSequence,
) -> Result<Schedule, SequenceError> {
    sequence.check(instance)?;
    let mut job_ready = vec![0 as Time; instance.jobs()];
    let mut machine_ready = vec![0 as Time; instance.machines()];
    let mut starts = vec![0 as Time; instance.num_operations()];
    let mut machine_orders = vec![Vec::new(); instance.machines()];
    let mut makespan = 0;
    for &op_ref in sequence.order() {
        let op = instance.operation(op_ref.job, op_ref.step);
        let start = job_ready[op.job].max(machine_ready[op.machine]);
        let end = start + op.duration;
        starts[instance.op_index(op.job, op.step)] = start;
        job_ready[op.job] = end;
        machine_ready[op.machine] = end;
        machine_orders[op.machine].push(op_ref);
        makespan = makespan.max(end);
    }
    Ok(Schedule {
        jobs: instance.jobs(),
        machines: instance.machines(),
        starts,
        makespan,
        machine_orders,
    })
}

/// Constraint family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Start,
    Precedence,
    Disjunctive,
    Coverage,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Start => "start",
            Self::Precedence => "precedence",
            Self::Disjunctive => "disjunctive",
            Self::Coverage => "coverage",
        };
        f.write_str(s)
    }
}

/// One broken constraint, with the operations involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub operations: Vec<OpRef>,
    pub detail: String,
}

/// Every violation found; empty exactly when the schedule is feasible.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, operations: Vec<OpRef>, detail: String) {
        self.violations.push(Violation {
            kind,
            operations,
            detail,
        });
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_feasible() {
            return f.write_str("feasible: no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}: {}", v.kind, v.detail)?;
        }
        Ok(())
    }
}

/// Checks the three job-shop constraint families plus internal consistency:
/// nonnegative starts, job precedence with full processing times, pairwise
/// disjoint machine intervals, and agreement between the stored machine
/// orders and the orders implied by the start times.
///
/// All violations are reported, not just the first; violations are data, so
/// this never errors.
pub fn validate(instance: &JobShopInstance, schedule: &Schedule) -> ViolationReport {
    let mut report = ViolationReport::default();
    if schedule.jobs != instance.jobs()
        || schedule.machines != instance.machines()
        || schedule.starts.len() != instance.num_operations()
    {
        report.push(
            ViolationKind::Coverage,
            Vec::new(),
            format!(
                "schedule shape ({} jobs, {} machines, {} starts) does not match instance ({} jobs, {} machines)",
                schedule.jobs,
                schedule.machines,
                schedule.starts.len(),
                instance.jobs(),
                instance.machines()
            ),
        );
        return report;
    }

    for op in instance.operations() {
        let start = schedule.start_of(OpRef::new(op.job, op.step));
        if start < 0 {
            report.push(
                ViolationKind::Start,
                vec![OpRef::new(op.job, op.step)],
                format!("operation {}:{} starts at {start}", op.job, op.step),
            );
        }
    }

    for job in 0..instance.jobs() {
        for step in 1..instance.machines() {
            let prev = instance.operation(job, step - 1);
            let prev_ref = OpRef::new(job, step - 1);
            let cur_ref = OpRef::new(job, step);
            let prev_end = schedule.start_of(prev_ref) + prev.duration;
            let cur_start = schedule.start_of(cur_ref);
            if cur_start < prev_end {
                report.push(
                    ViolationKind::Precedence,
                    vec![prev_ref, cur_ref],
                    format!(
                        "job {job}: step {step} starts at {cur_start}, before step {} completes at {prev_end}",
                        step - 1
                    ),
                );
            }
        }
    }

    let mut per_machine: Vec<Vec<(OpRef, Time, Time)>> = vec![Vec::new(); instance.machines()];
    for op in instance.operations() {
        let r = OpRef::new(op.job, op.step);
        let start = schedule.start_of(r);
        per_machine[op.machine].push((r, start, start + op.duration));
    }
    for (machine, ops) in per_machine.iter().enumerate() {
        for (i, &(a, a_start, a_end)) in ops.iter().enumerate() {
            for &(b, b_start, b_end) in &ops[i + 1..] {
                if a_start < b_end && b_start < a_end {
                    report.push(
                        ViolationKind::Disjunctive,
                        vec![a, b],
                        format!(
                            "machine {machine}: operations {a} [{a_start},{a_end}) and {b} [{b_start},{b_end}) overlap"
                        ),
                    );
                }
            }
        }
    }

    // The stored machine orders are not trusted; they must agree with the
    // orders implied by the start times.
    for (machine, ops) in per_machine.iter().enumerate() {
        let mut derived: Vec<(Time, OpRef)> = ops.iter().map(|&(r, s, _)| (s, r)).collect();
        derived.sort_by_key(|&(s, r)| (s, r.job, r.step));
        let derived: Vec<OpRef> = derived.into_iter().map(|(_, r)| r).collect();
        if schedule.machine_orders[machine] != derived {
            report.push(
                ViolationKind::Coverage,
                derived.clone(),
                format!("machine {machine}: stored processing order disagrees with start times"),
            );
        }
    }

    let true_makespan = instance
        .operations()
        .map(|op| schedule.start_of(OpRef::new(op.job, op.step)) + op.duration)
        .max()
        .unwrap_or(0);
    if schedule.makespan != true_makespan {
        report.push(
            ViolationKind::Coverage,
            Vec::new(),
            format!(
                "recorded makespan {} differs from computed {}",
                schedule.makespan, true_makespan
            ),
        );
    }

    report
}

/// Gantt rendering refusal: only feasible schedules are drawable.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("schedule is infeasible:\n{0}")]
pub struct InfeasibleSchedule(pub ViolationReport);

fn job_label(job: usize) -> char {
    match job {
        0..=8 => (b'1' + job as u8) as char,
        9..=34 => (b'a' + (job - 9) as u8) as char,
        35..=60 => (b'A' + (job - 35) as u8) as char,
        _ => '?',
    }
}

/// Renders one fixed-width text row per machine: each operation appears as
/// its job label repeated for its duration, idle time as `'.'`; a machine
/// gutter `"M<idx> |"` precedes each row and the time axis spans exactly
/// `makespan` columns.
pub fn render_gantt(
    instance: &JobShopInstance,
    schedule: &Schedule,
) -> Result<String, InfeasibleSchedule> {
    let report = validate(instance, schedule);
    if !report.is_feasible() {
        return Err(InfeasibleSchedule(report));
    }
    let width = schedule.makespan as usize;
    let gutter = (instance.machines() - 1).to_string().len();
    let mut rows = vec![vec!['.'; width]; instance.machines()];
    for op in instance.operations() {
        let start = schedule.start_of(OpRef::new(op.job, op.step));
        let label = job_label(op.job);
        for t in start..start + op.duration {
            rows[op.machine][t as usize] = label;
        }
    }
    let lines: Vec<String> = rows
        .into_iter()
        .enumerate()
        .map(|(machine, row)| {
            format!(
                "M{:<pad$} |{}",
                machine,
                row.into_iter().collect::<String>(),
                pad = gutter
            )
        })
        .collect();
    Ok(lines.join("\n"))
}

/// One operation of a schedule document, as exported to JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub operation: usize,
    pub job: usize,
    pub step: usize,
    pub machine: usize,
    pub start: Time,
    pub duration: Time,
}

/// JSON-facing schedule: the makespan plus one record per operation. This is
/// the interchange format between `solve` and `validate`/`gantt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub makespan: Time,
    pub operations: Vec<ScheduleRecord>,
}

impl ScheduleDocument {
    pub fn from_schedule(instance: &JobShopInstance, schedule: &Schedule) -> Self {
        let operations = instance
            .operations()
            .map(|op| ScheduleRecord {
                operation: instance.op_index(op.job, op.step),
                job: op.job,
                step: op.step,
                machine: op.machine,
                start: schedule.start_of(OpRef::new(op.job, op.step)),
                duration: op.duration,
            })
            .collect();
        Self {
            makespan: schedule.makespan(),
            operations,
        }
    }

    /// Rebuilds an in-memory [`Schedule`] provided the document covers the
    /// instance exactly (every operation once, fields consistent). Constraint
    /// violations do not block decoding — they are [`validate`]'s business —
    /// but coverage defects make the document undecodable and are returned as
    /// the report.
    pub fn decode(&self, instance: &JobShopInstance) -> Result<Schedule, ViolationReport> {
        let mut report = ViolationReport::default();
        let total = instance.num_operations();
        let mut starts: Vec<Option<Time>> = vec![None; total];
        for record in &self.operations {
            let r = OpRef::new(record.job, record.step);
            if record.job >= instance.jobs() || record.step >= instance.machines() {
                report.push(
                    ViolationKind::Coverage,
                    vec![r],
                    format!("record references unknown operation {r}"),
                );
                continue;
            }
            let op = instance.operation(record.job, record.step);
            let index = instance.op_index(record.job, record.step);
            if record.operation != index {
                report.push(
                    ViolationKind::Coverage,
                    vec![r],
                    format!(
                        "operation {r} carries index {}, expected {index}",
                        record.operation
                    ),
                );
            }
            if record.machine != op.machine || record.duration != op.duration {
                report.push(
                    ViolationKind::Coverage,
                    vec![r],
                    format!(
                        "operation {r} declares machine {} / duration {}, instance says {} / {}",
                        record.machine, record.duration, op.machine, op.duration
                    ),
                );
            }
            if starts[index].is_some() {
                report.push(
                    ViolationKind::Coverage,
                    vec![r],
                    format!("operation {r} appears more than once"),
                );
            }
            starts[index] = Some(record.start);
        }
        let missing: Vec<OpRef> = instance
            .operations()
            .filter(|op| starts[instance.op_index(op.job, op.step)].is_none())
            .map(|op| OpRef::new(op.job, op.step))
            .collect();
        if !missing.is_empty() {
            let detail = format!("{} operations missing from the document", missing.len());
            report.push(ViolationKind::Coverage, missing, detail);
        }
        if !report.is_feasible() {
            return Err(report);
        }

        let starts: Vec<Time> = starts.into_iter().map(|s| s.unwrap()).collect();
        let mut per_machine: Vec<Vec<(Time, OpRef)>> = vec![Vec::new(); instance.machines()];
        for op in instance.operations() {
            let r = OpRef::new(op.job, op.step);
            per_machine[op.machine].push((starts[instance.op_index(op.job, op.step)], r));
        }
        let machine_orders = per_machine
            .into_iter()
            .map(|mut ops| {
                ops.sort_by_key(|&(s, r)| (s, r.job, r.step));
                ops.into_iter().map(|(_, r)| r).collect()
            })
            .collect();
        Ok(Schedule {
            jobs: instance.jobs(),
            machines: instance.machines(),
            starts,
            makespan: self.makespan,
            machine_orders,
        })
    }
}

/// Validates a JSON schedule document against an instance: coverage defects
/// if the document does not map onto the instance, otherwise the full
/// constraint check of [`validate`] (which also flags a misstated makespan).
pub fn validate_document(instance: &JobShopInstance, document: &ScheduleDocument) -> ViolationReport {
    match document.decode(instance) {
        Ok(schedule) => validate(instance, &schedule),
        Err(report) => report,
    }
}
