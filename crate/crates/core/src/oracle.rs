//! Exhaustive optimum search for tiny instances and an independent decoder.
//!
//! Both exist to check the stochastic solver, so they deliberately share no
//! scheduling code with it: the search runs its own simulation, and
//! [`independent_decode`] computes makespans by longest path over the
//! disjunctive graph instead of ready-time bookkeeping.

use serde::Serialize;
use thiserror::Error;

use crate::instance::JobShopInstance;
use crate::schedule::{OpRef, OperationSequence, SequenceError};
use crate::Time;

/// Search refusal: exhaustive enumeration is only offered for instances at or
/// below the operation limit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("instance has {operations} operations, above the exhaustive search limit of {limit}")]
pub struct TooLarge {
    pub operations: usize,
    pub limit: usize,
}

/// Outcome of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub optimal_makespan: Time,
    #[serde(skip)]
    pub optimal_sequence: OperationSequence,
    pub nodes_explored: u64,
}

/// Finds the true optimum by depth-first enumeration of every
/// precedence-respecting operation sequence, with branch-and-bound pruning.
///
/// Refuses instances with more than `op_limit` operations; the search is
/// factorial and meant for verification, not solving.
pub fn exhaustive_optimum(
    instance: &JobShopInstance,
    op_limit: usize,
) -> Result<OracleResult, TooLarge> {
    exhaustive_optimum_with(instance, op_limit, true)
}

/// [`exhaustive_optimum`] with pruning switchable. Disabling the bound visits
/// every sequence; both settings report the same optimum and, because
/// improvements are accepted only when strict, the same optimal sequence.
pub fn exhaustive_optimum_with(
    instance: &JobShopInstance,
    op_limit: usize,
    prune: bool,
) -> Result<OracleResult, TooLarge> {
    let total = instance.num_operations();
    if total > op_limit {
        return Err(TooLarge {
            operations: total,
            limit: op_limit,
        });
    }
    let mut search = Search {
        instance,
        prune,
        best: Time::MAX,
        best_order: Vec::new(),
        nodes: 0,
        next: vec![0; instance.jobs()],
        job_ready: vec![0; instance.jobs()],
        machine_ready: vec![0; instance.machines()],
        job_remaining: instance.job_durations(),
        machine_remaining: instance.machine_loads(),
        order: Vec::with_capacity(total),
    };
    search.dfs(0);
    Ok(OracleResult {
        optimal_makespan: if total == 0 { 0 } else { search.best },
        optimal_sequence: OperationSequence::new(search.best_order),
        nodes_explored: search.nodes,
    })
}

struct Search<'a> {
    instance: &'a JobShopInstance,
    prune: bool,
    best: Time,
    best_order: Vec<OpRef>,
    nodes: u64,
    next: Vec<usize>,
    job_ready: Vec<Time>,
    machine_ready: Vec<Time>,
    job_remaining: Vec<Time>,
    machine_remaining: Vec<Time>,
    order: Vec<OpRef>,
}

impl Search<'_> {
    fn dfs(&mut self, span: Time) {
        if self.order.len() == self.instance.num_operations() {
            if span < self.best {
                self.best = span;
                self.best_order = self.order.clone();
            }
            return;
        }
        for job in 0..self.instance.jobs() {
            let step = self.next[job];
            if step >= self.instance.machines() {
                continue;
            }
            let op = *self.instance.operation(job, step);
            let start = self.job_ready[job].max(self.machine_ready[op.machine]);
            let end = start + op.duration;
            self.nodes += 1;

            // Apply the placement.
            let saved_job = self.job_ready[job];
            let saved_machine = self.machine_ready[op.machine];
            self.job_ready[job] = end;
            self.machine_ready[op.machine] = end;
            self.job_remaining[job] -= op.duration;
            self.machine_remaining[op.machine] -= op.duration;
            self.next[job] += 1;
            self.order.push(OpRef::new(job, step));

            let child_span = span.max(end);
            let admissible = !self.prune || self.lower_bound(child_span) < self.best;
            if admissible {
                self.dfs(child_span);
            }

            // Undo it.
            self.order.pop();
            self.next[job] -= 1;
            self.machine_remaining[op.machine] += op.duration;
            self.job_remaining[job] += op.duration;
            self.machine_ready[op.machine] = saved_machine;
            self.job_ready[job] = saved_job;
        }
    }

    /// Admissible bound on any completion of the current partial schedule:
    /// the span so far, each job's ready time plus its unscheduled work, and
    /// each machine's ready time plus its unscheduled load.
    fn lower_bound(&self, span: Time) -> Time {
        let mut bound = span;
        for job in 0..self.instance.jobs() {
            bound = bound.max(self.job_ready[job] + self.job_remaining[job]);
        }
        for machine in 0..self.instance.machines() {
            bound = bound.max(self.machine_ready[machine] + self.machine_remaining[machine]);
        }
        bound
    }
}

/// Computes a sequence's makespan by longest path over the disjunctive graph:
/// nodes are operations, arcs are job precedences plus the machine orders the
/// sequence induces, and starts propagate in topological order.
///
/// Shares no logic with [`crate::schedule::build_schedule`]; agreement
/// between the two is evidence either is right.
pub fn independent_decode(
    instance: &JobShopInstance,
    sequence: &OperationSequence,
) -> Result<Time, SequenceError> {
    sequence.check(instance)?;
    let total = instance.num_operations();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut indegree = vec![0usize; total];
    for job in 0..instance.jobs() {
        for step in 1..instance.machines() {
            let from = instance.op_index(job, step - 1);
            let to = instance.op_index(job, step);
            successors[from].push(to);
            indegree[to] += 1;
        }
    }
    let mut last_on_machine: Vec<Option<usize>> = vec![None; instance.machines()];
    for op_ref in sequence.order() {
        let index = instance.op_index(op_ref.job, op_ref.step);
        let machine = instance.operation(op_ref.job, op_ref.step).machine;
        if let Some(prev) = last_on_machine[machine] {
            successors[prev].push(index);
            indegree[index] += 1;
        }
        last_on_machine[machine] = Some(index);
    }

    let durations: Vec<Time> = instance.operations().map(|op| op.duration).collect();
    let mut starts = vec![0 as Time; total];
    let mut queue: std::collections::VecDeque<usize> = (0..total)
        .filter(|&v| indegree[v] == 0)
        .collect();
    let mut processed = 0;
    let mut makespan = 0;
    while let Some(u) = queue.pop_front() {
        processed += 1;
        let end = starts[u] + durations[u];
        makespan = makespan.max(end);
        for i in 0..successors[u].len() {
            let v = successors[u][i];
            starts[v] = starts[v].max(end);
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    debug_assert_eq!(processed, total, "disjunctive graph of a checked sequence is acyclic");
    Ok(makespan)
}
