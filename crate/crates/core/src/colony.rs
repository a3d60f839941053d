//! The elitist ant colony: pheromone field, stochastic sequence
//! construction, deposit accounting, and the solver loop.
//!
//! One cycle sends a wave of ants through the precedence graph. Each ant
//! builds a complete operation sequence step by step, choosing among
//! currently eligible operations with probability proportional to
//! `trail^alpha * visibility^beta`. Deposits earned during a cycle are
//! buffered and folded into the trails only after the wave completes, with
//! the cycle's best ant depositing at `elitist_weight` times the ordinary
//! rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::JobShopInstance;
use crate::schedule::{build_schedule, OpRef, OperationSequence, Schedule};
use crate::{Real, Time};

/// Greedy flavor an ant is born with for one cycle: visibility favors short
/// operations (`Spt`) or long ones (`Lpt`). Each ant draws its rule
/// uniformly, so the colony always mixes both viewpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    Spt,
    Lpt,
}

impl std::fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Spt => "SPT",
            Self::Lpt => "LPT",
        })
    }
}

/// Which path receives the elitist reinforcement.
///
/// `CycleBest` is the reference behavior: the best ant of the cycle deposits
/// `q * elitist_weight / L` instead of the ordinary `q / L`. `GlobalBest` is
/// an experimental variant that pays every ant the ordinary rate and adds an
/// extra elitist deposit along the best path found since the start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ElitistTarget {
    #[default]
    CycleBest,
    GlobalBest,
}

impl std::fmt::Display for ElitistTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::CycleBest => "cycle-best",
            Self::GlobalBest => "global-best",
        })
    }
}

impl std::str::FromStr for ElitistTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle-best" => Ok(Self::CycleBest),
            "global-best" => Ok(Self::GlobalBest),
            other => Err(format!(
                "unknown elitist target {other:?} (expected cycle-best or global-best)"
            )),
        }
    }
}

/// Everything that parameterizes a colony run.
///
/// `beta` is not free: the trail and visibility exponents are
/// complementary, `beta = 1 - alpha`, which [`ColonyParams::validate`]
/// enforces exactly. Change `alpha` through [`ColonyParams::set_alpha`] to
/// keep the pair consistent.
#[derive(Debug, Clone, PartialEq)]
pub struct ColonyParams<S> {
    /// Trail exponent, in `(0, 1]`.
    pub alpha: S,
    /// Visibility exponent; always `1 - alpha`.
    pub beta: S,
    /// Trail persistence in `(0, 1)`: each update keeps `rho` of the old
    /// trail and adds the buffered deposits.
    pub rho: S,
    /// Deposit numerator; an ant with makespan `L` deposits `q / L`.
    pub q: S,
    /// Multiplier applied to the elitist path's deposit.
    pub elitist_weight: S,
    pub cycles: usize,
    pub ants: usize,
    /// Initial trail on every edge.
    pub tau0: S,
    /// Longest machine idle gap an eligible operation may introduce.
    pub delay_limit: Time,
    /// Visibility shrinks by this fraction per unit of delay.
    pub delay_penalty_per_unit: S,
    pub seed: u64,
    pub elitist_target: ElitistTarget,
}

/// A parameter set that fails [`ColonyParams::validate`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{field} = {value} is invalid: {requirement}")]
pub struct ParamError {
    pub field: &'static str,
    pub value: String,
    pub requirement: &'static str,
}

/// Ants per cycle: half the job count, rounded up.
pub fn default_ant_count(jobs: usize) -> usize {
    jobs.div_ceil(2)
}

impl<S: Real> ColonyParams<S> {
    /// Reference parameters, sized to the instance: `alpha` 0.2, `rho` 0.7,
    /// `q` 100, elitist weight and ant count derived from the job count,
    /// 1000 cycles, unit initial trail, delay limit 5 at 1% visibility
    /// penalty per unit.
    pub fn for_instance(instance: &JobShopInstance) -> Self {
        let alpha = S::from_f64(0.2).unwrap();
        Self {
            alpha,
            beta: S::one() - alpha,
            rho: S::from_f64(0.7).unwrap(),
            q: S::from_f64(100.0).unwrap(),
            elitist_weight: S::from_usize(instance.jobs()).unwrap(),
            cycles: 1000,
            ants: default_ant_count(instance.jobs()),
            tau0: S::one(),
            delay_limit: 5,
            delay_penalty_per_unit: S::from_f64(0.01).unwrap(),
            seed: 0,
            elitist_target: ElitistTarget::CycleBest,
        }
    }

    /// Sets the trail exponent and rederives `beta = 1 - alpha`.
    pub fn set_alpha(&mut self, alpha: S) {
        self.alpha = alpha;
        self.beta = S::one() - alpha;
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let err = |field: &'static str, value: String, requirement: &'static str| {
            Err(ParamError {
                field,
                value,
                requirement,
            })
        };
        if !(self.alpha > S::zero() && self.alpha <= S::one()) {
            return err("alpha", self.alpha.to_string(), "must lie in (0, 1]");
        }
        if self.beta != S::one() - self.alpha {
            return err("beta", self.beta.to_string(), "must equal 1 - alpha");
        }
        if !(self.rho > S::zero() && self.rho < S::one()) {
            return err("rho", self.rho.to_string(), "must lie in (0, 1)");
        }
        if !(self.q > S::zero() && self.q.is_finite()) {
            return err("q", self.q.to_string(), "must be positive and finite");
        }
        if !(self.elitist_weight >= S::zero() && self.elitist_weight.is_finite()) {
            return err(
                "elitist_weight",
                self.elitist_weight.to_string(),
                "must be nonnegative and finite",
            );
        }
        if self.cycles == 0 {
            return err("cycles", "0".into(), "must be at least 1");
        }
        if self.ants == 0 {
            return err("ants", "0".into(), "must be at least 1");
        }
        if !(self.tau0 > S::zero() && self.tau0.is_finite()) {
            return err("tau0", self.tau0.to_string(), "must be positive and finite");
        }
        if self.delay_limit < 0 {
            return err(
                "delay_limit",
                self.delay_limit.to_string(),
                "must be nonnegative",
            );
        }
        let max_penalty = self.delay_penalty_per_unit * S::from_i64(self.delay_limit).unwrap();
        if !(self.delay_penalty_per_unit >= S::zero() && max_penalty < S::one()) {
            return err(
                "delay_penalty_per_unit",
                self.delay_penalty_per_unit.to_string(),
                "must be nonnegative with penalty * delay_limit below 1",
            );
        }
        Ok(())
    }
}

/// Node reserved for the common start of all paths; operation `(j, s)` of an
/// instance with `m` machines occupies node `1 + j*m + s`.
pub const SOURCE: usize = 0;

fn node_of(instance: &JobShopInstance, op: OpRef) -> usize {
    1 + instance.op_index(op.job, op.step)
}

/// Trail strengths between construction-graph nodes, plus the deposit buffer
/// that accumulates during a cycle and is folded in by
/// [`update_pheromone`].
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField<S> {
    nodes: usize,
    trails: Vec<S>,
    deposits: Vec<S>,
}

impl<S: Real> PheromoneField<S> {
    pub fn new(nodes: usize, tau0: S) -> Self {
        Self {
            nodes,
            trails: vec![tau0; nodes * nodes],
            deposits: vec![S::zero(); nodes * nodes],
        }
    }

    /// A field sized for an instance: one node per operation plus the source.
    pub fn for_instance(instance: &JobShopInstance, tau0: S) -> Self {
        Self::new(1 + instance.num_operations(), tau0)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn trail(&self, from: usize, to: usize) -> S {
        self.trails[from * self.nodes + to]
    }

    /// Deposit buffered for the next update; zero between cycles.
    pub fn pending(&self, from: usize, to: usize) -> S {
        self.deposits[from * self.nodes + to]
    }

    pub fn deposit(&mut self, from: usize, to: usize, amount: S) {
        self.deposits[from * self.nodes + to] = self.deposits[from * self.nodes + to] + amount;
    }

    /// Folds the buffered deposits into the trails — every edge becomes
    /// `deposit + rho * trail` — and clears the buffer.
    pub fn apply_update(&mut self, rho: S) {
        for (trail, deposit) in self.trails.iter_mut().zip(self.deposits.iter_mut()) {
            *trail = *deposit + rho * *trail;
            *deposit = S::zero();
        }
    }
}

/// One ant's partial construction: which step of each job comes next (the
/// tabu memory — placed operations are exactly those behind these cursors),
/// the running ready times, and the node the ant currently sits on.
#[derive(Debug, Clone)]
pub struct AntState {
    pub rule: DecisionRule,
    next_step: Vec<usize>,
    job_ready: Vec<Time>,
    machine_ready: Vec<Time>,
    current_node: usize,
    placed: usize,
}

impl AntState {
    pub fn new(instance: &JobShopInstance, rule: DecisionRule) -> Self {
        Self {
            rule,
            next_step: vec![0; instance.jobs()],
            job_ready: vec![0; instance.jobs()],
            machine_ready: vec![0; instance.machines()],
            current_node: SOURCE,
            placed: 0,
        }
    }

    pub fn is_complete(&self, instance: &JobShopInstance) -> bool {
        self.placed == instance.num_operations()
    }

    pub fn current_node(&self) -> usize {
        self.current_node
    }

    /// Commits the ant to `op` (which must be the next step of its job),
    /// advancing ready times as semi-active scheduling would.
    pub fn place(&mut self, instance: &JobShopInstance, op_ref: OpRef) {
        debug_assert_eq!(self.next_step[op_ref.job], op_ref.step);
        let op = instance.operation(op_ref.job, op_ref.step);
        let start = self.job_ready[op.job].max(self.machine_ready[op.machine]);
        let end = start + op.duration;
        self.job_ready[op.job] = end;
        self.machine_ready[op.machine] = end;
        self.next_step[op.job] += 1;
        self.placed += 1;
        self.current_node = node_of(instance, op_ref);
    }
}

/// An operation an ant may take next, with the machine idle gap scheduling
/// it now would introduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub op: OpRef,
    pub delay: Time,
}

/// The operations an ant may legally take next: each job's next unplaced
/// step, filtered to those whose delay — the idle time the target machine
/// would spend waiting for the job's predecessor — is within `delay_limit`.
///
/// If every open operation exceeds the limit, the minimum-delay ones are
/// admitted anyway; a nonempty ant always has a nonempty eligible set, so
/// construction cannot stall.
pub fn eligible_set(
    instance: &JobShopInstance,
    ant: &AntState,
    delay_limit: Time,
) -> Vec<Candidate> {
    let mut open = Vec::new();
    let mut min_delay = Time::MAX;
    for job in 0..instance.jobs() {
        let step = ant.next_step[job];
        if step >= instance.machines() {
            continue;
        }
        let op = instance.operation(job, step);
        let delay = (ant.job_ready[job] - ant.machine_ready[op.machine]).max(0);
        min_delay = min_delay.min(delay);
        open.push(Candidate {
            op: OpRef::new(job, step),
            delay,
        });
    }
    if min_delay > delay_limit {
        open.retain(|c| c.delay == min_delay);
    } else {
        open.retain(|c| c.delay <= delay_limit);
    }
    open
}

/// Heuristic desirability of an operation: `1/duration` under `Spt`,
/// `duration` under `Lpt`, shrunk by `delay_penalty_per_unit` per unit of
/// delay. Delay beyond `delay_limit` (possible only through the eligibility
/// safety valve) is penalized as if it were exactly at the limit, keeping
/// visibility positive.
pub fn visibility<S: Real>(
    duration: Time,
    rule: DecisionRule,
    delay: Time,
    delay_penalty_per_unit: S,
    delay_limit: Time,
) -> S {
    let d = S::from_i64(duration).unwrap();
    let base = match rule {
        DecisionRule::Spt => S::one() / d,
        DecisionRule::Lpt => d,
    };
    let counted = delay.min(delay_limit).max(0);
    let factor = S::one() - delay_penalty_per_unit * S::from_i64(counted).unwrap();
    base * factor
}

/// The transition distribution over candidate `(node, visibility)` pairs
/// from `from`: each candidate is weighted `trail^alpha * visibility^beta`
/// and the weights are normalized to sum to one.
pub fn transition_probabilities<S: Real>(
    field: &PheromoneField<S>,
    from: usize,
    candidates: &[(usize, S)],
    alpha: S,
    beta: S,
) -> Vec<S> {
    let weights: Vec<S> = candidates
        .iter()
        .map(|&(node, vis)| field.trail(from, node).powf(alpha) * vis.powf(beta))
        .collect();
    let total = weights
        .iter()
        .fold(S::zero(), |acc, &w| acc + w);
    debug_assert!(total > S::zero(), "positive trails and visibilities");
    weights.into_iter().map(|w| w / total).collect()
}

/// Roulette selection: spins once in `[0, 1)` and walks the cumulative
/// distribution. The final candidate absorbs whatever mass floating-point
/// summation lost, so an index in range comes back for any nonempty input.
pub fn select_next<S: Real>(probabilities: &[S], rng: &mut impl Rng) -> usize {
    debug_assert!(!probabilities.is_empty());
    let spin = S::from_f64(rng.gen::<f64>()).unwrap();
    let mut cumulative = S::zero();
    for (index, &p) in probabilities.iter().enumerate() {
        cumulative = cumulative + p;
        if spin < cumulative {
            return index;
        }
    }
    probabilities.len() - 1
}

/// Sends one ant through the instance: draws its decision rule (SPT or LPT,
/// equally likely), starts it on a uniformly chosen first operation, and
/// lets it complete a sequence via [`eligible_set`] →
/// [`transition_probabilities`] → [`select_next`]. Returns the sequence and
/// its decoded schedule — the single makespan evaluation the ant costs.
pub fn construct_solution<S: Real>(
    instance: &JobShopInstance,
    field: &PheromoneField<S>,
    params: &ColonyParams<S>,
    rng: &mut impl Rng,
) -> (OperationSequence, Schedule) {
    let rule = if rng.gen::<f64>() < 0.5 {
        DecisionRule::Spt
    } else {
        DecisionRule::Lpt
    };
    let mut ant = AntState::new(instance, rule);
    let mut order = Vec::with_capacity(instance.num_operations());

    let first = OpRef::new(rng.gen_range(0..instance.jobs()), 0);
    ant.place(instance, first);
    order.push(first);

    while !ant.is_complete(instance) {
        let candidates = eligible_set(instance, &ant, params.delay_limit);
        let weighted: Vec<(usize, S)> = candidates
            .iter()
            .map(|c| {
                let duration = instance.operation(c.op.job, c.op.step).duration;
                let vis = visibility(
                    duration,
                    ant.rule,
                    c.delay,
                    params.delay_penalty_per_unit,
                    params.delay_limit,
                );
                (node_of(instance, c.op), vis)
            })
            .collect();
        let probabilities =
            transition_probabilities(field, ant.current_node(), &weighted, params.alpha, params.beta);
        let chosen = candidates[select_next(&probabilities, rng)].op;
        ant.place(instance, chosen);
        order.push(chosen);
    }

    let sequence = OperationSequence::new(order);
    let schedule = build_schedule(instance, &sequence)
        .expect("constructed sequences respect precedence by construction");
    (sequence, schedule)
}

/// Buffers one deposit of `amount` on every edge of a sequence's path:
/// source to first operation, then each consecutive pair.
pub fn deposit_along<S: Real>(
    field: &mut PheromoneField<S>,
    instance: &JobShopInstance,
    sequence: &OperationSequence,
    amount: S,
) {
    let mut from = SOURCE;
    for &op in sequence.order() {
        let to = node_of(instance, op);
        field.deposit(from, to, amount);
        from = to;
    }
}

/// Buffers the deposits a completed cycle has earned. Every ant deposits
/// `q / L` along its path, except that under [`ElitistTarget::CycleBest`]
/// the cycle's best ant (ties broken toward the earlier ant) deposits
/// `q * elitist_weight / L` instead. Under [`ElitistTarget::GlobalBest`]
/// all ants deposit the ordinary rate and the caller adds the elitist
/// deposit along the global best path via [`deposit_along`].
pub fn accumulate_deposits<S: Real>(
    field: &mut PheromoneField<S>,
    instance: &JobShopInstance,
    solutions: &[(OperationSequence, Time)],
    params: &ColonyParams<S>,
) {
    let cycle_best = solutions
        .iter()
        .enumerate()
        .min_by_key(|(index, (_, makespan))| (*makespan, *index))
        .map(|(index, _)| index);
    for (index, (sequence, makespan)) in solutions.iter().enumerate() {
        let mut amount = params.q / S::from_i64(*makespan).unwrap();
        if params.elitist_target == ElitistTarget::CycleBest && Some(index) == cycle_best {
            amount = amount * params.elitist_weight;
        }
        deposit_along(field, instance, sequence, amount);
    }
}

/// Applies the end-of-cycle trail update: every edge keeps `rho` of its
/// trail and gains its buffered deposits, which are then cleared.
pub fn update_pheromone<S: Real>(field: &mut PheromoneField<S>, params: &ColonyParams<S>) {
    field.apply_update(params.rho);
}

/// What a colony run found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResult {
    pub best_sequence: OperationSequence,
    pub best_makespan: Time,
    /// Makespan evaluations performed: exactly `ants * cycles`.
    pub evaluations_total: u64,
    /// Evaluations consumed when the final best was first constructed.
    pub evaluations_to_best: u64,
    /// Best makespan of each cycle, in cycle order.
    pub per_cycle_best: Vec<Time>,
}

/// Runs the colony to completion: validates the parameters, seeds one
/// deterministic random stream for the whole run, and loops
/// construct → deposit → update for `params.cycles` cycles with
/// `params.ants` ants each.
pub fn run<S: Real>(
    instance: &JobShopInstance,
    params: &ColonyParams<S>,
) -> Result<BestResult, ParamError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut field = PheromoneField::for_instance(instance, params.tau0);
    let mut best: Option<(OperationSequence, Time)> = None;
    let mut evaluations_total = 0u64;
    let mut evaluations_to_best = 0u64;
    let mut per_cycle_best = Vec::with_capacity(params.cycles);

    for _ in 0..params.cycles {
        let mut solutions = Vec::with_capacity(params.ants);
        for _ in 0..params.ants {
            let (sequence, schedule) = construct_solution(instance, &field, params, &mut rng);
            evaluations_total += 1;
            let makespan = schedule.makespan();
            if best.as_ref().map_or(true, |&(_, incumbent)| makespan < incumbent) {
                best = Some((sequence.clone(), makespan));
                evaluations_to_best = evaluations_total;
            }
            solutions.push((sequence, makespan));
        }
        per_cycle_best.push(solutions.iter().map(|(_, m)| *m).min().unwrap());
        accumulate_deposits(&mut field, instance, &solutions, params);
        if params.elitist_target == ElitistTarget::GlobalBest {
            let (sequence, makespan) = best.as_ref().unwrap();
            let amount = params.q * params.elitist_weight / S::from_i64(*makespan).unwrap();
            deposit_along(&mut field, instance, sequence, amount);
        }
        update_pheromone(&mut field, params);
    }

    let (best_sequence, best_makespan) = best.unwrap();
    Ok(BestResult {
        best_sequence,
        best_makespan,
        evaluations_total,
        evaluations_to_best,
        per_cycle_best,
    })
}
