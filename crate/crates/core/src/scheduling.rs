//! Advice-based scheduling on related and unrelated machines.
//!
//! Jobs arrive online and must be assigned irrevocably; the objective
//! evaluates the final per-machine load vector. The advice schemes mirror the
//! weighted accept/reject machinery: the oracle pins the bucket of the
//! optimal objective value, the algorithm learns it from the first important
//! job, and important jobs are steered by per-type count tables describing an
//! optimal schedule of a rounded instance.

use serde::{Deserialize, Serialize};

use crate::problems::Direction;
use crate::sparsify::{bucket_of, log_s_ceil_n2, powi};
use crate::tape::AdviceTape;
use crate::{Error, Result};

/// Assignment-enumeration cap for the exhaustive optimum.
pub const SCHEDULE_ENUM_CAP: u64 = 10_000_000;
/// Advice-budget cap for the type tables (guards huge `m`).
const TABLE_BITS_CAP: u64 = 1 << 22;

/// One job on unrelated machines: its load on each machine. An infinite
/// entry marks a machine the job must not be placed on (used by rounded
/// instances); such entries are excluded from assignment enumeration and are
/// never fed to an objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub loads: Vec<f64>,
}

impl Job {
    pub fn new(loads: Vec<f64>) -> Self {
        Self { loads }
    }
}

/// Per-machine accumulated loads.
pub type LoadVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// Finite-p norm, `p >= 1`.
    P(f64),
    /// `max_j L_j` (the makespan when minimized).
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    LpNorm(Norm),
    /// `min_j L_j` (machine covering when maximized). Homogeneous and
    /// monotone, but not a norm.
    MinLoad,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub direction: Direction,
}

impl Objective {
    pub fn min_lp(norm: Norm) -> Self {
        Objective { kind: ObjectiveKind::LpNorm(norm), direction: Direction::Min }
    }

    pub fn max_min_load() -> Self {
        Objective { kind: ObjectiveKind::MinLoad, direction: Direction::Max }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ObjectiveKind::LpNorm(Norm::P(p)) => format!("l{p}_norm"),
            ObjectiveKind::LpNorm(Norm::Inf) => "linf_norm".into(),
            ObjectiveKind::MinLoad => "min_load".into(),
        }
    }
}

/// Evaluates the objective on finite loads.
pub fn evaluate(objective: &Objective, loads: &[f64]) -> f64 {
    debug_assert!(loads.iter().all(|l| l.is_finite()));
    match objective.kind {
        ObjectiveKind::LpNorm(Norm::P(p)) => {
            loads.iter().map(|l| l.powf(p)).sum::<f64>().powf(1.0 / p)
        }
        ObjectiveKind::LpNorm(Norm::Inf) => loads.iter().copied().fold(0.0, f64::max),
        ObjectiveKind::MinLoad => loads.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// `||1_j||` for the objective (norms only; independent of `j` for lp norms,
/// but computed per machine for generality).
fn unit_norm(objective: &Objective, m: usize, j: usize) -> f64 {
    let mut unit = vec![0.0; m];
    unit[j] = 1.0;
    evaluate(objective, &unit)
}

fn loads_of(jobs: &[Job], m: usize, assignment: &[usize]) -> LoadVector {
    let mut loads = vec![0.0; m];
    for (job, &machine) in jobs.iter().zip(assignment) {
        loads[machine] += job.loads[machine];
    }
    loads
}

/// Exhaustive optimum over all `m^n` assignments, skipping forbidden
/// (infinite-load) placements. Ties break toward the lexicographically
/// smallest assignment vector.
pub fn brute_force_schedule(
    jobs: &[Job],
    m: usize,
    objective: &Objective,
) -> Result<(Vec<usize>, f64)> {
    if m == 0 {
        return Err(Error::Contract("no machines".into()));
    }
    let n = jobs.len();
    if (m as u64).checked_pow(n as u32).map_or(true, |total| total > SCHEDULE_ENUM_CAP) {
        return Err(Error::Resource(format!(
            "m^n = {m}^{n} exceeds the enumeration cap {SCHEDULE_ENUM_CAP}"
        )));
    }
    for job in jobs {
        if job.loads.len() != m {
            return Err(Error::Contract("job load vector length != machine count".into()));
        }
        if job.loads.iter().all(|l| l.is_infinite()) {
            return Err(Error::Contract("job is forbidden on every machine".into()));
        }
        if job.loads.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Contract("job loads must be positive".into()));
        }
    }

    let minimize = objective.direction == Direction::Min;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut assignment = vec![0usize; n];
    let mut loads = vec![0.0f64; m];

    fn recurse(
        jobs: &[Job],
        objective: &Objective,
        minimize: bool,
        i: usize,
        assignment: &mut Vec<usize>,
        loads: &mut LoadVector,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        if i == jobs.len() {
            let value = evaluate(objective, loads);
            let better = match best {
                None => true,
                Some((_, b)) => {
                    if minimize {
                        value < *b - 1e-12 * b.abs().max(1.0)
                    } else {
                        value > *b + 1e-12 * b.abs().max(1.0)
                    }
                }
            };
            if better {
                *best = Some((assignment.clone(), value));
            }
            return;
        }
        for j in 0..loads.len() {
            let w = jobs[i].loads[j];
            if w.is_infinite() {
                continue;
            }
            assignment[i] = j;
            loads[j] += w;
            recurse(jobs, objective, minimize, i + 1, assignment, loads, best);
            loads[j] -= w;
        }
    }
    recurse(jobs, objective, minimize, 0, &mut assignment, &mut loads, &mut best);
    best.ok_or_else(|| Error::Contract("no admissible assignment".into()))
}

/// One scheduling run with its offline reference point and the invariant
/// counters the test suites check.
#[derive(Debug, Clone)]
pub struct SchedRun {
    pub assignment: Vec<usize>,
    pub value: f64,
    pub opt_assignment: Vec<usize>,
    pub opt_value: f64,
    pub bits_read: usize,
    pub ratio_bound: f64,
    pub direction: Direction,
    pub diagnostics: SchedDiagnostics,
}

#[derive(Debug, Clone, Default)]
pub struct SchedDiagnostics {
    pub important_jobs: usize,
    /// Sum over all advice count tables.
    pub counts_written: usize,
    /// Sum the tables must reach for conservation (for the phase-based
    /// scheme this excludes jobs the optimum parks on machines whose phase
    /// never opened before the job arrived).
    pub counts_expected: usize,
    /// Important jobs the algorithm had to place by the fallback rule.
    pub table_misses: usize,
    /// (actual, rounded) load pairs violating `w < w_rounded <= s·w`.
    pub sandwich_violations: usize,
}

impl SchedRun {
    pub fn ratio(&self) -> f64 {
        let (num, den) = match self.direction {
            Direction::Min => (self.value, self.opt_value),
            Direction::Max => (self.opt_value, self.value),
        };
        if num == 0.0 && den == 0.0 {
            1.0
        } else if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    }

    pub fn alpha(&self) -> f64 {
        let v = match self.direction {
            Direction::Min => self.value - self.ratio_bound * self.opt_value,
            Direction::Max => self.opt_value - self.ratio_bound * self.value,
        };
        v.max(0.0)
    }
}

fn width_for(count: usize) -> usize {
    // ceil(log2(count + 1)), the fixed width for indices/counts in 0..=count.
    (usize::BITS - count.leading_zeros()) as usize
}

fn require_norm_min(objective: &Objective, what: &str) -> Result<()> {
    match (objective.kind, objective.direction) {
        (ObjectiveKind::LpNorm(_), Direction::Min) => Ok(()),
        _ => Err(Error::Contract(format!(
            "{what} requires minimizing a nondecreasing norm"
        ))),
    }
}

/// Sandwich check `w < w_hat <= s*w` with the float guard band.
fn sandwich_ok(w: f64, w_hat: f64, s: f64) -> bool {
    w < w_hat * (1.0 + 1e-9) && w_hat <= s * w * (1.0 + 1e-9)
}

// ---------------------------------------------------------------------------
// Unrelated machines, minimize a norm.
// ---------------------------------------------------------------------------

/// Type vector of an important job: per machine, the bucket offset below the
/// optimum's bucket (`0..=threshold`), or `Bot` when the job's load on that
/// machine already exceeds the whole optimal objective value.
fn unrelated_type(job: &Job, unit_norms: &[f64], k: i64, threshold: i64, s: f64) -> Vec<i64> {
    job.loads
        .iter()
        .zip(unit_norms)
        .map(|(&w, &u)| {
            let b = bucket_of(w * u, s);
            if b <= k {
                debug_assert!(k - b <= threshold, "typed an unimportant load");
                (k - b).min(threshold)
            } else {
                threshold + 1 // Bot
            }
        })
        .collect()
}

/// Lexicographic rank of a type vector with component range `0..=bot`.
fn type_rank(t: &[i64], bot: i64) -> usize {
    let base = (bot + 1) as usize;
    t.iter().fold(0usize, |acc, &v| acc * base + v as usize)
}

fn type_from_rank(mut rank: usize, m: usize, bot: i64) -> Vec<i64> {
    let base = (bot + 1) as usize;
    let mut t = vec![0i64; m];
    for slot in t.iter_mut().rev() {
        *slot = (rank % base) as i64;
        rank /= base;
    }
    t
}

/// Near-optimal scheduling on unrelated machines minimizing a norm.
///
/// Advice: `n` self-delimited; short inputs get the optimal assignment
/// verbatim. Otherwise the index of the first important job (fixed width,
/// 0 = none), its bucket offset, and one count per possible type vector. The
/// algorithm sends unimportant jobs to the machine minimizing the job's
/// single-machine norm and steers important jobs by an optimal schedule of
/// the rounded instance reconstructed from the counts.
pub fn thm9_run(
    jobs: &[Job],
    m: usize,
    objective: &Objective,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<SchedRun> {
    require_norm_min(objective, "unrelated-machines scheduling")?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let n = jobs.len();
    if n == 0 {
        return Err(Error::Contract("empty job sequence".into()));
    }
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let bot = threshold + 1;
    let cw = width_for(n);
    let mw = width_for(m - 1);
    let type_count = (bot as u64 + 1).checked_pow(m as u32).unwrap_or(u64::MAX);
    if type_count.saturating_mul(cw as u64) > TABLE_BITS_CAP {
        return Err(Error::Resource(format!(
            "type table of {type_count} cells exceeds the advice cap"
        )));
    }

    let (opt_assignment, opt_value) = brute_force_schedule(jobs, m, objective)?;
    let unit_norms: Vec<f64> = (0..m).map(|j| unit_norm(objective, m, j)).collect();
    let mut diagnostics = SchedDiagnostics::default();

    tape.write_self_delimited(n as u64)?;
    let small_n = (n as f64) < 2.0 / epsilon;
    if small_n {
        for &a in &opt_assignment {
            if mw > 0 {
                tape.write_uint_fixed(a as u64, mw)?;
            }
        }
    } else {
        let k = bucket_of(opt_value, s);
        let cutoff = powi(s, k - threshold);
        let is_unimportant =
            |job: &Job| job.loads.iter().zip(&unit_norms).any(|(&w, &u)| w * u < cutoff);
        let first_important = jobs.iter().position(|j| !is_unimportant(j));
        match first_important {
            None => tape.write_uint_fixed(0, cw)?,
            Some(i1) => {
                tape.write_uint_fixed(i1 as u64 + 1, cw)?;
                let min_unit = jobs[i1]
                    .loads
                    .iter()
                    .zip(&unit_norms)
                    .map(|(&w, &u)| w * u)
                    .fold(f64::INFINITY, f64::min);
                let delta_first = (k - bucket_of(min_unit, s)).clamp(0, threshold);
                tape.write_self_delimited(delta_first as u64 + 1)?;

                // Count every important job per type; also assert the optimum
                // never uses a Bot machine for one (its load there would
                // exceed the optimal objective value).
                let mut counts = vec![0u64; type_count as usize];
                for (i, job) in jobs.iter().enumerate() {
                    if is_unimportant(job) {
                        continue;
                    }
                    diagnostics.important_jobs += 1;
                    let t = unrelated_type(job, &unit_norms, k, threshold, s);
                    if t[opt_assignment[i]] == bot {
                        return Err(Error::Contract(
                            "optimal schedule places an important job on a machine where its \
                             load exceeds the optimum"
                                .into(),
                        ));
                    }
                    counts[type_rank(&t, bot)] += 1;

                    for (j, &w) in job.loads.iter().enumerate() {
                        if t[j] != bot {
                            let w_hat = powi(s, k - t[j] + 1) / unit_norms[j];
                            if !sandwich_ok(w, w_hat, s) {
                                diagnostics.sandwich_violations += 1;
                            }
                        }
                    }
                }
                for &c in &counts {
                    tape.write_uint_fixed(c, cw)?;
                    diagnostics.counts_written += c as usize;
                }
                diagnostics.counts_expected = diagnostics.important_jobs;
            }
        }
    }

    let assignment = thm9_algorithm(jobs, m, objective, epsilon, tape, &mut diagnostics)?;
    let value = evaluate(objective, &loads_of(jobs, m, &assignment));
    Ok(SchedRun {
        assignment,
        value,
        opt_assignment,
        opt_value,
        bits_read: tape.bits_read(),
        ratio_bound: 1.0 + epsilon,
        direction: Direction::Min,
        diagnostics,
    })
}

/// Online half of [`thm9_run`].
pub fn thm9_algorithm(
    jobs: &[Job],
    m: usize,
    objective: &Objective,
    epsilon: f64,
    tape: &mut AdviceTape,
    diagnostics: &mut SchedDiagnostics,
) -> Result<Vec<usize>> {
    let n = jobs.len();
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let bot = threshold + 1;
    let cw = width_for(n);
    let mw = width_for(m - 1);
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);
    let unit_norms: Vec<f64> = (0..m).map(|j| unit_norm(objective, m, j)).collect();
    let min_norm_machine = |job: &Job| -> usize {
        let mut best = 0usize;
        let mut best_v = f64::INFINITY;
        for (j, (&w, &u)) in job.loads.iter().zip(&unit_norms).enumerate() {
            let v = w * u;
            if v < best_v {
                best_v = v;
                best = j;
            }
        }
        best
    };

    if (n as f64) < 2.0 / epsilon {
        return Ok((0..n)
            .map(|_| (tape.read_uint_fixed(mw) as usize).min(m - 1))
            .collect());
    }

    let first = tape.read_uint_fixed(cw) as usize;
    if first == 0 || first > n {
        return Ok(jobs.iter().map(min_norm_machine).collect());
    }
    let first_important = first - 1;
    let delta_first = tape.read_self_delimited()?.saturating_sub(1) as i64;
    let type_count = (bot as usize + 1).pow(m as u32);
    let counts: Vec<u64> = (0..type_count).map(|_| tape.read_uint_fixed(cw)).collect();

    // Reference bucket from the first important job's weight.
    let min_unit = jobs[first_important]
        .loads
        .iter()
        .zip(&unit_norms)
        .map(|(&w, &u)| w * u)
        .fold(f64::INFINITY, f64::min);
    let k = bucket_of(min_unit, s) + delta_first;
    let cutoff = powi(s, k - threshold);

    // Optimal schedule of the rounded instance, then per-(type, machine)
    // quotas consumed in increasing machine order.
    let mut rounded: Vec<Job> = Vec::new();
    let mut rounded_types: Vec<usize> = Vec::new();
    for (rank, &count) in counts.iter().enumerate() {
        let t = type_from_rank(rank, m, bot);
        let loads: Vec<f64> = (0..m)
            .map(|j| {
                if t[j] == bot {
                    f64::INFINITY
                } else {
                    powi(s, k - t[j] + 1) / unit_norms[j]
                }
            })
            .collect();
        for _ in 0..count.min(n as u64) {
            rounded.push(Job::new(loads.clone()));
            rounded_types.push(rank);
        }
    }
    let mut quota = vec![vec![0u64; m]; type_count];
    if !rounded.is_empty() {
        let (rounded_assignment, _) = brute_force_schedule(&rounded, m, objective)?;
        for (idx, &machine) in rounded_assignment.iter().enumerate() {
            quota[rounded_types[idx]][machine] += 1;
        }
    }

    let mut assignment = Vec::with_capacity(n);
    for (i, job) in jobs.iter().enumerate() {
        let unimportant = i < first_important
            || job.loads.iter().zip(&unit_norms).any(|(&w, &u)| w * u < cutoff);
        if unimportant {
            assignment.push(min_norm_machine(job));
            continue;
        }
        let t = unrelated_type(job, &unit_norms, k, threshold, s);
        let rank = type_rank(&t, bot);
        let slot = (0..m).find(|&j| quota[rank][j] > 0);
        match slot {
            Some(j) => {
                quota[rank][j] -= 1;
                assignment.push(j);
            }
            None => {
                diagnostics.table_misses += 1;
                assignment.push(min_norm_machine(job));
            }
        }
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------------
// Related machines, minimize a norm.
// ---------------------------------------------------------------------------

/// Jobs on related machines: scalar sizes; the load on machine `j` is
/// `size / speeds[j]`.
pub fn related_jobs(sizes: &[f64], speeds: &[f64]) -> Result<Vec<Job>> {
    if speeds.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::Contract("machine speeds must be positive".into()));
    }
    Ok(sizes
        .iter()
        .map(|&w| Job::new(speeds.iter().map(|&c| w / c).collect()))
        .collect())
}

/// The machine minimizing `||1_j|| / C_j` and that minimum value; all
/// unimportant related-machine jobs pile up there. Lowest index wins ties.
pub fn anchor_machine(speeds: &[f64], objective: &Objective) -> Result<(usize, f64)> {
    if speeds.is_empty() {
        return Err(Error::Contract("no machines".into()));
    }
    if speeds.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::Contract("machine speeds must be positive".into()));
    }
    let m = speeds.len();
    Ok((0..m)
        .map(|j| (j, unit_norm(objective, m, j) / speeds[j]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one machine"))
}

/// Near-optimal scheduling on related machines minimizing a norm; the type of
/// an important job is a single scalar offset, so the advice is quadratic in
/// `log n` regardless of the machine count.
pub fn thm10_run(
    sizes: &[f64],
    speeds: &[f64],
    objective: &Objective,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<SchedRun> {
    require_norm_min(objective, "related-machines scheduling")?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if sizes.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Contract("job sizes must be positive".into()));
    }
    let n = sizes.len();
    if n == 0 {
        return Err(Error::Contract("empty job sequence".into()));
    }
    let m = speeds.len();
    let jobs = related_jobs(sizes, speeds)?;
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let cw = width_for(n);
    let mw = width_for(m - 1);

    let (opt_assignment, opt_value) = brute_force_schedule(&jobs, m, objective)?;
    let (anchor, b_factor) = anchor_machine(speeds, objective)?;
    let mut diagnostics = SchedDiagnostics::default();

    tape.write_self_delimited(n as u64)?;
    let small_n = (n as f64) < 2.0 / epsilon;
    if small_n {
        for &a in &opt_assignment {
            if mw > 0 {
                tape.write_uint_fixed(a as u64, mw)?;
            }
        }
    } else {
        let k = bucket_of(opt_value, s);
        let cutoff = powi(s, k - threshold);
        let first_important = sizes.iter().position(|&w| w * b_factor >= cutoff);
        match first_important {
            None => tape.write_uint_fixed(0, cw)?,
            Some(i1) => {
                tape.write_uint_fixed(i1 as u64 + 1, cw)?;
                let k_first = (k - bucket_of(sizes[i1] * b_factor, s)).clamp(0, threshold);
                tape.write_self_delimited(k_first as u64 + 1)?;

                let mut counts = vec![0u64; threshold as usize + 1];
                for &w in sizes {
                    if w * b_factor < cutoff {
                        continue;
                    }
                    diagnostics.important_jobs += 1;
                    // The anchored size of any job is bounded by the optimal
                    // objective value, so its offset never exceeds the window.
                    let t = (k - bucket_of(w * b_factor, s)).clamp(0, threshold);
                    counts[t as usize] += 1;
                    let w_hat = powi(s, k - t + 1) / b_factor;
                    if !sandwich_ok(w, w_hat, s) {
                        diagnostics.sandwich_violations += 1;
                    }
                }
                for &c in &counts {
                    tape.write_uint_fixed(c, cw)?;
                    diagnostics.counts_written += c as usize;
                }
                diagnostics.counts_expected = diagnostics.important_jobs;
            }
        }
    }

    let assignment =
        thm10_algorithm(sizes, speeds, objective, epsilon, anchor, b_factor, tape, &mut diagnostics)?;
    let value = evaluate(objective, &loads_of(&jobs, m, &assignment));
    Ok(SchedRun {
        assignment,
        value,
        opt_assignment,
        opt_value,
        bits_read: tape.bits_read(),
        ratio_bound: 1.0 + epsilon,
        direction: Direction::Min,
        diagnostics,
    })
}

/// Online half of [`thm10_run`]. `anchor` and `b_factor` are derivable from
/// the speeds alone, so they carry no advice.
#[allow(clippy::too_many_arguments)]
pub fn thm10_algorithm(
    sizes: &[f64],
    speeds: &[f64],
    objective: &Objective,
    epsilon: f64,
    anchor: usize,
    b_factor: f64,
    tape: &mut AdviceTape,
    diagnostics: &mut SchedDiagnostics,
) -> Result<Vec<usize>> {
    let n = sizes.len();
    let m = speeds.len();
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let cw = width_for(n);
    let mw = width_for(m - 1);
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);

    if (n as f64) < 2.0 / epsilon {
        return Ok((0..n)
            .map(|_| (tape.read_uint_fixed(mw) as usize).min(m - 1))
            .collect());
    }

    let first = tape.read_uint_fixed(cw) as usize;
    if first == 0 || first > n {
        return Ok(vec![anchor; n]);
    }
    let first_important = first - 1;
    let k_first = tape.read_self_delimited()?.saturating_sub(1) as i64;
    let counts: Vec<u64> = (0..=threshold).map(|_| tape.read_uint_fixed(cw)).collect();

    let k = bucket_of(sizes[first_important] * b_factor, s) + k_first;
    let cutoff = powi(s, k - threshold);

    let mut rounded: Vec<Job> = Vec::new();
    let mut rounded_types: Vec<usize> = Vec::new();
    for (t, &count) in counts.iter().enumerate() {
        let size_hat = powi(s, k - t as i64 + 1) / b_factor;
        for _ in 0..count.min(n as u64) {
            rounded.push(Job::new(speeds.iter().map(|&c| size_hat / c).collect()));
            rounded_types.push(t);
        }
    }
    let mut quota = vec![vec![0u64; m]; threshold as usize + 1];
    if !rounded.is_empty() {
        let (rounded_assignment, _) = brute_force_schedule(&rounded, m, objective)?;
        for (idx, &machine) in rounded_assignment.iter().enumerate() {
            quota[rounded_types[idx]][machine] += 1;
        }
    }

    let mut assignment = Vec::with_capacity(n);
    for (i, &w) in sizes.iter().enumerate() {
        if i < first_important || w * b_factor < cutoff {
            assignment.push(anchor);
            continue;
        }
        let t = (k - bucket_of(w * b_factor, s)).clamp(0, threshold) as usize;
        match (0..m).find(|&j| quota[t][j] > 0) {
            Some(j) => {
                quota[t][j] -= 1;
                assignment.push(j);
            }
            None => {
                diagnostics.table_misses += 1;
                assignment.push(anchor);
            }
        }
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------------
// Unrelated machines, maximize a homogeneous monotone objective.
// ---------------------------------------------------------------------------

fn check_max_objective(objective: &Objective, m: usize) -> Result<()> {
    if objective.direction != Direction::Max {
        return Err(Error::Contract("phase scheduling maximizes its objective".into()));
    }
    // Spot-check monotonicity and f(alpha L) <= alpha f(L) on a few vectors.
    let probes: Vec<Vec<f64>> = vec![
        (0..m).map(|j| (j + 1) as f64).collect(),
        vec![1.0; m],
        (0..m).map(|j| 1.0 + 0.5 * j as f64).collect(),
    ];
    for l in &probes {
        let f = evaluate(objective, l);
        for alpha in [0.0, 0.5, 2.0, 3.5] {
            let scaled: Vec<f64> = l.iter().map(|x| alpha * x).collect();
            if evaluate(objective, &scaled) > alpha * f + 1e-9 {
                return Err(Error::Contract(
                    "objective violates f(alpha L) <= alpha f(L)".into(),
                ));
            }
        }
        let bumped: Vec<f64> = l.iter().map(|x| x + 1.0).collect();
        if evaluate(objective, &bumped) + 1e-9 < f {
            return Err(Error::Contract("objective is not nondecreasing".into()));
        }
    }
    Ok(())
}

/// Phase-based scheduling on unrelated machines maximizing a nondecreasing
/// objective with `f(aL) <= a·f(L)`.
///
/// Machines are renumbered by the arrival of their first important job and
/// the run proceeds in phases: phase `p` opens when machine `p`'s first
/// important job arrives, and within it the oracle's count tables replicate
/// how the optimum distributes each job type over the opened machines.
/// Unimportant jobs (and the rare important job the optimum parks on a
/// not-yet-opened machine) go to machine 0; for a maximization objective any
/// such placement only adds load.
pub fn thm11_run(
    jobs: &[Job],
    m: usize,
    objective: &Objective,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<SchedRun> {
    check_max_objective(objective, m)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let n = jobs.len();
    if n == 0 {
        return Err(Error::Contract("empty job sequence".into()));
    }
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let bot = threshold + 1;
    let cw = width_for(n);
    let mw = width_for(m - 1);
    let table_bits: u64 = (1..=m as u32)
        .map(|p| (bot as u64 + 1).saturating_pow(p) * p as u64 * cw as u64)
        .sum();
    if table_bits > TABLE_BITS_CAP {
        return Err(Error::Resource("phase tables exceed the advice cap".into()));
    }

    let (opt_assignment, opt_value) = brute_force_schedule(jobs, m, objective)?;
    let opt_loads = loads_of(jobs, m, &opt_assignment);
    let mut diagnostics = SchedDiagnostics::default();

    tape.write_self_delimited(n as u64)?;
    let small_n = (n as f64) < 2.0 + 2.0 / epsilon;
    if small_n {
        for &a in &opt_assignment {
            if mw > 0 {
                tape.write_uint_fixed(a as u64, mw)?;
            }
        }
        let assignment = thm11_algorithm(jobs, m, epsilon, tape, &mut diagnostics)?;
        let value = evaluate(objective, &loads_of(jobs, m, &assignment));
        return Ok(SchedRun {
            assignment,
            value,
            opt_assignment,
            opt_value,
            bits_read: tape.bits_read(),
            ratio_bound: 1.0 + epsilon,
            direction: Direction::Max,
            diagnostics,
        });
    }

    // Per-machine optimal-load buckets; empty machines never matter.
    let k_of: Vec<Option<i64>> =
        opt_loads.iter().map(|&l| (l > 0.0).then(|| bucket_of(l, s))).collect();
    let important_to = |job: &Job, j: usize| -> bool {
        match k_of[j] {
            None => false,
            Some(kj) => {
                let w = job.loads[j];
                w >= powi(s, kj - threshold) && w < powi(s, kj + 1)
            }
        }
    };
    // First arrival of an important job per machine; machines that never see
    // one go last and their phase never opens.
    let first_imp: Vec<Option<usize>> = (0..m)
        .map(|j| jobs.iter().position(|job| important_to(job, j)))
        .collect();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.sort_by_key(|&j| (first_imp[j].unwrap_or(usize::MAX), j));
    for &j in &perm {
        tape.write_uint_fixed(j as u64, mw.max(1))?;
    }
    let opened = perm.iter().take_while(|&&j| first_imp[j].is_some()).count();
    for p in 0..m {
        let j = perm[p];
        match first_imp[j] {
            None => tape.write_uint_fixed(0, cw)?,
            Some(i1) => {
                tape.write_uint_fixed(i1 as u64 + 1, cw)?;
                let delta = (k_of[j].expect("opened machine has load")
                    - bucket_of(jobs[i1].loads[j], s))
                .clamp(0, threshold);
                tape.write_self_delimited(delta as u64 + 1)?;
            }
        }
    }

    // Phase membership: the largest p with opener(p) <= i.
    let openers: Vec<usize> = (0..opened).map(|p| first_imp[perm[p]].unwrap()).collect();
    let phase_of = |i: usize| openers.iter().take_while(|&&o| o <= i).count();
    // Machine -> renumbered position.
    let mut pos_of = vec![usize::MAX; m];
    for (p, &j) in perm.iter().enumerate() {
        pos_of[j] = p;
    }

    let job_type = |job: &Job, p: usize| -> Vec<i64> {
        (0..p)
            .map(|q| {
                let j = perm[q];
                if important_to(job, j) {
                    k_of[j].unwrap() - bucket_of(job.loads[j], s)
                } else {
                    bot
                }
            })
            .collect()
    };

    // Per phase p: counts indexed by (type rank over p components, machine
    // position < p) for important jobs the optimum places on opened machines.
    for p in 1..=opened {
        let cells = (bot as usize + 1).pow(p as u32) * p;
        let mut counts = vec![0u64; cells];
        for (i, job) in jobs.iter().enumerate() {
            if phase_of(i) != p {
                continue;
            }
            let t = job_type(job, p);
            if t.iter().all(|&v| v == bot) {
                continue; // unimportant
            }
            diagnostics.important_jobs += 1;
            let opt_pos = pos_of[opt_assignment[i]];
            if opt_pos < p {
                counts[type_rank(&t, bot) * p + opt_pos] += 1;
                diagnostics.counts_expected += 1;
            }
            for (q, &v) in t.iter().enumerate() {
                if v != bot {
                    let j = perm[q];
                    let w_hat = powi(s, k_of[j].unwrap() - v + 1);
                    if !sandwich_ok(job.loads[j], w_hat, s) {
                        diagnostics.sandwich_violations += 1;
                    }
                }
            }
        }
        for &c in &counts {
            tape.write_uint_fixed(c, cw)?;
            diagnostics.counts_written += c as usize;
        }
    }
    let assignment = thm11_algorithm(jobs, m, epsilon, tape, &mut diagnostics)?;
    let value = evaluate(objective, &loads_of(jobs, m, &assignment));
    Ok(SchedRun {
        assignment,
        value,
        opt_assignment,
        opt_value,
        bits_read: tape.bits_read(),
        ratio_bound: 1.0 + epsilon,
        direction: Direction::Max,
        diagnostics,
    })
}

/// Online half of [`thm11_run`]. Needs only the weights as they arrive plus
/// the tape; every bucket reference is reconstructed from opener jobs.
pub fn thm11_algorithm(
    jobs: &[Job],
    m: usize,
    epsilon: f64,
    tape: &mut AdviceTape,
    diagnostics: &mut SchedDiagnostics,
) -> Result<Vec<usize>> {
    let n = jobs.len();
    let s = 1.0 + epsilon / 2.0;
    let threshold = log_s_ceil_n2(s, n);
    let bot = threshold + 1;
    let cw = width_for(n);
    let mw = width_for(m - 1);
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);

    if (n as f64) < 2.0 + 2.0 / epsilon {
        return Ok((0..n)
            .map(|_| (tape.read_uint_fixed(mw) as usize).min(m - 1))
            .collect());
    }

    let perm: Vec<usize> = (0..m)
        .map(|_| (tape.read_uint_fixed(mw.max(1)) as usize).min(m - 1))
        .collect();
    let mut openers: Vec<Option<(usize, i64)>> = Vec::with_capacity(m);
    for _ in 0..m {
        let idx = tape.read_uint_fixed(cw) as usize;
        if idx == 0 || idx > n {
            openers.push(None);
        } else {
            let delta = tape.read_self_delimited()?.saturating_sub(1) as i64;
            openers.push(Some((idx - 1, delta)));
        }
    }
    let opened = openers.iter().take_while(|o| o.is_some()).count();

    // k per renumbered machine, derived from its opener when it arrives; all
    // openers are known indices so the whole map is available upfront.
    let k_pos: Vec<Option<i64>> = (0..m)
        .map(|p| {
            openers[p].map(|(i, delta)| bucket_of(jobs[i].loads[perm[p]], s) + delta)
        })
        .collect();

    // Phase tables, read in opening order.
    let mut tables: Vec<Vec<u64>> = Vec::with_capacity(opened);
    for p in 1..=opened {
        let cells = (bot as usize + 1).pow(p as u32) * p;
        tables.push((0..cells).map(|_| tape.read_uint_fixed(cw)).collect());
    }

    let opener_indices: Vec<usize> = (0..opened).map(|p| openers[p].unwrap().0).collect();
    let mut assignment = Vec::with_capacity(n);
    for (i, job) in jobs.iter().enumerate() {
        let p = opener_indices.iter().take_while(|&&o| o <= i).count();
        if p == 0 {
            assignment.push(0);
            continue;
        }
        let t: Vec<i64> = (0..p)
            .map(|q| {
                let kq = k_pos[q].expect("opened machine has a bucket");
                let w = job.loads[perm[q]];
                if w >= powi(s, kq - threshold) && w < powi(s, kq + 1) {
                    kq - bucket_of(w, s)
                } else {
                    bot
                }
            })
            .collect();
        if t.iter().all(|&v| v == bot) {
            assignment.push(0);
            continue;
        }
        let base = type_rank(&t, bot) * p;
        let table = &mut tables[p - 1];
        match (0..p).find(|&q| table[base + q] > 0) {
            Some(q) => {
                table[base + q] -= 1;
                assignment.push(perm[q]);
            }
            None => {
                diagnostics.table_misses += 1;
                assignment.push(0);
            }
        }
    }
    Ok(assignment)
}

// ---------------------------------------------------------------------------
// Instance documents.
// ---------------------------------------------------------------------------

/// On-disk scheduling instance: jobs are either per-machine load vectors
/// (unrelated) or scalar sizes (related; requires `speeds`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchedInstance {
    pub machines: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speeds: Option<Vec<f64>>,
    pub jobs: Vec<JobSpec>,
    pub objective: ObjectiveDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JobSpec {
    Size(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<serde_json::Value>,
    pub direction: String,
}

impl SchedInstance {
    pub fn objective(&self) -> Result<Objective> {
        let direction = match self.direction_str() {
            "min" => Direction::Min,
            "max" => Direction::Max,
            other => return Err(Error::Contract(format!("bad direction {other:?}"))),
        };
        let kind = match self.objective.kind.as_str() {
            "lp" => {
                let norm = match &self.objective.p {
                    Some(serde_json::Value::String(s)) if s == "inf" => Norm::Inf,
                    Some(serde_json::Value::Number(v)) => {
                        let p = v.as_f64().unwrap_or(f64::NAN);
                        if !(p >= 1.0) {
                            return Err(Error::Contract(format!("lp norm needs p >= 1, got {p}")));
                        }
                        Norm::P(p)
                    }
                    _ => return Err(Error::Contract("lp objective needs p".into())),
                };
                ObjectiveKind::LpNorm(norm)
            }
            "minload" => ObjectiveKind::MinLoad,
            other => return Err(Error::Contract(format!("bad objective kind {other:?}"))),
        };
        Ok(Objective { kind, direction })
    }

    fn direction_str(&self) -> &str {
        self.objective.direction.as_str()
    }

    /// Expands to unrelated-machine load vectors.
    pub fn unrelated_jobs(&self) -> Result<Vec<Job>> {
        self.jobs
            .iter()
            .map(|spec| match spec {
                JobSpec::Vector(v) => {
                    if v.len() != self.machines {
                        return Err(Error::Contract("job vector length != machines".into()));
                    }
                    Ok(Job::new(v.clone()))
                }
                JobSpec::Size(w) => {
                    let speeds = self
                        .speeds
                        .as_ref()
                        .ok_or_else(|| Error::Contract("scalar jobs need speeds".into()))?;
                    Ok(Job::new(speeds.iter().map(|&c| w / c).collect()))
                }
            })
            .collect()
    }

    /// Scalar sizes, for the related-machines scheme.
    pub fn sizes(&self) -> Result<Vec<f64>> {
        self.jobs
            .iter()
            .map(|spec| match spec {
                JobSpec::Size(w) => Ok(*w),
                JobSpec::Vector(_) => {
                    Err(Error::Contract("related-machines scheme needs scalar jobs".into()))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let linf = Objective::min_lp(Norm::Inf);
        assert_eq!(evaluate(&linf, &[1.0, 1.0]), 1.0);
        let l2 = Objective::min_lp(Norm::P(2.0));
        assert!((evaluate(&l2, &[3.0, 4.0]) - 5.0).abs() < 1e-12);
        let ml = Objective::max_min_load();
        assert_eq!(evaluate(&ml, &[2.0, 7.0]), 2.0);
    }

    #[test]
    fn brute_force_small_cases() {
        let jobs = vec![Job::new(vec![1.0, 2.0]), Job::new(vec![2.0, 1.0])];
        let (assign, value) = brute_force_schedule(&jobs, 2, &Objective::min_lp(Norm::Inf)).unwrap();
        assert_eq!(assign, vec![0, 1]);
        assert_eq!(value, 1.0);

        // One unit job, two machines: one machine stays empty.
        let jobs = vec![Job::new(vec![1.0, 1.0])];
        let (_, value) = brute_force_schedule(&jobs, 2, &Objective::max_min_load()).unwrap();
        assert_eq!(value, 0.0);

        // Eight unit jobs on three identical machines: makespan 3.
        let jobs: Vec<Job> = (0..8).map(|_| Job::new(vec![1.0; 3])).collect();
        let (_, value) = brute_force_schedule(&jobs, 3, &Objective::min_lp(Norm::Inf)).unwrap();
        assert_eq!(value, 3.0);
    }

    #[test]
    fn thm9_two_jobs_verbatim_boundary() {
        let jobs = vec![Job::new(vec![1.0, 2.0]), Job::new(vec![2.0, 1.0])];
        let mut tape = AdviceTape::new();
        let run = thm9_run(&jobs, 2, &Objective::min_lp(Norm::Inf), 1.0, &mut tape).unwrap();
        assert_eq!(run.value, 1.0);
        assert_eq!(run.opt_value, 1.0);
    }

    #[test]
    fn thm9_identical_jobs_single_type() {
        let n = 9;
        let jobs: Vec<Job> = (0..n).map(|_| Job::new(vec![1.0, 1.0])).collect();
        let mut tape = AdviceTape::new();
        let run = thm9_run(&jobs, 2, &Objective::min_lp(Norm::Inf), 1.0, &mut tape).unwrap();
        // One job type: the rounded optimum mirrors the real one scaled by at
        // most s, so the full (s + 1/n) bound applies directly.
        let tight = 1.5 + 1.0 / n as f64;
        assert!(run.ratio() <= tight + 1e-9, "ratio {}", run.ratio());
        assert_eq!(run.diagnostics.sandwich_violations, 0);
        assert_eq!(run.diagnostics.counts_written, run.diagnostics.counts_expected);
        assert_eq!(run.diagnostics.table_misses, 0);
    }

    #[test]
    fn thm10_speed_anchor() {
        // Speeds (2, 1): the anchor is the fast machine and B = 1/2.
        let sizes = vec![4.0, 2.0, 1.0, 1.0, 2.0, 4.0, 8.0, 1.0];
        let speeds = vec![2.0, 1.0];
        let mut tape = AdviceTape::new();
        let run = thm10_run(&sizes, &speeds, &Objective::min_lp(Norm::Inf), 1.0, &mut tape).unwrap();
        assert!(run.ratio() <= run.ratio_bound + 1e-9, "ratio {}", run.ratio());
        assert_eq!(run.diagnostics.sandwich_violations, 0);
    }

    #[test]
    fn thm10_single_job_verbatim() {
        let mut tape = AdviceTape::new();
        let run = thm10_run(&[3.0], &[1.0, 1.0], &Objective::min_lp(Norm::P(2.0)), 1.0, &mut tape)
            .unwrap();
        assert_eq!(run.value, run.opt_value);
    }

    #[test]
    fn thm10_identical_speeds_and_jobs() {
        let run = {
            let mut tape = AdviceTape::new();
            thm10_run(&[1.0; 8], &[1.0, 1.0], &Objective::min_lp(Norm::P(2.0)), 1.0, &mut tape)
                .unwrap()
        };
        assert!(run.ratio() <= 2.0 + 1e-9, "ratio {}", run.ratio());
        assert_eq!(run.diagnostics.table_misses, 0);
    }

    #[test]
    fn anchor_machine_prefers_fast_machines() {
        // Speeds (2, 1) under any lp norm: ||1_j|| = 1, so the anchor is the
        // fast machine with factor 1/2.
        let (j, b) = anchor_machine(&[2.0, 1.0], &Objective::min_lp(Norm::Inf)).unwrap();
        assert_eq!((j, b), (0, 0.5));
        let (j, b) = anchor_machine(&[1.0, 4.0, 2.0], &Objective::min_lp(Norm::P(2.0))).unwrap();
        assert_eq!((j, b), (1, 0.25));
        assert!(anchor_machine(&[1.0, -1.0], &Objective::min_lp(Norm::Inf)).is_err());
    }

    #[test]
    fn thm11_four_unit_jobs() {
        let jobs: Vec<Job> = (0..4).map(|_| Job::new(vec![1.0, 1.0])).collect();
        let mut tape = AdviceTape::new();
        let run = thm11_run(&jobs, 2, &Objective::max_min_load(), 1.0, &mut tape).unwrap();
        assert_eq!(run.opt_value, 2.0);
        assert!(run.value >= run.opt_value / 2.0 - 1e-9);
    }

    #[test]
    fn thm11_fewer_jobs_than_machines() {
        let jobs = vec![Job::new(vec![1.0, 1.0, 1.0])];
        let mut tape = AdviceTape::new();
        let run = thm11_run(&jobs, 3, &Objective::max_min_load(), 1.0, &mut tape).unwrap();
        assert_eq!(run.opt_value, 0.0);
        assert_eq!(run.ratio(), 1.0);
    }

    #[test]
    fn objective_contract_checks() {
        let jobs = vec![Job::new(vec![1.0, 1.0])];
        let mut tape = AdviceTape::new();
        assert!(thm9_run(&jobs, 2, &Objective::max_min_load(), 1.0, &mut tape).is_err());
        let mut tape = AdviceTape::new();
        assert!(thm11_run(&jobs, 2, &Objective::min_lp(Norm::Inf), 1.0, &mut tape).is_err());
    }

    #[test]
    fn sched_instance_json() {
        let doc = r#"{
            "machines": 2,
            "jobs": [[1.0, 2.0], [2.0, 1.0]],
            "objective": {"kind": "lp", "p": "inf", "direction": "min"}
        }"#;
        let inst: SchedInstance = serde_json::from_str(doc).unwrap();
        let jobs = inst.unrelated_jobs().unwrap();
        assert_eq!(jobs.len(), 2);
        assert_eq!(inst.objective().unwrap(), Objective::min_lp(Norm::Inf));

        let doc = r#"{
            "machines": 2,
            "speeds": [2.0, 1.0],
            "jobs": [4.0, 2.0],
            "objective": {"kind": "lp", "p": 2, "direction": "min"}
        }"#;
        let inst: SchedInstance = serde_json::from_str(doc).unwrap();
        assert_eq!(inst.sizes().unwrap(), vec![4.0, 2.0]);
        let jobs = inst.unrelated_jobs().unwrap();
        assert_eq!(jobs[0].loads, vec![2.0, 4.0]);
    }
}
