//! Experiment harness: seeded instance generators, the per-run report with
//! ratio and advice accounting, and concurrent batch execution.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::adversary::thm8_sample;
use crate::covering::{b_bound, cached_family, cost, ratio_f64, run_unweighted_aoc, Cost};
use crate::problems::{brute_force_opt, Instance, Problem};
use crate::rng::{trial_seed, SplitMix64};
use crate::scheduling::{
    thm10_run, thm11_run, thm9_run, Job, Norm, Objective, SchedRun,
};
use crate::tape::AdviceTape;
use crate::weighted::{thm4_run, thm5_run, thm6_run, AdviceRun, GreedyMatching};
use crate::{Error, Result};

/// Pinned budget-shape constants for the advice-bound column: sparsification
/// runs must fit `ceil(B(n,c)) + K1_SPARSIFY/eps * log2(n)^2 + K2_SPARSIFY`
/// bits, and the best-bucket wrapper `K_LOG * log2(n) + K_LOG` plus its base
/// advice. The layout arithmetic keeps real runs far below these pins.
pub const K1_SPARSIFY: f64 = 16.0;
pub const K2_SPARSIFY: f64 = 32.0;
pub const K_LOG: f64 = 8.0;

/// Algorithm score; infeasible runs serialize as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Finite(f64),
    Infeasible,
}

impl Serialize for Score {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Score::Finite(v) => s.serialize_f64(*v),
            Score::Infeasible => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub run_id: u64,
    pub problem: String,
    pub n: usize,
    pub algorithm: String,
    pub params: BTreeMap<String, String>,
    pub alg_score: Score,
    pub opt_score: f64,
    /// `ALG/OPT` for minimization, `OPT/ALG` for maximization.
    pub ratio: f64,
    /// Additive slack against the theorem bound; 0 where the bound is strict.
    pub additive_alpha: f64,
    pub bits_read: usize,
    /// The pinned advice-budget shape evaluated at this run's parameters.
    pub advice_bound: f64,
    pub runtime_ms: u64,
}

impl RunReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenKind {
    /// G(n, p) in the vertex-arrival model, or `n` random edges for edge-arrival.
    RandomGraph { p: f64 },
    Clique,
    Star,
    Path,
    /// Unrelated machines: per-machine loads log-uniform over the decades.
    RandomUnrelated,
    /// Related machines: scalar sizes plus speeds in [1, 4).
    RandomRelated,
    /// Random hidden string for string guessing.
    AsgRandom,
    /// Geometric prefix family (full-length member).
    Thm7 { f: f64 },
    /// Probabilistic star adversary at ratio `c`.
    Thm8 { c: Cost },
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorSpec {
    pub kind: GenKind,
    pub problem: Option<Problem>,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub weight_decades: f64,
}

impl GeneratorSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        Self { kind, problem: None, n, m: 2, seed, weight_decades: 0.0 }
    }

    pub fn problem(mut self, p: Problem) -> Self {
        self.problem = Some(p);
        self
    }

    pub fn machines(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn decades(mut self, d: f64) -> Self {
        self.weight_decades = d;
        self
    }
}

#[derive(Debug, Clone)]
pub enum Generated {
    Aoc(Instance),
    SchedUnrelated { jobs: Vec<Job>, m: usize },
    SchedRelated { sizes: Vec<f64>, speeds: Vec<f64> },
    /// No materialized instance; runs sample the adversary distribution.
    Thm8 { c: Cost },
}

fn weights(rng: &mut SplitMix64, n: usize, decades: f64) -> Vec<f64> {
    (0..n).map(|_| rng.log_uniform_weight(decades)).collect()
}

/// Deterministic instance generation from a spec.
pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    let mut rng = SplitMix64::new(spec.seed);
    let n = spec.n;
    if n == 0 {
        return Err(Error::Contract("generator needs n >= 1".into()));
    }
    let problem = spec.problem;
    let gen_graph_edges = |rng: &mut SplitMix64, p: f64| -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.next_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        edges
    };
    let instance = match spec.kind {
        GenKind::RandomGraph { p } => {
            let problem = problem.ok_or_else(|| Error::Contract("random_graph needs a problem".into()))?;
            if problem == Problem::Matching {
                // Edge-arrival: n random edges over ~n vertices.
                let verts = (n as u32).max(2);
                let mut edges = Vec::with_capacity(n);
                for _ in 0..n {
                    let u = rng.next_below(verts as u64) as u32;
                    let mut v = rng.next_below(verts as u64) as u32;
                    while v == u {
                        v = rng.next_below(verts as u64) as u32;
                    }
                    edges.push((u.min(v), u.max(v)));
                }
                let w = weights(&mut rng, n, spec.weight_decades);
                crate::problems::build::matching(&edges, &w)
            } else {
                let edges = gen_graph_edges(&mut rng, p);
                let w = weights(&mut rng, n, spec.weight_decades);
                crate::problems::build::vertex_arrival(problem, n, &edges, &w)
            }
        }
        GenKind::Clique => {
            let problem = problem.unwrap_or(Problem::IndependentSet);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            let w = weights(&mut rng, n, spec.weight_decades);
            crate::problems::build::vertex_arrival(problem, n, &edges, &w)
        }
        GenKind::Star => {
            let w = weights(&mut rng, n, spec.weight_decades);
            match problem {
                Some(Problem::Matching) => {
                    let edges: Vec<(u32, u32)> = (1..=n as u32).map(|i| (0, i)).collect();
                    crate::problems::build::matching(&edges, &w)
                }
                Some(p) => {
                    let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
                    crate::problems::build::vertex_arrival(p, n, &edges, &w)
                }
                None => return Err(Error::Contract("star needs a problem".into())),
            }
        }
        GenKind::Path => {
            let problem = problem.unwrap_or(Problem::VertexCover);
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            let w = weights(&mut rng, n, spec.weight_decades);
            crate::problems::build::vertex_arrival(problem, n, &edges, &w)
        }
        GenKind::AsgRandom => {
            let mut x = crate::BitStr::zeros(0);
            for _ in 0..n {
                x.push(rng.next_bool(0.5));
            }
            let w = weights(&mut rng, n, spec.weight_decades);
            crate::problems::build::min_asg(x, &w)
        }
        GenKind::RandomUnrelated => {
            let jobs: Vec<Job> = (0..n)
                .map(|_| Job::new(weights(&mut rng, spec.m, spec.weight_decades)))
                .collect();
            return Ok(Generated::SchedUnrelated { jobs, m: spec.m });
        }
        GenKind::RandomRelated => {
            let sizes = weights(&mut rng, n, spec.weight_decades);
            let speeds: Vec<f64> = (0..spec.m).map(|_| 1.0 + 3.0 * rng.next_f64()).collect();
            return Ok(Generated::SchedRelated { sizes, speeds });
        }
        GenKind::Thm7 { f } => {
            let problem = problem.unwrap_or(Problem::Matching);
            let family = crate::adversary::thm7_generate(problem, n, f)?;
            family.into_iter().next_back().expect("nonempty family")
        }
        GenKind::Thm8 { c } => return Ok(Generated::Thm8 { c }),
    };
    Ok(Generated::Aoc(instance))
}

#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    pub c: Cost,
    pub epsilon: f64,
    pub wmin: Option<f64>,
    pub wmax: Option<f64>,
    pub objective: Option<Objective>,
}

impl Default for RunParams {
    fn default() -> Self {
        Self { c: cost(2, 1), epsilon: 1.0, wmin: None, wmax: None, objective: None }
    }
}

fn param_map(spec: &GeneratorSpec, params: &RunParams) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    map.insert("c".into(), params.c.to_string());
    map.insert("eps".into(), format!("{}", params.epsilon));
    map.insert("seed".into(), spec.seed.to_string());
    map.insert("decades".into(), format!("{}", spec.weight_decades));
    if let Some(obj) = &params.objective {
        map.insert("objective".into(), obj.name());
    }
    map
}

fn sparsify_budget(n: usize, c: Cost, epsilon: f64) -> f64 {
    let log_n = (n as f64).log2();
    b_bound(n, c).map(f64::ceil).unwrap_or(f64::INFINITY)
        + K1_SPARSIFY / epsilon * log_n * log_n
        + K2_SPARSIFY
}

/// A feasible run can never beat the optimum; anything below 1 beyond float
/// noise on the score sums is a brute-force bug.
fn clamp_ratio(ratio: f64) -> f64 {
    debug_assert!(ratio >= 1.0 - 1e-9, "ratio {ratio} below 1");
    ratio.max(1.0)
}

#[allow(clippy::too_many_arguments)]
fn report_from_advice_run(
    run: &AdviceRun,
    spec: &GeneratorSpec,
    algorithm: &str,
    params: &RunParams,
    problem: Problem,
    n: usize,
    advice_bound: f64,
    runtime_ms: u64,
) -> RunReport {
    RunReport {
        run_id: spec.seed,
        problem: problem.name().into(),
        n,
        algorithm: algorithm.into(),
        params: param_map(spec, params),
        alg_score: Score::Finite(run.outcome.score),
        opt_score: run.opt.score,
        ratio: clamp_ratio(run.ratio()),
        additive_alpha: run.alpha(),
        bits_read: run.bits_read,
        advice_bound,
        runtime_ms,
    }
}

fn report_from_sched_run(
    run: &SchedRun,
    spec: &GeneratorSpec,
    algorithm: &str,
    params: &RunParams,
    n: usize,
    advice_bound: f64,
    runtime_ms: u64,
) -> RunReport {
    RunReport {
        run_id: spec.seed,
        problem: "scheduling".into(),
        n,
        algorithm: algorithm.into(),
        params: param_map(spec, params),
        alg_score: Score::Finite(run.value),
        opt_score: run.opt_value,
        ratio: clamp_ratio(run.ratio()),
        additive_alpha: run.alpha(),
        bits_read: run.bits_read,
        advice_bound,
        runtime_ms,
    }
}

/// Generates the instance for `spec`, runs `algorithm` against a fresh tape,
/// and measures score, offline optimum, ratio, and bits read.
pub fn run_experiment(
    spec: &GeneratorSpec,
    algorithm: &str,
    params: &RunParams,
) -> Result<RunReport> {
    let started = std::time::Instant::now();
    let generated = generate(spec)?;
    let elapsed = |start: std::time::Instant| start.elapsed().as_millis() as u64;

    match (generated, algorithm) {
        (Generated::Aoc(instance), "covering") => {
            let opt = brute_force_opt(&instance)?;
            let family = cached_family(instance.n(), params.c, instance.problem.direction())?;
            let mut tape = AdviceTape::new();
            let (outcome, bits) = run_unweighted_aoc(&instance, &family, &opt.output, &mut tape)?;
            if !outcome.feasible {
                return Err(Error::Contract("covering run is infeasible".into()));
            }
            let direction = instance.problem.direction();
            let run = AdviceRun {
                outcome,
                opt,
                bits_read: bits,
                ratio_bound: ratio_f64(params.c),
                direction,
            };
            Ok(report_from_advice_run(
                &run,
                spec,
                algorithm,
                params,
                instance.problem,
                instance.n(),
                family.index_width as f64,
                elapsed(started),
            ))
        }
        (Generated::Aoc(instance), "thm4") => {
            let mut tape = AdviceTape::new();
            let run = thm4_run(&instance, params.c, params.epsilon, &mut tape)?;
            let bound = sparsify_budget(instance.n(), params.c, params.epsilon);
            Ok(report_from_advice_run(
                &run, spec, algorithm, params, instance.problem, instance.n(), bound,
                elapsed(started),
            ))
        }
        (Generated::Aoc(instance), "thm5") => {
            let lo = instance.weights().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = instance.weights().iter().copied().fold(0.0f64, f64::max);
            let wmin = params.wmin.unwrap_or(lo);
            let wmax = params.wmax.unwrap_or(hi);
            let mut tape = AdviceTape::new();
            let run = thm5_run(&instance, params.c, params.epsilon, wmin, wmax, &mut tape)?;
            let bound = sparsify_budget(instance.n(), params.c, params.epsilon);
            Ok(report_from_advice_run(
                &run, spec, algorithm, params, instance.problem, instance.n(), bound,
                elapsed(started),
            ))
        }
        (Generated::Aoc(instance), "thm6") => {
            let mut tape = AdviceTape::new();
            let run = thm6_run(&instance, &GreedyMatching, &mut tape)?;
            let bound = K_LOG * (instance.n().max(2) as f64).log2() + K_LOG;
            Ok(report_from_advice_run(
                &run, spec, algorithm, params, instance.problem, instance.n(), bound,
                elapsed(started),
            ))
        }
        (Generated::SchedUnrelated { jobs, m }, "thm9") => {
            let objective = params.objective.unwrap_or(Objective::min_lp(Norm::Inf));
            let mut tape = AdviceTape::new();
            let run = thm9_run(&jobs, m, &objective, params.epsilon, &mut tape)?;
            let bound = thm9_budget(jobs.len(), m, params.epsilon);
            Ok(report_from_sched_run(&run, spec, algorithm, params, jobs.len(), bound, elapsed(started)))
        }
        (Generated::SchedRelated { sizes, speeds }, "thm10") => {
            let objective = params.objective.unwrap_or(Objective::min_lp(Norm::P(2.0)));
            let mut tape = AdviceTape::new();
            let run = thm10_run(&sizes, &speeds, &objective, params.epsilon, &mut tape)?;
            let bound = thm10_budget(sizes.len(), params.epsilon);
            Ok(report_from_sched_run(&run, spec, algorithm, params, sizes.len(), bound, elapsed(started)))
        }
        (Generated::SchedUnrelated { jobs, m }, "thm11") => {
            let objective = params.objective.unwrap_or(Objective::max_min_load());
            let mut tape = AdviceTape::new();
            let run = thm11_run(&jobs, m, &objective, params.epsilon, &mut tape)?;
            let bound = thm11_budget(jobs.len(), m, params.epsilon);
            Ok(report_from_sched_run(&run, spec, algorithm, params, jobs.len(), bound, elapsed(started)))
        }
        (Generated::Thm8 { c }, "opt_last") => {
            // One sampled round-count; the optimum strategy accepts the last
            // edge, so its score equals the optimum by definition.
            let sampled = thm8_sample(c, 1, spec.seed)?;
            let v = sampled.mean_opt;
            let mut map = param_map(spec, params);
            map.insert("c".into(), c.to_string());
            Ok(RunReport {
                run_id: spec.seed,
                problem: "weighted_matching_star".into(),
                n: spec.n,
                algorithm: algorithm.into(),
                params: map,
                alg_score: Score::Finite(v),
                opt_score: v,
                ratio: 1.0,
                additive_alpha: 0.0,
                bits_read: 0,
                advice_bound: 0.0,
                runtime_ms: elapsed(started),
            })
        }
        (_, other) => Err(Error::Contract(format!(
            "algorithm {other:?} does not apply to this generator kind"
        ))),
    }
}

fn sd_len(v: u64) -> f64 {
    2.0 * (64 - v.max(1).leading_zeros()) as f64 + 1.0
}

/// Exact layout budget of the unrelated-machines scheme.
pub fn thm9_budget(n: usize, m: usize, epsilon: f64) -> f64 {
    let s = 1.0 + epsilon / 2.0;
    let thr = crate::sparsify::log_s_ceil_n2(s, n);
    let cw = (usize::BITS - n.leading_zeros()) as f64;
    let table = ((thr + 2) as f64).powi(m as i32) * cw;
    sd_len(n as u64) + cw + sd_len(thr as u64 + 1) + table
}

/// Exact layout budget of the related-machines scheme.
pub fn thm10_budget(n: usize, epsilon: f64) -> f64 {
    let s = 1.0 + epsilon / 2.0;
    let thr = crate::sparsify::log_s_ceil_n2(s, n);
    let cw = (usize::BITS - n.leading_zeros()) as f64;
    sd_len(n as u64) + cw + sd_len(thr as u64 + 1) + (thr + 1) as f64 * cw
}

/// Exact layout budget of the phase-based maximization scheme.
pub fn thm11_budget(n: usize, m: usize, epsilon: f64) -> f64 {
    let s = 1.0 + epsilon / 2.0;
    let thr = crate::sparsify::log_s_ceil_n2(s, n);
    let cw = (usize::BITS - n.leading_zeros()) as f64;
    let mw = (usize::BITS - (m - 1).leading_zeros()).max(1) as f64;
    let tables: f64 = (1..=m as i32)
        .map(|p| ((thr + 2) as f64).powi(p) * p as f64 * cw)
        .sum();
    sd_len(n as u64) + m as f64 * mw + m as f64 * (cw + sd_len(thr as u64 + 1)) + tables
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchRow {
    pub n: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub max_bits: usize,
    pub advice_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub max_ratio: f64,
    pub max_bits: usize,
    pub rows: Vec<BatchRow>,
    #[serde(skip)]
    pub reports: Vec<RunReport>,
}

impl BatchSummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,trials,max_ratio,max_bits,advice_bound\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.n, row.trials, row.max_ratio, row.max_bits, row.advice_bound
            ));
        }
        out
    }
}

fn worker_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Ok(cap) = std::env::var("ADVICEBENCH_WORKERS") {
            if let Ok(threads) = cap.trim().parse::<usize>() {
                builder = builder.num_threads(threads.max(1));
            }
        }
        builder.build().expect("worker pool")
    })
}

/// Runs `trials` seeded repetitions of every spec concurrently (worker count
/// capped by `ADVICEBENCH_WORKERS`) and aggregates per-`n` maxima. Any failed
/// or infeasible run aborts the whole batch with its offending seed.
pub fn batch(
    specs: &[GeneratorSpec],
    algorithm: &str,
    params: &RunParams,
    trials: usize,
) -> Result<BatchSummary> {
    use rayon::prelude::*;

    if trials == 0 {
        return Err(Error::Contract("batch needs trials >= 1".into()));
    }
    let tasks: Vec<GeneratorSpec> = specs
        .iter()
        .flat_map(|spec| {
            (0..trials).map(move |t| {
                let mut s = *spec;
                s.seed = trial_seed(spec.seed, t as u64);
                s
            })
        })
        .collect();

    let results: Vec<Result<RunReport>> = worker_pool().install(|| {
        tasks
            .par_iter()
            .map(|spec| {
                run_experiment(spec, algorithm, params).map_err(|e| {
                    Error::Contract(format!("seed {}: {e}", spec.seed))
                })
            })
            .collect()
    });
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }

    let mut by_n: BTreeMap<usize, BatchRow> = BTreeMap::new();
    for report in &reports {
        let row = by_n.entry(report.n).or_insert(BatchRow {
            n: report.n,
            trials: 0,
            max_ratio: 1.0,
            max_bits: 0,
            advice_bound: report.advice_bound,
        });
        row.trials += 1;
        row.max_ratio = row.max_ratio.max(report.ratio);
        row.max_bits = row.max_bits.max(report.bits_read);
    }
    let max_ratio = reports.iter().map(|r| r.ratio).fold(1.0, f64::max);
    let max_bits = reports.iter().map(|r| r.bits_read).max().unwrap_or(0);
    Ok(BatchSummary { max_ratio, max_bits, rows: by_n.into_values().collect(), reports })
}
