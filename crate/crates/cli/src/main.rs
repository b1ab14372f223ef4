//! Command-line front end: single runs, instance generation, lower-bound
//! verification, adversary expectations, and covering-family construction.
//!
//! Every run prints one JSON report line; any invariant violation (an
//! infeasible upper-bound run, a contract breach, a failed verifier) exits
//! nonzero.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use advicebench::adversary::{
    thm1_verify, thm7_verify, thm8_expectations, thm8_sample, AcceptFirst, CoveringCapped,
    FullAdvice, GuessZero, IndexModulo, RatioBound, VerifyOutcome,
};
use advicebench::covering::{b_bound, build_family_greedy, parse_cost, Cost};
use advicebench::harness::{
    batch, generate, run_experiment, GenKind, Generated, GeneratorSpec, RunParams,
};
use advicebench::problems::{Direction, Instance, Problem};
use advicebench::scheduling::{Norm, Objective, SchedInstance};

#[derive(Parser)]
#[command(
    name = "advicebench",
    about = "Simulation framework for online algorithms with advice",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on a generated or loaded instance and print the report.
    Run(RunArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Verify a lower bound against the built-in algorithm suite.
    VerifyLb(VerifyArgs),
    /// Exact (and sampled) expectations of the probabilistic star adversary.
    Expectations(ExpectArgs),
    /// Build a covering family and print it with its advice accounting.
    Family(FamilyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem tag (min_asg, vertex_cover, dominating_set, cycle_finding,
    /// set_cover, independent_set, clique, matching, disjoint_path, scheduling).
    #[arg(long)]
    problem: String,
    /// Algorithm tag (covering, thm4, thm5, thm6, thm9, thm10, thm11, opt_last).
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "2")]
    c: String,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Log-uniform weight spread in decades.
    #[arg(long, default_value_t = 0.0)]
    decades: f64,
    /// Edge probability for random graphs.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// lp-norm exponent for scheduling objectives ("inf" for the makespan).
    #[arg(long)]
    lp: Option<String>,
    /// Trials; above 1 the run becomes a seeded batch and prints a summary.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Load the instance from a JSON file instead of generating one.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Write report lines here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print a CSV summary (batch mode).
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Generator kind: random_graph, clique, star, path, random_unrelated,
    /// random_related, asg_random, thm7, thm8.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    decades: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 10.0)]
    f: f64,
    #[arg(long, default_value = "2")]
    c: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// 1 = weighted string-guessing collision adversary,
    /// 7 = geometric prefix family.
    #[arg(long)]
    theorem: u32,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Advice budget of the capped algorithm under test.
    #[arg(long, default_value_t = 7)]
    bits: usize,
    /// log2 of the adversary weight base.
    #[arg(long, default_value_t = 2048.0)]
    log2a: f64,
    /// Weight ratio of the prefix family.
    #[arg(long, default_value_t = 10.0)]
    f: f64,
    #[arg(long, default_value = "matching")]
    problem: String,
}

#[derive(Args)]
struct ExpectArgs {
    #[arg(long, default_value = "2")]
    c: String,
    /// Monte-Carlo sample count (0 skips sampling).
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "2")]
    c: String,
    #[arg(long, default_value = "min")]
    direction: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_problem(tag: &str) -> Result<Problem> {
    serde_json::from_value(serde_json::Value::String(tag.to_string()))
        .map_err(|_| anyhow!("unknown problem tag {tag:?}"))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).context("writing output file")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn objective_from(lp: &Option<String>, algo: &str) -> Result<Option<Objective>> {
    let Some(lp) = lp else {
        return Ok(None);
    };
    let norm = if lp == "inf" {
        Norm::Inf
    } else {
        Norm::P(lp.parse::<f64>().context("bad --lp value")?)
    };
    Ok(Some(match algo {
        "thm11" => Objective { kind: advicebench::scheduling::ObjectiveKind::LpNorm(norm), direction: Direction::Max },
        _ => Objective::min_lp(norm),
    }))
}

fn default_kind(problem: Problem, p: f64) -> GenKind {
    match problem {
        Problem::MinAsg => GenKind::AsgRandom,
        _ => GenKind::RandomGraph { p },
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let c: Cost = parse_cost(&args.c).map_err(|e| anyhow!("{e}"))?;
    let params = RunParams {
        c,
        epsilon: args.eps,
        wmin: None,
        wmax: None,
        objective: objective_from(&args.lp, &args.algo)?,
    };

    if let Some(path) = &args.instance {
        let doc = std::fs::read_to_string(path).context("reading instance file")?;
        let report = run_loaded(&doc, &args, &params)?;
        return write_output(&args.out, &report);
    }

    let spec = build_spec(&args)?;
    if args.trials <= 1 {
        let report = run_experiment(&spec, &args.algo, &params).map_err(|e| anyhow!("{e}"))?;
        write_output(&args.out, &report.to_json_line())
    } else {
        let summary = batch(&[spec], &args.algo, &params, args.trials).map_err(|e| anyhow!("{e}"))?;
        let mut lines: Vec<String> = summary.reports.iter().map(|r| r.to_json_line()).collect();
        lines.push(serde_json::to_string(&serde_json::json!({
            "summary": {"max_ratio": summary.max_ratio, "max_bits": summary.max_bits}
        }))?);
        if args.csv {
            lines.push(summary.to_csv());
        }
        write_output(&args.out, &lines.join("\n"))
    }
}

fn build_spec(args: &RunArgs) -> Result<GeneratorSpec> {
    if args.problem == "scheduling" {
        let kind = if args.algo == "thm10" { GenKind::RandomRelated } else { GenKind::RandomUnrelated };
        return Ok(GeneratorSpec::new(kind, args.n, args.seed)
            .machines(args.m)
            .decades(args.decades));
    }
    if args.problem == "thm8" {
        let c = parse_cost(&args.c).map_err(|e| anyhow!("{e}"))?;
        return Ok(GeneratorSpec::new(GenKind::Thm8 { c }, args.n, args.seed));
    }
    let problem = parse_problem(&args.problem)?;
    Ok(GeneratorSpec::new(default_kind(problem, args.p), args.n, args.seed)
        .problem(problem)
        .decades(args.decades))
}

/// Runs an algorithm on an instance loaded from JSON (accept/reject or
/// scheduling, depending on the algorithm).
fn run_loaded(doc: &str, args: &RunArgs, params: &RunParams) -> Result<String> {
    use advicebench::tape::AdviceTape;
    match args.algo.as_str() {
        "thm9" | "thm10" | "thm11" => {
            let inst: SchedInstance = serde_json::from_str(doc).context("parsing scheduling instance")?;
            let objective = params.objective.map(Ok).unwrap_or_else(|| inst.objective().map_err(|e| anyhow!("{e}")))?;
            let mut tape = AdviceTape::new();
            let run = match args.algo.as_str() {
                "thm9" => advicebench::scheduling::thm9_run(
                    &inst.unrelated_jobs().map_err(|e| anyhow!("{e}"))?,
                    inst.machines,
                    &objective,
                    params.epsilon,
                    &mut tape,
                ),
                "thm10" => advicebench::scheduling::thm10_run(
                    &inst.sizes().map_err(|e| anyhow!("{e}"))?,
                    inst.speeds.as_deref().ok_or_else(|| anyhow!("instance lacks speeds"))?,
                    &objective,
                    params.epsilon,
                    &mut tape,
                ),
                _ => advicebench::scheduling::thm11_run(
                    &inst.unrelated_jobs().map_err(|e| anyhow!("{e}"))?,
                    inst.machines,
                    &objective,
                    params.epsilon,
                    &mut tape,
                ),
            }
            .map_err(|e| anyhow!("{e}"))?;
            Ok(serde_json::to_string(&serde_json::json!({
                "algorithm": args.algo,
                "n": inst.jobs.len(),
                "alg_score": run.value,
                "opt_score": run.opt_value,
                "ratio": run.ratio(),
                "bits_read": run.bits_read,
            }))?)
        }
        _ => {
            let inst: Instance = serde_json::from_str(doc).context("parsing instance")?;
            let mut tape = AdviceTape::new();
            let run = match args.algo.as_str() {
                "covering" => {
                    let opt = advicebench::problems::brute_force_opt(&inst).map_err(|e| anyhow!("{e}"))?;
                    let family = advicebench::covering::cached_family(
                        inst.n(),
                        params.c,
                        inst.problem.direction(),
                    )
                    .map_err(|e| anyhow!("{e}"))?;
                    let (outcome, bits) =
                        advicebench::covering::run_unweighted_aoc(&inst, &family, &opt.output, &mut tape)
                            .map_err(|e| anyhow!("{e}"))?;
                    advicebench::weighted::AdviceRun {
                        outcome,
                        opt,
                        bits_read: bits,
                        ratio_bound: advicebench::covering::ratio_f64(params.c),
                        direction: inst.problem.direction(),
                    }
                }
                "thm4" => advicebench::weighted::thm4_run(&inst, params.c, params.epsilon, &mut tape)
                    .map_err(|e| anyhow!("{e}"))?,
                "thm5" => {
                    let w = inst.weights();
                    let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = w.iter().copied().fold(0.0f64, f64::max);
                    advicebench::weighted::thm5_run(&inst, params.c, params.epsilon, lo, hi, &mut tape)
                        .map_err(|e| anyhow!("{e}"))?
                }
                "thm6" => advicebench::weighted::thm6_run(
                    &inst,
                    &advicebench::weighted::GreedyMatching,
                    &mut tape,
                )
                .map_err(|e| anyhow!("{e}"))?,
                other => bail!("algorithm {other:?} cannot run on a loaded instance"),
            };
            Ok(serde_json::to_string(&serde_json::json!({
                "algorithm": args.algo,
                "problem": inst.problem.name(),
                "n": inst.n(),
                "alg_score": run.outcome.score,
                "opt_score": run.opt.score,
                "ratio": run.ratio(),
                "additive_alpha": run.alpha(),
                "bits_read": run.bits_read,
                "tape_hex": tape.to_hex(),
            }))?)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let problem = args.problem.as_deref().map(parse_problem).transpose()?;
    let kind = match args.kind.as_str() {
        "random_graph" => GenKind::RandomGraph { p: args.p },
        "clique" => GenKind::Clique,
        "star" => GenKind::Star,
        "path" => GenKind::Path,
        "random_unrelated" => GenKind::RandomUnrelated,
        "random_related" => GenKind::RandomRelated,
        "asg_random" => GenKind::AsgRandom,
        "thm7" => GenKind::Thm7 { f: args.f },
        "thm8" => GenKind::Thm8 { c: parse_cost(&args.c).map_err(|e| anyhow!("{e}"))? },
        other => bail!("unknown generator kind {other:?}"),
    };
    let mut spec = GeneratorSpec::new(kind, args.n, args.seed)
        .machines(args.m)
        .decades(args.decades);
    if let Some(p) = problem {
        spec = spec.problem(p);
    }
    let doc = match generate(&spec).map_err(|e| anyhow!("{e}"))? {
        Generated::Aoc(instance) => serde_json::to_string_pretty(&instance)?,
        Generated::SchedUnrelated { jobs, m } => serde_json::to_string_pretty(&serde_json::json!({
            "machines": m,
            "jobs": jobs.iter().map(|j| j.loads.clone()).collect::<Vec<_>>(),
            "objective": {"kind": "lp", "p": "inf", "direction": "min"},
        }))?,
        Generated::SchedRelated { sizes, speeds } => serde_json::to_string_pretty(&serde_json::json!({
            "machines": speeds.len(),
            "speeds": speeds,
            "jobs": sizes,
            "objective": {"kind": "lp", "p": 2, "direction": "min"},
        }))?,
        Generated::Thm8 { c } => serde_json::to_string_pretty(&serde_json::json!({
            "adversary": "star",
            "c": c.to_string(),
        }))?,
    };
    write_output(&args.out, &doc)
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    match args.theorem {
        1 => {
            let mut all = Vec::new();
            let pairs: Vec<(&str, Box<dyn advicebench::adversary::GuessingPair>)> = vec![
                ("guess_zero", Box::new(GuessZero)),
                (
                    "covering_capped",
                    Box::new(CoveringCapped {
                        c: advicebench::covering::cost(2, 1),
                        cap: args.bits,
                    }),
                ),
                ("full_advice", Box::new(FullAdvice)),
            ];
            let mut violated = false;
            for (name, pair) in &pairs {
                let outcome =
                    thm1_verify(pair.as_ref(), args.n, args.log2a).map_err(|e| anyhow!("{e}"))?;
                match outcome {
                    VerifyOutcome::Witness(w) => {
                        if *name != "full_advice" {
                            match w.log2_ratio_lower_bound {
                                RatioBound::Log2(b)
                                    if b < args.log2a / (1u64 << args.n) as f64
                                        - (args.n as f64).log2() - 1e-9 =>
                                {
                                    violated = true;
                                }
                                _ => {}
                            }
                        }
                        all.push(serde_json::json!({"pair": name, "witness": w}));
                    }
                    VerifyOutcome::Inapplicable { classes } => {
                        all.push(serde_json::json!({"pair": name, "inapplicable": classes}));
                    }
                }
            }
            println!("{}", serde_json::to_string_pretty(&all)?);
            if violated {
                bail!("a witness fell below the proven ratio bound");
            }
            Ok(())
        }
        7 => {
            let problem = parse_problem(&args.problem)?;
            let mut all = Vec::new();
            let pairs: Vec<(&str, Box<dyn advicebench::adversary::PrefixAdvicePair>)> = vec![
                ("accept_first", Box::new(AcceptFirst)),
                ("index_modulo", Box::new(IndexModulo { bits: args.bits })),
            ];
            for (name, pair) in &pairs {
                let outcome = thm7_verify(pair.as_ref(), problem, args.n, args.f)
                    .map_err(|e| anyhow!("{e}"))?;
                match outcome {
                    VerifyOutcome::Witness(w) => {
                        all.push(serde_json::json!({"pair": name, "witness": w}))
                    }
                    VerifyOutcome::Inapplicable { classes } => {
                        all.push(serde_json::json!({"pair": name, "inapplicable": classes}))
                    }
                }
            }
            println!("{}", serde_json::to_string_pretty(&all)?);
            Ok(())
        }
        other => bail!("no verifier for theorem {other}"),
    }
}

fn cmd_expectations(args: ExpectArgs) -> Result<()> {
    let c = parse_cost(&args.c).map_err(|e| anyhow!("{e}"))?;
    let exact = thm8_expectations(c).map_err(|e| anyhow!("{e}"))?;
    let mut doc = serde_json::json!({
        "c": c.to_string(),
        "k": exact.k,
        "e_opt": exact.e_opt.to_string(),
        "e_opt_decimal": *exact.e_opt.numer() as f64 / *exact.e_opt.denom() as f64,
        "e_det": exact.e_det.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    });
    if args.samples > 0 {
        let sampled = thm8_sample(c, args.samples, args.seed).map_err(|e| anyhow!("{e}"))?;
        doc["monte_carlo"] = serde_json::json!({
            "samples": sampled.samples,
            "mean_opt": sampled.mean_opt,
            "se_opt": sampled.se_opt,
            "det": sampled.det,
        });
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn cmd_family(args: FamilyArgs) -> Result<()> {
    let c = parse_cost(&args.c).map_err(|e| anyhow!("{e}"))?;
    let direction = match args.direction.as_str() {
        "min" => Direction::Min,
        "max" => Direction::Max,
        other => bail!("direction must be min or max, got {other:?}"),
    };
    let family = build_family_greedy(args.n, c, direction).map_err(|e| anyhow!("{e}"))?;
    if !family.verify_exhaustive() {
        bail!("constructed family fails its own covering invariant");
    }
    let bound = b_bound(args.n, c).map_err(|e| anyhow!("{e}"))?;
    eprintln!(
        "members={} index_width={} log2|F|={:.4} B(n,c)={:.4}",
        family.members.len(),
        family.index_width,
        (family.members.len() as f64).log2(),
        bound
    );
    write_output(&args.out, &family.to_json())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Gen(args) => cmd_gen(args),
        Command::VerifyLb(args) => cmd_verify(args),
        Command::Expectations(args) => cmd_expectations(args),
        Command::Family(args) => cmd_family(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
