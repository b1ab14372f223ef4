//! Wider parameter sweeps than the acceptance pins: every epsilon crosses
//! its verbatim/main-path boundary somewhere in the n range, and the
//! three-machine cases exercise multi-dimensional type tables.

use rayon::prelude::*;

use advicebench::covering::cost;
use advicebench::harness::{generate, GenKind, Generated, GeneratorSpec};
use advicebench::problems::Problem;
use advicebench::scheduling::{thm10_run, thm11_run, thm9_run, Norm, Objective};
use advicebench::tape::AdviceTape;
use advicebench::weighted::{thm4_run, thm5_run, thm6_run, GreedyMatching};

#[test]
fn weighted_max_sweep() {
    let shapes = [
        GenKind::RandomGraph { p: 0.3 },
        GenKind::RandomGraph { p: 0.7 },
        GenKind::Clique,
        GenKind::Star,
        GenKind::Path,
    ];
    let cases: Vec<(usize, f64, f64, usize, u64)> = itertools_product();
    cases.par_iter().for_each(|&(shape, eps, decades, n, seed)| {
        let spec = GeneratorSpec::new(shapes[shape], n, seed)
            .problem(Problem::IndependentSet)
            .decades(decades);
        let Generated::Aoc(inst) = generate(&spec).unwrap() else { unreachable!() };
        let mut tape = AdviceTape::new();
        let run = thm4_run(&inst, cost(2, 1), eps, &mut tape)
            .unwrap_or_else(|e| panic!("shape {shape} eps {eps} n {n} seed {seed}: {e}"));
        assert!(run.outcome.feasible);
        assert!(
            run.opt.score <= (1.0 + eps) * 2.0 * run.outcome.score + 1e-9,
            "shape {shape} eps {eps} n {n} seed {seed}: ratio {}",
            run.ratio()
        );
        assert_eq!(run.alpha(), 0.0);
    });
}

fn itertools_product() -> Vec<(usize, f64, f64, usize, u64)> {
    let mut out = Vec::new();
    for shape in 0..5usize {
        for &eps in &[0.25, 0.5, 1.0] {
            for &decades in &[0.0, 3.0, 8.0] {
                for n in 4..=10usize {
                    for seed in 0..3u64 {
                        out.push((shape, eps, decades, n, seed * 977 + n as u64));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn weighted_min_sweep() {
    let cases = itertools_product();
    cases.par_iter().for_each(|&(shape, eps, decades, n, seed)| {
        let problem = if shape % 2 == 0 { Problem::VertexCover } else { Problem::DominatingSet };
        let kinds = [
            GenKind::RandomGraph { p: 0.3 },
            GenKind::RandomGraph { p: 0.7 },
            GenKind::Clique,
            GenKind::Star,
            GenKind::Path,
        ];
        let spec = GeneratorSpec::new(kinds[shape], n, seed).problem(problem).decades(decades);
        let Generated::Aoc(inst) = generate(&spec).unwrap() else { unreachable!() };
        let w = inst.weights();
        let (lo, hi) = (
            w.iter().copied().fold(f64::INFINITY, f64::min),
            w.iter().copied().fold(0.0f64, f64::max),
        );
        let mut tape = AdviceTape::new();
        let run = thm5_run(&inst, cost(2, 1), eps, lo, hi, &mut tape)
            .unwrap_or_else(|e| panic!("{problem:?} eps {eps} n {n} seed {seed}: {e}"));
        assert!(run.outcome.feasible);
        assert!(
            run.outcome.score <= (1.0 + eps) * 2.0 * run.opt.score + 1e-9,
            "{problem:?} eps {eps} n {n} seed {seed}: ratio {}",
            run.ratio()
        );
    });
}

#[test]
fn guessing_min_sweep() {
    // The canonical minimization problem end to end, all weights spreads.
    (0..200u64).into_par_iter().for_each(|seed| {
        let n = 4 + (seed % 7) as usize;
        let spec = GeneratorSpec::new(GenKind::AsgRandom, n, seed).decades((seed % 4) as f64);
        let Generated::Aoc(inst) = generate(&spec).unwrap() else { unreachable!() };
        let w = inst.weights();
        let (lo, hi) = (
            w.iter().copied().fold(f64::INFINITY, f64::min),
            w.iter().copied().fold(0.0f64, f64::max),
        );
        let mut tape = AdviceTape::new();
        let run = thm5_run(&inst, cost(2, 1), 1.0, lo, hi, &mut tape).unwrap();
        assert!(run.outcome.feasible);
        assert!(run.outcome.score <= 4.0 * run.opt.score + 1e-9);
    });
}

#[test]
fn matching_wrapper_sweep() {
    (0..300u64).into_par_iter().for_each(|seed| {
        let n = 3 + (seed % 10) as usize;
        let decades = (seed % 9) as f64;
        let spec = GeneratorSpec::new(GenKind::RandomGraph { p: 0.5 }, n, seed)
            .problem(Problem::Matching)
            .decades(decades);
        let Generated::Aoc(inst) = generate(&spec).unwrap() else { unreachable!() };
        let mut tape = AdviceTape::new();
        let run = thm6_run(&inst, &GreedyMatching, &mut tape).unwrap();
        assert!(run.outcome.feasible);
        assert!(
            run.ratio() <= run.ratio_bound + 1e-9,
            "seed {seed} n {n}: ratio {} over {}",
            run.ratio(),
            run.ratio_bound
        );
    });
}

/// Exponent separation at the full exact-arithmetic range (the acceptance
/// gate runs n <= 12; the dyadic representation is good far beyond).
#[test]
fn exponent_separation_to_n16() {
    use advicebench::adversary::observation1_holds;
    use advicebench::bitstr::BitStr;
    for n in 13..=16usize {
        let bad = (0u32..1 << n)
            .into_par_iter()
            .find_any(|&mask| !observation1_holds(&BitStr::new(mask, n)));
        assert!(bad.is_none(), "separation violated at n={n}, mask {bad:?}");
    }
}

#[test]
fn scheduling_sweep() {
    let mut cases = Vec::new();
    for &eps in &[0.5, 1.0] {
        for &m in &[2usize, 3] {
            for &n in &[6usize, 9] {
                for &decades in &[0.0, 4.0] {
                    for seed in 0..4u64 {
                        cases.push((eps, m, n, decades, seed * 31 + 5));
                    }
                }
            }
        }
    }
    cases.par_iter().for_each(|&(eps, m, n, decades, seed)| {
        let norm = match seed % 3 {
            0 => Norm::P(1.0),
            1 => Norm::P(2.0),
            _ => Norm::Inf,
        };
        let spec = GeneratorSpec::new(GenKind::RandomUnrelated, n, seed)
            .machines(m)
            .decades(decades);
        let Generated::SchedUnrelated { jobs, .. } = generate(&spec).unwrap() else {
            unreachable!()
        };
        let mut tape = AdviceTape::new();
        let run = thm9_run(&jobs, m, &Objective::min_lp(norm), eps, &mut tape)
            .unwrap_or_else(|e| panic!("thm9 eps {eps} m {m} n {n} seed {seed}: {e}"));
        assert!(run.ratio() <= 1.0 + eps + 1e-9, "thm9: {}", run.ratio());
        assert_eq!(run.diagnostics.sandwich_violations, 0);
        assert_eq!(run.diagnostics.table_misses, 0);

        let spec = GeneratorSpec::new(GenKind::RandomRelated, n, seed)
            .machines(m)
            .decades(decades);
        let Generated::SchedRelated { sizes, speeds } = generate(&spec).unwrap() else {
            unreachable!()
        };
        let mut tape = AdviceTape::new();
        let run = thm10_run(&sizes, &speeds, &Objective::min_lp(norm), eps, &mut tape)
            .unwrap_or_else(|e| panic!("thm10 eps {eps} m {m} n {n} seed {seed}: {e}"));
        assert!(run.ratio() <= 1.0 + eps + 1e-9, "thm10: {}", run.ratio());
        assert_eq!(run.diagnostics.sandwich_violations, 0);

        let spec = GeneratorSpec::new(GenKind::RandomUnrelated, n, seed ^ 0xff)
            .machines(m)
            .decades(decades);
        let Generated::SchedUnrelated { jobs, .. } = generate(&spec).unwrap() else {
            unreachable!()
        };
        let mut tape = AdviceTape::new();
        let run = thm11_run(&jobs, m, &Objective::max_min_load(), eps, &mut tape)
            .unwrap_or_else(|e| panic!("thm11 eps {eps} m {m} n {n} seed {seed}: {e}"));
        assert!(run.ratio() <= 1.0 + eps + 1e-9, "thm11: {}", run.ratio());
        assert_eq!(run.diagnostics.sandwich_violations, 0);
        assert_eq!(
            run.diagnostics.counts_written + run.diagnostics.table_misses,
            run.diagnostics.important_jobs
        );
    });
}
