//! Weighted accept/reject algorithms built on exponential sparsification.
//!
//! Three oracle/algorithm pairs share the same skeleton: the oracle pins the
//! reference bucket of the optimum, tells the algorithm just enough to
//! reproduce the weight classification online, and delegates the important
//! buckets to per-bucket covering advice (or to a supplied unweighted base
//! algorithm for the best-bucket wrapper).

use crate::bitstr::BitStr;
use crate::covering::{cached_family, Cost};
use crate::problems::{
    brute_force_opt, Direction, Instance, Outcome, Payload, Request,
};
use crate::sparsify::{bucket_of, classify_weight, log_s_ceil_n2, SparsifyParams, WeightClass};
use crate::tape::{unzigzag, zigzag, AdviceTape};
use crate::{Error, Result};

/// One oracle+algorithm execution with its offline reference point.
#[derive(Debug, Clone)]
pub struct AdviceRun {
    pub outcome: Outcome,
    pub opt: Outcome,
    pub bits_read: usize,
    /// The competitive bound the underlying guarantee promises for this run.
    pub ratio_bound: f64,
    pub direction: Direction,
}

impl AdviceRun {
    /// Worst-side ratio: `ALG/OPT` for minimization, `OPT/ALG` for
    /// maximization; 1 when both sides are zero.
    pub fn ratio(&self) -> f64 {
        let (num, den) = match self.direction {
            Direction::Min => (self.outcome.score, self.opt.score),
            Direction::Max => (self.opt.score, self.outcome.score),
        };
        if num == 0.0 && den == 0.0 {
            1.0
        } else if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    }

    /// Additive slack against the promised bound; zero wherever the
    /// guarantee is strict.
    pub fn alpha(&self) -> f64 {
        let v = match self.direction {
            Direction::Min => self.outcome.score - self.ratio_bound * self.opt.score,
            Direction::Max => self.opt.score - self.ratio_bound * self.outcome.score,
        };
        v.max(0.0)
    }
}

fn require_direction(instance: &Instance, want: Direction, what: &str) -> Result<()> {
    if instance.problem.direction() != want {
        return Err(Error::Contract(format!(
            "{what} requires a {want:?} problem, got {:?}",
            instance.problem
        )));
    }
    Ok(())
}

fn require_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Contract(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    Ok(())
}

fn finalize(
    instance: &Instance,
    output: BitStr,
    opt: Outcome,
    bits_read: usize,
    ratio_bound: f64,
) -> Result<AdviceRun> {
    let outcome = crate::problems::outcome(instance, output);
    if !outcome.feasible {
        return Err(Error::Contract(format!(
            "advice algorithm produced an infeasible output {} on {:?}",
            outcome.output, instance.problem
        )));
    }
    Ok(AdviceRun {
        outcome,
        opt,
        bits_read,
        ratio_bound,
        direction: instance.problem.direction(),
    })
}

/// Per-bucket covering advice, shared by the maximization and minimization
/// sparsification algorithms.
///
/// Tape layout per bucket offset `j = 0..=threshold`: the bucket's request
/// count `n_j` self-delimited as `n_j + 1`, then (if nonempty) the covering
/// member index for the optimum's restriction to that bucket, in the family's
/// fixed index width. Each block is self-describing, so the reader needs no
/// global table of offsets.
fn write_bucket_blocks(
    instance: &Instance,
    opt_output: &BitStr,
    params: &SparsifyParams,
    c: Cost,
    direction: Direction,
    tape: &mut AdviceTape,
) -> Result<()> {
    for j in 0..=params.threshold {
        let bucket = params.m - j;
        let positions: Vec<usize> = (0..instance.n())
            .filter(|&i| bucket_of(instance.requests[i].weight, params.s) == bucket)
            .collect();
        tape.write_self_delimited(positions.len() as u64 + 1)?;
        if positions.is_empty() {
            continue;
        }
        let mut restricted = BitStr::zeros(positions.len());
        for (t, &i) in positions.iter().enumerate() {
            restricted.set(t, opt_output.get(i));
        }
        let family = cached_family(positions.len(), c, direction)?;
        let (index, _) = family.lookup_cover(&restricted)?;
        if family.index_width > 0 {
            tape.write_uint_fixed(index as u64, family.index_width)?;
        }
    }
    Ok(())
}

/// Reader side of [`write_bucket_blocks`]: per offset `j`, the covering
/// member and a consumption cursor.
fn read_bucket_blocks(
    n: usize,
    threshold: i64,
    c: Cost,
    direction: Direction,
    tape: &mut AdviceTape,
) -> Result<Vec<(Option<BitStr>, usize)>> {
    let mut blocks = Vec::with_capacity(threshold as usize + 1);
    for _ in 0..=threshold {
        let len = tape.read_self_delimited()?.saturating_sub(1) as usize;
        if len == 0 || len > n {
            // Length zero is an empty bucket; a length past the instance can
            // only come from a foreign tape, in which case the member is
            // unusable anyway and the block is treated as empty.
            blocks.push((None, 0));
            continue;
        }
        let family = cached_family(len, c, direction)?;
        let index = tape.read_uint_fixed(family.index_width) as usize;
        let member = family.members.get(index).copied();
        blocks.push((member, 0));
    }
    Ok(blocks)
}

/// Next answer bit from a bucket block; `fallback` applies when the cursor
/// runs past the member (unreachable with a matching tape).
fn consume_block(block: &mut (Option<BitStr>, usize), fallback: bool) -> bool {
    let (member, cursor) = block;
    let bit = match member {
        Some(y) if *cursor < y.len() => y.get(*cursor),
        _ => fallback,
    };
    *cursor += 1;
    bit
}

/// Maximization with arbitrary weights: strictly `(1+eps)·c`-competitive.
///
/// The oracle self-delimits `n`, then either writes the optimal output
/// verbatim (short inputs), a sentinel (empty optimum), or the index of the
/// first important request, the bucket offset that lets the algorithm derive
/// the reference bucket from that request's weight, and the per-bucket
/// covering blocks. The algorithm rejects everything before the first
/// important request, rejects unimportant and huge requests, and answers
/// important ones from the per-bucket covering members.
pub fn thm4_run(
    instance: &Instance,
    c: Cost,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<AdviceRun> {
    require_direction(instance, Direction::Max, "the weighted maximization algorithm")?;
    require_epsilon(epsilon)?;
    let opt = brute_force_opt(instance)?;
    let n = instance.n();
    let s = 1.0 + epsilon / 2.0;
    let small_n = (n as f64) < (2.0 + 2.0 * epsilon) / epsilon;

    tape.write_self_delimited(n as u64)?;
    if small_n {
        for bit in opt.output.iter() {
            tape.write_bit(bit);
        }
    } else {
        // 0-answers accept in maximization problems.
        let accepted: Vec<usize> = (0..n).filter(|&i| !opt.output.get(i)).collect();
        match accepted
            .iter()
            .map(|&i| instance.requests[i].weight)
            .fold(None::<f64>, |acc, w| Some(acc.map_or(w, |a: f64| a.max(w))))
        {
            None => tape.write_self_delimited(n as u64 + 1)?,
            Some(w_top) => {
                let params = SparsifyParams::new(epsilon, s, n, bucket_of(w_top, s))?;
                let first_important = (0..n)
                    .find(|&i| {
                        matches!(
                            classify_weight(instance.requests[i].weight, &params),
                            Ok(WeightClass::Important { .. })
                        )
                    })
                    .expect("the heaviest accepted request is important");
                tape.write_self_delimited(first_important as u64 + 1)?;
                let m_first = bucket_of(instance.requests[first_important].weight, params.s);
                tape.write_self_delimited((params.m - m_first) as u64 + 1)?;
                write_bucket_blocks(instance, &opt.output, &params, c, Direction::Max, tape)?;
            }
        }
    }

    let output = thm4_algorithm(instance, c, epsilon, tape)?;
    let bound = (1.0 + epsilon) * crate::covering::ratio_f64(c);
    finalize(instance, output, opt, tape.bits_read(), bound)
}

/// Online half of [`thm4_run`]; exposed separately so the prefix-divergence
/// fuzzer can drive it against a fixed tape.
pub fn thm4_algorithm(
    instance: &Instance,
    c: Cost,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<BitStr> {
    let n = instance.n();
    let s = 1.0 + epsilon / 2.0;
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);
    let mut output = BitStr::zeros(n);

    if (n as f64) < (2.0 + 2.0 * epsilon) / epsilon {
        for i in 0..n {
            output.set(i, tape.read_bit());
        }
        return Ok(output);
    }

    let first = tape.read_self_delimited()? as usize;
    if first == 0 || first >= n + 1 {
        // Sentinel: the optimum accepts nothing; reject everything.
        for i in 0..n {
            output.set(i, true);
        }
        return Ok(output);
    }
    let first_important = first - 1;
    let offset = tape.read_self_delimited()?.saturating_sub(1) as i64;
    let threshold = log_s_ceil_n2(s, n);
    let mut blocks = read_bucket_blocks(n, threshold, c, Direction::Max, tape)?;

    let m = bucket_of(instance.requests[first_important].weight, s) + offset;
    let params = SparsifyParams { epsilon, s, n, m, threshold };
    for i in 0..n {
        let reject = if i < first_important {
            true
        } else {
            match classify_weight(instance.requests[i].weight, &params)? {
                WeightClass::Unimportant | WeightClass::Huge => true,
                WeightClass::Important { offset: j } => consume_block(&mut blocks[j as usize], true),
            }
        };
        output.set(i, reject);
    }
    Ok(output)
}

/// Minimization with bounded weight spread: `(1+eps)·c`-competitive when all
/// weights lie in `[wmin, wmax]`. The reference-bucket offset is taken from
/// the very first request (its bucket distance to the optimum's top bucket is
/// bounded by `log_s(wmax/wmin)`), so the algorithm can classify from round
/// one: huge requests are rejected, unimportant ones accepted, important ones
/// answered by per-bucket covering.
pub fn thm5_run(
    instance: &Instance,
    c: Cost,
    epsilon: f64,
    wmin: f64,
    wmax: f64,
    tape: &mut AdviceTape,
) -> Result<AdviceRun> {
    require_direction(instance, Direction::Min, "the bounded-ratio minimization algorithm")?;
    require_epsilon(epsilon)?;
    if !(wmin > 0.0 && wmin <= wmax) {
        return Err(Error::Contract(format!("bad weight range [{wmin}, {wmax}]")));
    }
    for r in &instance.requests {
        if r.weight < wmin || r.weight > wmax {
            return Err(Error::Contract(format!(
                "weight {} outside the declared range [{wmin}, {wmax}]",
                r.weight
            )));
        }
    }
    let opt = brute_force_opt(instance)?;
    let n = instance.n();
    let s = 1.0 + epsilon / 2.0;
    let small_n = (n as f64) < (2.0 + epsilon) / epsilon;

    tape.write_self_delimited(n as u64)?;
    if small_n {
        for bit in opt.output.iter() {
            tape.write_bit(bit);
        }
    } else {
        // 1-answers accept in minimization problems.
        let accepted: Vec<usize> = (0..n).filter(|&i| opt.output.get(i)).collect();
        match accepted
            .iter()
            .map(|&i| instance.requests[i].weight)
            .fold(None::<f64>, |acc, w| Some(acc.map_or(w, |a: f64| a.max(w))))
        {
            None => tape.write_bit(true), // optimum accepts nothing
            Some(w_top) => {
                tape.write_bit(false);
                let params = SparsifyParams::new(epsilon, s, n, bucket_of(w_top, s))?;
                let m_first = bucket_of(instance.requests[0].weight, s);
                tape.write_self_delimited(zigzag(params.m - m_first) + 1)?;
                write_bucket_blocks(instance, &opt.output, &params, c, Direction::Min, tape)?;
            }
        }
    }

    let output = thm5_algorithm(instance, c, epsilon, tape)?;
    let bound = (1.0 + epsilon) * crate::covering::ratio_f64(c);
    finalize(instance, output, opt, tape.bits_read(), bound)
}

/// Online half of [`thm5_run`].
pub fn thm5_algorithm(
    instance: &Instance,
    c: Cost,
    epsilon: f64,
    tape: &mut AdviceTape,
) -> Result<BitStr> {
    let n = instance.n();
    let s = 1.0 + epsilon / 2.0;
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);
    let mut output = BitStr::zeros(n);

    if (n as f64) < (2.0 + epsilon) / epsilon {
        for i in 0..n {
            output.set(i, tape.read_bit());
        }
        return Ok(output);
    }

    if tape.read_bit() {
        return Ok(output); // optimum empty: reject everything
    }
    let offset = unzigzag(tape.read_self_delimited()?.saturating_sub(1));
    let threshold = log_s_ceil_n2(s, n);
    let mut blocks = read_bucket_blocks(n, threshold, c, Direction::Min, tape)?;

    let m = bucket_of(instance.requests[0].weight, s) + offset;
    let params = SparsifyParams { epsilon, s, n, m, threshold };
    for i in 0..n {
        let accept = match classify_weight(instance.requests[i].weight, &params)? {
            WeightClass::Unimportant => true,
            WeightClass::Huge => false,
            WeightClass::Important { offset: j } => consume_block(&mut blocks[j as usize], false),
        };
        output.set(i, accept);
    }
    Ok(output)
}

/// An unweighted strictly `c`-competitive base algorithm the best-bucket
/// wrapper can delegate one bucket's subsequence to.
pub trait UnweightedBase {
    fn competitive_ratio(&self) -> f64;
    fn advice_bits(&self, n: usize) -> usize;
    /// Oracle-side advice for the subsequence (none for advice-free bases).
    fn write_advice(&self, _subsequence: &[&Request], _tape: &mut AdviceTape) -> Result<()> {
        Ok(())
    }
    fn start(&self) -> Box<dyn BaseRun>;
}

pub trait BaseRun {
    fn accept(&mut self, payload: &Payload, tape: &mut AdviceTape) -> bool;
}

/// Advice-free greedy matching: accept an edge iff it shares no endpoint with
/// an already accepted edge. Strictly 2-competitive.
pub struct GreedyMatching;

impl UnweightedBase for GreedyMatching {
    fn competitive_ratio(&self) -> f64 {
        2.0
    }

    fn advice_bits(&self, _n: usize) -> usize {
        0
    }

    fn start(&self) -> Box<dyn BaseRun> {
        Box::new(GreedyMatchingRun { used: Vec::new() })
    }
}

struct GreedyMatchingRun {
    used: Vec<u32>,
}

impl BaseRun for GreedyMatchingRun {
    fn accept(&mut self, payload: &Payload, _tape: &mut AdviceTape) -> bool {
        let Payload::Edge(u, v) = *payload else { return false };
        if self.used.contains(&u) || self.used.contains(&v) {
            return false;
        }
        self.used.push(u);
        self.used.push(v);
        true
    }
}

/// Best-bucket wrapper: `O(c·log n)`-competitive from any unweighted
/// `c`-competitive base using only `O(log n)` extra advice. Sparsification is
/// run at fixed `eps = 1/2` (bucket base `3/2`); the oracle names the first
/// request of the bucket contributing the most weight to the optimum, and the
/// algorithm plays the base on exactly that bucket's subsequence.
pub fn thm6_run(
    instance: &Instance,
    base: &dyn UnweightedBase,
    tape: &mut AdviceTape,
) -> Result<AdviceRun> {
    require_direction(instance, Direction::Max, "the best-bucket wrapper")?;
    let opt = brute_force_opt(instance)?;
    let n = instance.n();
    let s = 1.5;
    let threshold = log_s_ceil_n2(s, n);

    tape.write_self_delimited(n as u64)?;
    let accepted: Vec<usize> = (0..n).filter(|&i| !opt.output.get(i)).collect();
    if accepted.is_empty() {
        tape.write_self_delimited(n as u64 + 1)?;
    } else {
        let w_top = accepted
            .iter()
            .map(|&i| instance.requests[i].weight)
            .fold(f64::MIN, f64::max);
        let m = bucket_of(w_top, s);
        // Weight contributed to the optimum per important bucket; lowest
        // bucket index wins ties.
        let mut best: Option<(i64, f64)> = None;
        for k in (m - threshold)..=m {
            let contribution: f64 = accepted
                .iter()
                .filter(|&&i| bucket_of(instance.requests[i].weight, s) == k)
                .map(|&i| instance.requests[i].weight)
                .sum();
            if contribution > 0.0 && best.map_or(true, |(_, b)| contribution > b) {
                best = Some((k, contribution));
            }
        }
        let (k_best, _) = best.expect("a nonempty optimum contributes to some important bucket");
        let first_in_bucket = (0..n)
            .find(|&i| bucket_of(instance.requests[i].weight, s) == k_best)
            .expect("bucket contributing to the optimum is nonempty");
        tape.write_self_delimited(first_in_bucket as u64 + 1)?;
        let sub: Vec<&Request> = instance
            .requests
            .iter()
            .filter(|r| bucket_of(r.weight, s) == k_best)
            .collect();
        base.write_advice(&sub, tape)?;
    }

    let output = thm6_algorithm(instance, base, tape)?;
    let bound = if n > 1 {
        base.competitive_ratio() * 1.5 * (threshold + 1) as f64 / (1.0 - 1.0 / n as f64)
    } else {
        1.0
    };
    finalize(instance, output, opt, tape.bits_read(), bound)
}

/// Online half of [`thm6_run`].
pub fn thm6_algorithm(
    instance: &Instance,
    base: &dyn UnweightedBase,
    tape: &mut AdviceTape,
) -> Result<BitStr> {
    let n = instance.n();
    let s = 1.5;
    let n_read = tape.read_self_delimited()? as usize;
    debug_assert_eq!(n_read, n);
    let mut output = BitStr::zeros(n);
    for i in 0..n {
        output.set(i, true);
    }

    let first = tape.read_self_delimited()? as usize;
    if first == 0 || first >= n + 1 {
        return Ok(output);
    }
    let first_in_bucket = first - 1;
    let k = bucket_of(instance.requests[first_in_bucket].weight, s);
    let mut run = base.start();
    for i in first_in_bucket..n {
        if bucket_of(instance.requests[i].weight, s) == k
            && run.accept(&instance.requests[i].payload, tape)
        {
            output.set(i, false);
        }
    }
    Ok(output)
}
