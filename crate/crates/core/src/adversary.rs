//! Lower-bound constructions: the collision adversary for weighted string
//! guessing, the geometric prefix family for at-most-one-accept structures,
//! and the probabilistic star adversary with its exact expectations.
//!
//! Adversary weights are `a^q` for astronomically large bases `a` (up to
//! `2^2048`), so they are never materialized: the dyadic exponents `q` are
//! carried exactly and every ratio is reported in log2 space.

use num::rational::Ratio;
use serde::Serialize;

use crate::bitstr::BitStr;
use crate::problems::{build, Instance, Problem, Request};
use crate::rng::SplitMix64;
use crate::tape::AdviceTape;
use crate::{Error, Result};

/// Dyadic exponent `num / 2^log2_den`, compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicExp {
    pub num: i64,
    pub log2_den: u32,
}

impl DyadicExp {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.log2_den) as f64
    }

    /// `log2(a^q) = log2(a) · q`.
    pub fn log2_weight(self, log2_a: f64) -> f64 {
        log2_a * self.to_f64()
    }
}

impl PartialOrd for DyadicExp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl DyadicExp {
    pub fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        let d = self.log2_den.max(other.log2_den);
        let a = self.num << (d - self.log2_den);
        let b = other.num << (d - other.log2_den);
        a.cmp(&b)
    }
}

/// The adversary's weight exponents for input `x`: `q_1 = 1/2` and
/// `q_i = q_{i-1} ± 2^{-i}`, the sign following the *previous* round's
/// answer, so a weight never leaks anything about the future.
pub fn thm1_weights(x: &BitStr) -> Vec<DyadicExp> {
    let n = x.len() as u32;
    assert!((1..=62).contains(&n), "exponent denominators are capped at 2^62");
    // Everything lives over the common denominator 2^n, where one unit is
    // exactly the 2^{-n} separation the collision argument needs.
    let mut num = 1i64 << (n - 1);
    let mut out = Vec::with_capacity(n as usize);
    out.push(DyadicExp { num, log2_den: n });
    for i in 2..=n {
        let step = 1i64 << (n - i);
        num += if x.get(i as usize - 2) { step } else { -step };
        out.push(DyadicExp { num, log2_den: n });
    }
    out
}

/// Separation property of the adversary weights: after a 0 at position `i`,
/// every later exponent sits at least `2^{-n}` below `q_i`; after a 1, at
/// least `2^{-n}` above. Returns false on the first violation.
pub fn observation1_holds(x: &BitStr) -> bool {
    let q = thm1_weights(x);
    let n = x.len();
    for i in 0..n {
        for j in i + 1..n {
            // One denominator unit equals 2^{-n} exactly.
            if x.get(i) {
                if q[j].num < q[i].num + 1 {
                    return false;
                }
            } else if q[j].num > q[i].num - 1 {
                return false;
            }
        }
    }
    true
}

/// An oracle/algorithm pair for weighted string guessing under test.
///
/// The verifier treats the pair as a black box: the oracle sees the whole
/// hidden string, the online side sees only log2-weights, its own tape reads,
/// and the revealed history.
pub trait GuessingPair {
    /// Declared advice budget (maximum bits the online side reads) at length `n`.
    fn advice_budget(&self, n: usize) -> usize;
    fn write_advice(&self, x: &BitStr, tape: &mut AdviceTape) -> Result<()>;
    fn online(&self, n: usize) -> Box<dyn GuessingAlg>;
}

pub trait GuessingAlg {
    /// Answer the current round; the request reveals only its log2-weight.
    fn answer(&mut self, log2_weight: f64, tape: &mut AdviceTape) -> bool;
    /// The correct bit for the round just answered.
    fn reveal(&mut self, bit: bool);
}

/// Ratio evidence extracted from a collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioBound {
    /// The algorithm's output is infeasible on the witness input.
    Infeasible,
    /// The algorithm earns nothing while the optimum is positive.
    Unbounded,
    /// `log2` of a lower bound on the worst-case ratio.
    Log2(f64),
}

impl Serialize for RatioBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RatioBound::Infeasible => s.serialize_str("infeasible"),
            RatioBound::Unbounded => s.serialize_str("unbounded"),
            RatioBound::Log2(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundWitness {
    pub x: BitStr,
    pub colliding_x: BitStr,
    pub log2_ratio_lower_bound: RatioBound,
}

#[derive(Debug, Clone)]
pub enum VerifyOutcome<W> {
    Witness(W),
    /// No two inputs shared an advice class (expected whenever the budget
    /// reaches the information-theoretic requirement).
    Inapplicable { classes: usize },
}

fn log2_sum_exp(vals: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = vals.collect();
    let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    mx + vals.iter().map(|v| (v - mx).exp2()).sum::<f64>().log2()
}

/// Consumed-bit advice class: the prefix of the written tape the algorithm
/// actually read, zero-padded to the budget (the infinite-tape rule).
fn advice_class(tape: &AdviceTape, consumed: usize, budget: usize) -> Vec<bool> {
    (0..budget)
        .map(|i| i < consumed && tape.written_bit(i))
        .collect()
}

/// Runs the pair on every input with at least one 1, groups inputs by advice
/// class, and turns the first collision into a ratio witness: replaying both
/// colliding inputs to their first differing round shows the shared guess is
/// wrong for one of them, costing either feasibility (a 0 on a 1) or a weight
/// `2^{-n}`-separated above everything the optimum pays.
pub fn thm1_verify(
    pair: &dyn GuessingPair,
    n: usize,
    log2_a: f64,
) -> Result<VerifyOutcome<LowerBoundWitness>> {
    if n == 0 || n > 20 {
        return Err(Error::Resource(format!("verifier enumerates 2^n inputs; n={n} unsupported")));
    }
    if !(log2_a > 0.0) {
        return Err(Error::Contract("the weight base must exceed 1".into()));
    }
    let budget = pair.advice_budget(n);

    struct RunRecord {
        x: BitStr,
        output: BitStr,
        class: Vec<bool>,
    }
    let mut runs: Vec<RunRecord> = Vec::with_capacity((1 << n) - 1);
    for mask in 1u32..1 << n {
        let x = BitStr::new(mask, n);
        let q = thm1_weights(&x);
        let mut tape = AdviceTape::new();
        pair.write_advice(&x, &mut tape)?;
        let mut alg = pair.online(n);
        let mut output = BitStr::zeros(n);
        for i in 0..n {
            output.set(i, alg.answer(q[i].log2_weight(log2_a), &mut tape));
            alg.reveal(x.get(i));
        }
        let consumed = tape.bits_read();
        if consumed > budget {
            return Err(Error::Contract(format!(
                "pair read {consumed} bits on {x}, over its declared budget {budget}"
            )));
        }
        runs.push(RunRecord { x, output, class: advice_class(&tape, consumed, budget) });
    }

    let mut classes: std::collections::HashMap<Vec<bool>, usize> = std::collections::HashMap::new();
    let mut collision: Option<(usize, usize)> = None;
    for (idx, run) in runs.iter().enumerate() {
        if let Some(&prev) = classes.get(&run.class) {
            collision = Some((prev, idx));
            break;
        }
        classes.insert(run.class.clone(), idx);
    }
    let Some((ia, ib)) = collision else {
        return Ok(VerifyOutcome::Inapplicable { classes: classes.len() });
    };
    let (ra, rb) = (&runs[ia], &runs[ib]);
    let d = (0..n)
        .find(|&i| ra.x.get(i) != rb.x.get(i))
        .expect("distinct inputs differ somewhere");
    if ra.output.get(d) != rb.output.get(d) {
        return Err(Error::Contract(
            "pair answered a shared-class prefix differently; it is not deterministic".into(),
        ));
    }
    let guess = ra.output.get(d);
    // The erring input: guessing 0 on a 1 is infeasible; guessing 1 on a 0
    // pays a weight the optimum provably undercuts by a^{2^{-n}} / n.
    let (err_run, other) = if ra.x.get(d) != guess { (ra, rb) } else { (rb, ra) };
    let bound = if !guess {
        RatioBound::Infeasible
    } else {
        let q = thm1_weights(&err_run.x);
        let feasible = err_run.x.dominated_by(&err_run.output);
        if !feasible {
            RatioBound::Infeasible
        } else {
            let log2_opt = log2_sum_exp(
                (0..n).filter(|&i| err_run.x.get(i)).map(|i| q[i].log2_weight(log2_a)),
            );
            RatioBound::Log2(q[d].log2_weight(log2_a) - log2_opt)
        }
    };
    Ok(VerifyOutcome::Witness(LowerBoundWitness {
        x: err_run.x,
        colliding_x: other.x,
        log2_ratio_lower_bound: bound,
    }))
}

// ---------------------------------------------------------------------------
// Built-in guessing pairs.
// ---------------------------------------------------------------------------

/// Zero-advice baseline that always answers 0.
pub struct GuessZero;

impl GuessingPair for GuessZero {
    fn advice_budget(&self, _n: usize) -> usize {
        0
    }

    fn write_advice(&self, _x: &BitStr, _tape: &mut AdviceTape) -> Result<()> {
        Ok(())
    }

    fn online(&self, _n: usize) -> Box<dyn GuessingAlg> {
        struct Zero;
        impl GuessingAlg for Zero {
            fn answer(&mut self, _w: f64, _tape: &mut AdviceTape) -> bool {
                false
            }
            fn reveal(&mut self, _bit: bool) {}
        }
        Box::new(Zero)
    }
}

/// Covering-advice guesser with a hard budget cap: the oracle writes the
/// covering index of the hidden string; the algorithm plays the member.
pub struct CoveringCapped {
    pub c: crate::covering::Cost,
    pub cap: usize,
}

impl GuessingPair for CoveringCapped {
    fn advice_budget(&self, n: usize) -> usize {
        let width = crate::covering::cached_family(n, self.c, crate::problems::Direction::Min)
            .map(|f| f.index_width)
            .unwrap_or(0);
        assert!(width <= self.cap, "covering family needs {width} bits, over the {} cap", self.cap);
        width
    }

    fn write_advice(&self, x: &BitStr, tape: &mut AdviceTape) -> Result<()> {
        let family =
            crate::covering::cached_family(x.len(), self.c, crate::problems::Direction::Min)?;
        let (index, _) = family.lookup_cover(x)?;
        if family.index_width > 0 {
            tape.write_uint_fixed(index as u64, family.index_width)?;
        }
        Ok(())
    }

    fn online(&self, n: usize) -> Box<dyn GuessingAlg> {
        struct Run {
            n: usize,
            c: crate::covering::Cost,
            round: usize,
            member: Option<BitStr>,
        }
        impl GuessingAlg for Run {
            fn answer(&mut self, _w: f64, tape: &mut AdviceTape) -> bool {
                if self.member.is_none() {
                    let family =
                        crate::covering::cached_family(self.n, self.c, crate::problems::Direction::Min)
                            .expect("family exists");
                    let index = tape.read_uint_fixed(family.index_width) as usize;
                    self.member =
                        Some(family.members.get(index).copied().unwrap_or(BitStr::zeros(self.n)));
                }
                let bit = self.member.unwrap().get(self.round);
                self.round += 1;
                bit
            }
            fn reveal(&mut self, _bit: bool) {}
        }
        Box::new(Run { n, c: self.c, round: 0, member: None })
    }
}

/// Full-information baseline: the oracle writes the hidden string verbatim
/// and the algorithm echoes it bit by bit.
pub struct FullAdvice;

impl GuessingPair for FullAdvice {
    fn advice_budget(&self, n: usize) -> usize {
        n
    }

    fn write_advice(&self, x: &BitStr, tape: &mut AdviceTape) -> Result<()> {
        for bit in x.iter() {
            tape.write_bit(bit);
        }
        Ok(())
    }

    fn online(&self, _n: usize) -> Box<dyn GuessingAlg> {
        struct Echo;
        impl GuessingAlg for Echo {
            fn answer(&mut self, _w: f64, tape: &mut AdviceTape) -> bool {
                tape.read_bit()
            }
            fn reveal(&mut self, _bit: bool) {}
        }
        Box::new(Echo)
    }
}

// ---------------------------------------------------------------------------
// Geometric prefix family.
// ---------------------------------------------------------------------------

/// The nested instances `sigma_1 ... sigma_n` on a structure where every
/// feasible output accepts at most one request, with weight `f^i` at
/// position `i`. Each instance extends the previous one by a single request.
pub fn thm7_generate(problem: Problem, n: usize, f_value: f64) -> Result<Vec<Instance>> {
    if !(f_value > 1.0) {
        return Err(Error::Contract("the weight ratio must exceed 1".into()));
    }
    if n == 0 || n > crate::bitstr::MAX_LEN {
        return Err(Error::Resource(format!("prefix family length {n} unsupported")));
    }
    let weights: Vec<f64> = (1..=n).map(|i| f_value.powi(i as i32)).collect();
    let full: Instance = match problem {
        // A clique admits one acceptance.
        Problem::IndependentSet => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            build::vertex_arrival(Problem::IndependentSet, n, &edges, &weights)
        }
        // An edgeless graph admits a clique of size one.
        Problem::Clique => build::vertex_arrival(Problem::Clique, n, &[], &weights),
        // A star: all edges share the hub.
        Problem::Matching => {
            let edges: Vec<(u32, u32)> = (1..=n as u32).map(|i| (0, i)).collect();
            build::matching(&edges, &weights)
        }
        // Overlapping windows of length n on a 2n-vertex path.
        Problem::DisjointPath => {
            let spans: Vec<(u32, u32)> = (1..=n as u32).map(|i| (i, i + n as u32)).collect();
            build::disjoint_path(2 * n as u32, &spans, &weights)
        }
        other => {
            return Err(Error::Contract(format!(
                "no at-most-one-accept structure for {other:?}"
            )))
        }
    };
    Ok((1..=n)
        .map(|i| Instance {
            problem: full.problem,
            universe_size: full.universe_size,
            path_length: full.path_length,
            requests: full.requests[..i].to_vec(),
        })
        .collect())
}

/// A maximization pair under test on the prefix family.
pub trait PrefixAdvicePair {
    /// Budget given the longest prefix length.
    fn advice_budget(&self, n: usize) -> usize;
    fn write_advice(&self, instance: &Instance, tape: &mut AdviceTape) -> Result<()>;
    fn online(&self) -> Box<dyn PrefixAlg>;
}

pub trait PrefixAlg {
    fn accept(&mut self, request: &Request, tape: &mut AdviceTape) -> bool;
}

#[derive(Debug, Clone, Serialize)]
pub struct PrefixWitness {
    pub shorter_prefix: usize,
    pub longer_prefix: usize,
    pub log2_ratio_lower_bound: RatioBound,
}

/// Pigeonhole verifier over the prefix family: two prefix lengths sharing an
/// advice class force the algorithm to earn at most the shorter optimum on
/// the longer input, a multiplicative `f^(n2-n1) >= f` loss.
pub fn thm7_verify(
    pair: &dyn PrefixAdvicePair,
    problem: Problem,
    n: usize,
    f_value: f64,
) -> Result<VerifyOutcome<PrefixWitness>> {
    let instances = thm7_generate(problem, n, f_value)?;
    let budget = pair.advice_budget(n);

    let mut profits = Vec::with_capacity(n);
    let mut keys: Vec<Vec<bool>> = Vec::with_capacity(n);
    for inst in &instances {
        let mut tape = AdviceTape::new();
        pair.write_advice(inst, &mut tape)?;
        let mut alg = pair.online();
        let mut output = BitStr::zeros(inst.n());
        for (i, r) in inst.requests.iter().enumerate() {
            // Maximization output convention: 0 accepts.
            output.set(i, !alg.accept(r, &mut tape));
        }
        let out = crate::problems::outcome(inst, output);
        if !out.feasible {
            return Err(Error::Contract(format!(
                "pair produced an infeasible output on the {}-prefix",
                inst.n()
            )));
        }
        let consumed = tape.bits_read();
        if consumed > budget {
            return Err(Error::Contract(format!(
                "pair read {consumed} bits, over its declared budget {budget}"
            )));
        }
        profits.push(out.score);
        keys.push(advice_class(&tape, consumed, budget));
    }

    let mut classes: std::collections::HashMap<Vec<bool>, usize> = std::collections::HashMap::new();
    for (idx, key) in keys.iter().enumerate() {
        if let Some(&prev) = classes.get(key) {
            let (n1, n2) = (prev + 1, idx + 1);
            let bound = if profits[prev] == 0.0 {
                RatioBound::Unbounded
            } else {
                let opt2 = (n2 as f64) * f_value.log2();
                RatioBound::Log2(opt2 - profits[idx].log2())
            };
            return Ok(VerifyOutcome::Witness(PrefixWitness {
                shorter_prefix: n1,
                longer_prefix: n2,
                log2_ratio_lower_bound: bound,
            }));
        }
        classes.insert(key.clone(), idx);
    }
    Ok(VerifyOutcome::Inapplicable { classes: classes.len() })
}

/// Zero-advice baseline: accept the first request.
pub struct AcceptFirst;

impl PrefixAdvicePair for AcceptFirst {
    fn advice_budget(&self, _n: usize) -> usize {
        0
    }

    fn write_advice(&self, _instance: &Instance, _tape: &mut AdviceTape) -> Result<()> {
        Ok(())
    }

    fn online(&self) -> Box<dyn PrefixAlg> {
        struct First(bool);
        impl PrefixAlg for First {
            fn accept(&mut self, _r: &Request, _t: &mut AdviceTape) -> bool {
                !std::mem::replace(&mut self.0, true)
            }
        }
        Box::new(First(false))
    }
}

/// Best-effort pair on a fixed budget: the oracle writes the optimal (last)
/// request index modulo `2^bits`; the algorithm accepts the first request
/// whose index matches that residue.
pub struct IndexModulo {
    pub bits: usize,
}

impl PrefixAdvicePair for IndexModulo {
    fn advice_budget(&self, _n: usize) -> usize {
        self.bits
    }

    fn write_advice(&self, instance: &Instance, tape: &mut AdviceTape) -> Result<()> {
        if self.bits > 0 {
            let v = (instance.n() as u64 - 1) % (1 << self.bits);
            tape.write_uint_fixed(v, self.bits)?;
        }
        Ok(())
    }

    fn online(&self) -> Box<dyn PrefixAlg> {
        struct Run {
            bits: usize,
            residue: Option<u64>,
            index: u64,
            done: bool,
        }
        impl PrefixAlg for Run {
            fn accept(&mut self, _r: &Request, tape: &mut AdviceTape) -> bool {
                let residue = *self
                    .residue
                    .get_or_insert_with(|| tape.read_uint_fixed(self.bits));
                let here = self.index;
                self.index += 1;
                let modulus = 1u64 << self.bits;
                if !self.done && here % modulus == residue {
                    self.done = true;
                    true
                } else {
                    false
                }
            }
        }
        Box::new(Run { bits: self.bits, residue: None, index: 0, done: false })
    }
}

// ---------------------------------------------------------------------------
// Probabilistic star adversary.
// ---------------------------------------------------------------------------

pub type Exact = Ratio<i64>;

/// Exact expectations of the star adversary at ratio `c`: the edge weights
/// are `2^i`, the round count `X` satisfies `Pr(X=j) = 2^-j` for `j < k` and
/// `Pr(X=k) = 2^-(k-1)` with `k = 2c-1`. Every fixed single-accept strategy
/// earns 2 in expectation while the optimum earns `k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm8Expectations {
    pub k: u32,
    pub e_opt: Exact,
    /// `E[DET_j]` for each strategy `j = 1..=k` (accept edge `j` if offered).
    pub e_det: Vec<Exact>,
}

pub fn thm8_expectations(c: crate::covering::Cost) -> Result<Thm8Expectations> {
    let two_c = c * Ratio::from_integer(2u64);
    if !two_c.is_integer() || two_c < Ratio::from_integer(2u64) {
        return Err(Error::Contract(format!(
            "2c-1 must be a positive integer; c={c} is neither integer nor half-integer >= 1"
        )));
    }
    let k = (two_c.to_integer() - 1) as u32;
    if k > 40 {
        return Err(Error::Resource("weights 2^k overflow exact arithmetic".into()));
    }
    let pr = |j: u32| -> Exact {
        if j < k {
            Ratio::new(1, 1i64 << j)
        } else {
            Ratio::new(1, 1i64 << (k - 1))
        }
    };
    let e_opt: Exact = (1..=k).map(|j| pr(j) * Ratio::from_integer(1i64 << j)).sum();
    let e_det: Vec<Exact> = (1..=k)
        .map(|j| {
            let pr_at_least: Exact = (j..=k).map(pr).sum();
            pr_at_least * Ratio::from_integer(1i64 << j)
        })
        .collect();
    Ok(Thm8Expectations { k, e_opt, e_det })
}

#[derive(Debug, Clone)]
pub struct Thm8Sample {
    pub samples: u64,
    pub mean_opt: f64,
    pub se_opt: f64,
    /// Mean and standard error per fixed strategy.
    pub det: Vec<(f64, f64)>,
}

/// Monte-Carlo check of the exact expectations.
pub fn thm8_sample(c: crate::covering::Cost, samples: u64, seed: u64) -> Result<Thm8Sample> {
    let exact = thm8_expectations(c)?;
    let k = exact.k;
    let mut rng = SplitMix64::new(seed);
    let mut opt_sum = 0.0;
    let mut opt_sq = 0.0;
    let mut det_sum = vec![0.0f64; k as usize];
    let mut det_sq = vec![0.0f64; k as usize];
    for _ in 0..samples {
        let mut x = 1u32;
        while x < k && rng.next_bool(0.5) {
            x += 1;
        }
        let opt = (1u64 << x) as f64;
        opt_sum += opt;
        opt_sq += opt * opt;
        for j in 1..=k {
            let det = if x >= j { (1u64 << j) as f64 } else { 0.0 };
            det_sum[j as usize - 1] += det;
            det_sq[j as usize - 1] += det * det;
        }
    }
    let n = samples as f64;
    let stats = |sum: f64, sq: f64| -> (f64, f64) {
        let mean = sum / n;
        let var = (sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    };
    let (mean_opt, se_opt) = stats(opt_sum, opt_sq);
    Ok(Thm8Sample {
        samples,
        mean_opt,
        se_opt,
        det: det_sum
            .iter()
            .zip(&det_sq)
            .map(|(&s, &q)| stats(s, q))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::cost;

    #[test]
    fn thm1_weights_examples() {
        // x = 101 gives q = (1/2, 3/4, 5/8); with a = 256 that is 16, 64, 32.
        let q = thm1_weights(&"101".parse().unwrap());
        assert_eq!(q[0].to_f64(), 0.5);
        assert_eq!(q[1].to_f64(), 0.75);
        assert_eq!(q[2].to_f64(), 0.625);
        let w: Vec<f64> = q.iter().map(|e| e.log2_weight(8.0).exp2()).collect();
        assert_eq!(w, vec![16.0, 64.0, 32.0]);
    }

    #[test]
    fn all_zero_weights_strictly_decrease() {
        let q = thm1_weights(&"00000".parse().unwrap());
        assert!(q.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn observation1_exhaustive_small() {
        for n in 1..=10usize {
            for x in BitStr::all(n) {
                assert!(observation1_holds(&x), "x={x}");
            }
        }
    }

    #[test]
    fn weight_causality() {
        // q[j] depends only on bits before j: flipping any later bit (or bit
        // j itself) leaves the exponent prefix q[..=j] unchanged.
        let base: BitStr = "0110101".parse().unwrap();
        let q = thm1_weights(&base);
        for j in 0..base.len() {
            for p in j..base.len() {
                let mut flipped = base;
                flipped.set(p, !base.get(p));
                let q2 = thm1_weights(&flipped);
                assert_eq!(q[..=j], q2[..=j], "flip at {p} changed q[..={j}]");
            }
        }
    }

    #[test]
    fn guess_zero_yields_infeasible_witness() {
        let outcome = thm1_verify(&GuessZero, 4, 16.0).unwrap();
        match outcome {
            VerifyOutcome::Witness(w) => {
                assert!(matches!(w.log2_ratio_lower_bound, RatioBound::Infeasible));
            }
            _ => panic!("zero advice must collide"),
        }
    }

    #[test]
    fn full_advice_is_inapplicable() {
        match thm1_verify(&FullAdvice, 6, 16.0).unwrap() {
            VerifyOutcome::Inapplicable { classes } => assert_eq!(classes, (1 << 6) - 1),
            _ => panic!("distinct verbatim advice cannot collide"),
        }
    }

    #[test]
    fn covering_pair_collides_with_strong_ratio() {
        let pair = CoveringCapped { c: cost(2, 1), cap: 7 };
        match thm1_verify(&pair, 8, 2048.0).unwrap() {
            VerifyOutcome::Witness(w) => match w.log2_ratio_lower_bound {
                RatioBound::Log2(b) => assert!(b >= 5.0, "bound {b}"),
                RatioBound::Infeasible => panic!("covering outputs are feasible"),
                RatioBound::Unbounded => panic!("unexpected marker"),
            },
            _ => panic!("7-bit budget on 255 inputs must collide"),
        }
    }

    #[test]
    fn thm7_prefix_structure() {
        for problem in [
            Problem::IndependentSet,
            Problem::Clique,
            Problem::Matching,
            Problem::DisjointPath,
        ] {
            let family = thm7_generate(problem, 5, 10.0).unwrap();
            assert_eq!(family.len(), 5);
            for i in 1..family.len() {
                assert_eq!(
                    family[i].requests[..i],
                    family[i - 1].requests[..],
                    "{problem:?} prefix {i}"
                );
            }
            // Every feasible output accepts at most one request, so the
            // optimum is the heaviest request.
            for (i, inst) in family.iter().enumerate() {
                let opt = crate::problems::brute_force_opt(inst).unwrap();
                assert_eq!(opt.score, 10f64.powi(i as i32 + 1), "{problem:?} prefix {}", i + 1);
            }
        }
    }

    #[test]
    fn thm7_verifier_on_accept_first() {
        match thm7_verify(&AcceptFirst, Problem::Matching, 6, 10.0).unwrap() {
            VerifyOutcome::Witness(w) => match w.log2_ratio_lower_bound {
                RatioBound::Log2(b) => assert!(b >= 10f64.log2() - 1e-9),
                _ => panic!("accept-first earns a positive profit"),
            },
            _ => panic!("zero advice must collide"),
        }
    }

    #[test]
    fn thm8_exact_examples() {
        let e = thm8_expectations(cost(2, 1)).unwrap();
        assert_eq!(e.k, 3);
        assert_eq!(e.e_opt, Ratio::from_integer(4));
        assert_eq!(e.e_det, vec![Ratio::from_integer(2); 3]);

        let e = thm8_expectations(cost(1, 1)).unwrap();
        assert_eq!(e.k, 1);
        assert_eq!(e.e_opt, Ratio::from_integer(2));
        assert_eq!(e.e_det, vec![Ratio::from_integer(2)]);

        assert!(thm8_expectations(cost(5, 4)).is_err());
    }

    #[test]
    fn thm8_monte_carlo_matches() {
        let exact = thm8_expectations(cost(3, 1)).unwrap();
        let sample = thm8_sample(cost(3, 1), 200_000, 42).unwrap();
        let e_opt = *exact.e_opt.numer() as f64 / *exact.e_opt.denom() as f64;
        assert!((sample.mean_opt - e_opt).abs() <= 3.0 * sample.se_opt);
        for (j, &(mean, se)) in sample.det.iter().enumerate() {
            assert!((mean - 2.0).abs() <= 3.0 * se, "strategy {}", j + 1);
        }
    }
}
