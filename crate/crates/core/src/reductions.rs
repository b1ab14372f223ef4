//! Length-preserving reductions from weighted string guessing to the other
//! weighted minimization problems. Each reduction transforms an n-round
//! guessing instance into an n-request target instance (weights carried over
//! request by request) and comes with a back-map that turns any feasible
//! target output plus a few side-advice bits into a feasible guessing output
//! with cost at most `ALG2 + OPT1` — or exactly `OPT1` in degenerate corners.

use crate::bitstr::BitStr;
use crate::problems::{brute_force_opt, build, check_feasible, Instance, Outcome, Problem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionTarget {
    VertexCover,
    CycleFinding,
    DominatingSet,
    SetCover,
}

impl ReductionTarget {
    pub fn problem(&self) -> Problem {
        match self {
            ReductionTarget::VertexCover => Problem::VertexCover,
            ReductionTarget::CycleFinding => Problem::CycleFinding,
            ReductionTarget::DominatingSet => Problem::DominatingSet,
            ReductionTarget::SetCover => Problem::SetCover,
        }
    }
}

/// How a target-problem output is mapped back to a guessing output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackMap {
    /// Copy the target's accepted set; the side advice optionally names the
    /// single clique vertex the target algorithm rejected, which the source
    /// answers 1 on anyway. Layout: 1 flag bit, then an index if flagged.
    VertexCover,
    /// With at most two 1s the graph is acyclic and the source answers
    /// directly from the side advice (flag bit, 2-bit count, then the listed
    /// 1-indices); otherwise copy the accepted set.
    CycleFinding { degenerate_ones: Option<Vec<usize>> },
    /// All-zero inputs answer 0 everywhere (flag bit). Otherwise one bit says
    /// whether the hub vertex was accepted; if not, the side advice names an
    /// accepted 0-vertex to drop and the hub index to add.
    DominatingSet { max_index: Option<usize> },
    /// All-zero inputs answer 0 everywhere (flag bit); otherwise copy.
    SetCover { any_ones: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub transformed: Instance,
    /// Worst-case side-advice bits the back-map may consume at this n.
    pub g_budget: usize,
    pub back_map: BackMap,
}

impl ReductionResult {
    /// Degenerate corners answer from the side advice alone; the transformed
    /// instance then has no feasible output and no target run is needed.
    pub fn needs_target_run(&self) -> bool {
        !matches!(
            self.back_map,
            BackMap::CycleFinding { degenerate_ones: Some(_) }
        )
    }
}

fn bits_for_index(n: usize) -> usize {
    (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize
}

/// Transforms a guessing instance into the target problem. Oracle-side: the
/// hidden string is available to the transformer.
pub fn reduce_asg(source: &Instance, target: ReductionTarget) -> Result<ReductionResult> {
    if source.problem != Problem::MinAsg {
        return Err(Error::Contract("reduction source must be a string-guessing instance".into()));
    }
    let x = source
        .asg_string()
        .ok_or_else(|| Error::Contract("malformed string-guessing instance".into()))?;
    let n = x.len();
    let weights = source.weights();
    let ones: Vec<usize> = (0..n).filter(|&i| x.get(i)).collect();
    let idx_bits = bits_for_index(n);

    let result = match target {
        ReductionTarget::VertexCover => {
            // Edges from every 1-vertex to all later vertices.
            let mut edges = Vec::new();
            for &i in &ones {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
            ReductionResult {
                transformed: build::vertex_arrival(Problem::VertexCover, n, &edges, &weights),
                g_budget: 1 + idx_bits,
                back_map: BackMap::VertexCover,
            }
        }
        ReductionTarget::CycleFinding => {
            // Chain each vertex to the latest earlier 1-vertex, then close the
            // cycle between the first and last 1-vertex. With three or more 1s
            // those vertices form the only cycle in the graph.
            let mut edges = Vec::new();
            let mut last_one: Option<usize> = None;
            for i in 0..n {
                if let Some(j) = last_one {
                    edges.push((j, i));
                }
                if x.get(i) {
                    last_one = Some(i);
                }
            }
            if let (Some(&min), Some(&max)) = (ones.first(), ones.last()) {
                if min != max && !edges.contains(&(min, max)) {
                    edges.push((min, max));
                }
            }
            ReductionResult {
                transformed: build::vertex_arrival(Problem::CycleFinding, n, &edges, &weights),
                g_budget: 3 + 2 * idx_bits,
                back_map: BackMap::CycleFinding {
                    degenerate_ones: (ones.len() <= 2).then(|| ones.clone()),
                },
            }
        }
        ReductionTarget::DominatingSet => {
            // Star from the last 1-vertex (hub) to every 0-vertex; the other
            // 1-vertices stay isolated, so every feasible dominating set
            // contains them.
            let mut edges = Vec::new();
            if let Some(&max) = ones.last() {
                for i in 0..n {
                    if !x.get(i) {
                        edges.push((i.min(max), i.max(max)));
                    }
                }
            }
            ReductionResult {
                transformed: build::vertex_arrival(Problem::DominatingSet, n, &edges, &weights),
                g_budget: 2 + 2 * idx_bits,
                back_map: BackMap::DominatingSet { max_index: ones.last().copied() },
            }
        }
        ReductionTarget::SetCover => {
            // Universe {1..n}; request i covers {i}, except the last 1-request
            // additionally covers every 0-element.
            let max = ones.last().copied();
            let sets: Vec<Vec<u32>> = (0..n)
                .map(|i| {
                    if Some(i) == max {
                        let mut s = vec![i as u32 + 1];
                        s.extend((0..n).filter(|&j| !x.get(j)).map(|j| j as u32 + 1));
                        s
                    } else {
                        vec![i as u32 + 1]
                    }
                })
                .collect();
            ReductionResult {
                transformed: build::set_cover(n as u32, &sets, &weights),
                g_budget: 1,
                back_map: BackMap::SetCover { any_ones: !ones.is_empty() },
            }
        }
    };
    debug_assert_eq!(result.transformed.n(), n);
    Ok(result)
}

/// Reconstructed source output plus the side-advice bits consumed.
fn apply_back_map(
    source_x: &BitStr,
    back_map: &BackMap,
    target_output: Option<&BitStr>,
) -> Result<(BitStr, usize)> {
    let n = source_x.len();
    let idx_bits = bits_for_index(n);
    let copy = |t: Option<&BitStr>| -> Result<BitStr> {
        t.copied()
            .ok_or_else(|| Error::Contract("back-map needs a target run for this input".into()))
    };
    match back_map {
        BackMap::VertexCover => {
            let t = copy(target_output)?;
            let rejected_ones: Vec<usize> =
                (0..n).filter(|&i| source_x.get(i) && !t.get(i)).collect();
            match rejected_ones.len() {
                0 => Ok((t, 1)),
                1 => {
                    let mut y = t;
                    y.set(rejected_ones[0], true);
                    Ok((y, 1 + idx_bits))
                }
                _ => Err(Error::Contract(
                    "target run rejected two clique vertices; it cannot be feasible".into(),
                )),
            }
        }
        BackMap::CycleFinding { degenerate_ones } => match degenerate_ones {
            Some(ones) => {
                let mut y = BitStr::zeros(n);
                for &i in ones {
                    y.set(i, true);
                }
                Ok((y, 3 + ones.len() * idx_bits))
            }
            None => Ok((copy(target_output)?, 1)),
        },
        BackMap::DominatingSet { max_index } => match max_index {
            None => Ok((BitStr::zeros(n), 1)),
            Some(max) => {
                let t = copy(target_output)?;
                if t.get(*max) {
                    Ok((t, 2))
                } else {
                    let dropped = (0..n)
                        .find(|&i| !source_x.get(i) && t.get(i))
                        .ok_or_else(|| {
                            Error::Contract(
                                "target run rejected the hub without accepting any 0-vertex".into(),
                            )
                        })?;
                    let mut y = t;
                    y.set(dropped, false);
                    y.set(*max, true);
                    Ok((y, 2 + 2 * idx_bits))
                }
            }
        },
        BackMap::SetCover { any_ones } => {
            if *any_ones {
                Ok((copy(target_output)?, 1))
            } else {
                Ok((BitStr::zeros(n), 1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCheck {
    pub source_output: BitStr,
    pub source_cost: f64,
    pub side_bits: usize,
    pub passed: bool,
}

/// Replays the back-map and checks the reduction guarantee: the reconstructed
/// output is feasible and either `ALG1 <= ALG2 + OPT1` with `OPT1 >= OPT2`,
/// or `ALG1 = OPT1` exactly.
pub fn verify_reduction(
    source: &Instance,
    target_alg_run: Option<&Outcome>,
    result: &ReductionResult,
) -> Result<ReductionCheck> {
    let x = source
        .asg_string()
        .ok_or_else(|| Error::Contract("source is not a string-guessing instance".into()))?;
    if let Some(run) = target_alg_run {
        if !run.feasible || !check_feasible(&result.transformed, &run.output)? {
            return Err(Error::Contract("target run is not feasible for the transformed instance".into()));
        }
    }
    let (source_output, side_bits) =
        apply_back_map(&x, &result.back_map, target_alg_run.map(|r| &r.output))?;
    if !check_feasible(source, &source_output)? {
        return Err(Error::Contract(format!(
            "reconstructed output {source_output} infeasible for hidden string {x}"
        )));
    }
    let alg1 = crate::problems::weighted_score(source, &source_output);
    let opt1 = brute_force_opt(source)?.score;

    let exact = (alg1 - opt1).abs() <= 1e-9 * opt1.max(1.0);
    let passed = if exact {
        true
    } else {
        let run = target_alg_run.ok_or_else(|| {
            Error::Contract("non-optimal reconstruction requires a target run".into())
        })?;
        let opt2 = brute_force_opt(&result.transformed)?.score;
        let tol = 1e-9 * (run.score + opt1).max(1.0);
        alg1 <= run.score + opt1 + tol && opt1 >= opt2 - tol
    };

    Ok(ReductionCheck { source_output, source_cost: alg1, side_bits, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::outcome;

    fn asg(bits: &str, weights: &[f64]) -> Instance {
        build::min_asg(bits.parse().unwrap(), weights)
    }

    #[test]
    fn vc_graph_for_0110() {
        // Edges {(v2,v3),(v2,v4),(v3,v4)}: a triangle, so any two of the
        // three vertices form a minimum cover of weight 2.
        let src = asg("0110", &[1.0, 1.0, 1.0, 1.0]);
        let red = reduce_asg(&src, ReductionTarget::VertexCover).unwrap();
        assert_eq!(red.transformed.n(), 4);
        let opt = brute_force_opt(&red.transformed).unwrap();
        assert_eq!(opt.score, 2.0);
        // The 1-set minus the last vertex is one of the minimum covers.
        assert!(check_feasible(&red.transformed, &"0110".parse().unwrap()).unwrap());
    }

    #[test]
    fn vc_all_zero_graph_is_edgeless() {
        let src = asg("0000", &[1.0; 4]);
        let red = reduce_asg(&src, ReductionTarget::VertexCover).unwrap();
        let opt = brute_force_opt(&red.transformed).unwrap();
        assert_eq!(opt.score, 0.0);
    }

    #[test]
    fn set_cover_for_101() {
        let src = asg("101", &[1.0, 1.0, 1.0]);
        let red = reduce_asg(&src, ReductionTarget::SetCover).unwrap();
        // Request 3 is {2,3}; requests 1,2 are singletons.
        let inst = &red.transformed;
        let opt = brute_force_opt(inst).unwrap();
        assert_eq!(opt.output.to_string(), "101");
        assert_eq!(opt.score, 2.0);
    }

    #[test]
    fn vc_verify_optimal_and_padded_runs() {
        let src = asg("0110", &[2.0, 3.0, 5.0, 7.0]);
        let red = reduce_asg(&src, ReductionTarget::VertexCover).unwrap();
        // Run accepting exactly {v2, v3}.
        let run = outcome(&red.transformed, "0110".parse().unwrap());
        let check = verify_reduction(&src, Some(&run), &red).unwrap();
        assert!(check.passed);
        assert_eq!(check.source_cost, 8.0);

        // Run accepting {v2, v3, v4} still satisfies the additive bound.
        let run = outcome(&red.transformed, "0111".parse().unwrap());
        let check = verify_reduction(&src, Some(&run), &red).unwrap();
        assert!(check.passed);
    }

    #[test]
    fn vc_single_one_corner() {
        let src = asg("1", &[5.0]);
        let red = reduce_asg(&src, ReductionTarget::VertexCover).unwrap();
        // The edgeless graph lets the target reject everything; the back-map
        // patches the rejected clique vertex.
        let run = outcome(&red.transformed, "0".parse().unwrap());
        let check = verify_reduction(&src, Some(&run), &red).unwrap();
        assert!(check.passed);
        assert_eq!(check.source_output.to_string(), "1");
    }

    #[test]
    fn cycle_finding_degenerate_branch() {
        for bits in ["0000", "0100", "0101"] {
            let src = asg(bits, &[1.0, 2.0, 3.0, 4.0]);
            let red = reduce_asg(&src, ReductionTarget::CycleFinding).unwrap();
            assert!(!red.needs_target_run());
            let check = verify_reduction(&src, None, &red).unwrap();
            assert!(check.passed, "bits={bits}");
            let opt1 = brute_force_opt(&src).unwrap().score;
            assert_eq!(check.source_cost, opt1);
        }
    }

    #[test]
    fn cycle_finding_main_branch() {
        let src = asg("01110", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let red = reduce_asg(&src, ReductionTarget::CycleFinding).unwrap();
        assert!(red.needs_target_run());
        let opt2 = brute_force_opt(&red.transformed).unwrap();
        assert_eq!(opt2.output.to_string(), "01110");
        let check = verify_reduction(&src, Some(&opt2), &red).unwrap();
        assert!(check.passed);
    }

    #[test]
    fn dominating_set_hub_rejected() {
        let src = asg("0110", &[1.0, 2.0, 3.0, 4.0]);
        let red = reduce_asg(&src, ReductionTarget::DominatingSet).unwrap();
        // Feasible cover without the hub v3: isolated v2 plus all 0-vertices.
        let run = outcome(&red.transformed, "1101".parse().unwrap());
        assert!(run.feasible);
        let check = verify_reduction(&src, Some(&run), &red).unwrap();
        assert!(check.passed);
        // The reconstruction must answer 1 on every 1-round.
        assert!(check.source_output.get(1) && check.source_output.get(2));
    }

    #[test]
    fn length_preservation_exhaustive_small() {
        for n in 1..=6usize {
            for x in BitStr::all(n) {
                let weights: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
                let src = build::min_asg(x, &weights);
                for target in [
                    ReductionTarget::VertexCover,
                    ReductionTarget::CycleFinding,
                    ReductionTarget::DominatingSet,
                    ReductionTarget::SetCover,
                ] {
                    let red = reduce_asg(&src, target).unwrap();
                    assert_eq!(red.transformed.n(), n);
                }
            }
        }
    }
}
