//! Accept/reject online problems: request payloads, instances, feasibility
//! checkers, and exhaustive offline optima.
//!
//! Output convention follows the scoring rules: for minimization problems a
//! 1-answer accepts the request (cost is the weight sum over 1s); for
//! maximization problems a 0-answer accepts (profit is the weight sum over
//! 0s). Feasibility is always monotone under accepting more requests.

use serde::{Deserialize, Serialize};

use crate::bitstr::BitStr;
use crate::{Error, Result};

/// Hard cap for exhaustive enumeration of all `2^n` outputs.
pub const BRUTE_FORCE_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    MinAsg,
    VertexCover,
    DominatingSet,
    CycleFinding,
    SetCover,
    IndependentSet,
    Clique,
    Matching,
    DisjointPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Min,
    Max,
}

impl Problem {
    pub fn direction(&self) -> Direction {
        match self {
            Problem::MinAsg
            | Problem::VertexCover
            | Problem::DominatingSet
            | Problem::CycleFinding
            | Problem::SetCover => Direction::Min,
            Problem::IndependentSet | Problem::Clique | Problem::Matching | Problem::DisjointPath => {
                Direction::Max
            }
        }
    }

    /// The output bit value that accepts a request for this problem.
    pub fn accept_bit(&self) -> bool {
        self.direction() == Direction::Min
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::MinAsg => "min_asg",
            Problem::VertexCover => "vertex_cover",
            Problem::DominatingSet => "dominating_set",
            Problem::CycleFinding => "cycle_finding",
            Problem::SetCover => "set_cover",
            Problem::IndependentSet => "independent_set",
            Problem::Clique => "clique",
            Problem::Matching => "matching",
            Problem::DisjointPath => "disjoint_path",
        }
    }
}

/// One online request. Graph problems use the vertex-arrival model: each
/// vertex lists its edges to *previously arrived* vertices only, so the full
/// graph is never revealed up front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// String guessing round: the hidden correct answer for this round
    /// (revealed to the algorithm only after it answers).
    AsgBit(bool),
    /// Vertex arrival with edges to earlier vertices (0-based indices).
    VertexArrival(Vec<usize>),
    /// Edge arrival between named endpoints.
    Edge(u32, u32),
    /// Subpath `[start, end]` (1-based vertices) on a known path.
    Subpath(u32, u32),
    /// Subset of a known universe `{1, ..., universe_size}`.
    Subset(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub payload: Payload,
    #[serde(
        serialize_with = "ser_weight",
        deserialize_with = "de_weight"
    )]
    pub weight: f64,
}

fn ser_weight<S: serde::Serializer>(w: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(*w)
}

/// Weights are accepted either as JSON numbers or as decimal strings (the
/// latter preserves the author's written precision in instance files).
fn de_weight<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }
    match NumOrStr::deserialize(d)? {
        NumOrStr::Num(w) => Ok(w),
        NumOrStr::Str(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|e| serde::de::Error::custom(format!("bad weight {s:?}: {e}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universe_size: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_length: Option<u32>,
    pub requests: Vec<Request>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.requests.iter().map(|r| r.weight).collect()
    }

    /// The hidden string of a string-guessing instance.
    pub fn asg_string(&self) -> Option<BitStr> {
        let mut x = BitStr::zeros(0);
        for r in &self.requests {
            match r.payload {
                Payload::AsgBit(b) => x.push(b),
                _ => return None,
            }
        }
        Some(x)
    }

    /// Adjacency masks over arrived vertices for vertex-arrival problems.
    fn adjacency(&self) -> Result<Vec<u32>> {
        let n = self.n();
        let mut adj = vec![0u32; n];
        for (i, r) in self.requests.iter().enumerate() {
            let Payload::VertexArrival(ref earlier) = r.payload else {
                return Err(Error::Contract(format!(
                    "request {i} is not a vertex arrival for {:?}",
                    self.problem
                )));
            };
            for &j in earlier {
                if j >= i {
                    return Err(Error::Contract(format!(
                        "vertex {i} lists a non-earlier neighbor {j}"
                    )));
                }
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        Ok(adj)
    }
}

/// Result of a single run or of the offline optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub output: BitStr,
    pub feasible: bool,
    /// Weighted score; `+inf` marks an infeasible minimization outcome,
    /// `-inf` an infeasible maximization outcome.
    pub score: f64,
}

/// Weighted score of an output (assuming feasibility): weight sum over
/// accepted requests, where acceptance is 1 for Min and 0 for Max.
pub fn weighted_score(instance: &Instance, output: &BitStr) -> f64 {
    let accept = instance.problem.accept_bit();
    instance
        .requests
        .iter()
        .zip(output.iter())
        .filter(|&(_, y)| y == accept)
        .map(|(r, _)| r.weight)
        .sum()
}

pub fn outcome(instance: &Instance, output: BitStr) -> Outcome {
    let feasible = matches!(check_feasible(instance, &output), Ok(true));
    let score = if feasible {
        weighted_score(instance, &output)
    } else if instance.problem.direction() == Direction::Min {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Outcome { output, feasible, score }
}

/// Whether `output` is a feasible answer string for `instance`.
pub fn check_feasible(instance: &Instance, output: &BitStr) -> Result<bool> {
    if output.len() != instance.n() {
        return Err(Error::Contract(format!(
            "output length {} != instance length {}",
            output.len(),
            instance.n()
        )));
    }
    let accept = instance.problem.accept_bit();
    let mut accepted = 0u32;
    for (i, y) in output.iter().enumerate() {
        if y == accept {
            accepted |= 1 << i;
        }
    }
    feasible_accepted_mask(instance, accepted)
}

/// Core feasibility check on the accepted-index set.
pub(crate) fn feasible_accepted_mask(instance: &Instance, accepted: u32) -> Result<bool> {
    let n = instance.n();
    match instance.problem {
        Problem::MinAsg => {
            let x = instance
                .asg_string()
                .ok_or_else(|| Error::Contract("non-ASG payload in MinAsg instance".into()))?;
            // Feasible iff x ⊑ y: every 1-round is accepted.
            Ok(x.mask() & !accepted == 0)
        }
        Problem::VertexCover => {
            let adj = instance.adjacency()?;
            // An edge is uncovered iff both endpoints are rejected.
            for i in 0..n {
                if accepted >> i & 1 == 1 {
                    continue;
                }
                if adj[i] & !accepted != 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Problem::DominatingSet => {
            let adj = instance.adjacency()?;
            for i in 0..n {
                if accepted >> i & 1 == 0 && adj[i] & accepted == 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Problem::CycleFinding => {
            let adj = instance.adjacency()?;
            // The induced subgraph contains a cycle iff some edge closes a
            // loop during union-find over induced edges.
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut [usize], mut v: usize) -> usize {
                while parent[v] != v {
                    parent[v] = parent[parent[v]];
                    v = parent[v];
                }
                v
            }
            for i in 0..n {
                if accepted >> i & 1 == 0 {
                    continue;
                }
                let nbrs = adj[i] & accepted & ((1u32 << i) - 1);
                let mut rest = nbrs;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri == rj {
                        return Ok(true);
                    }
                    parent[ri] = rj;
                }
            }
            Ok(false)
        }
        Problem::SetCover => {
            let universe = instance
                .universe_size
                .ok_or_else(|| Error::Contract("set cover instance without universe_size".into()))?;
            if universe as usize > 32 {
                return Err(Error::Resource("universe larger than 32 elements".into()));
            }
            let full: u32 = if universe == 32 { u32::MAX } else { (1 << universe) - 1 };
            let mut covered = 0u32;
            for (i, r) in instance.requests.iter().enumerate() {
                if accepted >> i & 1 == 0 {
                    continue;
                }
                let Payload::Subset(ref elems) = r.payload else {
                    return Err(Error::Contract("non-subset payload in SetCover".into()));
                };
                for &e in elems {
                    if e == 0 || e > universe {
                        return Err(Error::Contract(format!("element {e} outside universe")));
                    }
                    covered |= 1 << (e - 1);
                }
            }
            Ok(covered == full)
        }
        Problem::IndependentSet => {
            let adj = instance.adjacency()?;
            for i in 0..n {
                if accepted >> i & 1 == 1 && adj[i] & accepted != 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Problem::Clique => {
            let adj = instance.adjacency()?;
            for i in 0..n {
                if accepted >> i & 1 == 1 && accepted & !(1 << i) & !adj[i] != 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Problem::Matching => {
            let mut used: Vec<u32> = Vec::new();
            for (i, r) in instance.requests.iter().enumerate() {
                if accepted >> i & 1 == 0 {
                    continue;
                }
                let Payload::Edge(u, v) = r.payload else {
                    return Err(Error::Contract("non-edge payload in Matching".into()));
                };
                if used.contains(&u) || used.contains(&v) {
                    return Ok(false);
                }
                used.push(u);
                used.push(v);
            }
            Ok(true)
        }
        Problem::DisjointPath => {
            let len = instance
                .path_length
                .ok_or_else(|| Error::Contract("disjoint path instance without path_length".into()))?;
            let mut spans: Vec<(u32, u32)> = Vec::new();
            for (i, r) in instance.requests.iter().enumerate() {
                if accepted >> i & 1 == 0 {
                    continue;
                }
                let Payload::Subpath(s, e) = r.payload else {
                    return Err(Error::Contract("non-subpath payload in DisjointPath".into()));
                };
                if s >= e || e > len {
                    return Err(Error::Contract(format!("subpath ({s},{e}) outside path")));
                }
                // Edge-disjointness: [s, e) edge ranges must not overlap.
                for &(s2, e2) in &spans {
                    if s < e2 && s2 < e {
                        return Ok(false);
                    }
                }
                spans.push((s, e));
            }
            Ok(true)
        }
    }
}

/// Exhaustive offline optimum over all `2^n` outputs. Ties break toward the
/// lexicographically smallest output string (round 1 most significant).
pub fn brute_force_opt(instance: &Instance) -> Result<Outcome> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::Resource(format!(
            "brute force requires n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let accept = instance.problem.accept_bit();
    let minimize = instance.problem.direction() == Direction::Min;
    let mut best: Option<Outcome> = None;
    // `v` iterates output strings in lexicographic order (y_1 as MSB), so the
    // first optimum found is the lexicographically smallest one.
    for v in 0u32..1u32 << n {
        let mut output = BitStr::zeros(n);
        let mut accepted = 0u32;
        for i in 0..n {
            let y = v >> (n - 1 - i) & 1 == 1;
            output.set(i, y);
            if y == accept {
                accepted |= 1 << i;
            }
        }
        if !feasible_accepted_mask(instance, accepted)? {
            continue;
        }
        let score = weighted_score(instance, &output);
        let better = match &best {
            None => true,
            Some(b) => {
                if minimize {
                    score < b.score - 1e-12
                } else {
                    score > b.score + 1e-12
                }
            }
        };
        if better {
            best = Some(Outcome { output, feasible: true, score });
        }
    }
    best.ok_or_else(|| Error::Contract("instance has no feasible output".into()))
}

/// Builders for the structured instances the experiments use.
pub mod build {
    use super::*;

    pub fn min_asg(x: BitStr, weights: &[f64]) -> Instance {
        assert_eq!(x.len(), weights.len());
        Instance {
            problem: Problem::MinAsg,
            universe_size: None,
            path_length: None,
            requests: x
                .iter()
                .zip(weights)
                .map(|(b, &w)| Request { payload: Payload::AsgBit(b), weight: w })
                .collect(),
        }
    }

    /// Vertex-arrival instance from an explicit upper-triangular edge list.
    pub fn vertex_arrival(problem: Problem, n: usize, edges: &[(usize, usize)], weights: &[f64]) -> Instance {
        assert_eq!(n, weights.len());
        let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            assert!(hi < n && lo < hi, "bad edge ({u},{v})");
            earlier[hi].push(lo);
        }
        Instance {
            problem,
            universe_size: None,
            path_length: None,
            requests: earlier
                .into_iter()
                .zip(weights)
                .map(|(e, &w)| Request { payload: Payload::VertexArrival(e), weight: w })
                .collect(),
        }
    }

    pub fn matching(edges: &[(u32, u32)], weights: &[f64]) -> Instance {
        assert_eq!(edges.len(), weights.len());
        Instance {
            problem: Problem::Matching,
            universe_size: None,
            path_length: None,
            requests: edges
                .iter()
                .zip(weights)
                .map(|(&(u, v), &w)| Request { payload: Payload::Edge(u, v), weight: w })
                .collect(),
        }
    }

    pub fn set_cover(universe: u32, sets: &[Vec<u32>], weights: &[f64]) -> Instance {
        assert_eq!(sets.len(), weights.len());
        Instance {
            problem: Problem::SetCover,
            universe_size: Some(universe),
            path_length: None,
            requests: sets
                .iter()
                .zip(weights)
                .map(|(s, &w)| Request { payload: Payload::Subset(s.clone()), weight: w })
                .collect(),
        }
    }

    pub fn disjoint_path(path_length: u32, spans: &[(u32, u32)], weights: &[f64]) -> Instance {
        assert_eq!(spans.len(), weights.len());
        Instance {
            problem: Problem::DisjointPath,
            universe_size: None,
            path_length: Some(path_length),
            requests: spans
                .iter()
                .zip(weights)
                .map(|(&(s, e), &w)| Request { payload: Payload::Subpath(s, e), weight: w })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3(weights: [f64; 3]) -> Instance {
        build::vertex_arrival(Problem::VertexCover, 3, &[(0, 1), (1, 2)], &weights)
    }

    #[test]
    fn vertex_cover_path_center() {
        let inst = path3([1.0, 1.0, 1.0]);
        assert!(check_feasible(&inst, &"010".parse().unwrap()).unwrap());
        assert!(!check_feasible(&inst, &"001".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"101".parse().unwrap()).unwrap());
    }

    #[test]
    fn min_asg_feasibility_is_domination() {
        let inst = build::min_asg("0110".parse().unwrap(), &[1.0; 4]);
        assert!(!check_feasible(&inst, &"0100".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"0110".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"1111".parse().unwrap()).unwrap());
    }

    #[test]
    fn matching_star_conflicts() {
        let inst = build::matching(&[(0, 1), (0, 2)], &[1.0, 1.0]);
        // Accepting both shares vertex 0 (0 = accept for Max problems).
        assert!(!check_feasible(&inst, &"00".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"01".parse().unwrap()).unwrap());
    }

    #[test]
    fn brute_force_weighted_vc_path() {
        let opt = brute_force_opt(&path3([5.0, 1.0, 5.0])).unwrap();
        assert_eq!(opt.output.to_string(), "010");
        assert_eq!(opt.score, 1.0);
    }

    #[test]
    fn brute_force_is_on_triangle() {
        let inst = build::vertex_arrival(
            Problem::IndependentSet,
            3,
            &[(0, 1), (0, 2), (1, 2)],
            &[10.0, 100.0, 1000.0],
        );
        let opt = brute_force_opt(&inst).unwrap();
        // Only one vertex fits; weights say v3. Output 110 accepts v3 via its 0.
        assert_eq!(opt.output.to_string(), "110");
        assert_eq!(opt.score, 1000.0);
    }

    #[test]
    fn brute_force_min_asg() {
        let inst = build::min_asg("101".parse().unwrap(), &[16.0, 64.0, 32.0]);
        let opt = brute_force_opt(&inst).unwrap();
        assert_eq!(opt.output.to_string(), "101");
        assert_eq!(opt.score, 48.0);
    }

    #[test]
    fn cycle_finding_detects_triangle() {
        let inst = build::vertex_arrival(
            Problem::CycleFinding,
            4,
            &[(1, 2), (1, 3), (2, 3)],
            &[1.0; 4],
        );
        assert!(check_feasible(&inst, &"0111".parse().unwrap()).unwrap());
        assert!(!check_feasible(&inst, &"0110".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"1111".parse().unwrap()).unwrap());
    }

    #[test]
    fn disjoint_path_overlap() {
        let inst = build::disjoint_path(6, &[(1, 4), (3, 6), (4, 6)], &[1.0; 3]);
        // Spans (1,4) and (4,6) share no edge; (1,4)/(3,6) share edge 3 and
        // (3,6)/(4,6) share edges 4 and 5. A 0-answer accepts.
        assert!(check_feasible(&inst, &"010".parse().unwrap()).unwrap());
        assert!(!check_feasible(&inst, &"001".parse().unwrap()).unwrap());
        assert!(!check_feasible(&inst, &"100".parse().unwrap()).unwrap());
        assert!(check_feasible(&inst, &"110".parse().unwrap()).unwrap());
    }

    #[test]
    fn set_cover_union() {
        let inst = build::set_cover(3, &[vec![1], vec![2], vec![2, 3]], &[1.0; 3]);
        assert!(check_feasible(&inst, &"101".parse().unwrap()).unwrap());
        assert!(!check_feasible(&inst, &"110".parse().unwrap()).unwrap());
    }

    #[test]
    fn instance_json_round_trip_and_string_weights() {
        let inst = build::matching(&[(0, 1)], &[2.5]);
        let json = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(inst, back);

        let doc = r#"{"problem":"min_asg","requests":[
            {"payload":{"asg_bit":true},"weight":"0.125"},
            {"payload":{"asg_bit":false},"weight":3}
        ]}"#;
        let inst: Instance = serde_json::from_str(doc).unwrap();
        assert_eq!(inst.requests[0].weight, 0.125);
        assert_eq!(inst.requests[1].weight, 3.0);
    }
}
