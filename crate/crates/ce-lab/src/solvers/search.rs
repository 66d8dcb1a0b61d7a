//! Baseline searchers: greedy descent toward an approximate sink, the
//! path-following tail chaser, and the random prober.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::adversaries::{HtpOutcome, HtpReferee};
use crate::error::Result;
use crate::hypercube::{exceeds, Threshold, Vertex};
use crate::labeling::{PathInstance, SignOracle};

/// A finished search run; `succeeded` always comes from the problem's own
/// check (in-degree threshold, NNV condition, end confirmation), never
/// from the searcher's belief.
#[derive(Clone, Debug)]
pub struct SearchRun {
    pub output: Option<Vertex>,
    pub succeeded: bool,
    pub queries: usize,
    pub steps: usize,
    pub visited: Vec<Vertex>,
}

impl SearchRun {
    /// Queries made plus 1 for the single-vertex output when present.
    pub fn cost(&self) -> usize {
        self.queries + usize::from(self.output.is_some())
    }

    pub fn to_json(&self) -> SearchRunJson {
        SearchRunJson {
            output: self.output.map(|v| v.to_bitstring()),
            succeeded: self.succeeded,
            queries: self.queries,
            steps: self.steps,
            cost: self.cost(),
        }
    }
}

/// Wire format of a [`SearchRun`].
#[derive(Serialize)]
pub struct SearchRunJson {
    pub output: Option<String>,
    pub succeeded: bool,
    pub queries: usize,
    pub steps: usize,
    pub cost: usize,
}

/// Follows edge directions downstream from `start`, always crossing the
/// lowest-coordinate outgoing edge, until it reaches a vertex whose
/// in-degree strictly exceeds `threshold` or the budget runs out.
pub fn greedy_sink_search(
    oracle: &mut dyn SignOracle,
    start: Vertex,
    threshold: Threshold,
    budget: usize,
) -> Result<SearchRun> {
    let mut visited = Vec::new();
    let mut current = start;
    let mut queries = 0usize;
    while queries < budget {
        let reply = oracle.query_signs(current)?;
        queries += 1;
        visited.push(current);
        let in_degree = reply.iter().filter(|&&d| d == -1).count();
        if exceeds(in_degree, threshold) {
            return Ok(SearchRun {
                output: Some(current),
                succeeded: true,
                queries,
                steps: visited.len() - 1,
                visited,
            });
        }
        match reply.iter().position(|&d| d == 1) {
            Some(i) => current = current.flip(i)?,
            // every edge points in, yet the threshold was not exceeded
            // (threshold ≥ n): nowhere further down to go
            None => break,
        }
    }
    let steps = visited.len().saturating_sub(1);
    Ok(SearchRun { output: None, succeeded: false, queries, steps, visited })
}

/// Rides the reveal schedule of a Hit-The-Path referee without ever
/// querying: passes each step, and claims the end vertex once the whole
/// path is revealed. Success is the referee's own end confirmation; the
/// step count is `⌈L/k⌉`.
pub fn tail_chaser_htp(referee: &mut HtpReferee, budget: usize) -> Result<SearchRun> {
    if referee.len() == 0 {
        let v = referee.revealed_prefix()[0];
        return Ok(SearchRun {
            output: Some(v),
            succeeded: referee.confirm_end(v),
            queries: 0,
            steps: 0,
            visited: vec![v],
        });
    }
    let mut steps = 0usize;
    while steps < budget {
        match referee.step(None)? {
            HtpOutcome::Win => unreachable!("passing cannot win"),
            HtpOutcome::Miss { revealed_upto } => {
                steps += 1;
                if revealed_upto == referee.len() {
                    let end = *referee.revealed_prefix().last().unwrap();
                    return Ok(SearchRun {
                        output: Some(end),
                        succeeded: referee.confirm_end(end),
                        queries: 0,
                        steps,
                        visited: referee.revealed_prefix().to_vec(),
                    });
                }
            }
        }
    }
    Ok(SearchRun { output: None, succeeded: false, queries: 0, steps, visited: Vec::new() })
}

/// Follows increasing-magnitude labels from the path origin: at each
/// vertex the full label tuple is one query; a non-negative out-weight
/// ends the search, otherwise the walk crosses the incident edge of
/// largest magnitude (ties to the lowest coordinate), refusing to undo
/// the step it just took so that cancelled labels cannot trap it in a
/// two-cycle. On single-traversal paths the largest incident label is
/// always the next path step, so the chase reaches `v_L` in exactly `L`
/// moves.
pub fn tail_chaser_path(instance: &PathInstance, budget: usize) -> Result<SearchRun> {
    let labeling = instance.labeling();
    let n = instance.n();
    let mut current = instance.path().start();
    let mut previous: Option<Vertex> = None;
    let mut visited = Vec::new();
    let mut queries = 0usize;
    while queries < budget {
        let labels: Vec<BigInt> =
            (0..n).map(|i| labeling.label(current, i)).collect::<Result<_>>()?;
        queries += 1;
        visited.push(current);
        if labels.iter().sum::<BigInt>() >= BigInt::zero() {
            let succeeded = labeling.nnv_check(current)?;
            return Ok(SearchRun {
                output: Some(current),
                succeeded,
                queries,
                steps: visited.len() - 1,
                visited,
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(labels[i].abs()), i));
        let best = order
            .iter()
            .map(|&i| current.flip(i))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|next| previous != Some(*next))
            .expect("n >= 2 leaves an alternative");
        previous = Some(current);
        current = best;
    }
    let steps = visited.len().saturating_sub(1);
    Ok(SearchRun { output: None, succeeded: false, queries, steps, visited })
}

/// Queries one uniformly random vertex per referee step for `steps` steps;
/// returns whether any query hit the unrevealed tail.
pub fn random_prober<R: Rng>(
    referee: &mut HtpReferee,
    steps: usize,
    rng: &mut R,
) -> Result<bool> {
    let n = referee.n();
    for _ in 0..steps {
        let q = Vertex::new(rng.gen_range(0..(1u32 << n)), n)?;
        if let HtpOutcome::Win = referee.step(Some(q))? {
            return Ok(true);
        }
    }
    Ok(false)
}
