//! Regret matching over the pure-profile query oracle.
//!
//! One round costs `n+1` queries: the current profile plus its `n`
//! single-coordinate flips, so every player's counterfactual payoff is
//! known exactly. Players switch with probability proportional to positive
//! cumulative regret, and the output is the empirical distribution of the
//! played profiles. The empirical regrets of that distribution equal the
//! cumulative regret sums divided by the round count, which makes the
//! stopping check essentially free.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{verify_ce, DistributionJson, SparseDistribution};
use crate::error::{Error, Result};
use crate::games::{query, GameInstance, QueryTranscript};
use crate::hypercube::Vertex;
use crate::rational::{rat_int, Rational};

/// The default round cap `⌈64·ln(4n)/ε²⌉`; a conservative desk-scale
/// constant, configurable because no canonical value exists.
pub fn default_max_steps(n: usize, eps: &Rational) -> usize {
    let e = eps.to_f64().unwrap_or(1.0);
    (64.0 * (4.0 * n as f64).ln() / (e * e)).ceil() as usize
}

/// A finished regret-matching run.
#[derive(Clone, Debug)]
pub struct CeSolverRun {
    /// Empirical distribution of the played profiles.
    pub distribution: SparseDistribution,
    /// Rounds actually played, `T`.
    pub rounds: usize,
    /// Whether the stopping rule (measured regrets ≤ ε/2) was met.
    pub converged: bool,
    /// Verifier verdict at ε, recomputed by `verify_ce`.
    pub succeeded: bool,
    pub transcript: QueryTranscript,
    pub seed: u64,
}

impl CeSolverRun {
    pub fn to_json(&self) -> CeRunJson {
        CeRunJson {
            rounds: self.rounds,
            converged: self.converged,
            succeeded: self.succeeded,
            queries: self.transcript.query_count(),
            cost: self.transcript.cost(),
            seed: self.seed,
            distribution: self.distribution.to_json(),
        }
    }
}

/// Wire format of a [`CeSolverRun`].
#[derive(Serialize)]
pub struct CeRunJson {
    pub rounds: usize,
    pub converged: bool,
    pub succeeded: bool,
    pub queries: usize,
    pub cost: usize,
    pub seed: u64,
    pub distribution: DistributionJson,
}

/// Runs regret matching until the measured regrets of the empirical
/// distribution drop to `ε/2` or `max_steps` rounds elapse, whichever
/// comes first. Deterministic given `(game, eps, seed, max_steps)`.
///
/// `full_log` keeps every query/answer pair in the transcript; long runs
/// should pass `false` and rely on counting plus the queried set.
pub fn regret_matching(
    game: &GameInstance,
    eps: &Rational,
    seed: u64,
    max_steps: Option<usize>,
    full_log: bool,
) -> Result<CeSolverRun> {
    if eps <= &Rational::zero() {
        return Err(Error::InvalidInstance(format!("eps must be positive, got {eps}")));
    }
    let n = game.n();
    let max_steps = max_steps.unwrap_or_else(|| default_max_steps(n, eps));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = if full_log {
        QueryTranscript::new(n)
    } else {
        QueryTranscript::counting_only(n)
    };

    // cumulative regrets CR[i][b] = Σ_t (u_i(v_t^{i→b}) - u_i(v_t))
    let mut cr = vec![[Rational::zero(), Rational::zero()]; n];
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    // uniform initialization
    let mut current = Vertex::new(rng.gen_range(0..(1u32 << n)), n)?;

    let mut rounds = 0usize;
    let mut converged = false;
    let half_eps = eps / rat_int(2);
    while rounds < max_steps {
        rounds += 1;
        let base = query(game, &mut transcript, current)?;
        for i in 0..n {
            let flipped = query(game, &mut transcript, current.flip(i)?)?;
            let b = 1 - current.bit(i)? as usize;
            let diff = &flipped[i] - &base[i];
            cr[i][b] += diff;
        }
        *counts.entry(current.bits()).or_insert(0) += 1;

        // empirical regret of the running average = CR / t
        let threshold = &half_eps * rat_int(rounds as i64);
        if cr.iter().all(|pair| pair.iter().all(|r| r <= &threshold)) {
            converged = true;
            break;
        }

        // each player flips with probability CR⁺[i][1-v_i] / (2t), capped at 1
        let t = rounds as f64;
        let mut next = current;
        for (i, pair) in cr.iter().enumerate() {
            let b = 1 - current.bit(i)? as usize;
            let r = &pair[b];
            if r <= &Rational::zero() {
                continue;
            }
            let p = (r.to_f64().unwrap_or(0.0) / (2.0 * t)).min(1.0);
            if rng.gen::<f64>() < p {
                next = next.flip(i)?;
            }
        }
        current = next;
    }

    let distribution = SparseDistribution::from_counts(n, &counts)?;
    transcript.charge_support(distribution.support_size());
    let succeeded = verify_ce(&distribution, game, eps.clone())?.pass;
    Ok(CeSolverRun { distribution, rounds, converged, succeeded, transcript, seed })
}
