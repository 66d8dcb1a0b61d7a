//! Algorithms under test: regret matching, an exact small-instance CE
//! oracle, and baseline searchers for the combinatorial problems.
//!
//! Every run is deterministic given its instance and seed, owns its
//! transcript, and never self-reports success: the `succeeded` flag is
//! always recomputed by the relevant verifier (`verify_ce`, `in_degree`,
//! `nnv_check`).
//!
//! ```
//! use ce_lab::rational::rat;
//! use ce_lab::solvers::regret_matching;
//! use ce_lab::testutil::matching_pennies;
//!
//! let run = regret_matching(&matching_pennies(), &rat(1, 10), 7, None, false).unwrap();
//! assert!(run.succeeded);
//! // each round queries the played profile and its n unilateral flips
//! assert_eq!(run.transcript.query_count(), run.rounds * 3);
//! ```

mod exact_ce;
mod regret_matching;
mod search;

pub use exact_ce::exact_ce_small;
pub use regret_matching::{default_max_steps, regret_matching, CeRunJson, CeSolverRun};
pub use search::{
    greedy_sink_search, random_prober, tail_chaser_htp, tail_chaser_path, SearchRun, SearchRunJson,
};
