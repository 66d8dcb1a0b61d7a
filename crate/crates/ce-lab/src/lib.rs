//! A query-complexity laboratory for correlated equilibria of n-player
//! bi-strategy games.
//!
//! Pure strategy profiles are vertices of the boolean hypercube; utilities
//! are exact rationals reached only through a counted query oracle. On top
//! of that sit the combinatorial search problems (approximate sinks,
//! non-negative vertices), the reductions turning edge labelings into
//! games, solvers (regret matching, an exact small-instance CE oracle,
//! baseline searchers), and the lower-bound machinery: an outward-orienting
//! adversary, a polite-simulation wrapper, and a hidden-path referee.
//!
//! ```
//! use ce_lab::equilibrium::verify_ce;
//! use ce_lab::games::GameInstance;
//! use ce_lab::rational::{rat, rat_int};
//! use ce_lab::solvers::exact_ce_small;
//!
//! let game = GameInstance::from_table(2, vec![vec![rat(1, 2); 4]; 2]).unwrap();
//! let x = exact_ce_small(&game).unwrap();
//! assert!(verify_ce(&x, &game, rat_int(0)).unwrap().pass);
//! ```

pub mod adversaries;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod games;
pub mod hypercube;
pub mod labeling;
pub mod rational;
pub mod solvers;
pub mod testutil;

pub use error::{Error, Result};
