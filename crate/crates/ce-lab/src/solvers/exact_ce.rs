//! Exact correlated equilibria of small games by rational linear
//! feasibility.
//!
//! The feasible region is the profile simplex cut by the `2n` regret
//! constraints `Regret_{i→b}(x) ≤ 0`. A phase-1 simplex with Bland's rule
//! over `BigRational` arithmetic finds a feasible point exactly; since a
//! CE always exists, an infeasible outcome indicates a defect, never a
//! property of the input.

use num_traits::{One, Zero};

use crate::equilibrium::SparseDistribution;
use crate::error::{Error, Result};
use crate::games::GameInstance;
use crate::hypercube::Vertex;
use crate::rational::Rational;

/// Largest player count accepted (dense problem over `2^n` variables).
pub const MAX_EXACT_PLAYERS: usize = 10;

/// An exact rational distribution with all `2n` regret constraints ≤ 0.
pub fn exact_ce_small(game: &GameInstance) -> Result<SparseDistribution> {
    let n = game.n();
    if n > MAX_EXACT_PLAYERS {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_EXACT_PLAYERS });
    }
    let profiles = 1usize << n;
    // columns: x_v (profiles), slack per regret row (2n), one artificial
    let slack0 = profiles;
    let artificial = profiles + 2 * n;
    let cols = artificial + 1;

    // rows: 2n regret constraints (RHS 0, slack basic), then Σx = 1
    // (artificial basic); each row carries its RHS in the last position
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        for b in 0..2u8 {
            let mut row = vec![Rational::zero(); cols + 1];
            for bits in 0..profiles {
                let v = Vertex::new(bits as u32, n)?;
                let switched = v.set_bit(i, b)?;
                if switched == v {
                    continue;
                }
                row[bits] = game.utility(i, switched)? - game.utility(i, v)?;
            }
            row[slack0 + 2 * i + b as usize] = Rational::one();
            rows.push(row);
        }
    }
    let mut sum_row = vec![Rational::zero(); cols + 1];
    for col in (0..profiles).chain([artificial, cols]) {
        sum_row[col] = Rational::one();
    }
    rows.push(sum_row);

    let mut basis: Vec<usize> = (0..2 * n).map(|r| slack0 + r).collect();
    basis.push(artificial);

    // phase-1 objective: minimize the artificial variable. Reduced costs
    // start as c_j - (Σx row)_j since the artificial's row is the sum row.
    let mut obj = vec![Rational::zero(); cols + 1];
    for col in 0..profiles {
        obj[col] = -Rational::one();
    }
    obj[cols] = -Rational::one(); // negated objective value

    loop {
        // the phase-1 optimum is 0 (a CE always exists); reaching it ends
        // the search even if degenerate pivots remain available
        if obj[cols].is_zero() {
            break;
        }
        // Bland: entering variable = smallest column with negative reduced cost
        let Some(enter) = (0..cols).find(|&j| obj[j] < Rational::zero()) else {
            break;
        };
        // ratio test, ties broken by smallest basic variable index
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row[enter] <= Rational::zero() {
                continue;
            }
            let ratio = &row[cols] / &row[enter];
            let better = match &leave {
                None => true,
                Some((lr, lratio)) => {
                    ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((pivot_row, _)) = leave else {
            // the feasible region of phase 1 is bounded; an unbounded ray
            // cannot occur
            return Err(Error::FeasibilityDefect);
        };

        let pivot = rows[pivot_row][enter].clone();
        for value in rows[pivot_row].iter_mut() {
            *value /= &pivot;
        }
        for r in 0..rows.len() {
            if r == pivot_row || rows[r][enter].is_zero() {
                continue;
            }
            let factor = rows[r][enter].clone();
            for c in 0..=cols {
                let delta = &factor * &rows[pivot_row][c];
                rows[r][c] -= delta;
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for c in 0..=cols {
                let delta = &factor * &rows[pivot_row][c];
                obj[c] -= delta;
            }
        }
        basis[pivot_row] = enter;
    }

    // optimum must be 0: the artificial leaves (or sits at value 0)
    if !obj[cols].is_zero() {
        return Err(Error::FeasibilityDefect);
    }
    let mut entries = Vec::new();
    for (r, &var) in basis.iter().enumerate() {
        if var < profiles && !rows[r][cols].is_zero() {
            entries.push((Vertex::new(var as u32, n)?, rows[r][cols].clone()));
        }
    }
    SparseDistribution::new(n, entries)
}
