//! Game instances, the black-box query oracle with cost accounting, and the
//! two reductions that build games from hypercube labelings.
//!
//! Utilities are exact rationals in `[0,1]`. A query at a pure profile
//! returns the full tuple `(u_1(v) … u_n(v))` and is charged each time,
//! even when repeated; the §-style cost of a run is queries made plus the
//! size of the support of the produced equilibrium.
//!
//! ```
//! use ce_lab::games::{query, GameInstance, QueryTranscript};
//! use ce_lab::hypercube::Vertex;
//! use ce_lab::rational::rat;
//!
//! let game = GameInstance::from_table(2, vec![vec![rat(1, 4); 4]; 2]).unwrap();
//! let mut transcript = QueryTranscript::new(2);
//! let tuple = query(&game, &mut transcript, Vertex::new(0b01, 2).unwrap()).unwrap();
//! assert_eq!(tuple, vec![rat(1, 4); 2]);
//! transcript.charge_support(1);
//! assert_eq!(transcript.cost(), 2); // one query plus one support vertex
//! ```

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{Vertex, VertexSet};
use crate::labeling::{EdgeLabeling, LabelingJson};
use crate::rational::{parse_rational, Rational};

/// Largest player count for dense utility tables.
pub const MAX_DENSE_PLAYERS: usize = 20;

#[derive(Clone, Debug)]
enum UtilitySource {
    /// Explicit table, `utilities[player][profile bits]`.
    Table { utilities: Vec<Vec<Rational>> },
    /// Win-lose game induced by a ±1 labeling: `u_i(v) = 1` iff
    /// `R(v, v^{(i)}) = +1`.
    FromAs { labeling: EdgeLabeling },
    /// Game induced by an integer labeling: `u_i(v) = max(R(v,v^{(i)}), 0)/m`.
    FromNnv { labeling: EdgeLabeling, max_label: BigInt },
    /// Utilities of `inner`, multiplied by `alpha ∈ [0,1]`.
    Scaled { inner: Box<GameInstance>, alpha: Rational },
}

/// An n-player bi-strategy game with utilities in `[0,1]`.
#[derive(Clone, Debug)]
pub struct GameInstance {
    n: usize,
    source: UtilitySource,
}

impl GameInstance {
    /// Builds a dense game from a utility table `utilities[player][profile]`.
    pub fn from_table(n: usize, utilities: Vec<Vec<Rational>>) -> Result<Self> {
        if n < 1 || n > MAX_DENSE_PLAYERS {
            return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_DENSE_PLAYERS });
        }
        if utilities.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected {n} utility rows, got {}",
                utilities.len()
            )));
        }
        for row in &utilities {
            if row.len() != 1 << n {
                return Err(Error::InvalidInstance(format!(
                    "expected {} profiles per row, got {}",
                    1 << n,
                    row.len()
                )));
            }
            for u in row {
                if u < &Rational::zero() || u > &Rational::one() {
                    return Err(Error::InvalidInstance(format!("utility {u} outside [0,1]")));
                }
            }
        }
        Ok(GameInstance { n, source: UtilitySource::Table { utilities } })
    }

    /// The win-lose game of a complete ±1 labeling, with
    /// `u_i(v) - u_i(v^{(i)}) = R(v, v^{(i)})` at every `(v, i)`.
    /// Access to an edge the labeling leaves undefined is an error.
    pub fn from_as(labeling: EdgeLabeling) -> Self {
        GameInstance { n: labeling.n(), source: UtilitySource::FromAs { labeling } }
    }

    /// The game of an integer labeling, with
    /// `u_i(v) - u_i(v^{(i)}) = R(v, v^{(i)})/m` where `m` is the largest
    /// label magnitude; identically 0 when the labeling is empty.
    pub fn from_nnv(labeling: EdgeLabeling) -> Self {
        let max_label = labeling.max_abs_label();
        GameInstance { n: labeling.n(), source: UtilitySource::FromNnv { labeling, max_label } }
    }

    /// A game whose utilities are `alpha · u_i(v)`.
    pub fn scaled(&self, alpha: Rational) -> Result<Self> {
        if alpha < Rational::zero() || alpha > Rational::one() {
            return Err(Error::InvalidInstance(format!("scaling factor {alpha} outside [0,1]")));
        }
        Ok(GameInstance {
            n: self.n,
            source: UtilitySource::Scaled { inner: Box::new(self.clone()), alpha },
        })
    }

    /// Each `u_i(v)` drawn uniformly from `{0, 1/(2^t-1), …, 1}`.
    pub fn random<R: Rng>(n: usize, t_bits: u32, rng: &mut R) -> Result<Self> {
        if n < 1 || n > MAX_DENSE_PLAYERS {
            return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_DENSE_PLAYERS });
        }
        let levels: u64 = if t_bits == 0 { 1 } else { 1u64 << t_bits };
        let denom = BigInt::from(levels - 1);
        let utilities = (0..n)
            .map(|_| {
                (0..(1usize << n))
                    .map(|_| {
                        if levels == 1 {
                            Rational::zero()
                        } else {
                            Rational::new(BigInt::from(rng.gen_range(0..levels)), denom.clone())
                        }
                    })
                    .collect()
            })
            .collect();
        GameInstance::from_table(n, utilities)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `u_i(v)`.
    pub fn utility(&self, i: usize, v: Vertex) -> Result<Rational> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.n() });
        }
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        match &self.source {
            UtilitySource::Table { utilities } => Ok(utilities[i][v.bits() as usize].clone()),
            UtilitySource::FromAs { labeling } => {
                let r = labeling
                    .committed(v, i)
                    .ok_or(Error::UncommittedEdge { v: v.bits(), i })?;
                Ok(if r.is_one() { Rational::one() } else { Rational::zero() })
            }
            UtilitySource::FromNnv { labeling, max_label } => {
                if max_label.is_zero() {
                    return Ok(Rational::zero());
                }
                let r = labeling.label(v, i)?;
                if r.is_positive() {
                    Ok(Rational::new(r, max_label.clone()))
                } else {
                    Ok(Rational::zero())
                }
            }
            UtilitySource::Scaled { inner, alpha } => Ok(alpha * inner.utility(i, v)?),
        }
    }

    /// The full reply tuple `(u_1(v) … u_n(v))`.
    pub fn utilities(&self, v: Vertex) -> Result<Vec<Rational>> {
        (0..self.n).map(|i| self.utility(i, v)).collect()
    }

    pub fn to_json(&self) -> Result<GameJson> {
        match &self.source {
            UtilitySource::Table { utilities } => Ok(GameJson {
                n: self.n,
                kind: "table".into(),
                utilities: Some(
                    utilities
                        .iter()
                        .map(|row| row.iter().map(|u| u.to_string()).collect())
                        .collect(),
                ),
                labeling: None,
            }),
            UtilitySource::FromAs { labeling } => Ok(GameJson {
                n: self.n,
                kind: "from_as".into(),
                utilities: None,
                labeling: Some(labeling.to_json("as", None)),
            }),
            UtilitySource::FromNnv { labeling, .. } => Ok(GameJson {
                n: self.n,
                kind: "from_nnv".into(),
                utilities: None,
                labeling: Some(labeling.to_json("nnv", None)),
            }),
            UtilitySource::Scaled { .. } => Err(Error::InvalidInstance(
                "scaled games are runtime views and are not serialized".into(),
            )),
        }
    }

    pub fn from_json(json: &GameJson) -> Result<Self> {
        match json.kind.as_str() {
            "table" => {
                let rows = json.utilities.as_ref().ok_or_else(|| {
                    Error::InvalidInstance("table game requires utilities".into())
                })?;
                let utilities = rows
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?;
                GameInstance::from_table(json.n, utilities)
            }
            "from_as" => {
                let labeling = json.labeling.as_ref().ok_or_else(|| {
                    Error::InvalidInstance("from_as game requires a labeling".into())
                })?;
                Ok(GameInstance::from_as(EdgeLabeling::from_json(labeling)?))
            }
            "from_nnv" => {
                let labeling = json.labeling.as_ref().ok_or_else(|| {
                    Error::InvalidInstance("from_nnv game requires a labeling".into())
                })?;
                Ok(GameInstance::from_nnv(EdgeLabeling::from_json(labeling)?))
            }
            other => Err(Error::InvalidInstance(format!("unknown game kind {other:?}"))),
        }
    }
}

/// Wire format for games. Rationals are `"p/q"` decimal strings.
#[derive(Serialize, Deserialize)]
pub struct GameJson {
    pub n: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeling: Option<LabelingJson>,
}

/// Query log with cost accounting. Cost = queries made + support size
/// charged once the output is produced.
#[derive(Clone, Debug)]
pub struct QueryTranscript {
    n: usize,
    query_count: usize,
    queried: BTreeSet<u32>,
    log: Option<Vec<(Vertex, Vec<Rational>)>>,
    support_charged: usize,
}

impl QueryTranscript {
    /// Full transcript, recording every query with its answer.
    pub fn new(n: usize) -> Self {
        QueryTranscript {
            n,
            query_count: 0,
            queried: BTreeSet::new(),
            log: Some(Vec::new()),
            support_charged: 0,
        }
    }

    /// Counts queries and tracks the queried set without keeping answers;
    /// for long runs where the full log would dominate memory.
    pub fn counting_only(n: usize) -> Self {
        QueryTranscript { log: None, ..QueryTranscript::new(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn query_count(&self) -> usize {
        self.query_count
    }

    /// Distinct queried profiles, the set `Q`.
    pub fn queried_set(&self) -> VertexSet {
        VertexSet::from_iter(
            self.n,
            self.queried.iter().map(|&b| Vertex::new(b, self.n).expect("recorded bits valid")),
        )
        .expect("uniform dimension")
    }

    pub fn log(&self) -> Option<&[(Vertex, Vec<Rational>)]> {
        self.log.as_deref()
    }

    pub fn support_charged(&self) -> usize {
        self.support_charged
    }

    pub fn charge_support(&mut self, size: usize) {
        self.support_charged = size;
    }

    /// Queries made plus output support size.
    pub fn cost(&self) -> usize {
        self.query_count + self.support_charged
    }

    fn record(&mut self, v: Vertex, answer: &[Rational]) {
        self.query_count += 1;
        self.queried.insert(v.bits());
        if let Some(log) = &mut self.log {
            log.push((v, answer.to_vec()));
        }
    }
}

/// One oracle query: returns the full utility tuple at `v` and records it.
/// Repeated queries are charged each time.
pub fn query(game: &GameInstance, transcript: &mut QueryTranscript, v: Vertex) -> Result<Vec<Rational>> {
    if v.n() != game.n() {
        return Err(Error::DimensionMismatch { expected: game.n(), got: v.n() });
    }
    let answer = game.utilities(v)?;
    transcript.record(v, &answer);
    Ok(answer)
}
