//! Lower-bound machinery: the outward-orienting adversary for the
//! approximate-sink game, the polite-simulation wrapper, and the
//! Hit-The-Path referee.
//!
//! ```
//! use ce_lab::adversaries::AsAdversary;
//! use ce_lab::hypercube::Vertex;
//!
//! let mut adversary = AsAdversary::new(8);
//! let v = Vertex::new(0b0001_1000, 8).unwrap();
//! // the first query at any vertex sees every incident edge point out
//! assert_eq!(adversary.answer(v).unwrap(), vec![1; 8]);
//! // its neighbors now each see exactly one committed incoming edge
//! let reply = adversary.answer(v.flip(3).unwrap()).unwrap();
//! assert_eq!(reply.iter().filter(|&&d| d == -1).count(), 1);
//! ```

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::hypercube::{exceeds, peel_order, Path, Threshold, Vertex, VertexSet};
use crate::labeling::{DefaultRule, EdgeLabeling, SignOracle};

/// The adversary for the approximate-sink game: whenever a vertex is
/// queried, all previously uncommitted incident edges are committed
/// pointing out of it, so a polite query sequence never sees in-degree
/// above the politeness threshold.
#[derive(Clone, Debug)]
pub struct AsAdversary {
    committed: EdgeLabeling,
    queried: Vec<Vertex>,
    answers: Vec<(Vertex, Vec<i8>)>,
}

impl AsAdversary {
    pub fn new(n: usize) -> Self {
        AsAdversary {
            committed: EdgeLabeling::new(n, DefaultRule::Uncommitted),
            queried: Vec::new(),
            answers: Vec::new(),
        }
    }

    /// All queried vertices, in order.
    pub fn queried(&self) -> &[Vertex] {
        &self.queried
    }

    /// The recorded `(query, answer)` pairs, in order.
    pub fn answers(&self) -> &[(Vertex, Vec<i8>)] {
        &self.answers
    }

    /// Answers a query: committed incident edges keep their values, every
    /// uncommitted incident edge is committed pointing out of `v`.
    pub fn answer(&mut self, v: Vertex) -> Result<Vec<i8>> {
        if v.n() != self.committed.n() {
            return Err(Error::DimensionMismatch { expected: self.committed.n(), got: v.n() });
        }
        let mut directions = Vec::with_capacity(v.n());
        for i in 0..v.n() {
            let dir = match self.committed.committed(v, i) {
                Some(r) => {
                    if r == BigInt::from(1) {
                        1i8
                    } else {
                        -1i8
                    }
                }
                None => {
                    self.committed.set_label(v, i, BigInt::from(1));
                    1i8
                }
            };
            directions.push(dir);
        }
        self.queried.push(v);
        self.answers.push((v, directions.clone()));
        Ok(directions)
    }

    /// Completes all uncommitted edges with the fixed lexicographic rule
    /// (orient from the smaller endpoint to the larger). The result is a
    /// full antisymmetric ±1 labeling agreeing with every answer given;
    /// replaying the queries against it reproduces the answers bit for bit.
    pub fn finalize(&self) -> EdgeLabeling {
        let mut full = self.committed.clone();
        // absent edges resolve lazily through the default rule
        full_set_default(&mut full);
        full
    }
}

fn full_set_default(labeling: &mut EdgeLabeling) {
    *labeling = {
        let mut rebuilt = EdgeLabeling::new(labeling.n(), DefaultRule::LexOut);
        for (v, i, r) in labeling.edges() {
            rebuilt.set_label(v, i, r.clone());
        }
        rebuilt
    };
}

impl SignOracle for AsAdversary {
    fn n(&self) -> usize {
        self.committed.n()
    }

    fn query_signs(&mut self, v: Vertex) -> Result<Vec<i8>> {
        self.answer(v)
    }

    fn queries_made(&self) -> usize {
        self.queried.len()
    }
}

/// Per-run statistics of a polite simulation.
#[derive(Clone, Debug, Default)]
pub struct PolitenessStats {
    /// Total queries issued to the underlying oracle (`|Q_T^*|`).
    pub issued: usize,
    /// Queries requested by the inner algorithm.
    pub requested: usize,
    /// Largest number of previously issued neighbors seen at issue time.
    pub max_prior_neighbors: usize,
    /// Politeness violations (must stay 0).
    pub violations: usize,
}

/// Wraps an oracle so that the effective query sequence is polite: each
/// inner query is expanded to the closure of the query set, issued in an
/// order that keeps the number of previously queried neighbors at most
/// `theta_polite`.
pub struct PoliteWrapper<O: SignOracle> {
    inner: O,
    theta_closure: Threshold,
    theta_polite: Threshold,
    issued_set: VertexSet,
    issued_order: Vec<Vertex>,
    cache: BTreeMap<u32, Vec<i8>>,
    /// Issued-neighbor counts for every vertex adjacent to the issued set,
    /// kept incrementally so closures extend in time proportional to the
    /// batch instead of the whole history.
    neighbor_counts: BTreeMap<u32, usize>,
    stats: PolitenessStats,
    /// Maximum number of issued queries before the wrapper refuses.
    budget: usize,
}

impl<O: SignOracle> PoliteWrapper<O> {
    /// `theta_polite ≥ 2·theta_closure` is required (the paper relation
    /// between `n/4` and `n/8`).
    pub fn new(inner: O, theta_closure: Threshold, theta_polite: Threshold, budget: usize) -> Result<Self> {
        if theta_polite < Threshold::from_integer(2) * theta_closure {
            return Err(Error::InvalidInstance(format!(
                "polite threshold {theta_polite} must be at least twice the closure threshold {theta_closure}"
            )));
        }
        let n = inner.n();
        Ok(PoliteWrapper {
            inner,
            theta_closure,
            theta_polite,
            issued_set: VertexSet::empty(n),
            issued_order: Vec::new(),
            cache: BTreeMap::new(),
            neighbor_counts: BTreeMap::new(),
            stats: PolitenessStats::default(),
            budget,
        })
    }

    pub fn stats(&self) -> &PolitenessStats {
        &self.stats
    }

    pub fn issued_order(&self) -> &[Vertex] {
        &self.issued_order
    }

    pub fn issued_set(&self) -> &VertexSet {
        &self.issued_set
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    /// Answer for every issued query, keyed by vertex bits.
    pub fn issued_answers(&self) -> &BTreeMap<u32, Vec<i8>> {
        &self.cache
    }

    fn issue(&mut self, v: Vertex) -> Result<()> {
        if self.issued_order.len() >= self.budget {
            return Err(Error::InvalidInstance("polite wrapper budget exhausted".into()));
        }
        let prior = self.issued_set.neighbor_count(v);
        if prior > self.stats.max_prior_neighbors {
            self.stats.max_prior_neighbors = prior;
        }
        if Threshold::from_integer(prior as i64) > self.theta_polite {
            self.stats.violations += 1;
        }
        let answer = self.inner.query_signs(v)?;
        self.cache.insert(v.bits(), answer);
        self.issued_set.insert(v)?;
        self.issued_order.push(v);
        for u in v.neighbors() {
            *self.neighbor_counts.entry(u.bits()).or_insert(0) += 1;
        }
        self.stats.issued += 1;
        Ok(())
    }

    /// `closure(issued ∪ {q}) \ issued`, grown from `q` alone: the issued
    /// set is already closed, so the cascade can only start at `q`.
    fn fresh_batch(&self, q: Vertex) -> VertexSet {
        let mut batch_set: BTreeSet<u32> = BTreeSet::new();
        batch_set.insert(q.bits());
        let mut queue: VecDeque<Vertex> = VecDeque::new();
        queue.push_back(q);
        // counts including batch contributions, for candidates only
        let mut local: BTreeMap<u32, usize> = BTreeMap::new();
        while let Some(v) = queue.pop_front() {
            for u in v.neighbors() {
                if self.issued_set.contains(u) || batch_set.contains(&u.bits()) {
                    continue;
                }
                let c = local
                    .entry(u.bits())
                    .or_insert_with(|| self.neighbor_counts.get(&u.bits()).copied().unwrap_or(0));
                *c += 1;
                if exceeds(*c, self.theta_closure) {
                    batch_set.insert(u.bits());
                    queue.push_back(u);
                }
            }
        }
        VertexSet::from_iter(
            self.n(),
            batch_set
                .into_iter()
                .map(|bits| Vertex::new(bits, q.n()).expect("dimension preserved")),
        )
        .expect("uniform dimension")
    }
}

impl<O: SignOracle> SignOracle for PoliteWrapper<O> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Expands the requested query to the closure of the issued set plus
    /// the query, issues the new vertices in peel order, and answers from
    /// the cache.
    fn query_signs(&mut self, q: Vertex) -> Result<Vec<i8>> {
        self.stats.requested += 1;
        if let Some(answer) = self.cache.get(&q.bits()) {
            return Ok(answer.clone());
        }
        let fresh = self.fresh_batch(q);
        // each fresh vertex has at most theta_closure neighbors in the old
        // issued set; peeling bounds the neighbors it sees within the batch
        let peel_threshold = self.theta_polite - self.theta_closure;
        let order = peel_order(&fresh, peel_threshold)?;
        for v in order {
            self.issue(v)?;
        }
        Ok(self
            .cache
            .get(&q.bits())
            .expect("requested query is in its own closure")
            .clone())
    }

    fn queries_made(&self) -> usize {
        self.stats.issued
    }
}

/// Which reveal frontier judges the win condition of a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierReading {
    /// Win if the query lies beyond position `t·k` (the batch revealed
    /// during the step counts as revealed). Default.
    AfterReveal,
    /// Win if the query lies beyond position `(t-1)·k`.
    BeforeReveal,
}

/// Outcome of one referee step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HtpOutcome {
    Win,
    /// No hit; path positions up to the returned index are now revealed.
    Miss { revealed_upto: usize },
}

/// Referee for the Hit-The-Path game: a hidden path with its origin
/// revealed, `k` further positions revealed per step regardless of the
/// query, and an immediate win for any query on the unrevealed part.
pub struct HtpReferee {
    path: Path,
    /// Vertex bits -> sorted positions along the path.
    positions: BTreeMap<u32, Vec<usize>>,
    quota: usize,
    revealed_upto: usize,
    step: usize,
    won_at: Option<usize>,
    reading: FrontierReading,
    queries: usize,
}

impl HtpReferee {
    pub fn new(path: Path, quota: usize, reading: FrontierReading) -> Self {
        let mut positions: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (j, v) in path.vertices().iter().enumerate() {
            positions.entry(v.bits()).or_default().push(j);
        }
        HtpReferee {
            path,
            positions,
            quota,
            revealed_upto: 0,
            step: 0,
            won_at: None,
            reading,
            queries: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.path.n()
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    pub fn queries_made(&self) -> usize {
        self.queries
    }

    pub fn won_at(&self) -> Option<usize> {
        self.won_at
    }

    /// Index of the last revealed path position.
    pub fn revealed_upto(&self) -> usize {
        self.revealed_upto
    }

    /// The revealed prefix `(v_0 … v_{revealed_upto})`.
    pub fn revealed_prefix(&self) -> &[Vertex] {
        &self.path.vertices()[..=self.revealed_upto]
    }

    /// One step: an optional query, then the scheduled reveal, then the
    /// win check against the frontier selected by the reading.
    pub fn step(&mut self, query: Option<Vertex>) -> Result<HtpOutcome> {
        if self.won_at.is_some() {
            return Err(Error::SteppedAfterWin);
        }
        self.step += 1;
        let t = self.step;
        let frontier = match self.reading {
            FrontierReading::AfterReveal => t * self.quota,
            FrontierReading::BeforeReveal => (t - 1) * self.quota,
        };
        self.revealed_upto = (t * self.quota).min(self.path.len());
        if let Some(q) = query {
            self.queries += 1;
            if self.hits_beyond(q, frontier) {
                self.won_at = Some(t);
                return Ok(HtpOutcome::Win);
            }
        }
        Ok(HtpOutcome::Miss { revealed_upto: self.revealed_upto })
    }

    /// `true` iff `v` occurs on the path strictly beyond `frontier`.
    pub fn hits_beyond(&self, v: Vertex, frontier: usize) -> bool {
        self.positions
            .get(&v.bits())
            .map(|js| js.iter().any(|&j| j > frontier && j <= self.path.len()))
            .unwrap_or(false)
    }

    /// Confirms a claimed end vertex.
    pub fn confirm_end(&self, v: Vertex) -> bool {
        self.path.end() == v
    }

    /// The true hidden path (for post-run audits only).
    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// Labels at `v` induced by the prefix `(v_0 … v_r)` of a path. When `v`
/// occurs nowhere at positions `≥ r`, these equal the labels of the full
/// path: every hidden traversal (step `> r`) runs between positions
/// `v_r … v_L`, so it can only touch edges incident to those occurrences.
pub fn prefix_reply(path: &Path, revealed_upto: usize, v: Vertex) -> Vec<BigInt> {
    let prefix = Path::new(path.vertices()[..=revealed_upto].to_vec()).expect("prefix of a path");
    let labeling = crate::labeling::label_from_path(&prefix);
    (0..path.n())
        .map(|i| labeling.label(v, i).expect("zero-default labeling"))
        .collect()
}
