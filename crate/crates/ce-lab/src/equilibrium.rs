//! Distributions over profiles, regret computation, ε-CE verification, the
//! sum-of-regrets identity, and weak-to-strong support compaction.
//!
//! ```
//! use ce_lab::equilibrium::{verify_ce, SparseDistribution};
//! use ce_lab::rational::{rat, rat_int};
//! use ce_lab::testutil::matching_pennies;
//! use ce_lab::hypercube::Vertex;
//!
//! let uniform = SparseDistribution::uniform(2).unwrap();
//! let report = verify_ce(&uniform, &matching_pennies(), rat_int(0)).unwrap();
//! assert!(report.pass);
//! ```

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::GameInstance;
use crate::hypercube::{Vertex, VertexSet};
use crate::rational::{parse_rational, rat_int, Rational};

/// A probability distribution over strategy profiles. Zero-mass entries are
/// never stored, so the key set is exactly the support and the masses sum
/// to 1 exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseDistribution {
    n: usize,
    entries: BTreeMap<u32, Rational>,
}

impl SparseDistribution {
    pub fn new<I: IntoIterator<Item = (Vertex, Rational)>>(n: usize, entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (v, p) in entries {
            if v.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.n() });
            }
            if p < Rational::zero() {
                return Err(Error::InvalidInstance(format!("negative probability {p}")));
            }
            if p.is_zero() {
                continue;
            }
            total += &p;
            *map.entry(v.bits()).or_insert_with(Rational::zero) += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!("probabilities sum to {total}, not 1")));
        }
        Ok(SparseDistribution { n, entries: map })
    }

    pub fn point_mass(v: Vertex) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(v.bits(), Rational::one());
        SparseDistribution { n: v.n(), entries }
    }

    /// Uniform over all `2^n` profiles.
    pub fn uniform(n: usize) -> Result<Self> {
        let p = Rational::new(1.into(), (1u64 << n).into());
        SparseDistribution::new(n, (0..(1u32 << n)).map(|b| (Vertex::new(b, n).unwrap(), p.clone())))
    }

    /// Empirical distribution of visit counts.
    pub fn from_counts(n: usize, counts: &BTreeMap<u32, usize>) -> Result<Self> {
        let total: usize = counts.values().sum();
        if total == 0 {
            return Err(Error::InvalidInstance("empty visit counts".into()));
        }
        SparseDistribution::new(
            n,
            counts.iter().map(|(&bits, &c)| {
                (
                    Vertex::new(bits, n).unwrap(),
                    Rational::new((c as u64).into(), (total as u64).into()),
                )
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = Vertex> + '_ {
        let n = self.n;
        self.entries.keys().map(move |&b| Vertex::new(b, n).unwrap())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, &Rational)> + '_ {
        let n = self.n;
        self.entries.iter().map(move |(&b, p)| (Vertex::new(b, n).unwrap(), p))
    }

    pub fn mass(&self, v: Vertex) -> Rational {
        self.entries.get(&v.bits()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support_set(&self) -> VertexSet {
        VertexSet::from_iter(self.n, self.support()).expect("uniform dimension")
    }

    pub fn to_json(&self) -> DistributionJson {
        DistributionJson {
            entries: self
                .iter()
                .map(|(v, p)| EntryJson { profile: v.to_bitstring(), p: p.to_string() })
                .collect(),
        }
    }

    pub fn from_json(json: &DistributionJson) -> Result<Self> {
        if json.entries.is_empty() {
            return Err(Error::InvalidInstance("empty distribution".into()));
        }
        let n = json.entries[0].profile.len();
        SparseDistribution::new(
            n,
            json.entries
                .iter()
                .map(|e| Ok((Vertex::from_bitstring(&e.profile)?, parse_rational(&e.p)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// Wire format for distributions.
#[derive(Serialize, Deserialize)]
pub struct DistributionJson {
    pub entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
pub struct EntryJson {
    pub profile: String,
    /// Probability as a `"p/q"` string.
    pub p: String,
}

/// `Regret_{i→b}(x) = Σ_v x(v) u_i(v^{i→b}) - Σ_v x(v) u_i(v)`, summed over
/// the support only.
pub fn regret(x: &SparseDistribution, game: &GameInstance, i: usize, b: u8) -> Result<Rational> {
    let mut sum = Rational::zero();
    for (v, p) in x.iter() {
        let switched = v.set_bit(i, b)?;
        if switched == v {
            continue;
        }
        sum += p * (game.utility(i, switched)? - game.utility(i, v)?);
    }
    Ok(sum)
}

/// The full `2n`-entry regret table plus the verification verdict at `ε`.
#[derive(Clone, Debug, Serialize)]
pub struct RegretReport {
    /// `regrets[i] = (Regret_{i→0}, Regret_{i→1})` as strings for serialization.
    #[serde(serialize_with = "serialize_regret_table")]
    pub regrets: Vec<(Rational, Rational)>,
    #[serde(serialize_with = "serialize_rational")]
    pub max_regret: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub epsilon: Rational,
    pub pass: bool,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn serialize_regret_table<S: serde::Serializer>(
    table: &[(Rational, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(table.len()))?;
    for (a, b) in table {
        seq.serialize_element(&[a.to_string(), b.to_string()])?;
    }
    seq.end()
}

/// Verifies whether `x` is an ε-CE: all `2n` regrets at most `ε`.
/// `ε = 0` is the exact-CE test.
pub fn verify_ce(x: &SparseDistribution, game: &GameInstance, eps: Rational) -> Result<RegretReport> {
    let mut regrets = Vec::with_capacity(game.n());
    let mut max_regret: Option<Rational> = None;
    for i in 0..game.n() {
        let r0 = regret(x, game, i, 0)?;
        let r1 = regret(x, game, i, 1)?;
        for r in [&r0, &r1] {
            if max_regret.as_ref().map_or(true, |m| r > m) {
                max_regret = Some(r.clone());
            }
        }
        regrets.push((r0, r1));
    }
    let max_regret = max_regret.unwrap_or_else(Rational::zero);
    let pass = max_regret <= eps;
    Ok(RegretReport { regrets, max_regret, epsilon: eps, pass })
}

/// `Σ_v x(v) Σ_i (u_i(v^{(i)}) - u_i(v))`; equals the sum of all `2n`
/// regrets exactly.
pub fn total_regret_sum(x: &SparseDistribution, game: &GameInstance) -> Result<Rational> {
    let mut sum = Rational::zero();
    for (v, p) in x.iter() {
        let mut inner = Rational::zero();
        for i in 0..game.n() {
            inner += game.utility(i, v.flip(i)?)? - game.utility(i, v)?;
        }
        sum += p * inner;
    }
    Ok(sum)
}

/// The averaging witness: a support vertex `v` with
/// `Σ_i (u_i(v^{(i)}) - u_i(v)) ≤ bound`. Fails explicitly when no support
/// vertex qualifies, which signals a non-conforming input distribution.
pub fn extract_witness(
    x: &SparseDistribution,
    game: &GameInstance,
    bound: &Rational,
) -> Result<Vertex> {
    for (v, _) in x.iter() {
        let mut inner = Rational::zero();
        for i in 0..game.n() {
            inner += game.utility(i, v.flip(i)?)? - game.utility(i, v)?;
        }
        if &inner <= bound {
            return Ok(v);
        }
    }
    Err(Error::NoWitness { bound: bound.to_string() })
}

/// Scaling, restriction, and bound data for a support compaction.
#[derive(Clone, Debug)]
pub struct CompactionRecord {
    pub alpha: Rational,
    /// `β = 1 / Σ_{v ∈ Q'} x'(v)`.
    pub beta: Rational,
    /// `Q' = {v | v ∈ Q or v^{(c)} ∈ Q}` for the chosen coordinate `c`.
    pub q_prime: VertexSet,
    pub input_eps: Rational,
    /// Guaranteed regret bound `ε/α + 4(α + ε)` on the compacted output,
    /// assuming the weak run was performed on α-scaled utilities.
    pub output_eps_bound: Rational,
}

/// `Q ∪ {v^{(coord)} | v ∈ Q}`.
pub fn flip_closure(q: &VertexSet, coord: usize) -> Result<VertexSet> {
    let mut q_prime = q.clone();
    for v in q.iter() {
        q_prime.insert(v.flip(coord)?)?;
    }
    Ok(q_prime)
}

/// Restricts `x'` to `Q'` and renormalizes; coordinate 1 (index 0) as stated.
pub fn compact_support(
    x_prime: &SparseDistribution,
    q: &VertexSet,
    alpha: Rational,
    input_eps: Rational,
) -> Result<(SparseDistribution, CompactionRecord)> {
    compact_support_at(x_prime, q, alpha, input_eps, 0)
}

/// [`compact_support`] with the flip coordinate as an explicit parameter.
pub fn compact_support_at(
    x_prime: &SparseDistribution,
    q: &VertexSet,
    alpha: Rational,
    input_eps: Rational,
    coord: usize,
) -> Result<(SparseDistribution, CompactionRecord)> {
    let q_prime = flip_closure(q, coord)?;
    let kept_mass: Rational = x_prime
        .iter()
        .filter(|(v, _)| q_prime.contains(*v))
        .map(|(_, p)| p.clone())
        .sum();
    if kept_mass.is_zero() {
        return Err(Error::EmptyCompaction);
    }
    let beta = Rational::one() / &kept_mass;
    let compacted = SparseDistribution::new(
        x_prime.n(),
        x_prime
            .iter()
            .filter(|(v, _)| q_prime.contains(*v))
            .map(|(v, p)| (v, p * &beta)),
    )?;
    let output_eps_bound = &input_eps / &alpha + rat_int(4) * (&alpha + &input_eps);
    let record = CompactionRecord { alpha, beta, q_prime, input_eps, output_eps_bound };
    Ok((compacted, record))
}

/// The default `α`: the rational nearest `√ε` with denominator at most
/// `2^16`.
pub fn default_alpha(eps: &Rational) -> Rational {
    let eps_f = rational_to_f64(eps);
    let denom: i64 = 1 << 16;
    let numer = (eps_f.sqrt() * denom as f64).round() as i64;
    Rational::new(numer.max(1).into(), denom.into())
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(0.0)
}

/// Outcome of auditing the weight an ε-CE puts outside `Q'`.
#[derive(Clone, Debug)]
pub struct Lemma2Audit {
    /// `α = max_{v ∈ Q'} u_1(v)` (coordinate player's utility).
    pub alpha: Rational,
    /// `Σ_{v ∉ Q'} x(v)`.
    pub outside_weight: Rational,
    /// The claimed bound `2(α + ε)`.
    pub bound: Rational,
    /// A utility completion exhibiting `Regret > ε`, when one exists:
    /// the modified game, the deviation strategy `b`, and the regret value.
    pub violation: Option<(GameInstance, u8, Rational)>,
}

/// Searches for a utility completion contradicting ε-CE correctness when
/// the output `x` puts more than `2(α+ε)` weight outside
/// `Q' = {v | v ∈ Q or v^{(coord)} ∈ Q}`.
///
/// Two completions are tried per side `b`: utilities of the coordinate
/// player zeroed outside `Q'`, and the zero/one split by the coordinate
/// bit. Both leave utilities on `Q'` untouched, so the algorithm's
/// transcript is unaffected.
pub fn lemma2_audit(
    game: &GameInstance,
    x: &SparseDistribution,
    q: &VertexSet,
    eps: &Rational,
    coord: usize,
) -> Result<Lemma2Audit> {
    let n = game.n();
    let q_prime = flip_closure(q, coord)?;
    let mut alpha = Rational::zero();
    for v in q_prime.iter() {
        let u = game.utility(coord, v)?;
        if u > alpha {
            alpha = u;
        }
    }
    let outside_weight: Rational = x
        .iter()
        .filter(|(v, _)| !q_prime.contains(*v))
        .map(|(_, p)| p.clone())
        .sum();
    let bound = rat_int(2) * (&alpha + eps);

    // outside Q', the coordinate player's utility becomes:
    //   None     -> identically zero (the proof's first way)
    //   Some(b)  -> the zero/one split [v_coord = b] (the second way, both sides)
    let completions = [None, Some(1u8), Some(0u8)];
    let mut violation = None;
    'search: for split in completions {
        let mut table: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(1 << n);
            for bits in 0..(1u32 << n) {
                let v = Vertex::new(bits, n)?;
                let u = if i == coord && !q_prime.contains(v) {
                    match split {
                        Some(b) if v.bit(coord)? == b => Rational::one(),
                        _ => Rational::zero(),
                    }
                } else {
                    game.utility(i, v)?
                };
                row.push(u);
            }
            table.push(row);
        }
        let completed = GameInstance::from_table(n, table)?;
        for b in [1u8, 0u8] {
            let r = regret(x, &completed, coord, b)?;
            if &r > eps {
                violation = Some((completed, b, r));
                break 'search;
            }
        }
    }

    Ok(Lemma2Audit { alpha, outside_weight, bound, violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{query, GameInstance, QueryTranscript};
    use crate::rational::rat;
    use crate::testutil::{coordination_game, matching_pennies};
    use proptest::prelude::*;
    use rand::Rng as _;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(bits: u32, n: usize) -> Vertex {
        Vertex::new(bits, n).unwrap()
    }

    #[test]
    fn regret_examples() {
        let mp = matching_pennies();
        // point mass, b = v_i: zero by construction
        let point = SparseDistribution::point_mass(v(0b01, 2));
        assert!(regret(&point, &mp, 0, 1).unwrap().is_zero());
        // point mass, b = 1 - v_i: single-term sum
        let expected = mp.utility(0, v(0b00, 2)).unwrap() - mp.utility(0, v(0b01, 2)).unwrap();
        assert_eq!(regret(&point, &mp, 0, 0).unwrap(), expected);
        // uniform on matching pennies: all regrets vanish
        let uniform = SparseDistribution::uniform(2).unwrap();
        for i in 0..2 {
            for b in 0..2 {
                assert!(regret(&uniform, &mp, i, b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn verify_ce_examples() {
        let constant =
            GameInstance::from_table(2, vec![vec![rat(1, 2); 4], vec![rat(1, 2); 4]]).unwrap();
        let point = SparseDistribution::point_mass(v(0b10, 2));
        assert!(verify_ce(&point, &constant, rat_int(0)).unwrap().pass);

        let uniform = SparseDistribution::uniform(2).unwrap();
        assert!(verify_ce(&uniform, &matching_pennies(), rat_int(0)).unwrap().pass);

        // coordination game, point mass on the miscoordinated profile
        // where player 1 plays 0 and player 2 plays 1
        let report = verify_ce(
            &SparseDistribution::point_mass(v(0b10, 2)),
            &coordination_game(),
            rat(99, 100),
        )
        .unwrap();
        assert!(!report.pass);
        // player 1 switching to 1 reaches the coordinated profile
        assert_eq!(report.regrets[0].1, rat_int(1));
        assert_eq!(report.max_regret, rat_int(1));
    }

    #[test]
    fn total_regret_sum_examples() {
        let mp = matching_pennies();
        let point = SparseDistribution::point_mass(v(0b00, 2));
        let direct: Rational = (0..2)
            .map(|i| {
                mp.utility(i, v(0b00, 2).flip(i).unwrap()).unwrap()
                    - mp.utility(i, v(0b00, 2)).unwrap()
            })
            .sum();
        assert_eq!(total_regret_sum(&point, &mp).unwrap(), direct);

        let constant =
            GameInstance::from_table(2, vec![vec![rat(1, 3); 4], vec![rat(1, 3); 4]]).unwrap();
        assert!(total_regret_sum(&SparseDistribution::uniform(2).unwrap(), &constant)
            .unwrap()
            .is_zero());
    }

    fn random_sparse_distribution<R: rand::Rng>(n: usize, rng: &mut R) -> SparseDistribution {
        let size = rng.gen_range(1..=(1usize << n).min(8));
        let mut weights: BTreeMap<u32, u64> = BTreeMap::new();
        for _ in 0..size {
            *weights.entry(rng.gen_range(0..(1u32 << n))).or_insert(0) += rng.gen_range(1..10);
        }
        let total: u64 = weights.values().sum();
        SparseDistribution::new(
            n,
            weights
                .into_iter()
                .map(|(bits, w)| (v(bits, n), Rational::new(w.into(), total.into()))),
        )
        .unwrap()
    }

    #[test]
    fn extract_witness_examples() {
        // point-mass 0-CE on a constant game returns the point
        let constant =
            GameInstance::from_table(2, vec![vec![rat(1, 2); 4], vec![rat(1, 2); 4]]).unwrap();
        let point = SparseDistribution::point_mass(v(0b11, 2));
        assert_eq!(extract_witness(&point, &constant, &rat_int(0)).unwrap(), v(0b11, 2));

        // no support vertex meets an impossible bound
        let coord = coordination_game();
        let bad = SparseDistribution::point_mass(v(0b01, 2));
        assert!(extract_witness(&bad, &coord, &rat_int(-10)).is_err());
    }

    #[test]
    fn compact_support_examples() {
        let n = 3;
        let q = VertexSet::from_iter(n, [v(0b000, n), v(0b011, n)]).unwrap();
        // support already inside Q': nothing removed, beta = 1
        let x = SparseDistribution::new(
            n,
            [(v(0b000, n), rat(1, 2)), (v(0b001, n), rat(1, 2))],
        )
        .unwrap();
        let (out, rec) = compact_support(&x, &q, rat(1, 10), rat(1, 100)).unwrap();
        assert_eq!(out, x);
        assert!(rec.beta.is_one());
        assert_eq!(rec.output_eps_bound, rat(1, 10) + rat_int(4) * (rat(1, 10) + rat(1, 100)));

        // half the mass outside Q': forced renormalization to a point mass
        let x = SparseDistribution::new(
            n,
            [(v(0b000, n), rat(1, 2)), (v(0b110, n), rat(1, 2))],
        )
        .unwrap();
        let (out, rec) = compact_support(&x, &q, rat(1, 10), rat(1, 100)).unwrap();
        assert_eq!(out, SparseDistribution::point_mass(v(0b000, n)));
        assert_eq!(rec.beta, rat_int(2));

        // everything outside: explicit failure
        let x = SparseDistribution::point_mass(v(0b110, n));
        assert!(compact_support(&x, &q, rat(1, 10), rat(1, 100)).is_err());
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let game = GameInstance::random(4, 6, &mut rng).unwrap();
            let alpha = rat(3, 7);
            let scaled = game.scaled(alpha.clone()).unwrap();
            let x = random_sparse_distribution(4, &mut rng);
            for i in 0..4 {
                for b in 0..2 {
                    let original = regret(&x, &game, i, b).unwrap();
                    let scaled_r = regret(&x, &scaled, i, b).unwrap();
                    assert_eq!(scaled_r, &alpha * original);
                }
            }
        }
    }

    #[test]
    fn lemma2_audit_finds_violations() {
        let n = 4;
        // small utilities for the coordinate player keep alpha at 1/8
        let mut table: Vec<Vec<Rational>> = vec![vec![rat(1, 8); 1 << n]];
        for _ in 1..n {
            table.push(vec![rat(1, 2); 1 << n]);
        }
        let game = GameInstance::from_table(n, table).unwrap();
        let mut transcript = QueryTranscript::new(n);
        for bits in [0b0000u32, 0b0001] {
            query(&game, &mut transcript, v(bits, n)).unwrap();
        }
        let q = transcript.queried_set();
        let eps = rat(1, 100);

        // a distribution dumping all its mass far outside Q' must be caught
        let bad = SparseDistribution::point_mass(v(0b1100, n));
        let audit = lemma2_audit(&game, &bad, &q, &eps, 0).unwrap();
        assert_eq!(audit.alpha, rat(1, 8));
        assert!(audit.outside_weight > audit.bound);
        let (completed, b, r) = audit.violation.expect("violating completion must exist");
        assert!(r > eps);
        assert!(b == 0 || b == 1);
        // the completion does not disturb utilities on Q'
        for w in q.iter() {
            for i in 0..n {
                assert_eq!(completed.utility(i, w).unwrap(), game.utility(i, w).unwrap());
            }
        }
    }

    #[test]
    fn lemma2_audit_accepts_inside_supports() {
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        // win-lose utilities make alpha = 1 likely; use a game scaled to
        // zero on the coordinate player so alpha is small
        let mut table: Vec<Vec<Rational>> = Vec::new();
        for _ in 0..n {
            table.push((0..(1 << n)).map(|_| rat(1, 8) * rat_int(rng.gen_range(0..2))).collect());
        }
        let game = GameInstance::from_table(n, table).unwrap();
        let mut transcript = QueryTranscript::new(n);
        for bits in 0..4u32 {
            query(&game, &mut transcript, v(bits, n)).unwrap();
        }
        let q = transcript.queried_set();
        // support inside Q': outside weight 0, no violation may be reported
        let x = SparseDistribution::new(
            n,
            [(v(0b0000, n), rat(1, 2)), (v(0b0001, n), rat(1, 2))],
        )
        .unwrap();
        let audit = lemma2_audit(&game, &x, &q, &rat(1, 2), 0).unwrap();
        assert!(audit.outside_weight.is_zero());
        assert!(audit.violation.is_none());
    }

    #[test]
    fn distribution_json_round_trip() {
        let x = SparseDistribution::new(
            3,
            [(v(0b001, 3), rat(1, 3)), (v(0b111, 3), rat(2, 3))],
        )
        .unwrap();
        let text = serde_json::to_string(&x.to_json()).unwrap();
        let back = SparseDistribution::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(SparseDistribution::new(2, [(v(0b00, 2), rat(1, 2))]).is_err());
        assert!(SparseDistribution::new(2, [(v(0b00, 2), rat(-1, 2)), (v(0b01, 2), rat(3, 2))]).is_err());
        // zero-mass entries are dropped, not stored
        let x = SparseDistribution::new(
            2,
            [(v(0b00, 2), rat_int(1)), (v(0b01, 2), rat_int(0))],
        )
        .unwrap();
        assert_eq!(x.support_size(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn regret_sum_identity(seed in 0u64..1000, n in 2usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let game = GameInstance::random(n, 5, &mut rng).unwrap();
            let x = random_sparse_distribution(n, &mut rng);
            let mut by_pairs = Rational::zero();
            for i in 0..n {
                for b in 0..2u8 {
                    by_pairs += regret(&x, &game, i, b).unwrap();
                }
            }
            prop_assert_eq!(by_pairs, total_regret_sum(&x, &game).unwrap());
        }
    }
}
