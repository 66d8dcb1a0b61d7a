//! Vertices, paths, closures, and combinatorial primitives on the
//! n-dimensional boolean hypercube.
//!
//! A vertex doubles as a pure strategy profile of an n-player bi-strategy
//! game: player `i` occupies bit position `i` (position 0 is player 1).
//! Text encoding writes the bits of players `1..n` left to right, so the
//! n=4 profile where only player 1 plays 1 reads `"1000"`.
//!
//! ```
//! use ce_lab::hypercube::Vertex;
//!
//! let v = Vertex::new(0b101, 3).unwrap();
//! assert_eq!(v.flip(1).unwrap().bits(), 0b111);
//! assert_eq!(v.flip(1).unwrap().flip(1).unwrap(), v);
//! assert_eq!(v.to_bitstring(), "101");
//! ```

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported dimension for any structure.
pub const MAX_DIMENSION: usize = 30;

/// Largest dimension for which dense `2^n`-sized vectors are computed.
pub const MAX_DENSE_DIMENSION: usize = 14;

/// A rational threshold such as `n/8`, kept exact.
pub type Threshold = Ratio<i64>;

/// `true` iff `count` strictly exceeds the rational threshold.
pub fn exceeds(count: usize, threshold: Threshold) -> bool {
    Threshold::from_integer(count as i64) > threshold
}

/// A vertex of `{0,1}^n`, i.e. a pure strategy profile of an n-player
/// bi-strategy game.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    bits: u32,
    n: u8,
}

impl Vertex {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        if n < 1 || n > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange {
                n,
                min: 1,
                max: MAX_DIMENSION,
            });
        }
        // only the low n positions are meaningful; higher bits are cleared
        Ok(Vertex {
            bits: bits & ((1u32 << n) - 1),
            n: n as u8,
        })
    }

    /// The all-zeros profile.
    pub fn zero(n: usize) -> Result<Self> {
        Vertex::new(0, n)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Strategy of player `i` (bit `i`).
    pub fn bit(self, i: usize) -> Result<u8> {
        self.check_index(i)?;
        Ok(((self.bits >> i) & 1) as u8)
    }

    /// `v^{(i)}`: bit `i` inverted, all other bits unchanged.
    pub fn flip(self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        Ok(Vertex {
            bits: self.bits ^ (1 << i),
            n: self.n,
        })
    }

    /// `v^{i→b}`: `v` with bit `i` set to `b`; equals `v` when `v_i = b`.
    pub fn set_bit(self, i: usize, b: u8) -> Result<Self> {
        self.check_index(i)?;
        let bits = if b == 0 {
            self.bits & !(1 << i)
        } else {
            self.bits | (1 << i)
        };
        Ok(Vertex { bits, n: self.n })
    }

    /// All `n` neighbors, in coordinate order.
    pub fn neighbors(self) -> impl Iterator<Item = Vertex> {
        (0..self.n()).map(move |i| Vertex {
            bits: self.bits ^ (1 << i),
            n: self.n,
        })
    }

    pub fn hamming_distance(self, other: Vertex) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Fixed-width bit string, player 1 first.
    pub fn to_bitstring(self) -> String {
        (0..self.n())
            .map(|i| if (self.bits >> i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Parses the fixed-width encoding produced by [`Vertex::to_bitstring`].
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let n = s.len();
        if n < 1 || n > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange {
                n,
                min: 1,
                max: MAX_DIMENSION,
            });
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => {
                    return Err(Error::InvalidInstance(format!(
                        "invalid bitstring character {c:?} in {s:?}"
                    )))
                }
            }
        }
        Vertex::new(bits, n)
    }

    fn check_index(self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(Error::IndexOutOfRange { index: i, n: self.n() })
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({})", self.to_bitstring())
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// A (not necessarily simple) path in the hypercube: consecutive vertices
/// differ in exactly one bit. Revisits are allowed, staying put is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<Vertex>,
    n: usize,
}

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInstance("path must contain at least one vertex".into()));
        }
        let n = vertices[0].n();
        for w in vertices.windows(2) {
            if w[1].n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w[1].n() });
            }
            if w[0].hamming_distance(w[1]) != 1 {
                return Err(Error::NotAPath { at: w[0].bits(), next: w[1].bits() });
            }
        }
        Ok(Path { vertices, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges (steps), `L`.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false // a path always contains at least its start vertex
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn end(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn join(mut self, other: &Path) -> Result<Path> {
        if other.start() != self.end() {
            return Err(Error::NotAPath {
                at: self.end().bits(),
                next: other.start().bits(),
            });
        }
        self.vertices.extend_from_slice(&other.vertices[1..]);
        Ok(self)
    }
}

/// A finite set of vertices, all of the same dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    members: BTreeSet<u32>,
    n: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { members: BTreeSet::new(), n }
    }

    pub fn from_iter<I: IntoIterator<Item = Vertex>>(n: usize, iter: I) -> Result<Self> {
        let mut set = VertexSet::empty(n);
        for v in iter {
            set.insert(v)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, v: Vertex) -> Result<bool> {
        if v.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.n() });
        }
        Ok(self.members.insert(v.bits()))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.contains(&v.bits())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        let n = self.n as u8;
        self.members.iter().map(move |&bits| Vertex { bits, n })
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            members: self.members.union(&other.members).copied().collect(),
            n: self.n,
        }
    }

    /// Number of neighbors of `v` inside the set.
    pub fn neighbor_count(&self, v: Vertex) -> usize {
        v.neighbors().filter(|u| self.contains(*u)).count()
    }
}

/// Iterator over the reflected binary code of dimension `n`: vertex `j` of
/// the sequence is `j ^ (j >> 1)`.
pub fn gray_code_iter(n: usize) -> impl Iterator<Item = u32> {
    (0u64..(1u64 << n)).map(|j| (j ^ (j >> 1)) as u32)
}

/// The fixed Hamiltonian path: reflected binary code order starting at the
/// all-zeros vertex, visiting all `2^n` vertices exactly once.
pub fn gray_path(n: usize) -> Result<Path> {
    if n < 1 || n > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_DIMENSION });
    }
    let vertices = gray_code_iter(n)
        .map(|bits| Vertex { bits, n: n as u8 })
        .collect();
    Path::new(vertices)
}

/// A walk of `steps` edges from `start`; each step flips one coordinate
/// chosen uniformly at random. Deterministic given the rng state.
pub fn random_walk<R: Rng>(start: Vertex, steps: usize, rng: &mut R) -> Path {
    let n = start.n();
    let mut vertices = Vec::with_capacity(steps + 1);
    let mut current = start;
    vertices.push(current);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        current = current.flip(i).expect("coordinate in range");
        vertices.push(current);
    }
    Path { vertices, n }
}

/// Number of *directed* edges within `U`:
/// `e(U) = |{(u,i) | u ∈ U and u^{(i)} ∈ U}|`.
/// Each undirected internal edge contributes 2.
pub fn internal_edge_count(set: &VertexSet) -> usize {
    set.iter().map(|u| set.neighbor_count(u)).sum()
}

/// The closure of `V` at threshold `θ`: the fixed point of repeatedly adding
/// any vertex with strictly more than `θ` neighbors already inside. The
/// result is independent of the addition order.
pub fn closure(set: &VertexSet, threshold: Threshold) -> VertexSet {
    let mut result = set.clone();
    // neighbor-in-set counts for every vertex adjacent to the set
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for v in set.iter() {
        for u in v.neighbors() {
            *counts.entry(u.bits()).or_insert(0) += 1;
        }
    }
    let n = set.n() as u8;
    let mut queue: VecDeque<u32> = counts
        .iter()
        .filter(|(bits, &c)| !result.contains(Vertex { bits: **bits, n }) && exceeds(c, threshold))
        .map(|(&bits, _)| bits)
        .collect();
    while let Some(bits) = queue.pop_front() {
        let v = Vertex { bits, n };
        if result.contains(v) {
            continue;
        }
        let count = counts.get(&bits).copied().unwrap_or(0);
        if !exceeds(count, threshold) {
            continue;
        }
        result.insert(v).expect("dimension matches");
        for u in v.neighbors() {
            let c = counts.entry(u.bits()).or_insert(0);
            *c += 1;
            if !result.contains(u) && exceeds(*c, threshold) {
                queue.push_back(u.bits());
            }
        }
    }
    result
}

/// Orders `N` so that every vertex has at most `θ` neighbors of `N`
/// preceding it, by repeatedly extracting a minimum-internal-degree vertex
/// and placing it last. Fails explicitly if some nonempty subset has
/// minimum internal degree above `θ`.
pub fn peel_order(set: &VertexSet, threshold: Threshold) -> Result<Vec<Vertex>> {
    let mut remaining: BTreeSet<u32> = set.iter().map(|v| v.bits()).collect();
    let n = set.n() as u8;
    let mut degree: BTreeMap<u32, usize> = remaining
        .iter()
        .map(|&bits| {
            let v = Vertex { bits, n };
            let d = v.neighbors().filter(|u| remaining.contains(&u.bits())).count();
            (bits, d)
        })
        .collect();
    let mut reversed = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (&bits, &d) = degree
            .iter()
            .filter(|(b, _)| remaining.contains(b))
            .min_by_key(|(b, d)| (**d, **b))
            .expect("remaining is nonempty");
        if exceeds(d, threshold) {
            return Err(Error::PeelInfeasible {
                threshold: threshold.to_string(),
                stuck: remaining.len(),
                min_degree: d,
            });
        }
        remaining.remove(&bits);
        let v = Vertex { bits, n };
        for u in v.neighbors() {
            if let Some(c) = degree.get_mut(&u.bits()) {
                *c = c.saturating_sub(1);
            }
        }
        reversed.push(v);
    }
    reversed.reverse();
    Ok(reversed)
}

/// Exact distribution of the flip-a-uniform-coordinate walk after `steps`
/// steps, as a dense vector of `2^n` rationals indexed by vertex bits.
pub fn walk_distribution(start: Vertex, steps: usize) -> Result<Vec<BigRational>> {
    let n = start.n();
    if n > MAX_DENSE_DIMENSION {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_DENSE_DIMENSION });
    }
    let size = 1usize << n;
    // integer weights over the implicit denominator n^t
    let mut weights = vec![BigInt::zero(); size];
    weights[start.bits() as usize] = BigInt::one();
    for _ in 0..steps {
        let mut next = vec![BigInt::zero(); size];
        for (bits, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                next[bits ^ (1 << i)] += w;
            }
        }
        weights = next;
    }
    let denom: BigInt = BigInt::from(n).pow(steps as u32);
    Ok(weights
        .into_iter()
        .map(|w| BigRational::new(w, denom.clone()))
        .collect())
}

/// Total-variation distance between two distributions on the same index set.
pub fn total_variation(p: &[BigRational], q: &[BigRational]) -> BigRational {
    let two = BigRational::from_integer(2.into());
    p.iter()
        .zip(q)
        .map(|(a, b)| if a >= b { a - b } else { b - a })
        .sum::<BigRational>()
        / two
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flip_examples() {
        let v = Vertex::new(0b101, 3).unwrap();
        assert_eq!(v.flip(1).unwrap().bits(), 0b111);
        let v = Vertex::new(0b000, 3).unwrap();
        assert_eq!(v.flip(2).unwrap().bits(), 0b100);
        assert!(v.flip(3).is_err());
    }

    #[test]
    fn set_bit_examples() {
        let v = Vertex::new(0b10, 2).unwrap();
        assert_eq!(v.set_bit(0, 0).unwrap().bits(), 0b10);
        assert_eq!(v.set_bit(1, 0).unwrap().bits(), 0b00);
        assert!(v.set_bit(2, 0).is_err());
    }

    #[test]
    fn bitstring_round_trip_and_player_order() {
        // player 1 = bit 0 is the leftmost character
        let v = Vertex::new(0b0001, 4).unwrap();
        assert_eq!(v.to_bitstring(), "1000");
        assert_eq!(Vertex::from_bitstring("1000").unwrap(), v);
        assert!(Vertex::from_bitstring("10x0").is_err());
    }

    #[test]
    fn gray_path_small() {
        let p = gray_path(1).unwrap();
        assert_eq!(p.vertices().iter().map(|v| v.bits()).collect::<Vec<_>>(), vec![0, 1]);
        let p = gray_path(2).unwrap();
        assert_eq!(
            p.vertices().iter().map(|v| v.bits()).collect::<Vec<_>>(),
            vec![0b00, 0b01, 0b11, 0b10]
        );
        let p = gray_path(3).unwrap();
        assert_eq!(
            p.vertices().iter().map(|v| v.bits()).collect::<Vec<_>>(),
            vec![0, 1, 3, 2, 6, 7, 5, 4]
        );
        assert!(gray_path(0).is_err());
        assert!(gray_path(31).is_err());
    }

    #[test]
    fn gray_path_is_hamiltonian() {
        for n in 1..=10 {
            let p = gray_path(n).unwrap();
            let distinct: BTreeSet<u32> = p.vertices().iter().map(|v| v.bits()).collect();
            assert_eq!(distinct.len(), 1 << n);
            assert_eq!(p.start(), Vertex::zero(n).unwrap());
        }
    }

    #[test]
    fn random_walk_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let start = Vertex::zero(10).unwrap();
        let p = random_walk(start, 0, &mut rng);
        assert_eq!(p.vertices(), &[start]);
        let p = random_walk(start, 100, &mut rng);
        assert_eq!(p.len(), 100);
        // coordinate flip frequencies: 100 steps over 10 coordinates,
        // each Binomial(100, 1/10), sigma = 3; require within 3 sigma of 10
        let mut freq = [0usize; 10];
        for w in p.vertices().windows(2) {
            let i = (w[0].bits() ^ w[1].bits()).trailing_zeros() as usize;
            freq[i] += 1;
        }
        for f in freq {
            assert!((f as f64 - 10.0).abs() <= 9.0, "flip frequency {f} outside 3 sigma");
        }
    }

    #[test]
    fn random_walk_deterministic_per_seed() {
        let start = Vertex::zero(8).unwrap();
        let a = random_walk(start, 50, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_walk(start, 50, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn internal_edge_count_examples() {
        let n1 = VertexSet::from_iter(1, [Vertex::new(0, 1).unwrap(), Vertex::new(1, 1).unwrap()]).unwrap();
        assert_eq!(internal_edge_count(&n1), 2);
        assert_eq!(internal_edge_count(&VertexSet::empty(4)), 0);
        // a k-subcube achieves e(U) = k 2^k
        for k in 1..=3 {
            let sub = VertexSet::from_iter(5, (0u32..(1 << k)).map(|b| Vertex::new(b, 5).unwrap())).unwrap();
            assert_eq!(internal_edge_count(&sub), k * (1 << k));
        }
    }

    #[test]
    fn closure_examples() {
        let empty = VertexSet::empty(4);
        assert_eq!(closure(&empty, Threshold::new(1, 1)), empty);

        // threshold >= n makes growth unreachable
        let v = VertexSet::from_iter(4, [Vertex::new(0b0000, 4).unwrap(), Vertex::new(0b0011, 4).unwrap()]).unwrap();
        assert_eq!(closure(&v, Threshold::new(4, 1)), v);

        // against an independent brute-force fixed point
        let got = closure(&v, Threshold::new(1, 1));
        assert_eq!(got, brute_force_closure(&v, Threshold::new(1, 1)));
    }

    fn brute_force_closure(set: &VertexSet, threshold: Threshold) -> VertexSet {
        let mut result = set.clone();
        loop {
            let mut grew = false;
            for bits in 0..(1u32 << set.n()) {
                let v = Vertex::new(bits, set.n()).unwrap();
                if !result.contains(v) && exceeds(result.neighbor_count(v), threshold) {
                    result.insert(v).unwrap();
                    grew = true;
                }
            }
            if !grew {
                return result;
            }
        }
    }

    #[test]
    fn closure_size_bound_at_paper_threshold() {
        // |V| < 2^{n/8-1} is non-vacuous first at n = 24 with |V| <= 3
        let n = 24;
        let theta = Threshold::new(n as i64, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            for size in 1..=3usize {
                let set = VertexSet::from_iter(
                    n,
                    (0..size).map(|_| Vertex::new(rng.gen_range(0..(1u32 << n)), n).unwrap()),
                )
                .unwrap();
                let starred = closure(&set, theta);
                assert!(starred.len() <= 2 * set.len());
            }
        }
    }

    #[test]
    fn peel_order_examples() {
        let single = VertexSet::from_iter(3, [Vertex::new(0b101, 3).unwrap()]).unwrap();
        assert_eq!(peel_order(&single, Threshold::new(0, 1)).unwrap().len(), 1);

        let pair = VertexSet::from_iter(2, [Vertex::new(0b00, 2).unwrap(), Vertex::new(0b01, 2).unwrap()]).unwrap();
        let order = peel_order(&pair, Threshold::new(1, 1)).unwrap();
        assert_valid_peel(&order, Threshold::new(1, 1));

        // 2-subcube in n=4 at theta = 2
        let sub = VertexSet::from_iter(4, (0u32..4).map(|b| Vertex::new(b, 4).unwrap())).unwrap();
        let order = peel_order(&sub, Threshold::new(2, 1)).unwrap();
        assert_eq!(order.len(), 4);
        assert_valid_peel(&order, Threshold::new(2, 1));

        // infeasible: the 2-subcube has min internal degree 2 > 1
        assert!(peel_order(&sub, Threshold::new(1, 1)).is_err());
    }

    fn assert_valid_peel(order: &[Vertex], threshold: Threshold) {
        for (idx, v) in order.iter().enumerate() {
            let preceding = order[..idx]
                .iter()
                .filter(|u| v.hamming_distance(**u) == 1)
                .count();
            assert!(
                !exceeds(preceding, threshold),
                "vertex {v} has {preceding} preceding neighbors"
            );
        }
    }

    #[test]
    fn walk_distribution_examples() {
        let start = Vertex::new(0b010, 3).unwrap();
        let d0 = walk_distribution(start, 0).unwrap();
        assert!(d0[start.bits() as usize].is_one());
        assert_eq!(d0.iter().filter(|p| !p.is_zero()).count(), 1);

        let d1 = walk_distribution(start, 1).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        for u in start.neighbors() {
            assert_eq!(d1[u.bits() as usize], third);
        }
        assert!(d1[start.bits() as usize].is_zero());

        assert!(walk_distribution(Vertex::zero(20).unwrap(), 1).is_err());
    }

    #[test]
    fn walk_distribution_mixes_on_parity_class() {
        let n = 8;
        let start = Vertex::zero(n).unwrap();
        let d = walk_distribution(start, 64).unwrap();
        // after an even number of steps the walk sits on the even-weight class
        let class: Vec<usize> = (0..(1usize << n)).filter(|b| b.count_ones() % 2 == 0).collect();
        let uniform = BigRational::new(1.into(), BigInt::from(class.len()));
        let tv: BigRational = class
            .iter()
            .map(|&b| {
                let p = &d[b];
                if p >= &uniform { p - &uniform } else { &uniform - p }
            })
            .sum::<BigRational>()
            / BigRational::from_integer(2.into());
        assert!(tv <= BigRational::new(1.into(), 100.into()), "tv = {tv}");
        for b in 0..(1usize << n) {
            if b.count_ones() % 2 == 1 {
                assert!(d[b].is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn flip_is_involution(bits in 0u32..256, i in 0usize..8) {
            let v = Vertex::new(bits, 8).unwrap();
            prop_assert_eq!(v.flip(i).unwrap().flip(i).unwrap(), v);
        }

        #[test]
        fn set_bit_is_identity_or_flip(bits in 0u32..256, i in 0usize..8, b in 0u8..2) {
            let v = Vertex::new(bits, 8).unwrap();
            let w = v.set_bit(i, b).unwrap();
            prop_assert!(w == v || w == v.flip(i).unwrap());
            prop_assert_eq!(v.set_bit(i, v.bit(i).unwrap()).unwrap(), v);
        }

        #[test]
        fn isoperimetric_bound_on_random_sets(
            seed in 0u64..5000,
            n in 3usize..=12,
            size in 1usize..40,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = VertexSet::from_iter(
                n,
                (0..size).map(|_| Vertex::new(rng.gen_range(0..(1u32 << n)), n).unwrap()),
            ).unwrap();
            let e = internal_edge_count(&set) as f64;
            let s = set.len() as f64;
            prop_assert!(e <= s * s.log2() + 1e-9);
        }

        #[test]
        fn closure_idempotent_monotone_order_independent(
            seed in 0u64..2000,
            n in 3usize..=10,
            size in 0usize..16,
            theta_num in 1i64..5,
        ) {
            let theta = Threshold::new(theta_num, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = VertexSet::from_iter(
                n,
                (0..size).map(|_| Vertex::new(rng.gen_range(0..(1u32 << n)), n).unwrap()),
            ).unwrap();
            let starred = closure(&set, theta);
            // idempotent
            prop_assert_eq!(closure(&starred, theta), starred.clone());
            // monotone: drop an element
            if !set.is_empty() {
                let drop = set.iter().next().unwrap();
                let smaller = VertexSet::from_iter(n, set.iter().filter(|v| *v != drop)).unwrap();
                prop_assert!(closure(&smaller, theta).is_subset(&starred));
            }
            // fixed point: no outside vertex exceeds the threshold
            for bits in 0..(1u32 << n) {
                let v = Vertex::new(bits, n).unwrap();
                if !starred.contains(v) {
                    prop_assert!(!exceeds(starred.neighbor_count(v), theta));
                }
            }
        }
    }
}
