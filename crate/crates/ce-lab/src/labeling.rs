//! Antisymmetric integer labelings of hypercube edges.
//!
//! One value is stored per undirected edge, keyed by its endpoint with the
//! edge coordinate cleared, so `R(u,v) = -R(v,u)` holds by construction.
//! Labels are arbitrary-precision integers: path labelings carry step
//! indices up to `L`, and exactness matters downstream.
//!
//! ```
//! use ce_lab::hypercube::{Path, Vertex};
//! use ce_lab::labeling::label_from_path;
//!
//! let path = Path::new(vec![
//!     Vertex::new(0b00, 2).unwrap(),
//!     Vertex::new(0b01, 2).unwrap(),
//!     Vertex::new(0b00, 2).unwrap(),
//! ]).unwrap();
//! let labeling = label_from_path(&path);
//! // the two traversals of the same edge accumulate: -1 + 2
//! let r = labeling.label(Vertex::new(0b00, 2).unwrap(), 0).unwrap();
//! assert_eq!(r, 1.into());
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{Path, Vertex};

/// Value of edges absent from the sparse map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefaultRule {
    /// Absent edges carry label 0 (path and NNV labelings).
    Zero,
    /// Absent edges are not yet committed (adversarial labelings);
    /// reading one is an error.
    Uncommitted,
    /// Absent edges point from the lexicographically smaller endpoint to
    /// the larger: `R(lower, upper) = +1`. Used to complete adversarial
    /// labelings without materializing all `n·2^{n-1}` edges.
    LexOut,
}

/// An antisymmetric labeling of hypercube edges by integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabeling {
    n: usize,
    /// Keyed by (endpoint with coordinate bit cleared, coordinate); the
    /// stored value is R(lower, upper).
    labels: BTreeMap<(u32, usize), BigInt>,
    default_rule: DefaultRule,
}

impl EdgeLabeling {
    pub fn new(n: usize, default_rule: DefaultRule) -> Self {
        EdgeLabeling { n, labels: BTreeMap::new(), default_rule }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn default_rule(&self) -> DefaultRule {
        self.default_rule
    }

    fn key(v: Vertex, i: usize) -> (u32, usize) {
        (v.bits() & !(1 << i), i)
    }

    /// `R(v, v^{(i)})` if the edge is stored, regardless of the default rule.
    pub fn committed(&self, v: Vertex, i: usize) -> Option<BigInt> {
        let stored = self.labels.get(&Self::key(v, i))?;
        Some(if v.bits() >> i & 1 == 0 { stored.clone() } else { -stored })
    }

    /// `R(v, v^{(i)})`, applying the default rule to absent edges.
    pub fn label(&self, v: Vertex, i: usize) -> Result<BigInt> {
        match self.committed(v, i) {
            Some(r) => Ok(r),
            None => match self.default_rule {
                DefaultRule::Zero => Ok(BigInt::zero()),
                DefaultRule::Uncommitted => Err(Error::UncommittedEdge { v: v.bits(), i }),
                DefaultRule::LexOut => {
                    Ok(if v.bits() >> i & 1 == 0 { BigInt::from(1) } else { BigInt::from(-1) })
                }
            },
        }
    }

    pub fn is_committed(&self, v: Vertex, i: usize) -> bool {
        self.labels.contains_key(&Self::key(v, i))
    }

    /// Sets `R(v, v^{(i)}) = r`, overwriting any previous value.
    pub fn set_label(&mut self, v: Vertex, i: usize, r: BigInt) {
        let signed = if v.bits() >> i & 1 == 0 { r } else { -r };
        self.labels.insert(Self::key(v, i), signed);
    }

    /// Adds `r` to `R(v, v^{(i)})` (treating an absent edge as 0).
    pub fn add_label(&mut self, v: Vertex, i: usize, r: BigInt) {
        let signed = if v.bits() >> i & 1 == 0 { r } else { -r };
        let entry = self.labels.entry(Self::key(v, i)).or_insert_with(BigInt::zero);
        *entry += signed;
    }

    /// Stored edges as `(lower endpoint, coordinate, R(lower, upper))`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, usize, &BigInt)> {
        let n = self.n;
        self.labels
            .iter()
            .map(move |(&(bits, i), r)| (Vertex::new(bits, n).expect("stored key is valid"), i, r))
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    /// `true` iff every stored label is ±1.
    pub fn is_sign_labeling(&self) -> bool {
        self.labels.values().all(|r| r.abs() == BigInt::from(1))
    }

    /// Out-weight `Σ_i R(v, v^{(i)})`.
    pub fn out_weight(&self, v: Vertex) -> Result<BigInt> {
        let mut sum = BigInt::zero();
        for i in 0..self.n {
            sum += self.label(v, i)?;
        }
        Ok(sum)
    }

    /// In-degree of `v`: requires every incident edge to carry a ±1 label.
    pub fn in_degree(&self, v: Vertex) -> Result<InDegree> {
        let mut count = 0usize;
        let mut signed_sum = 0i64;
        for i in 0..self.n {
            let out = self.label(v, i)?;
            if out.abs() != BigInt::from(1) {
                return Err(Error::InvalidInstance(format!(
                    "in_degree requires ±1 labels, found {out} at ({v}, {i})"
                )));
            }
            // R(v^{(i)}, v) = -R(v, v^{(i)})
            if out == BigInt::from(-1) {
                count += 1;
                signed_sum += 1;
            } else {
                signed_sum -= 1;
            }
        }
        Ok(InDegree { count, signed_sum })
    }

    /// `true` iff `Σ_i R(v, v^{(i)}) ≥ 0`.
    pub fn nnv_check(&self, v: Vertex) -> Result<bool> {
        Ok(self.out_weight(v)? >= BigInt::zero())
    }

    /// Maximum of `|R(u,v)|` over stored edges; 0 when empty.
    pub fn max_abs_label(&self) -> BigInt {
        self.labels
            .values()
            .map(|r| r.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Result of an in-degree evaluation at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InDegree {
    /// `|{i : R(v^{(i)}, v) = +1}|`.
    pub count: usize,
    /// `Σ_i R(v^{(i)}, v)`; the win condition `in-degree > n/4` is
    /// equivalent to `signed_sum ≤ n/2` holding with room to spare.
    pub signed_sum: i64,
}

/// Black-box query access to a ±1 edge orientation: a query at `v` returns
/// the directions `R(v, v^{(i)})` of all `n` incident edges.
pub trait SignOracle {
    fn n(&self) -> usize;

    /// Answers with all `n` incident directions, each ±1, and counts the
    /// query.
    fn query_signs(&mut self, v: Vertex) -> Result<Vec<i8>>;

    fn queries_made(&self) -> usize;
}

/// A [`SignOracle`] backed by a concrete labeling (complete ±1, or any
/// labeling whose default rule resolves every edge).
#[derive(Clone, Debug)]
pub struct LabelingOracle {
    labeling: EdgeLabeling,
    queries: usize,
}

impl LabelingOracle {
    pub fn new(labeling: EdgeLabeling) -> Self {
        LabelingOracle { labeling, queries: 0 }
    }

    pub fn labeling(&self) -> &EdgeLabeling {
        &self.labeling
    }
}

impl SignOracle for LabelingOracle {
    fn n(&self) -> usize {
        self.labeling.n()
    }

    fn query_signs(&mut self, v: Vertex) -> Result<Vec<i8>> {
        self.queries += 1;
        (0..self.labeling.n())
            .map(|i| {
                let r = self.labeling.label(v, i)?;
                if r == BigInt::from(1) {
                    Ok(1i8)
                } else if r == BigInt::from(-1) {
                    Ok(-1i8)
                } else {
                    Err(Error::InvalidInstance(format!(
                        "sign oracle requires ±1 labels, found {r} at ({v}, {i})"
                    )))
                }
            })
            .collect()
    }

    fn queries_made(&self) -> usize {
        self.queries
    }
}

/// A complete uniformly random ±1 labeling of the n-cube. Deterministic
/// given the rng state; dense, so meant for `n` small enough to enumerate.
pub fn random_sign_labeling<R: rand::Rng>(n: usize, rng: &mut R) -> EdgeLabeling {
    let mut labeling = EdgeLabeling::new(n, DefaultRule::Uncommitted);
    for bits in 0..(1u32 << n) {
        for i in 0..n {
            if bits >> i & 1 == 0 {
                let r: i64 = if rng.gen() { 1 } else { -1 };
                labeling.set_label(Vertex::new(bits, n).expect("bits in range"), i, BigInt::from(r));
            }
        }
    }
    labeling
}

/// The labeling induced by a path: the traversal of step `j ∈ {1..L}`
/// over edge `(v_{j-1} → v_j)` contributes `-j` to `R(v_{j-1}, v_j)`,
/// summing over multiple traversals.
pub fn label_from_path(path: &Path) -> EdgeLabeling {
    let mut labeling = EdgeLabeling::new(path.n(), DefaultRule::Zero);
    for (j, w) in path.vertices().windows(2).enumerate() {
        let step = BigInt::from(j as u64 + 1);
        let i = (w[0].bits() ^ w[1].bits()).trailing_zeros() as usize;
        labeling.add_label(w[0], i, -step);
    }
    labeling
}

/// Closed-form out-weight of a path labeling at `v`:
/// `-|{j ∈ {0..L-1} : v_j = v}| + L·[v = v_L]`.
pub fn path_out_weight_formula(path: &Path, v: Vertex) -> BigInt {
    let len = path.len();
    let visits = path.vertices()[..len].iter().filter(|u| **u == v).count();
    let mut w = -BigInt::from(visits as u64);
    if path.end() == v {
        w += BigInt::from(len as u64);
    }
    w
}

/// A path together with its induced labeling.
#[derive(Clone, Debug)]
pub struct PathInstance {
    path: Path,
    labeling: EdgeLabeling,
}

impl PathInstance {
    pub fn new(path: Path) -> Self {
        let labeling = label_from_path(&path);
        PathInstance { path, labeling }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn labeling(&self) -> &EdgeLabeling {
        &self.labeling
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

    /// `v_L`, the path end; with a Hamiltonian prefix this is the unique
    /// vertex of non-negative out-weight.
    pub fn end_vertex(&self) -> Vertex {
        self.path.end()
    }
}

/// Wire format for labelings and path instances.
#[derive(Serialize, Deserialize)]
pub struct LabelingJson {
    pub n: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub edges: Vec<EdgeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
pub struct EdgeJson {
    /// Lower endpoint, as a bitstring.
    pub v: String,
    /// Edge coordinate.
    pub i: usize,
    /// `R(lower, upper)` as a decimal string.
    pub r: String,
}

impl EdgeLabeling {
    pub fn to_json(&self, kind: &str, seed: Option<u64>) -> LabelingJson {
        LabelingJson {
            n: self.n,
            kind: kind.to_string(),
            seed,
            edges: self
                .edges()
                .map(|(v, i, r)| EdgeJson { v: v.to_bitstring(), i, r: r.to_string() })
                .collect(),
            path: None,
        }
    }

    pub fn from_json(json: &LabelingJson) -> Result<Self> {
        if let Some(path) = &json.path {
            let vertices = path
                .iter()
                .map(|s| Vertex::from_bitstring(s))
                .collect::<Result<Vec<_>>>()?;
            return Ok(PathInstance::new(Path::new(vertices)?).labeling().clone());
        }
        let default_rule = match json.kind.as_str() {
            "as" => DefaultRule::Uncommitted,
            "nnv" | "path" => DefaultRule::Zero,
            other => {
                return Err(Error::InvalidInstance(format!("unknown labeling kind {other:?}")))
            }
        };
        let mut labeling = EdgeLabeling::new(json.n, default_rule);
        for edge in &json.edges {
            let v = Vertex::from_bitstring(&edge.v)?;
            if v.n() != json.n {
                return Err(Error::DimensionMismatch { expected: json.n, got: v.n() });
            }
            if edge.i >= json.n {
                return Err(Error::IndexOutOfRange { index: edge.i, n: json.n });
            }
            let r: BigInt = edge
                .r
                .parse()
                .map_err(|_| Error::InvalidInstance(format!("bad integer {:?}", edge.r)))?;
            labeling.set_label(v, edge.i, r);
        }
        Ok(labeling)
    }
}

impl PathInstance {
    pub fn to_json(&self, seed: Option<u64>) -> LabelingJson {
        let mut json = self.labeling.to_json("path", seed);
        json.path = Some(self.path.vertices().iter().map(|v| v.to_bitstring()).collect());
        json
    }

    pub fn from_json(json: &LabelingJson) -> Result<Self> {
        let path = json
            .path
            .as_ref()
            .ok_or_else(|| Error::InvalidInstance("path instance requires a path field".into()))?;
        let vertices = path
            .iter()
            .map(|s| Vertex::from_bitstring(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(PathInstance::new(Path::new(vertices)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{gray_path, random_walk};
    use proptest::prelude::*;
    use rand::Rng as _;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(bits: u32, n: usize) -> Vertex {
        Vertex::new(bits, n).unwrap()
    }

    fn path(n: usize, bits: &[u32]) -> Path {
        Path::new(bits.iter().map(|&b| v(b, n)).collect()).unwrap()
    }

    #[test]
    fn label_from_path_examples() {
        let l = label_from_path(&path(1, &[0, 1]));
        assert_eq!(l.label(v(0, 1), 0).unwrap(), BigInt::from(-1));
        assert_eq!(l.label(v(1, 1), 0).unwrap(), BigInt::from(1));

        let l = label_from_path(&path(2, &[0b00, 0b01, 0b00]));
        assert_eq!(l.label(v(0b00, 2), 0).unwrap(), BigInt::from(1));

        let l = label_from_path(&path(2, &[0b00, 0b01, 0b11]));
        assert_eq!(l.label(v(0b00, 2), 0).unwrap(), BigInt::from(-1));
        assert_eq!(l.label(v(0b01, 2), 1).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn out_weight_examples() {
        let empty = EdgeLabeling::new(3, DefaultRule::Zero);
        for bits in 0..8 {
            assert!(empty.out_weight(v(bits, 3)).unwrap().is_zero());
        }

        let l = label_from_path(&path(2, &[0b00, 0b01, 0b11]));
        assert_eq!(l.out_weight(v(0b00, 2)).unwrap(), BigInt::from(-1));
        assert_eq!(l.out_weight(v(0b01, 2)).unwrap(), BigInt::from(-1));
        assert_eq!(l.out_weight(v(0b11, 2)).unwrap(), BigInt::from(2));
        assert_eq!(l.out_weight(v(0b10, 2)).unwrap(), BigInt::from(0));

        let l = label_from_path(&path(2, &[0b00, 0b01, 0b00]));
        assert_eq!(l.out_weight(v(0b00, 2)).unwrap(), BigInt::from(1));
        assert_eq!(l.out_weight(v(0b01, 2)).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn in_degree_examples() {
        let n = 4;
        let mut all_out = EdgeLabeling::new(n, DefaultRule::Uncommitted);
        let center = v(0b0000, n);
        for i in 0..n {
            all_out.set_label(center, i, BigInt::from(1));
        }
        let d = all_out.in_degree(center).unwrap();
        assert_eq!(d.count, 0);
        assert_eq!(d.signed_sum, -(n as i64));

        let mut all_in = EdgeLabeling::new(n, DefaultRule::Uncommitted);
        for i in 0..n {
            all_in.set_label(center, i, BigInt::from(-1));
        }
        let d = all_in.in_degree(center).unwrap();
        assert_eq!(d.count, n);
        assert_eq!(d.signed_sum, n as i64);

        let mut split = EdgeLabeling::new(n, DefaultRule::Uncommitted);
        for i in 0..n {
            split.set_label(center, i, BigInt::from(if i < 2 { -1 } else { 1 }));
        }
        let d = split.in_degree(center).unwrap();
        assert_eq!(d.count, 2);
        assert_eq!(d.signed_sum, 0);
        assert!(d.count * 4 > n); // "in-degree > n/4" holds: 2 > 1

        let incomplete = EdgeLabeling::new(n, DefaultRule::Uncommitted);
        assert!(incomplete.in_degree(center).is_err());
    }

    #[test]
    fn nnv_check_examples() {
        let empty = EdgeLabeling::new(2, DefaultRule::Zero);
        for bits in 0..4 {
            assert!(empty.nnv_check(v(bits, 2)).unwrap());
        }

        let l = label_from_path(&path(2, &[0b00, 0b01, 0b11]));
        assert!(l.nnv_check(v(0b11, 2)).unwrap());
        assert!(l.nnv_check(v(0b10, 2)).unwrap()); // unvisited
        assert!(!l.nnv_check(v(0b00, 2)).unwrap());
        assert!(!l.nnv_check(v(0b01, 2)).unwrap());
    }

    #[test]
    fn max_abs_label_examples() {
        assert!(EdgeLabeling::new(3, DefaultRule::Zero).max_abs_label().is_zero());
        let l = label_from_path(&path(1, &[0, 1]));
        assert_eq!(l.max_abs_label(), BigInt::from(1));
        // all edges distinct: last step carries the largest magnitude
        let l = label_from_path(&gray_path(3).unwrap());
        assert_eq!(l.max_abs_label(), BigInt::from(7));
    }

    #[test]
    fn hamiltonian_prefix_unique_nonnegative_vertex() {
        for n in 4..=8usize {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let prefix = gray_path(n).unwrap();
            let walk = random_walk(prefix.end(), 3 * n, &mut rng);
            let instance = PathInstance::new(prefix.join(&walk).unwrap());
            let hits: Vec<Vertex> = (0..(1u32 << n))
                .map(|b| v(b, n))
                .filter(|u| instance.labeling().nnv_check(*u).unwrap())
                .collect();
            assert_eq!(hits, vec![instance.end_vertex()]);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let instance = PathInstance::new(random_walk(v(0, 4), 30, &mut rng));
        let json = instance.to_json(Some(42));
        let text = serde_json::to_string(&json).unwrap();
        let back = PathInstance::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.path(), instance.path());
        assert_eq!(back.labeling(), instance.labeling());

        let as_labeling = {
            let mut l = EdgeLabeling::new(2, DefaultRule::Uncommitted);
            for (bits, i, r) in [(0b00, 0, 1), (0b00, 1, -1), (0b01, 1, 1), (0b10, 0, -1)] {
                l.set_label(v(bits, 2), i, BigInt::from(r));
            }
            l
        };
        let text = serde_json::to_string(&as_labeling.to_json("as", None)).unwrap();
        let back = EdgeLabeling::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, as_labeling);
        assert_eq!(back.default_rule(), DefaultRule::Uncommitted);
    }

    proptest! {
        #[test]
        fn path_lemma_and_conservation(seed in 0u64..300, n in 2usize..=8, steps in 0usize..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = v(rng.gen_range(0..(1u32 << n)), n);
            let p = random_walk(start, steps, &mut rng);
            let l = label_from_path(&p);
            let mut total = BigInt::zero();
            for bits in 0..(1u32 << n) {
                let u = v(bits, n);
                let w = l.out_weight(u).unwrap();
                prop_assert_eq!(&w, &path_out_weight_formula(&p, u));
                total += w;
            }
            prop_assert!(total.is_zero());
        }

        #[test]
        fn antisymmetry_is_structural(seed in 0u64..200, n in 2usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_walk(v(0, n), 40, &mut rng);
            let l = label_from_path(&p);
            for bits in 0..(1u32 << n) {
                let u = v(bits, n);
                for i in 0..n {
                    let forward = l.label(u, i).unwrap();
                    let backward = l.label(u.flip(i).unwrap(), i).unwrap();
                    prop_assert_eq!(forward, -backward);
                }
            }
        }
    }
}
