//! The forty Kernaghan-Peres rays and the orthogonal bases they form.
//!
//! Each ray is the joint eigenvector of one edge's four commuting observables
//! for one admissible sign pattern. Rays are kept as primitive integer vectors
//! (entries turn out to be in {0, ±1}), so orthogonality and identification
//! are exact comparisons.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, integer_rank, primitive_part, GaussianMatrix};
use crate::pauli::{PauliWord, Sign};
use crate::pentagram::{build_pentagram, intersection, EdgeId, ObservableName, Pentagram};

pub const DIM: usize = 8;
pub const RAY_COUNT: usize = 40;

/// A canonical integer ray in C^8: primitive, first nonzero entry positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RayVector([i64; DIM]);

impl RayVector {
    /// Canonicalises `v`; `None` for the zero vector.
    pub fn canonical(v: &[i64]) -> Option<Self> {
        assert_eq!(v.len(), DIM, "rays live in dimension {DIM}");
        let p = primitive_part(v)?;
        let mut out = [0; DIM];
        out.copy_from_slice(&p);
        Some(Self(out))
    }

    pub fn amplitudes(&self) -> &[i64; DIM] {
        &self.0
    }

    pub fn norm_sq(&self) -> i64 {
        dot(&self.0, &self.0)
    }

    pub fn dot(&self, other: &Self) -> i64 {
        dot(&self.0, &other.0)
    }

    pub fn is_orthogonal(&self, other: &Self) -> bool {
        self.dot(other) == 0
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..DIM).filter(|&k| self.0[k] != 0)
    }
}

impl fmt::Display for RayVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ray {
    pub id: usize,
    pub edge: EdgeId,
    /// Eigenvalues of the edge members, in member order.
    pub signs: [Sign; 4],
    pub vector: RayVector,
}

impl Ray {
    pub fn norm_sq(&self) -> i64 {
        self.vector.norm_sq()
    }
}

/// The 16 sign patterns for a 4-member edge in lexicographic order, `+` before `-`.
pub fn sign_patterns() -> impl Iterator<Item = [Sign; 4]> {
    (0u8..16).map(|p| {
        std::array::from_fn(|k| {
            if (p >> (3 - k)) & 1 == 1 {
                Sign::Minus
            } else {
                Sign::Plus
            }
        })
    })
}

/// `I + s*M` as an integer matrix (twice the spectral projector).
fn doubled_projector(word: &PauliWord, sign: Sign) -> GaussianMatrix {
    let m = word.to_matrix();
    let id = GaussianMatrix::identity(m.dim());
    match sign {
        Sign::Plus => &id + &m,
        Sign::Minus => &id - &m,
    }
}

/// The simultaneous eigenvector of `edge`'s members with the given
/// eigenvalues, or `None` when the pattern is inconsistent with the edge product.
///
/// The product of the doubled projectors is applied to each standard basis
/// vector; the first nonzero image spans the (one-dimensional) joint eigenspace.
pub fn joint_eigenstate(p: &Pentagram, edge: EdgeId, signs: [Sign; 4]) -> Option<RayVector> {
    let members = p.edge(edge).members;
    let projector = members
        .iter()
        .zip(signs)
        .map(|(&m, s)| doubled_projector(p.word(m), s))
        .reduce(|acc, q| &acc * &q)?;
    (0..DIM).find_map(|col| {
        let column = projector
            .real_column(col)
            .expect("pentagram observables have real matrices");
        RayVector::canonical(&column)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BasisKind {
    PureEdge {
        edge: EdgeId,
    },
    Hybrid {
        pivot: ObservableName,
        plus_edge: EdgeId,
        minus_edge: EdgeId,
    },
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::PureEdge { edge } => write!(f, "{edge}"),
            BasisKind::Hybrid {
                pivot,
                plus_edge,
                minus_edge,
            } => write!(f, "{pivot}: +{plus_edge} -{minus_edge}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RayBasis {
    /// Sorted ascending.
    pub ray_ids: [usize; DIM],
    pub kind: BasisKind,
}

impl RayBasis {
    /// Bit `k` set iff ray `k` belongs to the basis.
    pub fn mask(&self) -> u64 {
        self.ray_ids.iter().fold(0, |m, &id| m | 1 << id)
    }
}

#[derive(Debug, Clone)]
pub struct Atlas {
    pentagram: Pentagram,
    rays: Vec<Ray>,
    by_pattern: HashMap<(EdgeId, [Sign; 4]), usize>,
    by_vector: HashMap<RayVector, usize>,
}

impl Atlas {
    /// Atlas of the canonical pentagram.
    pub fn standard() -> Self {
        build_atlas(&build_pentagram()).expect("the canonical pentagram yields 40 distinct rays")
    }

    pub fn pentagram(&self) -> &Pentagram {
        &self.pentagram
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, id: usize) -> &Ray {
        &self.rays[id]
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn lookup(&self, edge: EdgeId, signs: [Sign; 4]) -> Option<usize> {
        self.by_pattern.get(&(edge, signs)).copied()
    }

    /// Ray ids belonging to `edge`, in id order.
    pub fn edge_rays(&self, edge: EdgeId) -> impl Iterator<Item = &Ray> {
        self.rays.iter().filter(move |r| r.edge == edge)
    }

    /// The atlas id of `v` up to scale, if it is one of the rays.
    pub fn identify(&self, v: &[i64]) -> Result<Option<usize>> {
        let canon = RayVector::canonical(v)
            .ok_or_else(|| Error::usage("cannot identify the zero vector"))?;
        Ok(self.by_vector.get(&canon).copied())
    }

    pub fn identify_vector(&self, v: &RayVector) -> Option<usize> {
        self.by_vector.get(v).copied()
    }
}

/// Builds all rays in (edge, sign pattern) order.
pub fn build_atlas(p: &Pentagram) -> Result<Atlas> {
    let mut rays = Vec::with_capacity(RAY_COUNT);
    let mut by_pattern = HashMap::new();
    let mut by_vector = HashMap::new();
    for edge in EdgeId::ALL {
        for signs in sign_patterns() {
            let Some(vector) = joint_eigenstate(p, edge, signs) else {
                continue;
            };
            let id = rays.len();
            if let Some(prev) = by_vector.insert(vector, id) {
                return Err(Error::defect(format!(
                    "ray {vector} from {edge} duplicates ray {prev}"
                )));
            }
            by_pattern.insert((edge, signs), id);
            rays.push(Ray {
                id,
                edge,
                signs,
                vector,
            });
        }
    }
    if rays.len() != RAY_COUNT {
        return Err(Error::defect(format!(
            "expected {RAY_COUNT} rays, found {}",
            rays.len()
        )));
    }
    Ok(Atlas {
        pentagram: p.clone(),
        rays,
        by_pattern,
        by_vector,
    })
}

/// Rays of `edge` whose eigenvalue for `pivot` equals `sign`.
fn half_edge(atlas: &Atlas, edge: EdgeId, pivot: ObservableName, sign: Sign) -> Vec<usize> {
    let pos = atlas
        .pentagram()
        .edge(edge)
        .position(pivot)
        .expect("pivot lies on the edge");
    atlas
        .edge_rays(edge)
        .filter(|r| r.signs[pos] == sign)
        .map(|r| r.id)
        .collect()
}

fn sorted_ids(ids: impl IntoIterator<Item = usize>) -> [usize; DIM] {
    let mut v: Vec<usize> = ids.into_iter().collect();
    v.sort_unstable();
    v.try_into().expect("a basis has exactly 8 rays")
}

/// The rays of the basis measured by a hybrid procedure with the given pivot
/// and branch edges. Equal edges give the pure edge basis.
pub fn hybrid_basis_ids(
    atlas: &Atlas,
    pivot: ObservableName,
    plus_edge: EdgeId,
    minus_edge: EdgeId,
) -> [usize; DIM] {
    let mut ids = half_edge(atlas, plus_edge, pivot, Sign::Plus);
    ids.extend(half_edge(atlas, minus_edge, pivot, Sign::Minus));
    sorted_ids(ids)
}

/// The 5 pure-edge bases followed by both branch assignments of each of the
/// 10 intersecting edge pairs.
pub fn constructive_bases(atlas: &Atlas) -> Result<Vec<RayBasis>> {
    let mut out: Vec<RayBasis> = EdgeId::ALL
        .into_iter()
        .map(|edge| RayBasis {
            ray_ids: sorted_ids(atlas.edge_rays(edge).map(|r| r.id)),
            kind: BasisKind::PureEdge { edge },
        })
        .collect();
    for (a, b) in EdgeId::pairs() {
        let pivot = intersection(atlas.pentagram(), a, b)?;
        for (plus_edge, minus_edge) in [(a, b), (b, a)] {
            out.push(RayBasis {
                ray_ids: hybrid_basis_ids(atlas, pivot, plus_edge, minus_edge),
                kind: BasisKind::Hybrid {
                    pivot,
                    plus_edge,
                    minus_edge,
                },
            });
        }
    }
    Ok(out)
}

/// Every 8-subset of pairwise orthogonal rays, found by clique search on the
/// orthogonality graph. Results are sorted id sets in lexicographic order.
pub fn exhaustive_orthogonal_bases(atlas: &Atlas) -> Vec<[usize; DIM]> {
    let n = atlas.len();
    let adjacency: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && atlas.ray(i).vector.is_orthogonal(&atlas.ray(j).vector))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();

    fn extend(
        adjacency: &[u64],
        chosen: &mut Vec<usize>,
        candidates: u64,
        out: &mut Vec<[usize; DIM]>,
    ) {
        if chosen.len() == DIM {
            out.push(chosen.as_slice().try_into().expect("length checked"));
            return;
        }
        if (candidates.count_ones() as usize) < DIM - chosen.len() {
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            let next = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            chosen.push(next);
            extend(adjacency, chosen, rest & adjacency[next], out);
            chosen.pop();
        }
    }

    let mut out = Vec::new();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    extend(&adjacency, &mut Vec::with_capacity(DIM), all, &mut out);
    out
}

/// All orthogonal bases among the atlas rays, labelled by how they arise.
/// The exhaustive and constructive enumerations must agree exactly.
pub fn enumerate_bases(atlas: &Atlas) -> Result<Vec<RayBasis>> {
    let constructive = constructive_bases(atlas)?;
    let exhaustive: BTreeSet<[usize; DIM]> =
        exhaustive_orthogonal_bases(atlas).into_iter().collect();
    let built: BTreeSet<[usize; DIM]> = constructive.iter().map(|b| b.ray_ids).collect();
    if built.len() != constructive.len() {
        return Err(Error::defect(
            "constructive enumeration produced a basis twice",
        ));
    }
    if exhaustive != built {
        let missing = exhaustive.difference(&built).count();
        let extra = built.difference(&exhaustive).count();
        return Err(Error::defect(format!(
            "basis enumerations disagree: {missing} only found exhaustively, {extra} only constructively"
        )));
    }
    for basis in &constructive {
        let rows: Vec<Vec<i64>> = basis
            .ray_ids
            .iter()
            .map(|&id| atlas.ray(id).vector.amplitudes().to_vec())
            .collect();
        if integer_rank(&rows) != DIM {
            return Err(Error::defect(format!(
                "basis {} does not span C^8",
                basis.kind
            )));
        }
    }
    Ok(constructive)
}

/// How many of `bases` contain each ray.
pub fn ray_incidence(atlas: &Atlas, bases: &[RayBasis]) -> Vec<usize> {
    let mut counts = vec![0; atlas.len()];
    for b in bases {
        for &id in &b.ray_ids {
            counts[id] += 1;
        }
    }
    counts
}

/// Histogram of ray norms, keyed by `norm_sq`.
pub fn norm_histogram(atlas: &Atlas) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for r in atlas.rays() {
        *h.entry(r.norm_sq()).or_insert(0) += 1;
    }
    h
}

/// True when `v`, read as a three-qubit state, has Schmidt rank 2 across
/// every one-versus-two qubit cut (no qubit factors out).
pub fn is_genuinely_tripartite(v: &RayVector) -> bool {
    (0..3).all(|q| {
        let shift = 2 - q;
        let rows: Vec<Vec<i64>> = (0..2)
            .map(|bit| {
                (0..DIM)
                    .filter(|&k| (k >> shift) & 1 == bit)
                    .map(|k| v.amplitudes()[k])
                    .collect()
            })
            .collect();
        integer_rank(&rows) == 2
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Minus as M, Plus as P};

    #[test]
    fn e1_all_plus_is_ket_000() {
        let p = build_pentagram();
        let v = joint_eigenstate(&p, EdgeId::E1, [P, P, P, P]).unwrap();
        assert_eq!(v.amplitudes(), &[1, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn e5_all_plus_is_absent() {
        let p = build_pentagram();
        assert!(joint_eigenstate(&p, EdgeId::E5, [P, P, P, P]).is_none());
    }

    #[test]
    fn e5_ppp_m_is_ghz_class() {
        let p = build_pentagram();
        let v = joint_eigenstate(&p, EdgeId::E5, [P, P, P, M]).unwrap();
        let support: Vec<usize> = v.support().collect();
        assert_eq!(support.len(), 4);
        assert!(v.amplitudes().iter().all(|a| a.abs() <= 1));
        assert_eq!(support.iter().fold(0, |acc, &b| acc ^ b), 0);
        assert!(is_genuinely_tripartite(&v));
    }

    #[test]
    fn exactly_half_the_patterns_are_realised() {
        let p = build_pentagram();
        for edge in EdgeId::ALL {
            let realised = sign_patterns()
                .filter(|&s| joint_eigenstate(&p, edge, s).is_some())
                .count();
            assert_eq!(realised, 8, "{edge}");
        }
    }

    #[test]
    fn e1_block_is_computational_basis() {
        let atlas = Atlas::standard();
        let mut supports: Vec<usize> = atlas
            .edge_rays(EdgeId::E1)
            .map(|r| {
                assert_eq!(r.norm_sq(), 1);
                r.vector.support().next().unwrap()
            })
            .collect();
        supports.sort_unstable();
        assert_eq!(supports, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn identify_examples() {
        let atlas = Atlas::standard();
        let last = atlas.identify(&[0, 0, 0, 0, 0, 0, 0, 1]).unwrap().unwrap();
        assert_eq!(atlas.ray(last).edge, EdgeId::E1);
        assert_eq!(
            atlas.identify(&[-1, 0, 0, 0, 0, 0, 0, 0]).unwrap(),
            atlas.identify(&[1, 0, 0, 0, 0, 0, 0, 0]).unwrap()
        );
        assert_eq!(atlas.identify(&[-3, 0, 0, 0, 0, 0, 0, 0]).unwrap(), Some(0));
        assert!(atlas.identify(&[0; 8]).is_err());
        assert_eq!(atlas.identify(&[1, 2, 0, 0, 0, 0, 0, 0]).unwrap(), None);
    }

    #[test]
    fn ket_plus_zero_zero_membership_matches_atlas() {
        let atlas = Atlas::standard();
        let v = [1, 1, 0, 0, 0, 0, 0, 0];
        let canon = RayVector::canonical(&v).unwrap();
        let listed = atlas.rays().iter().any(|r| r.vector == canon);
        assert_eq!(atlas.identify(&v).unwrap().is_some(), listed);
    }

    #[test]
    fn pure_and_hybrid_bases_are_orthogonal() {
        let atlas = Atlas::standard();
        let e5: Vec<usize> = atlas.edge_rays(EdgeId::E5).map(|r| r.id).collect();
        let pure = hybrid_basis_ids(&atlas, ObservableName::A, EdgeId::E5, EdgeId::E5);
        assert_eq!(pure.to_vec(), e5);

        let hybrid = hybrid_basis_ids(&atlas, ObservableName::A, EdgeId::E5, EdgeId::E1);
        let from_e5 = hybrid
            .iter()
            .filter(|&&id| atlas.ray(id).edge == EdgeId::E5)
            .count();
        assert_eq!(from_e5, 4);
        for (i, &a) in hybrid.iter().enumerate() {
            for &b in &hybrid[i + 1..] {
                assert_eq!(atlas.ray(a).vector.dot(&atlas.ray(b).vector), 0);
            }
        }
    }
}
