use std::fmt;

use serde::{Serialize, Serializer};

use crate::atlas::{Atlas, BasisKind, RayBasis, DIM};
use crate::error::{Error, Result};
use crate::pauli::Sign;
use crate::pentagram::{EdgeId, ObservableName, Pentagram};

/// Measure `pivot`; on `+1` measure `plus_pair` (from `plus_edge`), on `-1`
/// measure `minus_pair` (from `minus_edge`). The edges may coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HybridMeasurement {
    pivot: ObservableName,
    plus_edge: EdgeId,
    plus_pair: [ObservableName; 2],
    minus_edge: EdgeId,
    minus_pair: [ObservableName; 2],
}

fn check_pair(
    p: &Pentagram,
    pivot: ObservableName,
    edge: EdgeId,
    pair: Option<[ObservableName; 2]>,
) -> Result<[ObservableName; 2]> {
    let e = p.edge(edge);
    if !e.contains(pivot) {
        return Err(Error::usage(format!(
            "pivot {pivot} does not lie on {edge}"
        )));
    }
    let rest: Vec<ObservableName> = e.members.iter().copied().filter(|&m| m != pivot).collect();
    let pair = pair.unwrap_or([rest[0], rest[1]]);
    if pair[0] == pair[1] {
        return Err(Error::usage(format!(
            "pair {{{},{}}} repeats an observable",
            pair[0], pair[1]
        )));
    }
    for m in pair {
        if !rest.contains(&m) {
            return Err(Error::usage(format!(
                "{m} is not one of the other members of {edge}"
            )));
        }
    }
    Ok(pair)
}

impl HybridMeasurement {
    /// Validates the measurement. Missing pairs default to the first two
    /// non-pivot members of the branch edge.
    pub fn new(
        p: &Pentagram,
        pivot: ObservableName,
        plus_edge: EdgeId,
        plus_pair: Option<[ObservableName; 2]>,
        minus_edge: EdgeId,
        minus_pair: Option<[ObservableName; 2]>,
    ) -> Result<Self> {
        Ok(Self {
            pivot,
            plus_pair: check_pair(p, pivot, plus_edge, plus_pair)?,
            plus_edge,
            minus_pair: check_pair(p, pivot, minus_edge, minus_pair)?,
            minus_edge,
        })
    }

    pub fn pivot(&self) -> ObservableName {
        self.pivot
    }

    pub fn plus_edge(&self) -> EdgeId {
        self.plus_edge
    }

    pub fn minus_edge(&self) -> EdgeId {
        self.minus_edge
    }

    pub fn plus_pair(&self) -> [ObservableName; 2] {
        self.plus_pair
    }

    pub fn minus_pair(&self) -> [ObservableName; 2] {
        self.minus_pair
    }

    /// Edge and pair measured after the pivot yields `sign`.
    pub fn branch(&self, sign: Sign) -> (EdgeId, [ObservableName; 2]) {
        match sign {
            Sign::Plus => (self.plus_edge, self.plus_pair),
            Sign::Minus => (self.minus_edge, self.minus_pair),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.plus_edge == self.minus_edge
    }

    pub fn kind(&self) -> BasisKind {
        if self.is_degenerate() {
            BasisKind::PureEdge {
                edge: self.plus_edge,
            }
        } else {
            BasisKind::Hybrid {
                pivot: self.pivot,
                plus_edge: self.plus_edge,
                minus_edge: self.minus_edge,
            }
        }
    }

    /// The edges involved, as `Ex-Ey` with `x <= y`.
    pub fn edge_symbol(&self) -> String {
        let (a, b) = if self.plus_edge <= self.minus_edge {
            (self.plus_edge, self.minus_edge)
        } else {
            (self.minus_edge, self.plus_edge)
        };
        format!("{a}-{b}")
    }

    /// Both edges involved (one entry when degenerate).
    pub fn edges(&self) -> Vec<EdgeId> {
        if self.is_degenerate() {
            vec![self.plus_edge]
        } else {
            vec![self.plus_edge, self.minus_edge]
        }
    }

    /// Scheme-file form, e.g. `A | E5 {B,C} ; E1 {z1,z2}`.
    pub fn scheme_line(&self) -> String {
        format!(
            "{} | {} {{{},{}}} ; {} {{{},{}}}",
            self.pivot,
            self.plus_edge,
            self.plus_pair[0],
            self.plus_pair[1],
            self.minus_edge,
            self.minus_pair[0],
            self.minus_pair[1]
        )
    }
}

impl fmt::Display for HybridMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}|{{{},{}}}{{{},{}}})",
            self.pivot,
            self.plus_pair[0],
            self.plus_pair[1],
            self.minus_pair[0],
            self.minus_pair[1]
        )
    }
}

impl Serialize for HybridMeasurement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{} {}", self.edge_symbol(), self))
    }
}

/// Sign triple (pivot, pair[0], pair[1]) for column `cell` of a table row.
/// Columns run `+++, ++-, +-+, ..., ---`.
pub fn cell_signs(cell: usize) -> [Sign; 3] {
    std::array::from_fn(|k| {
        if (cell >> (2 - k)) & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    })
}

pub fn cell_index(signs: [Sign; 3]) -> usize {
    signs
        .iter()
        .fold(0, |acc, &s| acc << 1 | usize::from(s == Sign::Minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCell {
    pub signs: [Sign; 3],
    pub ray_id: usize,
}

/// Resolves the ray reached for a given sign triple. The eigenvalue of the
/// unmeasured fourth member follows from the edge product.
pub fn outcome_ray(atlas: &Atlas, m: &HybridMeasurement, signs: [Sign; 3]) -> Result<usize> {
    let (edge_id, pair) = m.branch(signs[0]);
    let edge = atlas.pentagram().edge(edge_id);
    let implied = edge.expected_product * signs[0] * signs[1] * signs[2];
    let mut full = [implied; 4];
    for (name, sign) in [
        (m.pivot, signs[0]),
        (pair[0], signs[1]),
        (pair[1], signs[2]),
    ] {
        let pos = edge
            .position(name)
            .ok_or_else(|| Error::defect(format!("{name} missing from {edge_id}")))?;
        full[pos] = sign;
    }
    atlas.lookup(edge_id, full).ok_or_else(|| {
        Error::defect(format!(
            "no ray for {edge_id} with signs {}",
            crate::pauli::sign_string(&full)
        ))
    })
}

/// The eight outcomes of `m`, in column order.
pub fn outcomes_of(atlas: &Atlas, m: &HybridMeasurement) -> Result<[OutcomeCell; DIM]> {
    let mut cells = [OutcomeCell {
        signs: [Sign::Plus; 3],
        ray_id: 0,
    }; DIM];
    for (c, cell) in cells.iter_mut().enumerate() {
        let signs = cell_signs(c);
        *cell = OutcomeCell {
            signs,
            ray_id: outcome_ray(atlas, m, signs)?,
        };
    }
    Ok(cells)
}

/// A measurement realising `basis`, with default pairs. Pure-edge bases use
/// the edge's first member as pivot.
pub fn measurement_for_basis(p: &Pentagram, basis: &RayBasis) -> Result<HybridMeasurement> {
    match basis.kind {
        BasisKind::PureEdge { edge } => {
            HybridMeasurement::new(p, p.edge(edge).members[0], edge, None, edge, None)
        }
        BasisKind::Hybrid {
            pivot,
            plus_edge,
            minus_edge,
        } => HybridMeasurement::new(p, pivot, plus_edge, None, minus_edge, None),
    }
}

/// Every valid choice of pairs for the given pivot and branch edges.
pub fn all_pair_choices(
    p: &Pentagram,
    pivot: ObservableName,
    plus_edge: EdgeId,
    minus_edge: EdgeId,
) -> Result<Vec<HybridMeasurement>> {
    let pairs = |edge: EdgeId| -> Vec<[ObservableName; 2]> {
        let rest: Vec<_> = p
            .edge(edge)
            .members
            .iter()
            .copied()
            .filter(|&m| m != pivot)
            .collect();
        (0..rest.len())
            .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
            .map(|(i, j)| [rest[i], rest[j]])
            .collect()
    };
    let mut out = Vec::new();
    for pp in pairs(plus_edge) {
        for mp in pairs(minus_edge) {
            out.push(HybridMeasurement::new(
                p,
                pivot,
                plus_edge,
                Some(pp),
                minus_edge,
                Some(mp),
            )?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::hybrid_basis_ids;
    use crate::pentagram::build_pentagram;
    use ObservableName::*;

    #[test]
    fn cell_order_round_trips() {
        for c in 0..8 {
            assert_eq!(cell_index(cell_signs(c)), c);
        }
        assert_eq!(cell_signs(1), [Sign::Plus, Sign::Plus, Sign::Minus]);
    }

    #[test]
    fn rejects_pivot_off_edge_and_bad_pairs() {
        let p = build_pentagram();
        assert!(HybridMeasurement::new(&p, X1, EdgeId::E1, None, EdgeId::E5, None).is_err());
        assert!(HybridMeasurement::new(&p, A, EdgeId::E5, Some([B, B]), EdgeId::E1, None).is_err());
        assert!(HybridMeasurement::new(&p, A, EdgeId::E5, Some([A, B]), EdgeId::E1, None).is_err());
        assert!(
            HybridMeasurement::new(&p, A, EdgeId::E5, Some([Z1, B]), EdgeId::E1, None).is_err()
        );
    }

    #[test]
    fn first_cell_of_a_e5_e1_row_has_d_minus() {
        let atlas = Atlas::standard();
        let m = HybridMeasurement::new(
            atlas.pentagram(),
            A,
            EdgeId::E5,
            Some([B, C]),
            EdgeId::E1,
            Some([Z1, Z2]),
        )
        .unwrap();
        let cells = outcomes_of(&atlas, &m).unwrap();
        let ray = atlas.ray(cells[0].ray_id);
        assert_eq!(ray.edge, EdgeId::E5);
        assert_eq!(ray.signs, [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Minus]);
    }

    #[test]
    fn degenerate_row_is_the_pure_edge_basis() {
        let atlas = Atlas::standard();
        let m = HybridMeasurement::new(
            atlas.pentagram(),
            A,
            EdgeId::E5,
            Some([B, C]),
            EdgeId::E5,
            Some([B, C]),
        )
        .unwrap();
        let mut ids: Vec<usize> = outcomes_of(&atlas, &m)
            .unwrap()
            .iter()
            .map(|c| c.ray_id)
            .collect();
        ids.sort_unstable();
        let e5: Vec<usize> = atlas.edge_rays(EdgeId::E5).map(|r| r.id).collect();
        assert_eq!(ids, e5);
        assert_eq!(m.kind(), BasisKind::PureEdge { edge: EdgeId::E5 });
    }

    #[test]
    fn pair_choice_is_immaterial() {
        let atlas = Atlas::standard();
        let p = atlas.pentagram();
        let mut edge_pairs: Vec<(EdgeId, EdgeId, ObservableName)> = Vec::new();
        for (a, b) in EdgeId::pairs() {
            let x = crate::pentagram::intersection(p, a, b).unwrap();
            edge_pairs.push((a, b, x));
            edge_pairs.push((b, a, x));
        }
        for e in EdgeId::ALL {
            for &x in &p.edge(e).members {
                edge_pairs.push((e, e, x));
            }
        }
        for (plus, minus, pivot) in edge_pairs {
            let expected = hybrid_basis_ids(&atlas, pivot, plus, minus);
            let choices = all_pair_choices(p, pivot, plus, minus).unwrap();
            assert_eq!(choices.len(), 9);
            for m in choices {
                let mut ids: Vec<usize> = outcomes_of(&atlas, &m)
                    .unwrap()
                    .iter()
                    .map(|c| c.ray_id)
                    .collect();
                ids.sort_unstable();
                assert_eq!(ids, expected.to_vec(), "{m}");
            }
        }
    }

    #[test]
    fn display_forms() {
        let p = build_pentagram();
        let m = HybridMeasurement::new(&p, B, EdgeId::E2, Some([X2, X3]), EdgeId::E5, Some([C, D]))
            .unwrap();
        assert_eq!(m.to_string(), "(B|{x2,x3}{C,D})");
        assert_eq!(m.edge_symbol(), "E2-E5");
        assert_eq!(m.scheme_line(), "B | E2 {x2,x3} ; E5 {C,D}");
    }
}
