use serde::Serialize;

use crate::pauli::Sign;
use crate::pentagram::{EdgeId, ObservableName, Pentagram};

/// One ±1 value per observable, indexed by [`ObservableName::index`].
pub type ValueAssignment = [Sign; 10];

fn assignment(bits: u16) -> ValueAssignment {
    std::array::from_fn(|k| {
        if bits >> k & 1 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    })
}

fn satisfies(p: &Pentagram, values: &ValueAssignment, edges: &[EdgeId]) -> bool {
    edges.iter().all(|&id| {
        let edge = p.edge(id);
        Sign::product(edge.members.iter().map(|m| values[m.index()])) == edge.expected_product
    })
}

/// Number of the 1024 value assignments meeting the product constraints of `edges`.
pub fn count_satisfying(p: &Pentagram, edges: &[EdgeId]) -> usize {
    (0u16..1024)
        .filter(|&bits| satisfies(p, &assignment(bits), edges))
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MerminReport {
    pub assignments_checked: usize,
    pub satisfying: usize,
    /// First satisfying assignment in enumeration order, keyed by name.
    pub witness: Option<Vec<(ObservableName, Sign)>>,
    /// Product of the five required edge products.
    pub constraint_product: Sign,
    /// Whether every observable lies on an even number of edges, which forces
    /// the product of all edge products to be +1 under any assignment.
    pub even_incidence: bool,
}

impl MerminReport {
    pub fn is_exhausted(&self) -> bool {
        self.satisfying == 0
    }

    /// The counting argument alone rules out an assignment.
    pub fn algebraically_impossible(&self) -> bool {
        self.even_incidence && self.constraint_product == Sign::Minus
    }
}

/// Brute force over all ±1 assignments to the ten observables.
pub fn mermin_coloring_search(p: &Pentagram) -> MerminReport {
    let edges: Vec<EdgeId> = p.edges.iter().map(|e| e.id).collect();
    let mut satisfying = 0;
    let mut witness = None;
    for bits in 0u16..1024 {
        let values = assignment(bits);
        if satisfies(p, &values, &edges) {
            satisfying += 1;
            witness.get_or_insert_with(|| {
                ObservableName::ALL
                    .into_iter()
                    .map(|n| (n, values[n.index()]))
                    .collect()
            });
        }
    }
    MerminReport {
        assignments_checked: 1024,
        satisfying,
        witness,
        constraint_product: Sign::product(p.edges.iter().map(|e| e.expected_product)),
        even_incidence: ObservableName::ALL
            .into_iter()
            .all(|n| p.edges_of(n).len().is_multiple_of(2)),
    }
}
