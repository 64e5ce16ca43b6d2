//! The pentagram: ten three-qubit observables on five commuting edges.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::GaussianMatrix;
use crate::pauli::{Letter, PauliWord, Sign};

/// Names of the ten pentagram observables. `Z1` is `σz` on qubit 1, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObservableName {
    Z1,
    Z2,
    Z3,
    X1,
    X2,
    X3,
    A,
    B,
    C,
    D,
}

impl ObservableName {
    pub const ALL: [ObservableName; 10] = [
        ObservableName::Z1,
        ObservableName::Z2,
        ObservableName::Z3,
        ObservableName::X1,
        ObservableName::X2,
        ObservableName::X3,
        ObservableName::A,
        ObservableName::B,
        ObservableName::C,
        ObservableName::D,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            ObservableName::Z1 => "z1",
            ObservableName::Z2 => "z2",
            ObservableName::Z3 => "z3",
            ObservableName::X1 => "x1",
            ObservableName::X2 => "x2",
            ObservableName::X3 => "x3",
            ObservableName::A => "A",
            ObservableName::B => "B",
            ObservableName::C => "C",
            ObservableName::D => "D",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The three-qubit Pauli word this name stands for.
    pub fn word(self) -> PauliWord {
        use Letter::{X, Z};
        match self {
            ObservableName::Z1 => PauliWord::single(3, 0, Z),
            ObservableName::Z2 => PauliWord::single(3, 1, Z),
            ObservableName::Z3 => PauliWord::single(3, 2, Z),
            ObservableName::X1 => PauliWord::single(3, 0, X),
            ObservableName::X2 => PauliWord::single(3, 1, X),
            ObservableName::X3 => PauliWord::single(3, 2, X),
            ObservableName::A => PauliWord::new(vec![Z, Z, Z], 0),
            ObservableName::B => PauliWord::new(vec![Z, X, X], 0),
            ObservableName::C => PauliWord::new(vec![X, Z, X], 0),
            ObservableName::D => PauliWord::new(vec![X, X, Z], 0),
        }
    }
}

impl fmt::Display for ObservableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObservableName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ObservableName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Parse {
                position: 0,
                message: format!("unknown observable name {s:?}"),
            })
    }
}

impl Serialize for ObservableName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeId {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl EdgeId {
    pub const ALL: [EdgeId; 5] = [EdgeId::E1, EdgeId::E2, EdgeId::E3, EdgeId::E4, EdgeId::E5];

    pub fn index(self) -> usize {
        self as usize
    }

    /// All unordered pairs of distinct edges, in lexicographic order.
    pub fn pairs() -> impl Iterator<Item = (EdgeId, EdgeId)> {
        (0..5).flat_map(|i| (i + 1..5).map(move |j| (EdgeId::ALL[i], EdgeId::ALL[j])))
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.index() + 1)
    }
}

impl FromStr for EdgeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EdgeId::ALL
            .into_iter()
            .find(|e| e.to_string() == s)
            .ok_or_else(|| Error::Parse {
                position: 0,
                message: format!("unknown edge id {s:?}, expected E1..E5"),
            })
    }
}

impl Serialize for EdgeId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Observable {
    pub name: ObservableName,
    pub word: PauliWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: EdgeId,
    pub members: [ObservableName; 4],
    pub expected_product: Sign,
}

impl Edge {
    pub fn contains(&self, name: ObservableName) -> bool {
        self.members.contains(&name)
    }

    pub fn position(&self, name: ObservableName) -> Option<usize> {
        self.members.iter().position(|&m| m == name)
    }
}

/// The observables and edges. Fields are public so that deliberately broken
/// variants can be fed to [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pentagram {
    pub observables: Vec<Observable>,
    pub edges: Vec<Edge>,
}

pub fn build_pentagram() -> Pentagram {
    use ObservableName::*;
    let edge = |id, members, expected_product| Edge {
        id,
        members,
        expected_product,
    };
    Pentagram {
        observables: ObservableName::ALL
            .into_iter()
            .map(|name| Observable {
                name,
                word: name.word(),
            })
            .collect(),
        edges: vec![
            edge(EdgeId::E1, [A, Z1, Z3, Z2], Sign::Plus),
            edge(EdgeId::E2, [X3, B, Z1, X2], Sign::Plus),
            edge(EdgeId::E3, [X3, C, X1, Z2], Sign::Plus),
            edge(EdgeId::E4, [D, X1, Z3, X2], Sign::Plus),
            edge(EdgeId::E5, [A, B, C, D], Sign::Minus),
        ],
    }
}

impl Pentagram {
    pub fn edge(&self, id: EdgeId) -> &Edge {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .expect("every edge id is present in a pentagram")
    }

    pub fn edge_mut(&mut self, id: EdgeId) -> &mut Edge {
        self.edges
            .iter_mut()
            .find(|e| e.id == id)
            .expect("every edge id is present in a pentagram")
    }

    pub fn word(&self, name: ObservableName) -> &PauliWord {
        &self
            .observables
            .iter()
            .find(|o| o.name == name)
            .expect("every observable name is present in a pentagram")
            .word
    }

    /// Edges containing `name`, in id order.
    pub fn edges_of(&self, name: ObservableName) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.contains(name))
            .map(|e| e.id)
            .collect()
    }

    /// Ordered product of an edge's member words.
    pub fn edge_product(&self, id: EdgeId) -> Result<PauliWord> {
        PauliWord::product(self.edge(id).members.iter().map(|&m| self.word(m)))
    }
}

/// The unique observable shared by two distinct edges.
pub fn intersection(p: &Pentagram, a: EdgeId, b: EdgeId) -> Result<ObservableName> {
    if a == b {
        return Err(Error::usage(format!(
            "intersection needs two distinct edges, got {a} twice"
        )));
    }
    let eb = p.edge(b);
    let common: Vec<_> = p
        .edge(a)
        .members
        .iter()
        .copied()
        .filter(|&m| eb.contains(m))
        .collect();
    match common.as_slice() {
        [single] => Ok(*single),
        _ => Err(Error::defect(format!(
            "edges {a} and {b} share {} observables",
            common.len()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeProduct {
    pub edge: EdgeId,
    pub expected: Sign,
    /// `None` when the product is not `±I` at all.
    pub computed: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub edge_products: Vec<EdgeProduct>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs every structural and algebraic check on `p`. Failures are recorded in
/// the report rather than returned as errors.
pub fn validate(p: &Pentagram) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| {
        checks.push(Check {
            name,
            passed,
            detail,
        })
    };

    for obs in &p.observables {
        let m = obs.word.to_matrix();
        let square_is_identity = &m * &m == GaussianMatrix::identity(m.dim());
        let ok = obs.word.is_hermitian()
            && m.is_hermitian()
            && square_is_identity
            && m.trace().is_zero();
        push(
            format!("observable {} hermitian, squares to I, traceless", obs.name),
            ok,
            obs.word.to_string(),
        );
    }

    let mut edge_products = Vec::new();
    for edge in &p.edges {
        let mut offending = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let (a, b) = (edge.members[i], edge.members[j]);
                if !p.word(a).commutes(p.word(b)).unwrap_or(false) {
                    offending.push(format!("{a}/{b}"));
                }
            }
        }
        push(
            format!("edge {} members pairwise commute", edge.id),
            offending.is_empty(),
            if offending.is_empty() {
                "all 6 pairs commute".into()
            } else {
                format!("anticommuting: {}", offending.join(", "))
            },
        );

        let computed = p
            .edge_product(edge.id)
            .ok()
            .and_then(|w| w.as_signed_identity());
        push(
            format!("edge {} product equals {}I", edge.id, edge.expected_product),
            computed == Some(edge.expected_product),
            match computed {
                Some(s) => format!("computed {s}I"),
                None => "product is not a multiple of I".into(),
            },
        );
        edge_products.push(EdgeProduct {
            edge: edge.id,
            expected: edge.expected_product,
            computed,
        });
    }

    let counts: Vec<(ObservableName, usize)> = ObservableName::ALL
        .into_iter()
        .map(|n| (n, p.edges_of(n).len()))
        .collect();
    let bad: Vec<String> = counts
        .iter()
        .filter(|(_, c)| *c != 2)
        .map(|(n, c)| format!("{n}:{c}"))
        .collect();
    push(
        "every observable lies on exactly two edges".into(),
        p.observables.len() == 10 && bad.is_empty(),
        if bad.is_empty() {
            "10 observables, 2 edges each".into()
        } else {
            format!("incidence counts off: {}", bad.join(", "))
        },
    );

    let mut bad_pairs = Vec::new();
    for (a, b) in EdgeId::pairs() {
        let shared = p
            .edge(a)
            .members
            .iter()
            .filter(|&&m| p.edge(b).contains(m))
            .count();
        if shared != 1 {
            bad_pairs.push(format!("{a}/{b}:{shared}"));
        }
    }
    push(
        "every pair of edges meets in exactly one observable".into(),
        p.edges.len() == 5 && bad_pairs.is_empty(),
        if bad_pairs.is_empty() {
            "10 edge pairs, 1 shared observable each".into()
        } else {
            format!("shared counts off: {}", bad_pairs.join(", "))
        },
    );

    ValidationReport {
        checks,
        edge_products,
    }
}
