//! Signed tensor products of single-qubit Pauli operators.
//!
//! A [`PauliWord`] stores one [`Letter`] per qubit plus a global phase
//! `i^k`. Multiplication tracks the phase exactly; [`PauliWord::to_matrix`]
//! realises the operator over the Gaussian integers so that every algebraic
//! claim can be double-checked against plain matrix arithmetic.
//!
//! Qubits are 0-based internally. The first letter acts on qubit 1, the most
//! significant bit of a computational-basis index.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{GaussianInt, GaussianMatrix};
use crate::pentagram::ObservableName;

/// A ±1 eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub const fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub const fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn product(signs: impl IntoIterator<Item = Sign>) -> Sign {
        signs.into_iter().fold(Sign::Plus, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value() as i8)
    }
}

/// Renders a sign slice compactly, e.g. `+-+`.
pub fn sign_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.symbol()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    /// Single-qubit product `self * rhs = i^k * letter`.
    pub const fn product(self, rhs: Letter) -> (u8, Letter) {
        use Letter::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    pub const fn anticommutes_with(self, rhs: Letter) -> bool {
        !matches!(self, Letter::I) && !matches!(rhs, Letter::I) && !self.eq_const(rhs)
    }

    const fn eq_const(self, rhs: Letter) -> bool {
        self as u8 == rhs as u8
    }

    /// The 2x2 matrix entry at (row, col).
    pub const fn entry(self, row: usize, col: usize) -> GaussianInt {
        match (self, row, col) {
            (Letter::I, 0, 0) | (Letter::I, 1, 1) => GaussianInt::new(1, 0),
            (Letter::X, 0, 1) | (Letter::X, 1, 0) => GaussianInt::new(1, 0),
            (Letter::Y, 0, 1) => GaussianInt::new(0, -1),
            (Letter::Y, 1, 0) => GaussianInt::new(0, 1),
            (Letter::Z, 0, 0) => GaussianInt::new(1, 0),
            (Letter::Z, 1, 1) => GaussianInt::new(-1, 0),
            _ => GaussianInt::new(0, 0),
        }
    }
}

/// `i^phase * letters[0] ⊗ letters[1] ⊗ ...`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    letters: Vec<Letter>,
    phase: u8,
}

impl PauliWord {
    pub fn new(letters: Vec<Letter>, phase: u8) -> Self {
        Self {
            letters,
            phase: phase % 4,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Letter::I; n], 0)
    }

    /// A word with `letter` on qubit `index` (0-based) and identity elsewhere.
    pub fn single(n: usize, index: usize, letter: Letter) -> Self {
        let mut letters = vec![Letter::I; n];
        letters[index] = letter;
        Self::new(letters, 0)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Exponent `k` of the phase `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn is_identity_letters(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::I)
    }

    /// `Some(sign)` if the word is `±I`.
    pub fn as_signed_identity(&self) -> Option<Sign> {
        if !self.is_identity_letters() {
            return None;
        }
        match self.phase {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn negate(&self) -> Self {
        Self::new(self.letters.clone(), self.phase + 2)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.letters.len() != other.letters.len() {
            return Err(Error::LengthMismatch {
                left: self.letters.len(),
                right: other.letters.len(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut phase = self.phase + other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, l) = a.product(b);
                phase += k;
                l
            })
            .collect();
        Ok(Self::new(letters, phase))
    }

    /// Ordered product of a non-empty sequence of words.
    pub fn product<'a>(words: impl IntoIterator<Item = &'a PauliWord>) -> Result<Self> {
        let mut iter = words.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::usage("product of an empty word list"))?;
        iter.try_fold(first.clone(), |acc, w| acc.multiply(w))
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a.anticommutes_with(b))
            .count();
        Ok(anti % 2 == 0)
    }

    pub fn to_matrix(&self) -> GaussianMatrix {
        let n = self.letters.len();
        let dim = 1usize << n;
        let phase = GaussianInt::i_pow(self.phase);
        GaussianMatrix::from_fn(dim, |r, c| {
            self.letters.iter().enumerate().fold(phase, |acc, (q, l)| {
                if acc.is_zero() {
                    return acc;
                }
                let shift = n - 1 - q;
                acc * l.entry((r >> shift) & 1, (c >> shift) & 1)
            })
        })
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::Y).count()
    }

    /// True when the matrix has only real entries.
    pub fn is_real(&self) -> bool {
        (self.phase as usize + self.y_count()).is_multiple_of(2)
    }

    /// Action on a computational basis state: `W|b> = coeff * |b'>`.
    pub fn act_on_basis(&self, basis: usize) -> (GaussianInt, usize) {
        let n = self.letters.len();
        let mut coeff = GaussianInt::i_pow(self.phase);
        let mut out = basis;
        for (q, l) in self.letters.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (basis >> shift) & 1;
            let (row, entry) = match l {
                Letter::I => (bit, GaussianInt::ONE),
                Letter::X => (bit ^ 1, GaussianInt::ONE),
                Letter::Y => (bit ^ 1, l.entry(bit ^ 1, bit)),
                Letter::Z => (bit, l.entry(bit, bit)),
            };
            coeff = coeff * entry;
            out = (out & !(1 << shift)) | (row << shift);
        }
        (coeff, out)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            0 => {}
            1 => f.write_str("+i")?,
            2 => f.write_str("-")?,
            _ => f.write_str("-i")?,
        }
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `sign? [IXYZ]+` (whitespace ignored), a `+i`/`-i` phased word as
/// produced by the formatter, or a pentagram observable name such as `z1` or `B`.
pub fn parse_pauli(text: &str) -> Result<PauliWord> {
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    if chars.is_empty() {
        return Err(Error::Parse {
            position: 0,
            message: "empty Pauli word".into(),
        });
    }
    let compact: String = chars.iter().map(|&(_, c)| c).collect();
    if let Ok(name) = compact.parse::<ObservableName>() {
        return Ok(name.word());
    }

    let mut phase = 0u8;
    let mut rest = &chars[..];
    let signed = match rest.first().map(|&(_, c)| c) {
        Some('+') => true,
        Some('-') => {
            phase = 2;
            true
        }
        _ => false,
    };
    if signed {
        rest = &rest[1..];
        if let Some(&(_, 'i')) = rest.first() {
            phase += 1;
            rest = &rest[1..];
        }
    }
    if rest.is_empty() {
        return Err(Error::Parse {
            position: text.len(),
            message: "missing Pauli letters".into(),
        });
    }
    let letters = rest
        .iter()
        .map(|&(pos, c)| {
            Letter::from_char(c).ok_or_else(|| Error::Parse {
                position: pos,
                message: format!("unexpected character {c:?}, expected one of I, X, Y, Z"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliWord::new(letters, phase))
}

impl FromStr for PauliWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s)
    }
}
