//! Integer-amplitude six-qubit states and projective Pauli measurements.
//!
//! Amplitudes are unnormalised primitive integers; the norm is carried
//! implicitly as the sum of squares. Measuring a ±1 observable `M` applies
//! `I ± M` (twice the projector) and divides out the content again, so every
//! state stays exact and probabilities come out as exact rationals.

use std::fmt;
use std::ops::Mul;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::atlas::{RayVector, DIM};
use crate::error::{Error, Result};
use crate::linalg::{dot, primitive_part};
use crate::pauli::{PauliWord, Sign};

use super::rng::Substream;

pub const QUBITS: usize = 6;
pub const STATE_DIM: usize = 1 << QUBITS;

/// Alice holds qubits 1-3 (high bits of the basis index), Bob qubits 4-6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Self {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn shift(self) -> usize {
        match self {
            Party::Alice => 3,
            Party::Bob => 0,
        }
    }

    /// This party's 3-qubit index within a 6-qubit basis index.
    pub fn local(self, index: usize) -> usize {
        (index >> self.shift()) & 0b111
    }

    /// Combines local indices for this party and the other party.
    pub fn join(self, mine: usize, theirs: usize) -> usize {
        (mine << self.shift()) | (theirs << self.other().shift())
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

/// An exact probability, printed as `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Probability(pub Ratio<u64>);

impl Probability {
    pub fn one() -> Self {
        Self(Ratio::from_integer(1))
    }

    pub fn new(num: u64, den: u64) -> Self {
        Self(Ratio::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        *self.0.numer() == 0
    }

    pub fn complement(self) -> Self {
        Self(Ratio::from_integer(1) - self.0)
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `floor(p * 2^64)`, the acceptance threshold for a uniform 64-bit draw.
    pub fn threshold(self) -> u128 {
        (u128::from(*self.0.numer()) << 64) / u128::from(*self.0.denom())
    }
}

impl Mul for Probability {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SixQubitState {
    amplitudes: Vec<i64>,
}

impl SixQubitState {
    /// Normalises `amplitudes` to primitive form. Fails on the zero vector.
    pub fn from_amplitudes(amplitudes: &[i64]) -> Result<Self> {
        if amplitudes.len() != STATE_DIM {
            return Err(Error::usage(format!(
                "a six-qubit state has {STATE_DIM} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let amplitudes =
            primitive_part(amplitudes).ok_or_else(|| Error::usage("zero state vector"))?;
        Ok(Self { amplitudes })
    }

    /// A single computational basis state.
    pub fn basis(index: usize) -> Self {
        let mut amplitudes = vec![0; STATE_DIM];
        amplitudes[index] = 1;
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[i64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> i64 {
        self.amplitudes[index]
    }

    pub fn norm_sq(&self) -> i64 {
        dot(&self.amplitudes, &self.amplitudes)
    }

    /// `M|s>` for a three-qubit word acting on `party`'s qubits.
    pub fn apply(&self, word: &PauliWord, party: Party) -> Result<Vec<i64>> {
        check_observable(word)?;
        let mut out = vec![0; STATE_DIM];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            if amp == 0 {
                continue;
            }
            let theirs = party.other().local(idx);
            let (coeff, target) = word.act_on_basis(party.local(idx));
            out[party.join(target, theirs)] += coeff.re * amp;
        }
        Ok(out)
    }

    /// The 8-vector of `party`'s amplitudes for a fixed index of the other party.
    pub fn block(&self, party: Party, theirs: usize) -> [i64; DIM] {
        std::array::from_fn(|mine| self.amplitudes[party.join(mine, theirs)])
    }

    /// `party`'s conditional state when the joint state factorises as
    /// `u ⊗ v` across the Alice/Bob cut; `None` if it does not.
    pub fn conditional_state(&self, party: Party) -> Option<RayVector> {
        let mut found: Option<RayVector> = None;
        for theirs in 0..DIM {
            let Some(v) = RayVector::canonical(&self.block(party, theirs)) else {
                continue;
            };
            match found {
                None => found = Some(v),
                Some(prev) if prev != v => return None,
                Some(_) => {}
            }
        }
        found
    }
}

fn check_observable(word: &PauliWord) -> Result<()> {
    if word.num_qubits() != 3 {
        return Err(Error::LengthMismatch {
            left: word.num_qubits(),
            right: 3,
        });
    }
    if !word.is_hermitian() || !word.is_real() {
        return Err(Error::usage(format!(
            "{word} is not a real Hermitian observable; integer-amplitude states need real matrices"
        )));
    }
    if word.is_identity_letters() {
        return Err(Error::usage(format!(
            "{word} is a multiple of the identity"
        )));
    }
    Ok(())
}

/// `|Ψ> ∝ Σ_xyz |xyz>|xyz>`: three Bell pairs (1,4), (2,5), (3,6).
pub fn prepare_psi() -> SixQubitState {
    let mut amplitudes = vec![0; STATE_DIM];
    for k in 0..DIM {
        amplitudes[Party::Alice.join(k, k)] = 1;
    }
    SixQubitState { amplitudes }
}

/// Whether `s` equals `(|00>+|11>)^{⊗3}` on the qubit pairs (1,4), (2,5),
/// (3,6), up to a positive scale.
pub fn factor_check(s: &SixQubitState) -> bool {
    // Build the product in pair order (q1 q4 q2 q5 q3 q6), then permute.
    let bell = [1i64, 0, 0, 1];
    let mut paired = vec![1i64];
    for _ in 0..3 {
        paired = paired
            .iter()
            .flat_map(|&a| bell.iter().map(move |&b| a * b))
            .collect();
    }
    let mut expected = vec![0i64; STATE_DIM];
    for (pidx, &amp) in paired.iter().enumerate() {
        // pidx bits, most significant first: q1 q4 q2 q5 q3 q6
        let bit = |k: usize| (pidx >> (5 - k)) & 1;
        let (q1, q4, q2, q5, q3, q6) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        let idx = q1 << 5 | q2 << 4 | q3 << 3 | q4 << 2 | q5 << 1 | q6;
        expected[idx] = amp;
    }
    primitive_part(&expected).as_deref() == Some(s.amplitudes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementEvent {
    pub sign: Sign,
    pub probability: Probability,
    pub state: SixQubitState,
}

/// Exact probability of `+1` for `word` on `party`'s qubits.
pub fn plus_probability(s: &SixQubitState, word: &PauliWord, party: Party) -> Result<Probability> {
    let applied = s.apply(word, party)?;
    let norm = s.norm_sq();
    let expectation = dot(s.amplitudes(), &applied);
    let num = u64::try_from(norm + expectation)
        .map_err(|_| Error::defect("expectation value below -1"))?;
    Ok(Probability::new(num, 2 * norm as u64))
}

/// Probability of `sign` and the collapsed state, if that branch has
/// nonzero probability.
pub fn project(
    s: &SixQubitState,
    word: &PauliWord,
    party: Party,
    sign: Sign,
) -> Result<(Probability, Option<SixQubitState>)> {
    let applied = s.apply(word, party)?;
    let plus = plus_probability(s, word, party)?;
    let p = match sign {
        Sign::Plus => plus,
        Sign::Minus => plus.complement(),
    };
    let post: Vec<i64> = s
        .amplitudes
        .iter()
        .zip(&applied)
        .map(|(&a, &m)| a + sign.value() * m)
        .collect();
    let state = primitive_part(&post).map(|amplitudes| SixQubitState { amplitudes });
    if state.is_some() == p.is_zero() {
        return Err(Error::defect(format!(
            "branch {sign} of {word} has probability {p} but post-state zero = {}",
            state.is_none()
        )));
    }
    Ok((p, state))
}

/// Draws the outcome against the exact threshold: `+` iff `draw < floor(p·2^64)`.
pub fn measure_observable(
    s: &SixQubitState,
    word: &PauliWord,
    party: Party,
    stream: &mut Substream,
) -> Result<MeasurementEvent> {
    let plus = plus_probability(s, word, party)?;
    let draw = stream.next_u64();
    let sign = if u128::from(draw) < plus.threshold() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let (probability, state) = project(s, word, party, sign)?;
    let state = state.ok_or_else(|| Error::defect("selected a zero-probability branch"))?;
    Ok(MeasurementEvent {
        sign,
        probability,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::rng::RandomSource;
    use crate::pentagram::ObservableName;

    #[test]
    fn psi_amplitudes() {
        let psi = prepare_psi();
        assert_eq!(psi.amplitude(0b000000), 1);
        assert_eq!(psi.amplitude(0b000001), 0);
        assert_eq!(psi.amplitude(0b111111), 1);
        assert_eq!(psi.amplitude(0b001001), 1);
        assert_eq!(psi.norm_sq(), 8);
    }

    #[test]
    fn factorisation() {
        assert!(factor_check(&prepare_psi()));
        assert!(!factor_check(&SixQubitState::basis(0)));
        let mut ghz = vec![0; STATE_DIM];
        ghz[0] = 1;
        ghz[63] = 1;
        assert!(!factor_check(
            &SixQubitState::from_amplitudes(&ghz).unwrap()
        ));
    }

    #[test]
    fn measuring_a_on_fresh_psi_is_even_odds() {
        let p = plus_probability(&prepare_psi(), &ObservableName::A.word(), Party::Alice).unwrap();
        assert_eq!(p, Probability::new(1, 2));
    }

    #[test]
    fn repeated_measurement_is_certain() {
        let src = RandomSource::new(3);
        let mut stream = src.substream(0, 0);
        let z1 = ObservableName::Z1.word();
        let first = measure_observable(&prepare_psi(), &z1, Party::Alice, &mut stream).unwrap();
        let second = measure_observable(&first.state, &z1, Party::Alice, &mut stream).unwrap();
        assert_eq!(second.sign, first.sign);
        assert_eq!(second.probability, Probability::one());
    }

    #[test]
    fn bob_agrees_with_alice_on_a() {
        let a = ObservableName::A.word();
        for seed in 0..20 {
            let src = RandomSource::new(seed);
            let mut stream = src.substream(0, 0);
            let alice = measure_observable(&prepare_psi(), &a, Party::Alice, &mut stream).unwrap();
            let bob = measure_observable(&alice.state, &a, Party::Bob, &mut stream).unwrap();
            assert_eq!(bob.sign, alice.sign);
            assert_eq!(bob.probability, Probability::one());
        }
    }

    #[test]
    fn rejects_complex_and_trivial_observables() {
        let psi = prepare_psi();
        let y = PauliWord::single(3, 0, crate::pauli::Letter::Y);
        assert!(matches!(psi.apply(&y, Party::Alice), Err(Error::Usage(_))));
        assert!(psi.apply(&PauliWord::identity(3), Party::Bob).is_err());
        assert!(psi.apply(&"YYI".parse().unwrap(), Party::Bob).is_ok());
        assert!(matches!(
            psi.apply(&"ZZ".parse().unwrap(), Party::Bob),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let psi = prepare_psi();
        let (p_plus, _) = project(&psi, &ObservableName::B.word(), Party::Bob, Sign::Plus).unwrap();
        let (p_minus, _) =
            project(&psi, &ObservableName::B.word(), Party::Bob, Sign::Minus).unwrap();
        assert_eq!(p_plus.0 + p_minus.0, Ratio::from_integer(1));
    }

    #[test]
    fn thresholds_are_exact_at_the_ends() {
        assert_eq!(Probability::one().threshold(), 1u128 << 64);
        assert_eq!(Probability::new(0, 1).threshold(), 0);
        assert_eq!(Probability::new(1, 2).threshold(), 1u128 << 63);
    }

    #[test]
    fn conditional_state_of_product_state() {
        let s = SixQubitState::basis(Party::Alice.join(0b101, 0b010));
        assert_eq!(
            s.conditional_state(Party::Alice).unwrap().amplitudes(),
            &[0, 0, 0, 0, 0, 1, 0, 0]
        );
        assert!(prepare_psi().conditional_state(Party::Bob).is_none());
    }
}
