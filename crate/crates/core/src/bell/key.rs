//! Octal key sifting and sample-based verification.
//!
//! After the runs both parties announce which row they measured. Runs with
//! matching rows are kept; the letter is the outcome's column (0-7) within
//! that row. A uniformly random subset of the sifted letters is then revealed
//! and compared, and dropped from the key.

use rand::seq::index;
use serde::Serialize;

use crate::error::{Error, Result};

use super::protocol::RunRecord;
use super::rng::{RandomSource, KEY_SAMPLING_STREAM};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyMaterial {
    /// Run indices where both parties chose the same row.
    pub sifted_runs: Vec<u64>,
    pub alice_letters: Vec<u8>,
    pub bob_letters: Vec<u8>,
    /// Positions within `sifted_runs` that were revealed, ascending.
    pub revealed_sample: Vec<usize>,
    pub mismatches: usize,
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
}

impl KeyMaterial {
    /// Alice's final key as octal digits.
    pub fn key_string(&self) -> String {
        self.alice_key
            .iter()
            .map(|&d| char::from(b'0' + d))
            .collect()
    }

    pub fn keys_agree(&self) -> bool {
        self.alice_key == self.bob_key
    }
}

pub fn sift_key(records: &[RunRecord]) -> KeyMaterial {
    let sifted: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.alice_choice == r.bob_choice)
        .collect();
    let alice_letters: Vec<u8> = sifted.iter().map(|r| r.alice_cell as u8).collect();
    let bob_letters: Vec<u8> = sifted.iter().map(|r| r.bob_cell as u8).collect();
    KeyMaterial {
        sifted_runs: sifted.iter().map(|r| r.run_index).collect(),
        alice_key: alice_letters.clone(),
        bob_key: bob_letters.clone(),
        alice_letters,
        bob_letters,
        revealed_sample: Vec::new(),
        mismatches: 0,
    }
}

/// Reveals `round(reveal_fraction * n)` sifted letters, counts disagreements
/// and removes them from both keys. Returns the mismatch count.
pub fn verify_key(
    key: &mut KeyMaterial,
    reveal_fraction: f64,
    source: &RandomSource,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&reveal_fraction) {
        return Err(Error::usage(format!(
            "reveal fraction must lie in [0, 1], got {reveal_fraction}"
        )));
    }
    let n = key.alice_letters.len();
    let k = ((reveal_fraction * n as f64).round() as usize).min(n);
    let mut rng = source.rng(KEY_SAMPLING_STREAM, 0);
    let mut sample = index::sample(&mut rng, n, k).into_vec();
    sample.sort_unstable();

    let mut revealed = vec![false; n];
    for &i in &sample {
        revealed[i] = true;
    }
    key.mismatches = sample
        .iter()
        .filter(|&&i| key.alice_letters[i] != key.bob_letters[i])
        .count();
    key.alice_key = (0..n)
        .filter(|&i| !revealed[i])
        .map(|i| key.alice_letters[i])
        .collect();
    key.bob_key = (0..n)
        .filter(|&i| !revealed[i])
        .map(|i| key.bob_letters[i])
        .collect();
    key.revealed_sample = sample;
    Ok(key.mismatches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::protocol::{ChoicePolicy, MeasurementOrder, Protocol};

    fn fixed_runs(trials: u64) -> Vec<RunRecord> {
        Protocol::fig2()
            .run_experiment(
                trials,
                ChoicePolicy::Fixed { alice: 4, bob: 4 },
                3,
                MeasurementOrder::AliceFirst,
            )
            .unwrap()
    }

    #[test]
    fn thousand_sifted_ten_percent_revealed() {
        let recs = fixed_runs(1000);
        let mut key = sift_key(&recs);
        assert_eq!(key.sifted_runs.len(), 1000);
        let mismatches = verify_key(&mut key, 0.1, &RandomSource::new(9)).unwrap();
        assert_eq!(mismatches, 0);
        assert_eq!(key.alice_key.len(), 900);
        assert_eq!(key.revealed_sample.len(), 100);
        assert!(key.keys_agree());
        assert!(key.key_string().chars().all(|c| ('0'..='7').contains(&c)));
    }

    #[test]
    fn revealing_everything_leaves_no_key() {
        let mut key = sift_key(&fixed_runs(20));
        verify_key(&mut key, 1.0, &RandomSource::new(1)).unwrap();
        assert!(key.alice_key.is_empty());
        assert_eq!(key.revealed_sample, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn empty_sift_is_not_an_error() {
        let mut key = sift_key(&[]);
        assert_eq!(verify_key(&mut key, 0.5, &RandomSource::new(1)).unwrap(), 0);
        assert!(key.alice_key.is_empty());
    }

    #[test]
    fn bad_fraction_is_rejected() {
        let mut key = sift_key(&[]);
        assert!(verify_key(&mut key, 1.5, &RandomSource::new(1)).is_err());
        assert!(verify_key(&mut key, f64::NAN, &RandomSource::new(1)).is_err());
    }

    #[test]
    fn revealed_sample_is_disjoint_from_key() {
        let recs = fixed_runs(50);
        let mut key = sift_key(&recs);
        verify_key(&mut key, 0.3, &RandomSource::new(4)).unwrap();
        assert_eq!(key.revealed_sample.len() + key.alice_key.len(), 50);
        let kept: Vec<u8> = (0..50)
            .filter(|i| !key.revealed_sample.contains(i))
            .map(|i| key.alice_letters[i])
            .collect();
        assert_eq!(kept, key.alice_key);
    }
}
