//! Seeded randomness addressed by (run, event).
//!
//! Every random decision in a run reads from its own position in a ChaCha8
//! keystream: the master seed keys the cipher, the run index selects the
//! stream, and the event index selects a word offset. Results therefore do
//! not depend on execution order or on how runs are spread over threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream reserved for key-verification sampling, disjoint from any run.
pub const KEY_SAMPLING_STREAM: u64 = u64::MAX;

const EVENT_STRIDE: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    master_seed: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// A generator positioned at `event` within `run`'s stream. Each event has
    /// 2^32 words to itself.
    pub fn rng(&self, run: u64, event: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(run);
        rng.set_word_pos(u128::from(event) << EVENT_STRIDE);
        rng
    }

    pub fn draw(&self, run: u64, event: u64) -> u64 {
        self.rng(run, event).next_u64()
    }

    pub fn substream(&self, run: u64, first_event: u64) -> Substream {
        Substream {
            source: *self,
            run,
            next_event: first_event,
        }
    }
}

/// Sequential draws over consecutive events of one run.
#[derive(Debug, Clone)]
pub struct Substream {
    source: RandomSource,
    run: u64,
    next_event: u64,
}

impl Substream {
    pub fn next_u64(&mut self) -> u64 {
        let v = self.source.draw(self.run, self.next_event);
        self.next_event += 1;
        v
    }

    pub fn next_event(&self) -> u64 {
        self.next_event
    }
}
