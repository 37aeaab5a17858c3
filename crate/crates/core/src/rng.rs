//! Explicit, splittable seeding.
//!
//! Every stochastic routine takes a [`Seed`]. Independent sub-streams (one per
//! restart or sample) are derived with [`Seed::child`], so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type SearchRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Counter-based generator positioned at the start of this seed's stream.
    pub fn rng(self) -> SearchRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of the `index`-th child stream.
    pub fn child(self, index: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019))))
    }

    /// Child seed keyed by a label, for separating unrelated phases of one run.
    pub fn labeled(self, label: &str) -> Seed {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        self.child(h)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
