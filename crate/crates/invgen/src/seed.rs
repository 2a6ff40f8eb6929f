//! Reproducible randomness: one 64-bit seed expanded into labelled child streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A node in a deterministic tree of seeds.
///
/// Children are addressed by a numeric tag or a string label, so stages that
/// run in parallel each get an independent stream whose identity does not
/// depend on scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child(&self, tag: u64) -> SeedTree {
        SeedTree { seed: mix(mix(self.seed) ^ mix(tag.wrapping_add(0x632b_e59b_d9b4_e019))) }
    }

    pub fn named(&self, label: &str) -> SeedTree {
        let tag = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        self.child(tag)
    }

    pub fn rng(&self) -> Rng {
        Rng::seed_from_u64(self.seed)
    }
}
