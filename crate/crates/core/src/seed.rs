//! Deterministic seed derivation.
//!
//! Every randomized stage gets its own generator, seeded from the parent seed and a
//! short path of tags (stage id, repetition index, ...). Results therefore never
//! depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a seed with a path of tags into a child seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t.wrapping_add(0x632B_E59B_D9B4_E019))))
}

pub fn rng_for(seed: u64, tags: &[u64]) -> Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

// Stage tags, kept distinct so sibling stages never share a stream.
pub(crate) const TAG_WEIGHTED: u64 = 1;
pub(crate) const TAG_BOUNDED: u64 = 2;
pub(crate) const TAG_UNWEIGHTED: u64 = 3;
pub(crate) const TAG_DKS: u64 = 4;
pub(crate) const TAG_SUBSAMPLE: u64 = 5;
pub(crate) const TAG_GENERAL: u64 = 6;
pub(crate) const TAG_NEGATIONS: u64 = 7;
pub(crate) const TAG_GADGET: u64 = 8;
