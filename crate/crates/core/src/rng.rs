//! Seeded, order-independent random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream addressed
//! by `(seed, domain, index)`:
//!
//! * the 256-bit ChaCha key is four consecutive SplitMix64 outputs (little
//!   endian) started from `mix(seed, domain)`;
//! * the ChaCha 64-bit stream id is `index`, the block counter starts at 0.
//!
//! Replicate `b` of a bootstrap therefore never depends on how many other
//! replicates ran before it or on which thread, and `(seed, domain)` pairs give
//! independent families for different purposes (data rows, bootstrap signs,
//! block permutations). The construction uses only integer arithmetic and the
//! ChaCha block function, so streams are identical across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domain tags for [`substream`]. Values are part of the reproducibility
/// contract and must never change.
pub mod domain {
    pub const DATA_ROW: u64 = 0x01;
    pub const BOOT_MEDIAN: u64 = 0x02;
    pub const BOOT_MEAN: u64 = 0x03;
    pub const GMOM_PERMUTATION: u64 = 0x04;
    pub const REPLICATION: u64 = 0x05;
    pub const REPLICATION_DATA: u64 = 0x06;
    pub const REPLICATION_BOOT: u64 = 0x07;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a child identifier into a seed. Not commutative: `mix(mix(s, a), b)`
/// and `mix(mix(s, b), a)` differ.
pub fn mix(seed: u64, id: u64) -> u64 {
    let mut s = seed ^ id.wrapping_mul(GOLDEN).rotate_left(17);
    let a = splitmix64(&mut s);
    let mut t = a ^ id;
    splitmix64(&mut t)
}

/// Seed for a child of `seed` along `path`, e.g. replication `r` of a scenario.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &id| mix(s, id))
}

/// Stream number `index` in the family `(seed, domain)`.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut state = mix(seed, domain);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// `n` Rademacher signs: sign `i` is bit `i % 64` of the `i / 64`-th 64-bit
/// output, with a set bit meaning `+1`.
pub fn rademacher_signs<R: RngCore>(rng: &mut R, n: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let word = rng.next_u64();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|k| (word >> k) & 1 == 1));
    }
    out
}

/// Uniform draw in the open interval (0, 1) from the top 53 bits.
#[inline]
pub(crate) fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}
