//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (a counter-based
//! stream cipher generator, portable and bit-stable across platforms).
//! A stream is identified by `(master_seed, case, purpose)`:
//!
//! * the 256-bit key is derived from `master_seed` with `SeedableRng::seed_from_u64`;
//! * the 64-bit ChaCha stream id is `(case << 8) | purpose`.
//!
//! Distinct cases and purposes therefore never share keystream, and a case's
//! draws do not depend on how many other cases were generated or in which
//! order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. The discriminant is the low byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Phantom = 1,
    Degrade = 2,
    Split = 3,
    Forest = 4,
    Permute = 5,
    Fixture = 6,
}

pub fn stream(master_seed: u64, case: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((case << 8) | purpose as u64);
    rng
}
