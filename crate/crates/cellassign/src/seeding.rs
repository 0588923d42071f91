//! Seed derivation for nested experiment runs.
//!
//! Every random decision in the crate is keyed off a single master seed.
//! Sub-seeds (per instance, per stage) are derived by folding tag words
//! through the splitmix64 finalizer, so runs are reproducible across
//! platforms and thread counts and distinct stages never share a stream.

/// splitmix64 finalizer. Bijective on `u64`, good avalanche.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into one seed. Order-sensitive: `mix(&[a, b]) != mix(&[b, a])`.
pub(crate) fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0xA076_1D64_78BD_642F_u64;
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}
