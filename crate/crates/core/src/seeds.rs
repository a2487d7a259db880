//! Stable seed derivation.
//!
//! FNV-1a over explicit byte strings, so derived seeds never depend on
//! the standard library's hasher and stay identical across builds.

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derives an independent stream seed from a base seed and a tag.
pub fn mix(seed: u64, tag: &str) -> u64 {
    let mut bytes = Vec::with_capacity(8 + tag.len());
    bytes.extend_from_slice(&seed.to_le_bytes());
    bytes.extend_from_slice(tag.as_bytes());
    fnv1a(&bytes)
}

/// Replicate-local seed used by the harness: `base ⊕ hash(name, grid, rep)`.
pub fn replicate_seed(base: u64, scenario: &str, grid_value: f64, replicate: usize) -> u64 {
    let mut bytes = Vec::with_capacity(scenario.len() + 16);
    bytes.extend_from_slice(scenario.as_bytes());
    bytes.extend_from_slice(&grid_value.to_bits().to_le_bytes());
    bytes.extend_from_slice(&(replicate as u64).to_le_bytes());
    base ^ fnv1a(&bytes)
}
