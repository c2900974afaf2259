use sha2::{Digest, Sha256};

use super::config::Split;
use crate::synthesis::SignalClass;

/// Stable 64-bit child seed: the first eight bytes (little-endian) of
/// SHA-256 over the sample's coordinates. Independent of generation order.
pub fn child_seed(master: u64, class: SignalClass, snr_db: f64, jsr_db: f64, index: usize, split: Split) -> u64 {
    let mut h = Sha256::new();
    h.update(b"tfjam-sample");
    h.update(master.to_le_bytes());
    h.update(class.slug().as_bytes());
    h.update([0u8]);
    h.update(snr_db.to_bits().to_le_bytes());
    h.update(jsr_db.to_bits().to_le_bytes());
    h.update((index as u64).to_le_bytes());
    h.update(split.tag().as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
