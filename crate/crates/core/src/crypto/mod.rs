//! Encryption of share tracks.
//!
//! - [`otp`]: XOR against pad bytes, with a ledger that refuses to hand out
//!   any pad byte twice
//! - [`prime`]: primality testing and nearest-prime search
//! - [`rsa`]: textbook RSA whose primes are taken from windows of two other
//!   tracks
//!
//! The RSA here is unpadded and deterministic. It is not semantically secure
//! and exists to demonstrate deriving key material from sibling tracks.

pub mod otp;
pub mod prime;
pub mod rsa;

use std::io;

pub use otp::{otp_xor, pad_digest, LockedLedger, PadLedger};
pub use prime::{is_probable_prime, nearest_prime};
pub use rsa::{
    rsa_decrypt, rsa_decrypt_track, rsa_encrypt, rsa_encrypt_track, rsa_keygen, RsaKeyPair,
    RsaPublicKey,
};

#[derive(Debug, thiserror::Error)]
pub enum CryptoError {
    #[error("pad exhausted: need {needed} bytes from offset {offset}, pad holds {available}")]
    PadExhausted {
        offset: u64,
        needed: u64,
        available: u64,
    },
    #[error("pad reuse refused: [{offset}, {}) overlaps consumed interval [{}, {})",
        .offset + .len, .used.0, .used.0 + .used.1)]
    PadReuse {
        offset: u64,
        len: u64,
        used: (u64, u64),
    },
    #[error("ledger belongs to pad {ledger}, not {pad}")]
    LedgerMismatch { ledger: String, pad: String },
    #[error("malformed ledger: {0}")]
    LedgerFormat(String),
    #[error("track too short: window needs bits [{start}, {end}), track has {available}")]
    TrackTooShort {
        start: usize,
        end: usize,
        available: usize,
    },
    #[error("window of {0} bits is below the 16-bit minimum")]
    WindowTooSmall(usize),
    #[error("no usable prime pair after {0} retries")]
    RetryBudgetExhausted(usize),
    #[error("message is not below the modulus")]
    MessageOutOfRange,
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("corrupt ciphertext frame: {0}")]
    CorruptFrame(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}
