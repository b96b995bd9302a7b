//! GBIN: a self-checking container for one base track.
//!
//! ```text
//! offset  size            field
//! 0       4               magic "GBN1"
//! 4       1               base tag, ASCII 'A' | 'T' | 'G' | 'C'
//! 5       8               n, u64 little-endian
//! 13      ceil(n/8)       bits, MSB first, zero padding
//! 13+p    4               CRC-32 (IEEE, reflected) of bytes [0, 13+p), LE
//! ```
//!
//! A container names only its own base; it carries no reference to the
//! other tracks of the split.

use crate::bits::BitTrack;
use crate::shares::Base;

pub const MAGIC: [u8; 4] = *b"GBN1";
pub const HEADER_LEN: usize = 13;
pub const CRC_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbinError {
    #[error("not a GBIN container (bad magic)")]
    BadMagic,
    #[error("unknown base tag byte 0x{0:02x}")]
    BadBase(u8),
    #[error("CRC mismatch: stored 0x{stored:08x}, computed 0x{computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("length mismatch: container needs {expected} bytes, has {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("{extra} unexpected bytes after the checksum")]
    TrailingBytes { extra: usize },
    #[error("padding bits after position n are not zero")]
    NonzeroPadding,
}

/// A decoded container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbinTrack {
    pub base: Base,
    pub track: BitTrack,
}

pub fn encode_gbin(track: &BitTrack, base: Base) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + track.as_bytes().len() + CRC_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(base.as_char() as u8);
    out.extend_from_slice(&(track.len() as u64).to_le_bytes());
    out.extend_from_slice(track.as_bytes());
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Structural checks (magic, length) run before the CRC so that a truncated
/// file reports truncation; tag and padding are validated after it.
pub fn decode_gbin(bytes: &[u8]) -> Result<GbinTrack, GbinError> {
    if bytes.len() < MAGIC.len() || bytes[..4] != MAGIC {
        return Err(GbinError::BadMagic);
    }
    if bytes.len() < HEADER_LEN + CRC_LEN {
        return Err(GbinError::TruncatedPayload {
            expected: HEADER_LEN + CRC_LEN,
            actual: bytes.len(),
        });
    }
    let n = u64::from_le_bytes(bytes[5..13].try_into().expect("8-byte slice"));
    let expected = usize::try_from(n)
        .ok()
        .and_then(|n| n.div_ceil(8).checked_add(HEADER_LEN + CRC_LEN))
        .unwrap_or(usize::MAX);
    if bytes.len() < expected {
        return Err(GbinError::TruncatedPayload {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(GbinError::TrailingBytes {
            extra: bytes.len() - expected,
        });
    }

    let body_end = expected - CRC_LEN;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().expect("4-byte slice"));
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(GbinError::ChecksumMismatch { stored, computed });
    }

    let base = Base::from_char(bytes[4] as char)
        .filter(|_| bytes[4].is_ascii_uppercase())
        .ok_or(GbinError::BadBase(bytes[4]))?;
    let track = BitTrack::from_packed(bytes[HEADER_LEN..body_end].to_vec(), n as usize)
        .ok_or(GbinError::NonzeroPadding)?;
    Ok(GbinTrack { base, track })
}
