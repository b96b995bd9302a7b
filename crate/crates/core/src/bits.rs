//! Packed bit vectors, eight positions per byte.

use std::fmt;

/// A fixed-length bit vector stored most-significant-bit first: position `i`
/// lives in byte `i / 8` at bit `7 - i % 8`. Padding bits in the last byte
/// are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitTrack {
    len: usize,
    bytes: Vec<u8>,
}

impl BitTrack {
    pub fn zeros(len: usize) -> Self {
        BitTrack {
            len,
            bytes: vec![0; len.div_ceil(8)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut track = BitTrack::default();
        for b in bits {
            track.push(b);
        }
        track
    }

    /// Wraps already-packed bytes. Returns `None` if the byte count does not
    /// match `len` or a padding bit is set.
    pub fn from_packed(bytes: Vec<u8>, len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let track = BitTrack { len, bytes };
        if track.padding_is_clear() {
            Some(track)
        } else {
            None
        }
    }

    /// Parses a string of `'0'`/`'1'` characters; surrounding whitespace is
    /// ignored.
    pub fn from_ascii(text: &str) -> Option<Self> {
        text.trim()
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BitTrack::from_bits)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 0x80 >> (i % 8);
        if value {
            self.bytes[i / 8] |= mask;
        } else {
            self.bytes[i / 8] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn push(&mut self, value: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    /// Drops positions past `len`.
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.bytes.truncate(len.div_ceil(8));
        if let Some(last) = self.bytes.last_mut() {
            *last &= Self::last_byte_mask(len);
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.bytes.iter().map(|b| u64::from(b.count_ones())).sum()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// `count` bits starting at `start`, or `None` if the range overruns.
    pub fn window(&self, start: usize, count: usize) -> Option<BitTrack> {
        let end = start.checked_add(count)?;
        if end > self.len {
            return None;
        }
        Some(BitTrack::from_bits((start..end).map(|i| self.get(i))))
    }

    pub fn to_ascii(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Mask of the valid bits in the final byte of a `len`-bit track.
    pub(crate) fn last_byte_mask(len: usize) -> u8 {
        match len % 8 {
            0 => 0xFF,
            r => !(0xFFu8 >> r),
        }
    }

    fn padding_is_clear(&self) -> bool {
        match self.bytes.last() {
            Some(last) => last & !Self::last_byte_mask(self.len) == 0,
            None => true,
        }
    }
}

impl fmt::Debug for BitTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitTrack({})", self.to_ascii())
        } else {
            write!(f, "BitTrack(len={}, ones={})", self.len, self.count_ones())
        }
    }
}
