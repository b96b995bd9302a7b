//! One-time pad with single-use enforcement.

use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::CryptoError;

/// Consumed byte ranges of one pad, identified by the pad's SHA-256.
///
/// Intervals are `(offset, length)`, kept sorted, disjoint and with
/// touching neighbours coalesced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadLedger {
    pad_id: String,
    used: Vec<(u64, u64)>,
}

impl PadLedger {
    pub fn new(pad_id: impl Into<String>) -> Self {
        PadLedger {
            pad_id: pad_id.into(),
            used: Vec::new(),
        }
    }

    pub fn pad_id(&self) -> &str {
        &self.pad_id
    }

    pub fn used_intervals(&self) -> &[(u64, u64)] {
        &self.used
    }

    pub fn consumed_bytes(&self) -> u64 {
        self.used.iter().map(|&(_, l)| l).sum()
    }

    /// First consumed interval intersecting `[offset, offset + len)`.
    pub fn conflict(&self, offset: u64, len: u64) -> Option<(u64, u64)> {
        if len == 0 {
            return None;
        }
        let end = offset.saturating_add(len);
        // Intervals are sorted and disjoint, so ends are sorted too.
        let first = self.used.partition_point(|&(o, l)| o + l <= offset);
        self.used.get(first).copied().filter(|&(o, _)| o < end)
    }

    /// Marks `[offset, offset + len)` as consumed.
    pub fn reserve(&mut self, offset: u64, len: u64) -> Result<(), CryptoError> {
        if let Some(used) = self.conflict(offset, len) {
            return Err(CryptoError::PadReuse { offset, len, used });
        }
        if len > 0 {
            self.insert(offset, len);
        }
        Ok(())
    }

    fn insert(&mut self, offset: u64, len: u64) {
        let idx = self.used.partition_point(|&(o, _)| o < offset);
        self.used.insert(idx, (offset, len));
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(self.used.len());
        for &(o, l) in &self.used {
            match merged.last_mut() {
                Some((po, pl)) if *po + *pl >= o => *pl = (*pl).max(o + l - *po),
                _ => merged.push((o, l)),
            }
        }
        self.used = merged;
    }

    /// Sidecar text: the pad digest on the first line, then one
    /// `offset length` line per interval.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.pad_id);
        for (o, l) in &self.used {
            let _ = writeln!(s, "{o} {l}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, CryptoError> {
        let mut lines = text.lines();
        let pad_id = lines
            .next()
            .map(str::trim)
            .filter(|id| !id.is_empty() && id.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| CryptoError::LedgerFormat("missing pad digest".into()))?;
        let mut ledger = PadLedger::new(pad_id.to_ascii_lowercase());
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || CryptoError::LedgerFormat(format!("line {}: {line:?}", i + 2));
            let (o, l) = line.split_once(' ').ok_or_else(bad)?;
            let o: u64 = o.trim().parse().map_err(|_| bad())?;
            let l: u64 = l.trim().parse().map_err(|_| bad())?;
            if o.checked_add(l).is_none() {
                return Err(bad());
            }
            ledger
                .reserve(o, l)
                .map_err(|_| CryptoError::LedgerFormat(format!("line {}: overlapping interval", i + 2)))?;
        }
        Ok(ledger)
    }
}

/// Hex SHA-256 of the pad contents.
pub fn pad_digest<R: Read>(mut pad: R) -> io::Result<String> {
    let mut hasher = Sha256::new();
    io::copy(&mut pad, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}

/// XORs `data` with pad bytes `[offset, offset + data.len())` and records
/// that range in `ledger`. Nothing is recorded on failure.
///
/// Applying the same pad range twice restores the input, but the ledger
/// refuses the second application; decrypting parties use their own ledger
/// or none.
pub fn otp_xor<R: Read + Seek>(
    data: &[u8],
    pad: &mut R,
    offset: u64,
    ledger: &mut PadLedger,
) -> Result<Vec<u8>, CryptoError> {
    let len = data.len() as u64;
    if let Some(used) = ledger.conflict(offset, len) {
        return Err(CryptoError::PadReuse { offset, len, used });
    }
    let out = xor_with_pad(data, pad, offset)?;
    ledger.reserve(offset, len)?;
    Ok(out)
}

/// The bare XOR, without any ledger bookkeeping.
pub fn xor_with_pad<R: Read + Seek>(
    data: &[u8],
    pad: &mut R,
    offset: u64,
) -> Result<Vec<u8>, CryptoError> {
    let len = data.len() as u64;
    let available = pad.seek(SeekFrom::End(0))?;
    if offset.checked_add(len).is_none_or(|end| end > available) {
        return Err(CryptoError::PadExhausted {
            offset,
            needed: len,
            available,
        });
    }
    pad.seek(SeekFrom::Start(offset))?;
    let mut key = vec![0u8; data.len()];
    pad.read_exact(&mut key)?;
    Ok(data.iter().zip(&key).map(|(d, k)| d ^ k).collect())
}

/// A ledger sidecar held under an exclusive advisory lock until dropped.
#[derive(Debug)]
pub struct LockedLedger {
    file: File,
    path: PathBuf,
    ledger: PadLedger,
}

impl LockedLedger {
    /// Opens or creates the ledger at `path` for the pad with digest
    /// `pad_id`, blocking until the lock is granted. An existing ledger for
    /// a different pad is an error.
    pub fn open(path: &Path, pad_id: &str) -> Result<Self, CryptoError> {
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)?;
        file.lock()?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        let ledger = if text.trim().is_empty() {
            PadLedger::new(pad_id.to_ascii_lowercase())
        } else {
            let ledger = PadLedger::from_text(&text)?;
            if !ledger.pad_id.eq_ignore_ascii_case(pad_id) {
                return Err(CryptoError::LedgerMismatch {
                    ledger: ledger.pad_id,
                    pad: pad_id.to_string(),
                });
            }
            ledger
        };
        Ok(LockedLedger {
            file,
            path: path.to_path_buf(),
            ledger,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn ledger(&self) -> &PadLedger {
        &self.ledger
    }

    pub fn ledger_mut(&mut self) -> &mut PadLedger {
        &mut self.ledger
    }

    /// Rewrites the sidecar with the current intervals and syncs it.
    pub fn commit(&mut self) -> io::Result<()> {
        let text = self.ledger.to_text();
        self.file.set_len(0)?;
        self.file.seek(SeekFrom::Start(0))?;
        self.file.write_all(text.as_bytes())?;
        self.file.sync_all()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    #[test]
    fn xor_truth_table() {
        let mut ledger = PadLedger::new("00");
        let out = otp_xor(&[0xA5], &mut Cursor::new(vec![0xFF]), 0, &mut ledger).unwrap();
        assert_eq!(out, [0x5A]);
        assert_eq!(ledger.used_intervals(), &[(0, 1)]);
    }

    #[test]
    fn reuse_is_refused_and_ledger_unchanged() {
        let pad = vec![7u8; 64];
        let mut ledger = PadLedger::new("ab");
        otp_xor(&[1; 10], &mut Cursor::new(&pad), 10, &mut ledger).unwrap();
        let before = ledger.clone();
        let err = otp_xor(&[1; 4], &mut Cursor::new(&pad), 18, &mut ledger).unwrap_err();
        assert!(matches!(err, CryptoError::PadReuse { offset: 18, len: 4, used: (10, 10) }));
        assert_eq!(ledger, before);
        // Adjacent ranges are fine and coalesce.
        otp_xor(&[1; 5], &mut Cursor::new(&pad), 20, &mut ledger).unwrap();
        otp_xor(&[1; 10], &mut Cursor::new(&pad), 0, &mut ledger).unwrap();
        assert_eq!(ledger.used_intervals(), &[(0, 25)]);
    }

    #[test]
    fn exhausted_pad() {
        let mut ledger = PadLedger::new("ab");
        let err = otp_xor(&[0; 4], &mut Cursor::new(vec![0u8; 5]), 2, &mut ledger).unwrap_err();
        assert!(matches!(err, CryptoError::PadExhausted { available: 5, .. }));
        assert!(ledger.used_intervals().is_empty());
        let err = otp_xor(&[0; 4], &mut Cursor::new(vec![0u8; 5]), u64::MAX, &mut ledger).unwrap_err();
        assert!(matches!(err, CryptoError::PadExhausted { .. }));
    }

    #[test]
    fn empty_payload_consumes_nothing() {
        let mut ledger = PadLedger::new("ab");
        assert!(otp_xor(&[], &mut Cursor::new(vec![0u8; 1]), 0, &mut ledger).unwrap().is_empty());
        assert!(ledger.used_intervals().is_empty());
    }

    #[test]
    fn ledger_text_round_trip_and_errors() {
        let mut l = PadLedger::new("deadbeef");
        l.reserve(100, 5).unwrap();
        l.reserve(0, 10).unwrap();
        assert_eq!(l.to_text(), "deadbeef\n0 10\n100 5\n");
        assert_eq!(PadLedger::from_text(&l.to_text()).unwrap(), l);
        assert!(PadLedger::from_text("").is_err());
        assert!(PadLedger::from_text("zz\n").is_err());
        assert!(PadLedger::from_text("ab\n1 x\n").is_err());
        assert!(PadLedger::from_text("ab\n0 10\n5 10\n").is_err());
    }

    #[test]
    fn locked_ledger_persists_and_checks_digest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pad.ledger");
        {
            let mut l = LockedLedger::open(&path, "abcd").unwrap();
            l.ledger_mut().reserve(0, 8).unwrap();
            l.commit().unwrap();
        }
        let l = LockedLedger::open(&path, "ABCD").unwrap();
        assert_eq!(l.ledger().used_intervals(), &[(0, 8)]);
        drop(l);
        assert!(matches!(
            LockedLedger::open(&path, "ffff"),
            Err(CryptoError::LedgerMismatch { .. })
        ));
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            pad_digest(&b"abc"[..]).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    proptest! {
        #[test]
        fn double_xor_is_identity(data in proptest::collection::vec(any::<u8>(), 0..256),
                                  pad in proptest::collection::vec(any::<u8>(), 512..600),
                                  offset in 0u64..256) {
            let mut enc_ledger = PadLedger::new("p");
            let c = otp_xor(&data, &mut Cursor::new(&pad), offset, &mut enc_ledger).unwrap();
            let mut dec_ledger = PadLedger::new("p");
            let m = otp_xor(&c, &mut Cursor::new(&pad), offset, &mut dec_ledger).unwrap();
            prop_assert_eq!(m, data);
        }

        #[test]
        fn no_byte_is_reserved_twice(ops in proptest::collection::vec((0u64..200, 0u64..40), 1..60)) {
            let mut ledger = PadLedger::new("p");
            let mut owned = vec![false; 240];
            for (o, l) in ops {
                let overlaps = (o..o + l).any(|i| owned[i as usize]);
                match ledger.reserve(o, l) {
                    Ok(()) => {
                        prop_assert!(!overlaps);
                        for i in o..o + l { owned[i as usize] = true; }
                    }
                    Err(CryptoError::PadReuse { .. }) => prop_assert!(overlaps),
                    Err(e) => panic!("{e}"),
                }
                let covered: u64 = owned.iter().filter(|b| **b).count() as u64;
                prop_assert_eq!(ledger.consumed_bytes(), covered);
                for w in ledger.used_intervals().windows(2) {
                    prop_assert!(w[0].0 + w[0].1 < w[1].0);
                }
            }
        }
    }
}
