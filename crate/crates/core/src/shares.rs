//! One-hot splitting of a sequence into four base indicator tracks.
//!
//! Position `i` of the sequence sets bit `i` in exactly one track. The
//! column rule (one `1` per column across the four tracks, all tracks of
//! equal length) is the integrity criterion checked by
//! [`verify_integrity`].
//!
//! Holding `k` tracks leaves `(4 - k)^n` candidate sequences for `k <= 2`;
//! three tracks determine the fourth. With two tracks exposed a uniform
//! guess over the `2^n` completions succeeds with probability `2^-n`.

use std::fmt;

use num_bigint::BigUint;

use crate::bits::BitTrack;
use crate::sequence::LiteralSequence;

/// A nucleotide, ordered as the track rows: A, T, G, C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A,
    T,
    G,
    C,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::T, Base::G, Base::C];

    /// Row index: A=0, T=1, G=2, C=3. Doubles as the two-bit code
    /// A=00, T=01, G=10, C=11.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Base> {
        Base::ALL.get(i).copied()
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::T => 'T',
            Base::G => 'G',
            Base::C => 'C',
        }
    }

    /// Accepts upper- or lowercase.
    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'T' => Some(Base::T),
            'G' => Some(Base::G),
            'C' => Some(Base::C),
            _ => None,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Four tracks as read from storage, not yet checked against the column
/// rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnverifiedShares {
    tracks: [BitTrack; 4],
}

impl UnverifiedShares {
    /// Tracks in A, T, G, C order.
    pub fn new(tracks: [BitTrack; 4]) -> Self {
        UnverifiedShares { tracks }
    }

    pub fn from_tracks(a: BitTrack, t: BitTrack, g: BitTrack, c: BitTrack) -> Self {
        UnverifiedShares::new([a, t, g, c])
    }

    pub fn track(&self, base: Base) -> &BitTrack {
        &self.tracks[base.index()]
    }

    pub fn track_mut(&mut self, base: Base) -> &mut BitTrack {
        &mut self.tracks[base.index()]
    }

    /// Promotes to [`BaseShares`] if the integrity check passes.
    pub fn verify(self) -> Result<BaseShares, IntegrityError> {
        let report = verify_integrity(&self);
        if report.ok {
            Ok(BaseShares {
                n: self.tracks[0].len(),
                tracks: self.tracks,
            })
        } else {
            Err(IntegrityError(report))
        }
    }
}

impl From<BaseShares> for UnverifiedShares {
    fn from(s: BaseShares) -> Self {
        UnverifiedShares { tracks: s.tracks }
    }
}

/// Four equal-length tracks satisfying the one-hot column rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseShares {
    n: usize,
    tracks: [BitTrack; 4],
}

impl BaseShares {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn track(&self, base: Base) -> &BitTrack {
        &self.tracks[base.index()]
    }

    pub fn tracks(&self) -> impl Iterator<Item = (Base, &BitTrack)> {
        Base::ALL.into_iter().zip(self.tracks.iter())
    }

    pub fn into_tracks(self) -> [BitTrack; 4] {
        self.tracks
    }
}

/// Result of checking a share set against the column rule.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegrityReport {
    pub ok: bool,
    pub length_mismatch: Option<LengthMismatch>,
    /// `(column, ones_count)` for every column whose count is not 1, in
    /// column order. A count of 0 marks a zeroed position, 2 or more an
    /// inserted one.
    pub violations: Vec<(usize, u8)>,
}

/// Track lengths differ; `lengths` is in A, T, G, C order and `expected` is
/// the length of the A track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthMismatch {
    pub expected: usize,
    pub lengths: [usize; 4],
}

impl fmt::Display for IntegrityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ok: {}", self.ok)?;
        match &self.length_mismatch {
            Some(m) => {
                let [a, t, g, c] = m.lengths;
                writeln!(
                    f,
                    "length_mismatch: expected {} got A={a} T={t} G={g} C={c}",
                    m.expected
                )?;
            }
            None => writeln!(f, "length_mismatch: none")?,
        }
        writeln!(f, "violations: {}", self.violations.len())?;
        for (col, count) in &self.violations {
            writeln!(f, "column {col}: {count} ones")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("share integrity check failed ({} violating columns, length mismatch: {})",
    .0.violations.len(), .0.length_mismatch.is_some())]
pub struct IntegrityError(pub IntegrityReport);

pub fn split(seq: &LiteralSequence) -> BaseShares {
    let n = seq.len();
    let mut tracks: [BitTrack; 4] = std::array::from_fn(|_| BitTrack::zeros(n));
    for (i, b) in seq.bases().bytes().enumerate() {
        let base = Base::from_char(b as char).expect("LiteralSequence holds only ACGT");
        tracks[base.index()].set(i, true);
    }
    BaseShares { n, tracks }
}

/// Rebuilds the literal sequence. The result has an empty id.
pub fn merge(shares: &BaseShares) -> LiteralSequence {
    let [a, t, g, c] = shares.tracks.each_ref().map(|tr| tr.as_bytes());
    let mut bases = String::with_capacity(shares.n);
    for i in 0..shares.n {
        let (byte, mask) = (i / 8, 0x80u8 >> (i % 8));
        let ch = if a[byte] & mask != 0 {
            'A'
        } else if t[byte] & mask != 0 {
            'T'
        } else if g[byte] & mask != 0 {
            'G'
        } else {
            debug_assert!(c[byte] & mask != 0);
            'C'
        };
        bases.push(ch);
    }
    LiteralSequence::from_canonical(String::new(), bases)
}

/// Verifies and merges in one step.
pub fn merge_unverified(shares: UnverifiedShares) -> Result<LiteralSequence, IntegrityError> {
    shares.verify().map(|s| merge(&s))
}

/// Checks track lengths, then the one-hot rule for every column.
/// Column checks are skipped when lengths disagree.
pub fn verify_integrity(raw: &UnverifiedShares) -> IntegrityReport {
    let lengths = raw.tracks.each_ref().map(BitTrack::len);
    let expected = lengths[0];
    if lengths.iter().any(|&l| l != expected) {
        return IntegrityReport {
            ok: false,
            length_mismatch: Some(LengthMismatch { expected, lengths }),
            violations: Vec::new(),
        };
    }

    let [a, t, g, c] = raw.tracks.each_ref().map(|tr| tr.as_bytes());
    let last = a.len().saturating_sub(1);
    let mut violations = Vec::new();
    for byte in 0..a.len() {
        let (wa, wt, wg, wc) = (a[byte], t[byte], g[byte], c[byte]);
        let any = wa | wt | wg | wc;
        let multi = (wa & wt) | (wa & wg) | (wa & wc) | (wt & wg) | (wt & wc) | (wg & wc);
        let valid_bits = if byte == last {
            BitTrack::last_byte_mask(expected)
        } else {
            0xFF
        };
        let bad = (!any | multi) & valid_bits;
        if bad == 0 {
            continue;
        }
        for bit in 0..8 {
            let mask = 0x80u8 >> bit;
            if bad & mask != 0 {
                let ones = [wa, wt, wg, wc].iter().filter(|w| *w & mask != 0).count();
                violations.push((byte * 8 + bit, ones as u8));
            }
        }
    }
    IntegrityReport {
        ok: violations.is_empty(),
        length_mismatch: None,
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("known track count {0} is outside 0..=4")]
pub struct KnownTracksOutOfRange(pub u32);

/// Number of sequences consistent with `known_tracks` exposed tracks of an
/// `n`-base sequence: `(4 - k)^n` for `k <= 2`, and 1 once three or four
/// tracks are known.
pub fn residual_combinations(n: u64, known_tracks: u32) -> Result<BigUint, KnownTracksOutOfRange> {
    let remaining: u32 = match known_tracks {
        0..=2 => 4 - known_tracks,
        3 | 4 => 1,
        k => return Err(KnownTracksOutOfRange(k)),
    };
    let mut result = BigUint::from(1u32);
    let mut base = BigUint::from(remaining);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> LiteralSequence {
        LiteralSequence::new("t", s).unwrap()
    }

    #[test]
    fn single_letter_and_empty() {
        let s = split(&seq("AAAA"));
        assert_eq!(s.track(Base::A).to_ascii(), "1111");
        for b in [Base::T, Base::G, Base::C] {
            assert_eq!(s.track(b).to_ascii(), "0000");
        }
        let e = split(&seq(""));
        assert!(e.is_empty());
        assert!(e.tracks().all(|(_, t)| t.is_empty()));
        assert_eq!(merge(&e).bases(), "");
    }

    #[test]
    fn double_one_column_is_rejected_by_merge() {
        let mut raw: UnverifiedShares = split(&seq("AGTCAAG")).into();
        raw.track_mut(Base::A).set(3, true);
        let err = merge_unverified(raw).unwrap_err();
        assert_eq!(err.0.violations, vec![(3, 2)]);
        assert!(!err.0.ok);
    }

    #[test]
    fn zeroed_column_and_truncation() {
        let mut raw: UnverifiedShares = split(&seq("AGTCAAG")).into();
        raw.track_mut(Base::A).set(0, false);
        let r = verify_integrity(&raw);
        assert_eq!(r.violations, vec![(0, 0)]);
        assert!(!r.ok);

        let mut raw: UnverifiedShares = split(&seq("AGTCAAG")).into();
        raw.track_mut(Base::T).truncate(6);
        let r = verify_integrity(&raw);
        assert!(!r.ok);
        assert_eq!(
            r.length_mismatch,
            Some(LengthMismatch {
                expected: 7,
                lengths: [7, 6, 7, 7]
            })
        );
        assert!(r.violations.is_empty());
    }

    #[test]
    fn all_zero_columns_each_reported() {
        let raw = UnverifiedShares::new(std::array::from_fn(|_| BitTrack::zeros(10)));
        let r = verify_integrity(&raw);
        assert_eq!(r.violations, (0..10).map(|i| (i, 0)).collect::<Vec<_>>());
    }

    #[test]
    fn combinations() {
        assert_eq!(residual_combinations(7, 1).unwrap(), BigUint::from(2187u32));
        assert_eq!(residual_combinations(7, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(residual_combinations(7, 4).unwrap(), BigUint::from(1u32));
        assert_eq!(residual_combinations(0, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(residual_combinations(3, 2).unwrap(), BigUint::from(8u32));
        assert_eq!(residual_combinations(2, 0).unwrap(), BigUint::from(16u32));
        assert_eq!(residual_combinations(1, 5), Err(KnownTracksOutOfRange(5)));
        assert_eq!(residual_combinations(200, 0).unwrap(), BigUint::from(2u32).pow(400));
    }

    proptest! {
        #[test]
        fn split_merge_identity(s in "[ACGT]{0,2000}") {
            let ls = seq(&s);
            let shares = split(&ls);
            let total: u64 = shares.tracks().map(|(_, t)| t.count_ones()).sum();
            prop_assert_eq!(total, ls.len() as u64);
            prop_assert!(verify_integrity(&shares.clone().into()).ok);
            let merged = merge(&shares);
            prop_assert_eq!(merged.bases(), ls.bases());
        }

        #[test]
        fn any_single_flip_is_one_violation(s in "[ACGT]{1,500}", which in 0usize..4, pos in any::<prop::sample::Index>()) {
            let mut raw: UnverifiedShares = split(&seq(&s)).into();
            let i = pos.index(s.len());
            raw.track_mut(Base::ALL[which]).flip(i);
            let r = verify_integrity(&raw);
            prop_assert!(!r.ok);
            prop_assert_eq!(r.violations.len(), 1);
            prop_assert_eq!(r.violations[0].0, i);
            prop_assert!(r.violations[0].1 == 0 || r.violations[0].1 == 2);
        }
    }
}
