//! Textbook RSA keyed by primes nearest to windows of two tracks.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::prime::{is_probable_prime, nearest_prime};
use super::CryptoError;
use crate::bits::BitTrack;

pub const PUBLIC_EXPONENT: u32 = 65537;
pub const DEFAULT_WINDOW_BITS: usize = 512;
pub const MIN_WINDOW_BITS: usize = 16;
pub const MAX_RETRIES: usize = 1024;

const FRAME_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsaPublicKey {
    pub n: BigUint,
    pub e: BigUint,
}

/// Modulus, exponents and the secret primes. `d` inverts `e` modulo
/// `lcm(p - 1, q - 1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct RsaKeyPair {
    n: BigUint,
    e: BigUint,
    d: BigUint,
    p: BigUint,
    q: BigUint,
}

impl std::fmt::Debug for RsaKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RsaKeyPair")
            .field("n_bits", &self.n.bits())
            .field("e", &self.e)
            .finish_non_exhaustive()
    }
}

impl RsaKeyPair {
    /// Builds a key from two distinct primes and a public exponent.
    pub fn from_primes(p: BigUint, q: BigUint, e: BigUint) -> Result<Self, CryptoError> {
        if p == q {
            return Err(CryptoError::InvalidKey("p and q are equal".into()));
        }
        if !is_probable_prime(&p) || !is_probable_prime(&q) {
            return Err(CryptoError::InvalidKey("p or q is not prime".into()));
        }
        let lambda = carmichael(&p, &q);
        let d = e
            .modinv(&lambda)
            .ok_or_else(|| CryptoError::InvalidKey("e is not invertible mod lcm(p-1, q-1)".into()))?;
        Ok(RsaKeyPair {
            n: &p * &q,
            e,
            d,
            p,
            q,
        })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }
    pub fn e(&self) -> &BigUint {
        &self.e
    }
    pub fn d(&self) -> &BigUint {
        &self.d
    }
    pub fn p(&self) -> &BigUint {
        &self.p
    }
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn public(&self) -> RsaPublicKey {
        RsaPublicKey {
            n: self.n.clone(),
            e: self.e.clone(),
        }
    }

    /// Key file text: n, e, d, p, q in decimal, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in [&self.n, &self.e, &self.d, &self.p, &self.q] {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output and re-checks every key
    /// invariant.
    pub fn from_text(text: &str) -> Result<Self, CryptoError> {
        let values = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<BigUint>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CryptoError::InvalidKey(format!("bad number: {e}")))?;
        let [n, e, d, p, q]: [BigUint; 5] = values
            .try_into()
            .map_err(|v: Vec<_>| CryptoError::InvalidKey(format!("expected 5 lines, got {}", v.len())))?;
        let key = RsaKeyPair::from_primes(p, q, e)?;
        if key.n != n || key.d != d {
            return Err(CryptoError::InvalidKey("n or d inconsistent with p, q, e".into()));
        }
        Ok(key)
    }
}

fn carmichael(p: &BigUint, q: &BigUint) -> BigUint {
    let one = BigUint::one();
    (p - &one).lcm(&(q - &one))
}

/// Window of `bits` track positions read MSB-first, top bit forced to 1.
fn window_value(track: &BitTrack, start: usize, bits: usize) -> Result<BigUint, CryptoError> {
    let w = track.window(start, bits).ok_or(CryptoError::TrackTooShort {
        start,
        end: start.saturating_add(bits),
        available: track.len(),
    })?;
    let mut v = BigUint::from_bytes_be(w.as_bytes()) >> ((8 - bits % 8) % 8);
    v.set_bit(bits as u64 - 1, true);
    Ok(v)
}

/// Derives a key pair from two tracks: `p` and `q` are the primes nearest
/// to `window_bits`-bit windows of `track1` and `track2` starting at
/// `offset_bits`, and `e = 65537`.
///
/// If the primes coincide the second window slides one bit; if `e` shares
/// a factor with `lcm(p - 1, q - 1)` both slide. A slide past the end of a
/// track fails with [`CryptoError::TrackTooShort`].
pub fn rsa_keygen(
    track1: &BitTrack,
    track2: &BitTrack,
    window_bits: usize,
    offset_bits: usize,
) -> Result<RsaKeyPair, CryptoError> {
    if window_bits < MIN_WINDOW_BITS {
        return Err(CryptoError::WindowTooSmall(window_bits));
    }
    let e = BigUint::from(PUBLIC_EXPONENT);
    let (mut off1, mut off2) = (offset_bits, offset_bits);
    for _ in 0..=MAX_RETRIES {
        let p = nearest_prime(&window_value(track1, off1, window_bits)?);
        let q = nearest_prime(&window_value(track2, off2, window_bits)?);
        if p == q {
            off2 += 1;
            continue;
        }
        if !e.gcd(&carmichael(&p, &q)).is_one() {
            off1 += 1;
            off2 += 1;
            continue;
        }
        return RsaKeyPair::from_primes(p, q, e);
    }
    Err(CryptoError::RetryBudgetExhausted(MAX_RETRIES))
}

pub fn rsa_encrypt(m: &BigUint, key: &RsaPublicKey) -> Result<BigUint, CryptoError> {
    if m >= &key.n {
        return Err(CryptoError::MessageOutOfRange);
    }
    Ok(m.modpow(&key.e, &key.n))
}

pub fn rsa_decrypt(c: &BigUint, key: &RsaKeyPair) -> Result<BigUint, CryptoError> {
    if c >= &key.n {
        return Err(CryptoError::MessageOutOfRange);
    }
    Ok(c.modpow(&key.d, &key.n))
}

/// Plaintext bytes per block, chosen so every block value is below `n`.
fn plain_block_len(n: &BigUint) -> Result<usize, CryptoError> {
    match ((n.bits() - 1) / 8) as usize {
        0 => Err(CryptoError::InvalidKey("modulus too small for byte blocks".into())),
        k => Ok(k),
    }
}

fn cipher_block_len(n: &BigUint) -> usize {
    n.bits().div_ceil(8) as usize
}

/// Encrypts the packed bytes of `track` block by block.
///
/// Frame: block count (u64 BE), track bit length (u64 BE), then
/// `count` ciphertext blocks, each `ceil(bits(n) / 8)` bytes big-endian.
/// The final plaintext block may be shorter than the others.
pub fn rsa_encrypt_track(track: &BitTrack, key: &RsaPublicKey) -> Result<Vec<u8>, CryptoError> {
    let k = plain_block_len(&key.n)?;
    let width = cipher_block_len(&key.n);
    let blocks: Vec<&[u8]> = track.as_bytes().chunks(k).collect();
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + blocks.len() * width);
    out.extend_from_slice(&(blocks.len() as u64).to_be_bytes());
    out.extend_from_slice(&(track.len() as u64).to_be_bytes());
    for block in blocks {
        let c = rsa_encrypt(&BigUint::from_bytes_be(block), key)?;
        let bytes = c.to_bytes_be();
        out.resize(out.len() + width - bytes.len(), 0);
        out.extend_from_slice(&bytes);
    }
    Ok(out)
}

pub fn rsa_decrypt_track(frame: &[u8], key: &RsaKeyPair) -> Result<BitTrack, CryptoError> {
    let corrupt = |msg: &str| CryptoError::CorruptFrame(msg.to_string());
    if frame.len() < FRAME_HEADER_LEN {
        return Err(corrupt("shorter than header"));
    }
    let count = u64::from_be_bytes(frame[0..8].try_into().expect("8 bytes"));
    let bit_len = u64::from_be_bytes(frame[8..16].try_into().expect("8 bytes"));
    let bit_len = usize::try_from(bit_len).map_err(|_| corrupt("bit length overflows"))?;
    let k = plain_block_len(&key.n)?;
    let width = cipher_block_len(&key.n);
    let total = bit_len.div_ceil(8);
    if count != total.div_ceil(k) as u64 {
        return Err(corrupt("block count disagrees with bit length"));
    }
    let body = &frame[FRAME_HEADER_LEN..];
    if Some(body.len()) != (count as usize).checked_mul(width) {
        return Err(corrupt("payload length disagrees with block count"));
    }

    let mut bytes = Vec::with_capacity(total);
    for (i, block) in body.chunks(width).enumerate() {
        let c = BigUint::from_bytes_be(block);
        let m = rsa_decrypt(&c, key).map_err(|_| corrupt("ciphertext block not below modulus"))?;
        let plain_len = k.min(total - i * k);
        let m = m.to_bytes_be();
        let m = if m == [0] { &[][..] } else { &m[..] };
        if m.len() > plain_len {
            return Err(corrupt("plaintext block wider than expected"));
        }
        bytes.resize(bytes.len() + plain_len - m.len(), 0);
        bytes.extend_from_slice(m);
    }
    BitTrack::from_packed(bytes, bit_len).ok_or_else(|| corrupt("nonzero padding bits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn desk_key() -> RsaKeyPair {
        RsaKeyPair::from_primes(big(61), big(53), big(17)).unwrap()
    }

    fn random_track(rng: &mut ChaCha8Rng, len: usize) -> BitTrack {
        BitTrack::from_bits((0..len).map(|_| rng.gen::<bool>()))
    }

    #[test]
    fn desk_scale_key() {
        let key = desk_key();
        assert_eq!(key.n(), &big(3233));
        assert_eq!(key.d(), &big(413));
        let c = rsa_encrypt(&big(65), &key.public()).unwrap();
        assert_eq!(c, big(2790));
        assert_eq!(rsa_decrypt(&c, &key).unwrap(), big(65));
        assert_eq!(rsa_encrypt(&big(0), &key.public()).unwrap(), big(0));
        assert_eq!(rsa_encrypt(&big(1), &key.public()).unwrap(), big(1));
        assert!(matches!(
            rsa_encrypt(&big(3233), &key.public()),
            Err(CryptoError::MessageOutOfRange)
        ));
    }

    #[test]
    fn key_validation() {
        assert!(RsaKeyPair::from_primes(big(61), big(61), big(17)).is_err());
        assert!(RsaKeyPair::from_primes(big(61), big(51), big(17)).is_err());
        // gcd(3, lcm(60, 52)) = 3
        assert!(RsaKeyPair::from_primes(big(61), big(53), big(3)).is_err());
        let key = desk_key();
        assert_eq!(RsaKeyPair::from_text(&key.to_text()).unwrap(), key);
        assert!(RsaKeyPair::from_text("3233\n17\n414\n61\n53\n").is_err());
        assert!(RsaKeyPair::from_text("3233\n17\n").is_err());
    }

    #[test]
    fn window_reads_msb_first_with_top_bit() {
        let t = BitTrack::from_ascii("0000000000000101").unwrap();
        assert_eq!(window_value(&t, 0, 16).unwrap(), big(0x8005));
        let t = BitTrack::from_ascii("1010101010101010101").unwrap();
        assert_eq!(window_value(&t, 1, 17).unwrap(), big(0b1_1010_1010_1010_1010));
    }

    #[test]
    fn keygen_small_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_track(&mut rng, 64);
        let b = random_track(&mut rng, 64);
        let key = rsa_keygen(&a, &b, 16, 0).unwrap();
        assert_eq!(key.n(), &(key.p() * key.q()));
        for m in [0u64, 1, 2, 12345] {
            let m = big(m) % key.n();
            let c = rsa_encrypt(&m, &key.public()).unwrap();
            assert_eq!(rsa_decrypt(&c, &key).unwrap(), m);
        }
    }

    #[test]
    fn identical_windows_are_separated() {
        let t = BitTrack::from_ascii(&"1101001110010110".repeat(4)).unwrap();
        let key = rsa_keygen(&t, &t, 16, 0).unwrap();
        assert_ne!(key.p(), key.q());
    }

    #[test]
    fn short_tracks_and_tiny_windows() {
        let t = BitTrack::zeros(8);
        assert!(matches!(rsa_keygen(&t, &t, 16, 0), Err(CryptoError::TrackTooShort { .. })));
        assert!(matches!(rsa_keygen(&t, &t, 8, 0), Err(CryptoError::WindowTooSmall(8))));
    }

    #[test]
    fn track_frames() {
        let key = desk_key();
        let t = BitTrack::from_ascii("0010000").unwrap();
        let frame = rsa_encrypt_track(&t, &key.public()).unwrap();
        assert_eq!(frame.len(), 16 + 2);
        assert_eq!(rsa_decrypt_track(&frame, &key).unwrap(), t);

        let empty = rsa_encrypt_track(&BitTrack::zeros(0), &key.public()).unwrap();
        assert_eq!(empty, [0u8; 16]);
        assert_eq!(rsa_decrypt_track(&empty, &key).unwrap(), BitTrack::zeros(0));

        let mut bad = frame.clone();
        bad.pop();
        assert!(matches!(rsa_decrypt_track(&bad, &key), Err(CryptoError::CorruptFrame(_))));
        let mut bad = frame.clone();
        bad[7] = 2;
        assert!(matches!(rsa_decrypt_track(&bad, &key), Err(CryptoError::CorruptFrame(_))));
        let mut bad = frame;
        bad[16] = 0xFF;
        assert!(matches!(rsa_decrypt_track(&bad, &key), Err(CryptoError::CorruptFrame(_))));
    }

    #[test]
    fn random_track_round_trip_desk_key() {
        let key = desk_key();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in [1usize, 7, 8, 9, 100, 1001] {
            let t = random_track(&mut rng, len);
            let frame = rsa_encrypt_track(&t, &key.public()).unwrap();
            assert_eq!(rsa_decrypt_track(&frame, &key).unwrap(), t);
        }
    }
}
