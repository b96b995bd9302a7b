//! Primality testing and nearest-prime search over arbitrary precision.

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// The first 13 primes as Miller-Rabin bases decide primality for every
/// n below this bound (Sorenson & Webster).
const DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const RANDOM_ROUNDS: usize = 64;
const SMALL_PRIME_LIMIT: u32 = 2000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = SMALL_PRIME_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u32);
                for j in (i * i..=limit).step_by(i) {
                    composite[j] = true;
                }
            }
        }
        primes
    })
}

/// Miller-Rabin with the fixed base set below 3.3e24 (exact there) and 64
/// pseudo-random bases above. The random bases are seeded from `n` itself,
/// so the verdict for a given input never changes between runs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u32().filter(|&v| v <= SMALL_PRIME_LIMIT) {
        return small_primes().binary_search(&small).is_ok();
    }
    for &p in small_primes() {
        if (n % p).is_zero() {
            return false;
        }
    }
    // No factor below SMALL_PRIME_LIMIT and n < limit^2 means prime.
    if n.to_u64().is_some_and(|v| v < u64::from(SMALL_PRIME_LIMIT).pow(2)) {
        return true;
    }

    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n - 1 is nonzero");
    let d = &n_minus_1 >> s;

    let is_witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n_minus_1 {
                return false;
            }
            if x == one {
                return true;
            }
        }
        true
    };

    if n.to_u128().is_some_and(|v| v < DETERMINISTIC_BOUND) {
        return !DETERMINISTIC_BASES
            .iter()
            .any(|&a| is_witness(&BigUint::from(a)));
    }

    let mut seed = [0u8; 32];
    for (i, b) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= b.rotate_left((i / 32) as u32 % 8);
    }
    let mut rng = ChaCha20Rng::from_seed(seed);
    let low = BigUint::from(2u32);
    let high = n - &one; // exclusive, so a <= n - 2
    !(0..RANDOM_ROUNDS).any(|_| is_witness(&rng.gen_biguint_range(&low, &high)))
}

/// The prime closest to `value`. When two primes are equally close the
/// smaller one wins. Values below 2 map to 2.
///
/// Candidates are tried at growing distance, below before above, so the
/// first hit is both nearest and tie-broken.
pub fn nearest_prime(value: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if value <= &two {
        return two;
    }
    if is_probable_prime(value) {
        return value.clone();
    }
    let mut distance = BigUint::one();
    loop {
        if &distance <= value {
            let below = value - &distance;
            if below >= two && (below.is_odd() || below == two) && is_probable_prime(&below) {
                return below;
            }
        }
        let above = value + &distance;
        if above.is_odd() && is_probable_prime(&above) {
            return above;
        }
        distance += 1u32;
    }
}
