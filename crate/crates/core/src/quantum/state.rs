use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{QuantumError, NORM_TOLERANCE};
use crate::numfmt::format_significant;
use crate::shares::Base;

pub type Complex = num_complex::Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

fn check_norm(amp: &[Complex]) -> Result<(), QuantumError> {
    if amp.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(QuantumError::NonFinite);
    }
    let total: f64 = amp.iter().map(Complex::norm_sqr).sum();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(QuantumError::NotNormalized(total));
    }
    Ok(())
}

/// `a0|0> + a1|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    a0: Complex,
    a1: Complex,
}

impl Qubit {
    pub fn new(a0: Complex, a1: Complex) -> Result<Self, QuantumError> {
        check_norm(&[a0, a1])?;
        Ok(Qubit { a0, a1 })
    }

    pub fn zero() -> Self {
        Qubit { a0: ONE, a1: ZERO }
    }

    pub fn one() -> Self {
        Qubit { a0: ZERO, a1: ONE }
    }

    pub fn amplitudes(&self) -> [Complex; 2] {
        [self.a0, self.a1]
    }
}

/// The Bloch-sphere point `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
/// Angles are reduced modulo 2 pi first.
pub fn bloch(theta: f64, phi: f64) -> Qubit {
    let theta = theta.rem_euclid(TAU);
    let phi = phi.rem_euclid(TAU);
    let half = theta / 2.0;
    Qubit {
        a0: Complex::new(half.cos(), 0.0),
        a1: Complex::from_polar(half.sin(), phi),
    }
}

/// A four-level state over the bases, `amp` in A, T, G, C order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ququart {
    amp: [Complex; 4],
}

impl Ququart {
    pub fn new(amp: [Complex; 4]) -> Result<Self, QuantumError> {
        check_norm(&amp)?;
        Ok(Ququart { amp })
    }

    /// Equal superposition of all four bases.
    pub fn uniform() -> Self {
        Ququart {
            amp: [Complex::new(0.5, 0.0); 4],
        }
    }

    pub fn amplitudes(&self) -> [Complex; 4] {
        self.amp
    }

    pub fn probability(&self, base: Base) -> f64 {
        self.amp[base.index()].norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amp: [Complex; 4],
}

impl TwoQubitState {
    pub fn new(amp: [Complex; 4]) -> Result<Self, QuantumError> {
        check_norm(&amp)?;
        Ok(TwoQubitState { amp })
    }

    /// Unit vector `|k>`, `k` in `0..4`.
    pub fn basis(k: usize) -> Self {
        assert!(k < 4, "basis index {k} out of range");
        let mut amp = [ZERO; 4];
        amp[k] = ONE;
        TwoQubitState { amp }
    }

    pub fn amplitudes(&self) -> [Complex; 4] {
        self.amp
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.amp.map(|a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(Complex::norm_sqr).sum()
    }

    /// Largest difference from `other` in any amplitude.
    pub fn distance(&self, other: &TwoQubitState) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Equal up to a global phase, within `tol` per amplitude.
    pub fn equals_up_to_phase(&self, other: &TwoQubitState, tol: f64) -> bool {
        let overlap: Complex = self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() < tol {
            return false;
        }
        let phase = overlap / overlap.norm();
        self.amp
            .iter()
            .zip(&other.amp)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

fn fmt_complex(c: &Complex) -> String {
    let re = format_significant(c.re, 12);
    let im = format_significant(c.im.abs(), 12);
    let sign = if c.im.is_sign_negative() && c.im != 0.0 { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

/// `(a+bi, c+di, e+fi, g+hi)` at 12 significant digits.
impl fmt::Display for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.amp.iter().map(fmt_complex).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Accepts the [`Display`](fmt::Display) form, or four amplitudes separated
/// by commas or whitespace. The result must be normalized.
impl FromStr for TwoQubitState {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        let amps = parts
            .iter()
            .map(|p| parse_complex(p))
            .collect::<Result<Vec<_>, _>>()?;
        let amp: [Complex; 4] = amps
            .try_into()
            .map_err(|v: Vec<_>| QuantumError::AmplitudeCount(v.len()))?;
        TwoQubitState::new(amp)
    }
}

/// Parses `a+bi`, `a-bi`, `a`, or `bi`.
pub fn parse_complex(text: &str) -> Result<Complex, QuantumError> {
    let err = || QuantumError::ParseComplex(text.to_string());
    let s = text.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| err());
    };
    // The split point is the last sign that is not leading and not part of
    // an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse::<f64>().map_err(|_| err())?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| err())?,
    };
    Ok(Complex::new(re, im))
}

/// `|q1> (x) |q2>`.
pub fn tensor(q1: &Qubit, q2: &Qubit) -> TwoQubitState {
    TwoQubitState {
        amp: [q1.a0 * q2.a0, q1.a0 * q2.a1, q1.a1 * q2.a0, q1.a1 * q2.a1],
    }
}

fn max_unitarity_error<const N: usize>(m: &[[Complex; N]; N]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let dot: Complex = (0..N).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// A unitary 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1 {
    m: [[Complex; 2]; 2],
}

impl Gate1 {
    pub fn new(m: [[Complex; 2]; 2]) -> Result<Self, QuantumError> {
        let err = max_unitarity_error(&m);
        if !(err <= NORM_TOLERANCE) {
            return Err(QuantumError::NonUnitaryGate(err));
        }
        Ok(Gate1 { m })
    }

    fn real(m: [[f64; 2]; 2]) -> Self {
        Gate1 {
            m: m.map(|row| row.map(|v| Complex::new(v, 0.0))),
        }
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Gate1::real([[h, h], [h, -h]])
    }

    pub fn pauli_x() -> Self {
        Gate1::real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Self {
        Gate1::real([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn identity() -> Self {
        Gate1::real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn matrix(&self) -> [[Complex; 2]; 2] {
        self.m
    }

    pub fn unitarity_error(&self) -> f64 {
        max_unitarity_error(&self.m)
    }
}

/// A unitary 4x4 matrix over the two-qubit basis, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2 {
    m: [[Complex; 4]; 4],
}

impl Gate2 {
    pub fn new(m: [[Complex; 4]; 4]) -> Result<Self, QuantumError> {
        let err = max_unitarity_error(&m);
        if !(err <= NORM_TOLERANCE) {
            return Err(QuantumError::NonUnitaryGate(err));
        }
        Ok(Gate2 { m })
    }

    /// Controlled NOT, first qubit controls: swaps `|10>` and `|11>`.
    pub fn cnot() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (row, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[row][col] = ONE;
        }
        Gate2 { m }
    }

    pub fn matrix(&self) -> [[Complex; 4]; 4] {
        self.m
    }

    pub fn unitarity_error(&self) -> f64 {
        max_unitarity_error(&self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

/// `(g (x) I)|s>` for [`Which::First`], `(I (x) g)|s>` for
/// [`Which::Second`].
pub fn apply1(g: &Gate1, s: &TwoQubitState, which: Which) -> TwoQubitState {
    let mut amp = [ZERO; 4];
    for (idx, out) in amp.iter_mut().enumerate() {
        let (hi, lo) = (idx >> 1, idx & 1);
        *out = match which {
            Which::First => (0..2).map(|k| g.m[hi][k] * s.amp[(k << 1) | lo]).sum(),
            Which::Second => (0..2).map(|k| g.m[lo][k] * s.amp[(hi << 1) | k]).sum(),
        };
    }
    TwoQubitState { amp }
}

pub fn apply2(g: &Gate2, s: &TwoQubitState) -> TwoQubitState {
    let amp = std::array::from_fn(|i| (0..4).map(|k| g.m[i][k] * s.amp[k]).sum());
    TwoQubitState { amp }
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64; 4], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p / total;
        if u < acc {
            return k;
        }
    }
    // Round-off left u above the final partial sum.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(3)
}

/// Projective measurement in the computational basis. Returns the outcome
/// index and the collapsed basis state.
pub fn measure<R: Rng + ?Sized>(s: &TwoQubitState, rng: &mut R) -> (usize, TwoQubitState) {
    let k = sample_index(&s.probabilities(), rng);
    (k, TwoQubitState::basis(k))
}

pub fn measure_ququart<R: Rng + ?Sized>(q: &Ququart, rng: &mut R) -> Base {
    let probs = q.amp.map(|a| a.norm_sqr());
    Base::from_index(sample_index(&probs, rng)).expect("index below 4")
}

/// `|amp00 * amp11 - amp01 * amp10|`; zero exactly for product states.
pub fn entanglement_determinant(s: &TwoQubitState) -> f64 {
    (s.amp[0] * s.amp[3] - s.amp[1] * s.amp[2]).norm()
}

pub fn is_product(s: &TwoQubitState) -> bool {
    entanglement_determinant(s) <= NORM_TOLERANCE
}
