//! Bell-state transfer of one base per qubit pair.
//!
//! The sender maps a base to its two-bit code `ij` (A=00, T=01, G=10,
//! C=11), prepares `|ij>`, applies H to the first qubit and then CNOT,
//! giving the Bell state `B_ij`. The receiver undoes it with CNOT followed
//! by H on the first qubit and recovers `|ij>` with certainty.
//!
//! An interceptor who measures in the computational basis collapses `B_ij`
//! to one of its two basis components. Decoding that collapsed state gives
//! an even split between the right code and a code with the first bit
//! flipped, so half of the intercepted positions arrive wrong. That rate
//! holds for this attack model only.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{apply1, apply2, measure, Gate1, Gate2, TwoQubitState, Which};
use super::{QuantumError, NORM_TOLERANCE};
use crate::numfmt::format_significant;
use crate::sequence::LiteralSequence;
use crate::shares::Base;

pub fn bell_encode(base: Base) -> TwoQubitState {
    let s = TwoQubitState::basis(base.index());
    let s = apply1(&Gate1::hadamard(), &s, Which::First);
    apply2(&Gate2::cnot(), &s)
}

pub fn bell_decode(s: &TwoQubitState) -> TwoQubitState {
    let s = apply2(&Gate2::cnot(), s);
    apply1(&Gate1::hadamard(), &s, Which::First)
}

/// The base whose basis state carries all the probability of `s`, if any.
pub fn decoded_base(s: &TwoQubitState) -> Option<Base> {
    s.probabilities()
        .iter()
        .position(|&p| p >= 1.0 - NORM_TOLERANCE)
        .and_then(Base::from_index)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eavesdropper {
    None,
    /// Measures each pair with this probability.
    Intercept(f64),
}

impl Eavesdropper {
    pub fn intercept(p: f64) -> Result<Self, QuantumError> {
        if (0.0..=1.0).contains(&p) {
            Ok(Eavesdropper::Intercept(p))
        } else {
            Err(QuantumError::InvalidProbability(p))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferReport {
    pub bases_sent: u64,
    pub intercepted_count: u64,
    /// Positions where the receiver's measured base differs from the sent
    /// one.
    pub mismatches: u64,
    /// Positions whose decoded state was not a single basis state. Visible
    /// to the receiver without knowing what was sent.
    pub indeterminate_decodes: u64,
    /// `mismatches / intercepted_count`, 0 when nothing was intercepted.
    pub detection_rate: f64,
}

/// `key: value` lines.
impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bases_sent: {}", self.bases_sent)?;
        writeln!(f, "intercepted_count: {}", self.intercepted_count)?;
        writeln!(f, "mismatches: {}", self.mismatches)?;
        writeln!(f, "indeterminate_decodes: {}", self.indeterminate_decodes)?;
        writeln!(f, "detection_rate: {}", format_significant(self.detection_rate, 9))
    }
}

/// Sends every base of `seq` through the channel.
///
/// Position `i` draws from its own generator seeded with `seed ^ i`, so
/// results do not depend on evaluation order.
pub fn simulate_transfer(seq: &LiteralSequence, eve: Eavesdropper, seed: u64) -> TransferReport {
    let p = match eve {
        Eavesdropper::None => 0.0,
        Eavesdropper::Intercept(p) => p.clamp(0.0, 1.0),
    };
    let mut report = TransferReport {
        bases_sent: 0,
        intercepted_count: 0,
        mismatches: 0,
        indeterminate_decodes: 0,
        detection_rate: 0.0,
    };
    for (i, ch) in seq.bases().chars().enumerate() {
        let base = Base::from_char(ch).expect("LiteralSequence holds only ACGT");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
        let mut state = bell_encode(base);
        if p > 0.0 && rng.gen_bool(p) {
            report.intercepted_count += 1;
            state = measure(&state, &mut rng).1;
        }
        let decoded = bell_decode(&state);
        if decoded_base(&decoded).is_none() {
            report.indeterminate_decodes += 1;
        }
        let (outcome, _) = measure(&decoded, &mut rng);
        if outcome != base.index() {
            report.mismatches += 1;
        }
        report.bases_sent += 1;
    }
    if report.intercepted_count > 0 {
        report.detection_rate = report.mismatches as f64 / report.intercepted_count as f64;
    }
    report
}
