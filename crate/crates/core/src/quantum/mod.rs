//! Exact pure-state simulation of one qubit pair.
//!
//! Two-qubit amplitudes are ordered `|00>, |01>, |10>, |11>`; the first
//! qubit is the high bit of the index. Normalization is by squared modulus.

mod channel;
mod state;

pub use channel::{
    bell_decode, bell_encode, decoded_base, simulate_transfer, Eavesdropper, TransferReport,
};
pub use state::{
    apply1, apply2, bloch, entanglement_determinant, is_product, measure, measure_ququart,
    parse_complex, tensor, Complex, Gate1, Gate2, Qubit, Ququart, TwoQubitState, Which,
};

/// Allowed deviation of `sum |amp|^2` from 1, and of `U^dagger U` from I.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("state is not normalized: sum of squared moduli is {0}")]
    NotNormalized(f64),
    #[error("amplitude is not finite")]
    NonFinite,
    #[error("gate matrix is not unitary (max deviation {0:e})")]
    NonUnitaryGate(f64),
    #[error("interception probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cannot parse {0:?} as a complex amplitude")]
    ParseComplex(String),
    #[error("expected 4 amplitudes, got {0}")]
    AmplitudeCount(usize),
}
