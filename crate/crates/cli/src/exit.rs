//! Process exit codes and error classification.

use std::fmt;
use std::io;

use genovault::crypto::CryptoError;
use genovault::gbin::GbinError;
use genovault::quantum::QuantumError;
use genovault::sequence::{FastaError, FetchError};
use genovault::shares::{IntegrityError, KnownTracksOutOfRange};
use genovault::spectral::SpectralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Code {
    Success = 0,
    Usage = 1,
    Integrity = 2,
    Crypto = 3,
    Io = 4,
    Internal = 5,
}

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: Code,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: Code, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::new(Code::Usage, anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        Failure {
            code: self.code,
            error: self.error.context(ctx),
        }
    }
}

pub trait ResultExt<T> {
    fn ctx(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Result<T, Failure>;
}

impl<T, E: Into<Failure>> ResultExt<T> for Result<T, E> {
    fn ctx(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Result<T, Failure> {
        self.map_err(|e| e.into().context(ctx))
    }
}

macro_rules! classify {
    ($($ty:ty => $code:expr),* $(,)?) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                let code: fn(&$ty) -> Code = $code;
                Failure::new(code(&e), e)
            }
        })*
    };
}

classify! {
    io::Error => |_| Code::Io,
    FastaError => |_| Code::Usage,
    GbinError => |_| Code::Integrity,
    IntegrityError => |_| Code::Integrity,
    KnownTracksOutOfRange => |_| Code::Usage,
    QuantumError => |_| Code::Usage,
    FetchError => |_| Code::Io,
    CryptoError => |e| match e {
        CryptoError::Io(_) => Code::Io,
        _ => Code::Crypto,
    },
    SpectralError => |e| match e {
        SpectralError::DegenerateSpectrum | SpectralError::LengthMismatch { .. } => Code::Internal,
        _ => Code::Usage,
    },
}
