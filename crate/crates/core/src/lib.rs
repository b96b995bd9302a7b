//! Protection toolkit for literal genomic sequences.
//!
//! A sequence over `{A,C,G,T}` is projected onto four binary indicator
//! tracks (one per base). Stored apart, a single track says little about the
//! sequence; together they reconstruct it and expose tampering through the
//! one-hot column rule. On top of the split the crate provides one-time-pad
//! and textbook RSA encryption of tracks, Fourier screening of candidate pad
//! material, and an exact two-qubit simulation of a Bell-state channel that
//! carries one base per entangled pair.
//!
//! Modules:
//!
//! - [`sequence`]: FASTA ingestion, emission and HTTP fetching
//! - [`bits`]: MSB-first packed bit vectors
//! - [`shares`]: split / merge / integrity / combinatorics, plus [`gbin`]
//!   containers for single tracks
//! - [`crypto`]: one-time pad with a persistent usage ledger, nearest-prime
//!   derivation and textbook RSA
//! - [`spectral`]: amplitude spectra of tracks and codon-peak screening
//! - [`quantum`]: state-vector simulation of qubits, gates and Bell transfer

pub mod bits;
pub mod crypto;
pub mod gbin;
mod numfmt;
pub mod quantum;
pub mod sequence;
pub mod shares;
pub mod spectral;

pub use bits::BitTrack;
pub use numfmt::format_significant;
pub use sequence::{AmbiguityPolicy, LiteralSequence};
pub use shares::{Base, BaseShares, IntegrityReport, UnverifiedShares};
