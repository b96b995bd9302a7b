//! Literal sequences: validation, FASTA text and remote retrieval.

mod fasta;
mod fetch;

pub use fasta::{parse_fasta, write_fasta, AmbiguityPolicy, FastaError, FastaRecord};
pub use fetch::{fetch_reference, FetchError, FetchOptions, DEFAULT_FETCH_TIMEOUT};

use std::fmt;

/// Invalid content handed to [`LiteralSequence::new`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("character {ch:?} at position {position} is not one of A, C, G, T")]
    NonAlphabetCharacter { position: usize, ch: char },
    #[error("sequence identifier must be a single line")]
    MultilineId,
}

/// A validated nucleotide string over the uppercase alphabet `{A,C,G,T}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LiteralSequence {
    id: String,
    bases: String,
    source: Option<String>,
}

impl LiteralSequence {
    /// Builds a sequence from canonical bases. Lowercase is rejected here;
    /// use [`parse_fasta`] for lenient ingestion.
    pub fn new(id: impl Into<String>, bases: impl Into<String>) -> Result<Self, SequenceError> {
        let id = id.into();
        if id.contains(['\n', '\r']) {
            return Err(SequenceError::MultilineId);
        }
        let bases = bases.into();
        if let Some((position, ch)) = bases
            .char_indices()
            .find(|(_, c)| !matches!(c, 'A' | 'C' | 'G' | 'T'))
        {
            return Err(SequenceError::NonAlphabetCharacter { position, ch });
        }
        Ok(LiteralSequence {
            id,
            bases,
            source: None,
        })
    }

    /// Caller guarantees `bases` is canonical.
    pub(crate) fn from_canonical(id: String, bases: String) -> Self {
        debug_assert!(bases.bytes().all(|b| matches!(b, b'A' | b'C' | b'G' | b'T')));
        LiteralSequence {
            id,
            bases,
            source: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Result<Self, SequenceError> {
        let id = id.into();
        if id.contains(['\n', '\r']) {
            return Err(SequenceError::MultilineId);
        }
        self.id = id;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bases(&self) -> &str {
        &self.bases
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

impl fmt::Debug for LiteralSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let preview: String = self.bases.chars().take(32).collect();
        f.debug_struct("LiteralSequence")
            .field("id", &self.id)
            .field("len", &self.bases.len())
            .field("bases", &preview)
            .field("source", &self.source)
            .finish()
    }
}
