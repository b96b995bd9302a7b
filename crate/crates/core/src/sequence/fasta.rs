use std::num::NonZeroUsize;

use super::LiteralSequence;

/// What to do with characters outside `{A,C,G,T}` (after uppercasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    /// Fail on the first offending character.
    #[default]
    Reject,
    /// Drop offending characters and count them.
    Strip,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FastaError {
    /// `position` indexes the record's sequence characters, starting at 0.
    #[error("record {record}: character {ch:?} at position {position} is not one of A, C, G, T")]
    NonAlphabetCharacter {
        record: usize,
        position: usize,
        ch: char,
    },
    #[error("no '>' record found")]
    EmptyInput,
    #[error("line {line}: sequence data before the first '>' header")]
    DataBeforeHeader { line: usize },
}

/// One parsed record and the number of characters removed under
/// [`AmbiguityPolicy::Strip`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub sequence: LiteralSequence,
    pub stripped_count: usize,
}

/// Parses every record of a FASTA text, in file order.
///
/// Sequence lines may be wrapped at any width, use LF or CRLF line endings
/// and mixed case; lowercase is folded to uppercase. Blank lines and ASCII
/// whitespace inside sequence lines are skipped.
pub fn parse_fasta(raw: &[u8], policy: AmbiguityPolicy) -> Result<Vec<FastaRecord>, FastaError> {
    let mut records = Vec::new();
    let mut current: Option<(String, String, usize)> = None;

    for (lineno, line) in raw.split(|&b| b == b'\n').enumerate() {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if let Some(header) = line.strip_prefix(b">") {
            if let Some((id, bases, stripped)) = current.take() {
                records.push(finish(id, bases, stripped));
            }
            let id = String::from_utf8_lossy(header).trim_end().to_string();
            current = Some((id, String::new(), 0));
            continue;
        }
        let Some((_, bases, stripped)) = current.as_mut() else {
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            return Err(FastaError::DataBeforeHeader { line: lineno + 1 });
        };
        for &b in line {
            if b.is_ascii_whitespace() {
                continue;
            }
            let up = b.to_ascii_uppercase();
            if matches!(up, b'A' | b'C' | b'G' | b'T') {
                bases.push(up as char);
            } else {
                match policy {
                    AmbiguityPolicy::Strip => *stripped += 1,
                    AmbiguityPolicy::Reject => {
                        return Err(FastaError::NonAlphabetCharacter {
                            record: records.len(),
                            position: bases.len() + *stripped,
                            ch: b as char,
                        })
                    }
                }
            }
        }
    }
    if let Some((id, bases, stripped)) = current.take() {
        records.push(finish(id, bases, stripped));
    }
    if records.is_empty() {
        return Err(FastaError::EmptyInput);
    }
    Ok(records)
}

fn finish(id: String, bases: String, stripped_count: usize) -> FastaRecord {
    FastaRecord {
        sequence: LiteralSequence::from_canonical(id, bases),
        stripped_count,
    }
}

/// Emits one record: `>` + id, then the bases wrapped at `width` columns.
/// Every line, including the last, ends with `\n`.
pub fn write_fasta(seq: &LiteralSequence, width: NonZeroUsize) -> Vec<u8> {
    let width = width.get();
    let bases = seq.bases().as_bytes();
    let lines = bases.len().div_ceil(width);
    let mut out = Vec::with_capacity(seq.id().len() + 2 + bases.len() + lines);
    out.push(b'>');
    out.extend_from_slice(seq.id().as_bytes());
    out.push(b'\n');
    for chunk in bases.chunks(width) {
        out.extend_from_slice(chunk);
        out.push(b'\n');
    }
    out
}
