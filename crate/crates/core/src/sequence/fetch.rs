use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use flate2::read::MultiGzDecoder;

pub const DEFAULT_FETCH_TIMEOUT: Duration = Duration::from_secs(30);

const GZIP_MAGIC: [u8; 2] = [0x1F, 0x8B];

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("unsupported URL scheme in {0:?}; expected http or https")]
    UnsupportedScheme(String),
    #[error("HTTP status {status} from {url}")]
    Status { url: String, status: u16 },
    #[error("transport failure fetching {url}: {message}")]
    Transport { url: String, message: String },
    #[error("gzip payload could not be decompressed: {0}")]
    Decompress(io::Error),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl FetchError {
    /// True for failures reaching or reading from the remote end.
    pub fn is_network(&self) -> bool {
        matches!(self, FetchError::Status { .. } | FetchError::Transport { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchOptions {
    pub timeout: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            timeout: DEFAULT_FETCH_TIMEOUT,
        }
    }
}

/// Downloads `url` to `destination`, transparently inflating gzip payloads
/// (detected by their magic bytes, not the file name).
///
/// The file is written to a temporary sibling and renamed into place, so a
/// failed download leaves no partial output.
pub fn fetch_reference(
    url: &str,
    destination: &Path,
    options: FetchOptions,
) -> Result<PathBuf, FetchError> {
    let lower = url.to_ascii_lowercase();
    if !(lower.starts_with("http://") || lower.starts_with("https://")) {
        return Err(FetchError::UnsupportedScheme(url.to_string()));
    }

    let agent = ureq::AgentBuilder::new().timeout(options.timeout).build();
    let response = match agent.get(url).call() {
        Ok(r) => r,
        Err(ureq::Error::Status(status, _)) => {
            return Err(FetchError::Status {
                url: url.to_string(),
                status,
            })
        }
        Err(e) => {
            return Err(FetchError::Transport {
                url: url.to_string(),
                message: e.to_string(),
            })
        }
    };

    let mut body = Vec::new();
    response
        .into_reader()
        .read_to_end(&mut body)
        .map_err(|e| FetchError::Transport {
            url: url.to_string(),
            message: e.to_string(),
        })?;

    let payload = if body.starts_with(&GZIP_MAGIC) {
        let mut out = Vec::new();
        MultiGzDecoder::new(body.as_slice())
            .read_to_end(&mut out)
            .map_err(FetchError::Decompress)?;
        out
    } else {
        body
    };

    let dir = match destination.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&payload)?;
    tmp.as_file().sync_all()?;
    tmp.persist(destination).map_err(|e| e.error)?;
    Ok(destination.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_http_schemes() {
        let dir = tempfile::tempdir().unwrap();
        let err = fetch_reference(
            "ftp://ftp.example.org/genome.fa.gz",
            &dir.path().join("g.fa"),
            FetchOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, FetchError::UnsupportedScheme(_)));
        assert!(!err.is_network());
    }
}
