use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use genovault::gbin::{decode_gbin, GbinTrack};
use genovault::sequence::{parse_fasta, AmbiguityPolicy};
use genovault::{Base, LiteralSequence};

use crate::exit::{Code, Failure, ResultExt};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).ctx(format!("reading {}", path.display()))
}

/// Loads one record of a FASTA file (plain or gzip).
pub fn load_sequence(path: &Path, strip: bool, record: usize) -> Result<LiteralSequence, Failure> {
    let mut raw = read_bytes(path)?;
    if raw.starts_with(&[0x1F, 0x8B]) {
        let mut out = Vec::new();
        MultiGzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .ctx(format!("decompressing {}", path.display()))?;
        raw = out;
    }
    let policy = if strip {
        AmbiguityPolicy::Strip
    } else {
        AmbiguityPolicy::Reject
    };
    let mut records = parse_fasta(&raw, policy).ctx(format!("parsing {}", path.display()))?;
    let count = records.len();
    if record >= count {
        return Err(Failure::usage(format!(
            "{}: record {record} requested, file has {count}",
            path.display()
        )));
    }
    let rec = records.swap_remove(record);
    if rec.stripped_count > 0 {
        eprintln!("stripped {} non-ACGT characters", rec.stripped_count);
    }
    Ok(rec.sequence.with_source(path.display().to_string()))
}

pub fn load_gbin(path: &Path) -> Result<GbinTrack, Failure> {
    decode_gbin(&read_bytes(path)?).ctx(format!("decoding {}", path.display()))
}

/// Writes through a temporary sibling so a failed command leaves nothing
/// behind at `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let staged = stage(path, bytes)?;
    commit(staged)
}

pub struct Staged {
    tmp: tempfile::NamedTempFile,
    dest: PathBuf,
}

pub fn stage(path: &Path, bytes: &[u8]) -> Result<Staged, Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ctx = || format!("writing {}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).ctx(ctx())?;
    tmp.write_all(bytes).ctx(ctx())?;
    tmp.as_file().sync_all().ctx(ctx())?;
    Ok(Staged {
        tmp,
        dest: path.to_path_buf(),
    })
}

pub fn commit(staged: Staged) -> Result<(), Failure> {
    let dest = staged.dest;
    staged
        .tmp
        .persist(&dest)
        .map(drop)
        .map_err(|e| e.error)
        .ctx(format!("writing {}", dest.display()))
}

pub fn share_path(dir: &Path, stem: &str, base: Base) -> PathBuf {
    dir.join(format!("{stem}.{base}.gbin"))
}

/// Share files in `dir`, grouped by stem, keyed by the suffix base.
pub fn discover_shares(dir: &Path) -> Result<BTreeMap<String, BTreeMap<Base, PathBuf>>, Failure> {
    let mut found: BTreeMap<String, BTreeMap<Base, PathBuf>> = BTreeMap::new();
    let entries = fs::read_dir(dir).ctx(format!("listing {}", dir.display()))?;
    for entry in entries {
        let entry = entry.ctx(format!("listing {}", dir.display()))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(rest) = name.strip_suffix(".gbin") else { continue };
        let Some((stem, tag)) = rest.rsplit_once('.') else { continue };
        let mut chars = tag.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else { continue };
        let Some(base) = Base::from_char(c).filter(|_| c.is_ascii_uppercase()) else {
            continue;
        };
        found
            .entry(stem.to_string())
            .or_default()
            .insert(base, entry.path());
    }
    Ok(found)
}

/// The four share paths of the single (or selected) stem in `dir`.
pub fn vault_tracks(dir: &Path, stem: Option<&str>) -> Result<(String, [PathBuf; 4]), Failure> {
    let mut found = discover_shares(dir)?;
    let stem = match stem {
        Some(s) => s.to_string(),
        None => match found.len() {
            0 => {
                return Err(Failure::new(
                    Code::Integrity,
                    anyhow::anyhow!("no *.{{A,T,G,C}}.gbin shares in {}", dir.display()),
                ))
            }
            1 => found.keys().next().cloned().expect("one stem"),
            _ => {
                let stems: Vec<_> = found.keys().cloned().collect();
                return Err(Failure::usage(format!(
                    "several share sets in {} ({}); pick one with --stem",
                    dir.display(),
                    stems.join(", ")
                )));
            }
        },
    };
    let mut tracks = found.remove(&stem).unwrap_or_default();
    let missing: Vec<String> = Base::ALL
        .iter()
        .filter(|b| !tracks.contains_key(b))
        .map(|b| b.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Failure::new(
            Code::Integrity,
            anyhow::anyhow!("share set {stem:?} is missing track(s) {}", missing.join(", ")),
        ));
    }
    let paths = Base::ALL.map(|b| tracks.remove(&b).expect("checked above"));
    Ok((stem, paths))
}
