use std::fs;
use std::fs::File;
use std::io::Write as _;
use std::num::NonZeroUsize;
use std::path::Path;
use std::time::Duration;

use anyhow::anyhow;
use genovault::crypto::{self, otp, rsa, CryptoError, LockedLedger, PadLedger, RsaKeyPair};
use genovault::gbin::encode_gbin;
use genovault::quantum::{self, bell_decode, bell_encode, decoded_base, Eavesdropper, TwoQubitState};
use genovault::sequence::{fetch_reference, write_fasta, FetchOptions, DEFAULT_FETCH_TIMEOUT};
use genovault::shares::{self, residual_combinations, UnverifiedShares};
use genovault::spectral::{self, ScaleMode, SpectralParams, TrackVerdict};
use genovault::{format_significant, Base};

use crate::exit::{Code, Failure, ResultExt};
use crate::files::{self, load_gbin, load_sequence, read_bytes, share_path, vault_tracks, write_atomic};
use crate::{Command, OtpMode, RsaAction};

const FETCH_TIMEOUT_ENV: &str = "GENOVAULT_FETCH_TIMEOUT";

pub fn run(command: Command) -> Result<Code, Failure> {
    match command {
        Command::Split {
            fasta,
            out,
            ascii,
            fasta_args,
        } => split(&fasta, &out, ascii, fasta_args.strip, fasta_args.record),
        Command::Merge {
            dir,
            out,
            stem,
            width,
        } => merge(&dir, &out, stem.as_deref(), width),
        Command::Verify { dir, stem } => verify(&dir, stem.as_deref()),
        Command::Combos { n, known } => {
            println!("{}", residual_combinations(n, known)?);
            Ok(Code::Success)
        }
        Command::Otp {
            mode,
            input,
            pad,
            offset,
            ledger,
            out,
        } => otp_cmd(mode, &input, &pad, offset, ledger.as_deref(), &out),
        Command::Rsa { action } => rsa_cmd(action),
        Command::Spectrum {
            fasta,
            base,
            log,
            out,
            fasta_args,
        } => {
            let seq = load_sequence(&fasta, fasta_args.strip, fasta_args.record)?;
            let shares = shares::split(&seq);
            let track = shares.track(base);
            let mags = spectral::power_spectrum(track)?;
            let mode = if log { ScaleMode::Log } else { ScaleMode::Linear };
            write_atomic(&out, spectral::spectrum_csv(&mags, track.len(), mode).as_bytes())?;
            Ok(Code::Success)
        }
        Command::Screen {
            fasta,
            threshold,
            low_cutoff,
            fasta_args,
        } => screen(&fasta, threshold, low_cutoff, fasta_args.strip, fasta_args.record),
        Command::Fetch { url, out, timeout } => fetch(&url, &out, timeout),
        Command::Qtransfer {
            fasta,
            eve,
            seed,
            fasta_args,
        } => {
            let seq = load_sequence(&fasta, fasta_args.strip, fasta_args.record)?;
            let eve = match eve {
                Some(p) => Eavesdropper::intercept(p)?,
                None => Eavesdropper::None,
            };
            print!("{}", quantum::simulate_transfer(&seq, eve, seed));
            Ok(Code::Success)
        }
        Command::Qencode { base } => {
            println!("{}", bell_encode(base));
            Ok(Code::Success)
        }
        Command::Qdecode { state } => {
            let state: TwoQubitState = state.parse()?;
            let decoded = bell_decode(&state);
            println!("state: {decoded}");
            match decoded_base(&decoded) {
                Some(b) => println!("base: {b}"),
                None => println!("base: indeterminate"),
            }
            Ok(Code::Success)
        }
    }
}

fn file_stem(path: &Path) -> Result<String, Failure> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.split('.').next().unwrap_or(s).to_string())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Failure::usage(format!("cannot derive a share stem from {}", path.display())))
}

fn split(fasta: &Path, out: &Path, ascii: bool, strip: bool, record: usize) -> Result<Code, Failure> {
    let seq = load_sequence(fasta, strip, record)?;
    let stem = file_stem(fasta)?;
    fs::create_dir_all(out).ctx(format!("creating {}", out.display()))?;
    let shares = shares::split(&seq);

    let mut staged = Vec::new();
    for (base, track) in shares.tracks() {
        staged.push(files::stage(&share_path(out, &stem, base), &encode_gbin(track, base))?);
        if ascii {
            let text = format!("{}\n", track.to_ascii());
            let path = out.join(format!("{stem}.{base}.txt"));
            staged.push(files::stage(&path, text.as_bytes())?);
        }
    }
    for s in staged {
        files::commit(s)?;
    }
    eprintln!("wrote 4 shares of {} bases to {}", shares.len(), out.display());
    Ok(Code::Success)
}

fn load_vault(dir: &Path, stem: Option<&str>) -> Result<(String, UnverifiedShares), Failure> {
    let (stem, paths) = vault_tracks(dir, stem)?;
    let mut tracks = Vec::with_capacity(4);
    for (base, path) in Base::ALL.iter().zip(&paths) {
        let decoded = load_gbin(path)?;
        if decoded.base != *base {
            return Err(Failure::new(
                Code::Integrity,
                anyhow!("{} is tagged {} but named as the {base} track", path.display(), decoded.base),
            ));
        }
        tracks.push(decoded.track);
    }
    let tracks: [_; 4] = tracks.try_into().expect("four tracks");
    Ok((stem, UnverifiedShares::new(tracks)))
}

fn merge(dir: &Path, out: &Path, stem: Option<&str>, width: usize) -> Result<Code, Failure> {
    let width = NonZeroUsize::new(width).ok_or_else(|| Failure::usage("--width must be at least 1"))?;
    let (stem, raw) = load_vault(dir, stem)?;
    let seq = shares::merge_unverified(raw)?
        .with_id(stem)
        .map_err(|e| Failure::new(Code::Internal, e))?;
    write_atomic(out, &write_fasta(&seq, width))?;
    Ok(Code::Success)
}

fn verify(dir: &Path, stem: Option<&str>) -> Result<Code, Failure> {
    let (stem, paths) = vault_tracks(dir, stem)?;
    let mut tracks = Vec::with_capacity(4);
    let mut unreadable = false;
    for (base, path) in Base::ALL.iter().zip(&paths) {
        match load_gbin(path) {
            Ok(t) if t.base == *base => tracks.push(t.track),
            Ok(t) => {
                println!("track {base}: tagged {} instead", t.base);
                unreadable = true;
            }
            Err(f) => {
                println!("track {base}: {:#}", f.error);
                unreadable = true;
            }
        }
    }
    println!("stem: {stem}");
    if unreadable {
        println!("ok: false");
        return Ok(Code::Integrity);
    }
    let raw = UnverifiedShares::new(tracks.try_into().expect("four tracks"));
    let report = shares::verify_integrity(&raw);
    print!("{report}");
    Ok(if report.ok { Code::Success } else { Code::Integrity })
}

fn otp_cmd(
    mode: OtpMode,
    input: &Path,
    pad_path: &Path,
    offset: u64,
    ledger_path: Option<&Path>,
    out: &Path,
) -> Result<Code, Failure> {
    let data = read_bytes(input)?;
    let pad_ctx = || format!("reading pad {}", pad_path.display());
    let digest = otp::pad_digest(File::open(pad_path).ctx(pad_ctx())?).ctx(pad_ctx())?;
    let mut pad = File::open(pad_path).ctx(pad_ctx())?;

    match mode {
        OtpMode::Enc => {
            let ledger_path = ledger_path.ok_or_else(|| Failure::usage("otp enc requires --ledger"))?;
            let mut ledger = LockedLedger::open(ledger_path, &digest)
                .ctx(format!("opening ledger {}", ledger_path.display()))?;
            let cipher = crypto::otp_xor(&data, &mut pad, offset, ledger.ledger_mut())?;
            let staged = files::stage(out, &cipher)?;
            // Consumption is recorded before the output appears, so a crash
            // can waste pad bytes but never reuse them.
            ledger
                .commit()
                .ctx(format!("updating ledger {}", ledger_path.display()))?;
            files::commit(staged)?;
        }
        OtpMode::Dec => {
            if let Some(path) = ledger_path.filter(|p| p.exists()) {
                let ledger = PadLedger::from_text(&fs::read_to_string(path).ctx(format!("reading {}", path.display()))?)?;
                if ledger.pad_id() != digest {
                    return Err(CryptoError::LedgerMismatch {
                        ledger: ledger.pad_id().to_string(),
                        pad: digest,
                    }
                    .into());
                }
            }
            let plain = otp::xor_with_pad(&data, &mut pad, offset)?;
            write_atomic(out, &plain)?;
        }
    }
    Ok(Code::Success)
}

fn load_key(path: &Path) -> Result<RsaKeyPair, Failure> {
    let text = fs::read_to_string(path).ctx(format!("reading key {}", path.display()))?;
    RsaKeyPair::from_text(&text).ctx(format!("loading key {}", path.display()))
}

fn rsa_cmd(action: RsaAction) -> Result<Code, Failure> {
    match action {
        RsaAction::Keygen {
            track_a,
            track_b,
            window,
            offset,
            out,
        } => {
            let a = load_gbin(&track_a)?;
            let b = load_gbin(&track_b)?;
            let key = rsa::rsa_keygen(&a.track, &b.track, window, offset)?;
            write_atomic(&out, key.to_text().as_bytes())?;
            eprintln!("wrote {}-bit key to {}", key.n().bits(), out.display());
        }
        RsaAction::Enc { track, keyfile, out } => {
            let key = load_key(&keyfile)?;
            let t = load_gbin(&track)?;
            write_atomic(&out, &rsa::rsa_encrypt_track(&t.track, &key.public())?)?;
        }
        RsaAction::Dec {
            frame,
            keyfile,
            base,
            out,
        } => {
            let key = load_key(&keyfile)?;
            let track = rsa::rsa_decrypt_track(&read_bytes(&frame)?, &key)?;
            write_atomic(&out, &encode_gbin(&track, base))?;
        }
    }
    Ok(Code::Success)
}

fn screen(fasta: &Path, threshold: f64, low_cutoff: f64, strip: bool, record: usize) -> Result<Code, Failure> {
    let params = SpectralParams {
        threshold_ratio: threshold,
        low_freq_cutoff: low_cutoff,
    };
    let seq = load_sequence(fasta, strip, record)?;
    let result = spectral::screen_pad(&seq, params)?;
    let mut stdout = std::io::stdout().lock();
    for (base, verdict) in &result.tracks {
        let line = match verdict {
            TrackVerdict::Degenerate => format!("{base}: degenerate (constant track)"),
            TrackVerdict::Analyzed(r) => {
                let strongest = r
                    .peaks
                    .iter()
                    .max_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
                    .map(|p| format!(" strongest_peak={}", format_significant(p.frequency, 9)))
                    .unwrap_or_default();
                format!(
                    "{base}: suitable={} codon_peak={} low_freq={} peaks={} median={}{strongest}",
                    r.suitable_for_pad,
                    r.codon_peak,
                    r.low_freq_flag,
                    r.peaks.len(),
                    format_significant(r.median, 9),
                )
            }
        };
        writeln!(stdout, "{line}").ctx("writing report")?;
    }
    let verdict = if result.suitable { "suitable" } else { "unsuitable" };
    writeln!(stdout, "verdict: {verdict}").ctx("writing report")?;
    Ok(if result.suitable { Code::Success } else { Code::Integrity })
}

fn fetch(url: &str, out: &Path, timeout: Option<u64>) -> Result<Code, Failure> {
    let timeout = match timeout {
        Some(secs) => Duration::from_secs(secs),
        None => match std::env::var(FETCH_TIMEOUT_ENV) {
            Ok(v) => Duration::from_secs(
                v.trim()
                    .parse()
                    .map_err(|_| Failure::usage(format!("{FETCH_TIMEOUT_ENV}={v:?} is not a number of seconds")))?,
            ),
            Err(_) => DEFAULT_FETCH_TIMEOUT,
        },
    };
    let path = fetch_reference(url, out, FetchOptions { timeout }).map_err(|e| {
        let code = match e {
            genovault::sequence::FetchError::UnsupportedScheme(_) => Code::Usage,
            _ => Code::Io,
        };
        Failure::new(code, e)
    })?;
    eprintln!("wrote {}", path.display());
    Ok(Code::Success)
}
