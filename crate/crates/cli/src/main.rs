//! `genovault`: split, verify, encrypt and screen genomic sequences.

mod commands;
mod exit;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exit::Code;

#[derive(Parser, Debug)]
#[command(name = "genovault", version, about = "Genomic sequence splitting, integrity and encryption toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FastaArgs {
    /// Drop non-ACGT characters (e.g. N runs) instead of failing
    #[arg(long)]
    strip: bool,
    /// Zero-based record to use from a multi-record file
    #[arg(long, default_value_t = 0)]
    record: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a sequence into four per-base share files
    Split {
        fasta: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write each track as a line of '0'/'1' characters
        #[arg(long)]
        ascii: bool,
        #[command(flatten)]
        fasta_args: FastaArgs,
    },
    /// Rebuild a sequence from a verified share set
    Merge {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Share stem when the directory holds several sets
        #[arg(long)]
        stem: Option<String>,
        /// FASTA line width
        #[arg(long, default_value_t = 60)]
        width: usize,
    },
    /// Check a share set against the one-hot column rule
    Verify {
        dir: PathBuf,
        #[arg(long)]
        stem: Option<String>,
    },
    /// Candidate sequences left after exposing <known> of four tracks
    Combos { n: u64, known: u32 },
    /// One-time pad encryption with a single-use ledger
    Otp {
        #[arg(value_enum)]
        mode: OtpMode,
        input: PathBuf,
        pad: PathBuf,
        #[arg(long)]
        offset: u64,
        /// Ledger sidecar; required for enc, checked against the pad for dec
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Textbook RSA keyed from two share tracks
    Rsa {
        #[command(subcommand)]
        action: RsaAction,
    },
    /// Amplitude spectrum of one base track as CSV
    Spectrum {
        fasta: PathBuf,
        #[arg(long, value_parser = parse_base)]
        base: genovault::Base,
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        fasta_args: FastaArgs,
    },
    /// Judge a sequence as one-time-pad material (exit 0 suitable, 2 not)
    Screen {
        fasta: PathBuf,
        #[arg(long, default_value_t = genovault::spectral::DEFAULT_THRESHOLD_RATIO)]
        threshold: f64,
        #[arg(long = "low-cutoff", default_value_t = genovault::spectral::DEFAULT_LOW_FREQ_CUTOFF)]
        low_cutoff: f64,
        #[command(flatten)]
        fasta_args: FastaArgs,
    },
    /// Download a reference over HTTP(S), inflating gzip payloads
    Fetch {
        url: String,
        #[arg(long)]
        out: PathBuf,
        /// Timeout in seconds (default 30, or GENOVAULT_FETCH_TIMEOUT)
        #[arg(long)]
        timeout: Option<u64>,
    },
    /// Simulate Bell-state transfer of a sequence, optionally intercepted
    Qtransfer {
        fasta: PathBuf,
        /// Interception probability in [0, 1]
        #[arg(long)]
        eve: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        fasta_args: FastaArgs,
    },
    /// Print the Bell state carrying a base
    Qencode {
        #[arg(value_parser = parse_base)]
        base: genovault::Base,
    },
    /// Decode a two-qubit state, e.g. "(0.7071+0i, 0+0i, 0+0i, 0.7071+0i)"
    Qdecode { state: String },
}

#[derive(Subcommand, Debug)]
enum RsaAction {
    /// Derive a key pair from two GBIN tracks
    Keygen {
        track_a: PathBuf,
        track_b: PathBuf,
        #[arg(long, default_value_t = genovault::crypto::rsa::DEFAULT_WINDOW_BITS)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a GBIN track into a ciphertext frame
    Enc {
        track: PathBuf,
        keyfile: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext frame back into a GBIN track
    Dec {
        frame: PathBuf,
        keyfile: PathBuf,
        /// Base tag of the restored GBIN file
        #[arg(long, value_parser = parse_base)]
        base: genovault::Base,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OtpMode {
    Enc,
    Dec,
}

fn parse_base(s: &str) -> Result<genovault::Base, String> {
    let mut chars = s.chars();
    match (chars.next().and_then(genovault::Base::from_char), chars.next()) {
        (Some(b), None) => Ok(b),
        _ => Err(format!("{s:?} is not one of A, T, G, C")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::DisplayVersion => {
                    eprint!("{}", e.render());
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{}", e.render());
                    ExitCode::from(Code::Usage as u8)
                }
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code as u8)
        }
    }
}
