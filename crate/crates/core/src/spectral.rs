//! Amplitude spectra of indicator tracks and pad screening.
//!
//! Protein-coding DNA repeats in codons, which puts a line at normalized
//! frequency 1/3 in the spectrum of each base track. Such material, or
//! material with strong low-frequency structure, is a poor one-time pad.
//!
//! Samples are the raw 0/1 bits (no mean removal). Magnitudes are
//! `|X_k|` for `k = 0..=n/2`, so the DC term equals the track's popcount.
//! Lengths are transformed exactly, without zero padding, so `n/3` stays on
//! the frequency grid whenever `3 | n`.

use std::fmt::Write as _;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bits::BitTrack;
use crate::numfmt::format_significant;
use crate::sequence::LiteralSequence;
use crate::shares::{split, Base};

pub const DEFAULT_THRESHOLD_RATIO: f64 = 8.0;
pub const DEFAULT_LOW_FREQ_CUTOFF: f64 = 0.01;
pub const MIN_SCREEN_LENGTH: usize = 64;

/// Magnitudes at or below this fraction of `max(DC, 1)` are treated as
/// transform round-off when estimating the median and picking peaks.
const NOISE_FLOOR_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("track of length {0} is too short for a spectrum (need at least 2)")]
    TrackTooShort(usize),
    #[error("sequence of length {0} is too short to screen (need at least {MIN_SCREEN_LENGTH})")]
    SequenceTooShort(usize),
    #[error("degenerate spectrum: every non-DC magnitude is zero")]
    DegenerateSpectrum,
    #[error("{len} magnitudes cannot come from a track of length {n}")]
    LengthMismatch { len: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    /// A bin is a peak when its magnitude exceeds this multiple of the
    /// median non-DC magnitude. Must exceed 1.
    pub threshold_ratio: f64,
    /// Peaks below this normalized frequency (DC excluded) raise the
    /// low-frequency flag. Must lie in (0, 0.5).
    pub low_freq_cutoff: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        SpectralParams {
            threshold_ratio: DEFAULT_THRESHOLD_RATIO,
            low_freq_cutoff: DEFAULT_LOW_FREQ_CUTOFF,
        }
    }
}

impl SpectralParams {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if !(self.threshold_ratio > 1.0 && self.threshold_ratio.is_finite()) {
            return Err(SpectralError::InvalidParameter(format!(
                "threshold ratio {} must be finite and > 1",
                self.threshold_ratio
            )));
        }
        if !(self.low_freq_cutoff > 0.0 && self.low_freq_cutoff < 0.5) {
            return Err(SpectralError::InvalidParameter(format!(
                "low-frequency cutoff {} must lie in (0, 0.5)",
                self.low_freq_cutoff
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    /// `index / n`
    pub frequency: f64,
    pub magnitude: f64,
    pub ratio_to_median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub n: usize,
    pub magnitudes: Vec<f64>,
    /// Median of the non-DC magnitudes, clamped up to the noise floor.
    pub median: f64,
    pub peaks: Vec<Peak>,
    pub codon_peak: bool,
    pub low_freq_flag: bool,
    pub suitable_for_pad: bool,
}

/// One-sided amplitude spectrum `|sum_j x_j exp(-2 pi i j k / n)|`,
/// `k = 0..=n/2`, via an O(n log n) transform valid for any `n`.
pub fn power_spectrum(track: &BitTrack) -> Result<Vec<f64>, SpectralError> {
    let n = track.len();
    if n < 2 {
        return Err(SpectralError::TrackTooShort(n));
    }
    let mut buf: Vec<Complex64> = track
        .iter()
        .map(|b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    Ok(buf[..=n / 2].iter().map(|c| c.norm()).collect())
}

/// Median-relative peak picking over a spectrum of an `n`-sample track.
pub fn detect_peaks(
    magnitudes: &[f64],
    n: usize,
    params: SpectralParams,
) -> Result<SpectralReport, SpectralError> {
    params.validate()?;
    if n < 2 || magnitudes.len() != n / 2 + 1 {
        return Err(SpectralError::LengthMismatch {
            len: magnitudes.len(),
            n,
        });
    }
    let floor = NOISE_FLOOR_FRACTION * magnitudes[0].max(1.0);
    let body = &magnitudes[1..];
    if body.iter().all(|&m| m <= floor) {
        return Err(SpectralError::DegenerateSpectrum);
    }
    let median = median(body).max(floor);
    let cutoff = params.threshold_ratio * median;

    let peaks: Vec<Peak> = body
        .iter()
        .enumerate()
        .map(|(i, &m)| (i + 1, m))
        .filter(|&(_, m)| m > cutoff)
        .map(|(index, magnitude)| Peak {
            index,
            frequency: index as f64 / n as f64,
            magnitude,
            ratio_to_median: magnitude / median,
        })
        .collect();

    // |k/n - 1/3| <= 1/n, in integers.
    let codon_peak = peaks.iter().any(|p| (3 * p.index).abs_diff(n) <= 3);
    let low_freq_flag = peaks.iter().any(|p| p.frequency < params.low_freq_cutoff);
    Ok(SpectralReport {
        n,
        magnitudes: magnitudes.to_vec(),
        median,
        peaks,
        codon_peak,
        low_freq_flag,
        suitable_for_pad: !codon_peak && !low_freq_flag,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

/// Spectrum and peaks for one track.
pub fn analyze_track(track: &BitTrack, params: SpectralParams) -> Result<SpectralReport, SpectralError> {
    let mags = power_spectrum(track)?;
    detect_peaks(&mags, track.len(), params)
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrackVerdict {
    Analyzed(SpectralReport),
    /// Constant track (for instance a base absent from the sequence).
    Degenerate,
}

impl TrackVerdict {
    pub fn suitable(&self) -> bool {
        matches!(self, TrackVerdict::Analyzed(r) if r.suitable_for_pad)
    }

    pub fn report(&self) -> Option<&SpectralReport> {
        match self {
            TrackVerdict::Analyzed(r) => Some(r),
            TrackVerdict::Degenerate => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadScreen {
    /// In A, T, G, C order.
    pub tracks: [(Base, TrackVerdict); 4],
    /// True iff every track was analyzed and found suitable.
    pub suitable: bool,
}

/// Splits `seq` and screens all four tracks, in parallel.
pub fn screen_pad(seq: &LiteralSequence, params: SpectralParams) -> Result<PadScreen, SpectralError> {
    params.validate()?;
    if seq.len() < MIN_SCREEN_LENGTH {
        return Err(SpectralError::SequenceTooShort(seq.len()));
    }
    let shares = split(seq);
    let verdicts: Vec<Result<TrackVerdict, SpectralError>> = std::thread::scope(|s| {
        let handles: Vec<_> = shares
            .tracks()
            .map(|(_, track)| {
                s.spawn(move || match analyze_track(track, params) {
                    Ok(r) => Ok(TrackVerdict::Analyzed(r)),
                    Err(SpectralError::DegenerateSpectrum) => Ok(TrackVerdict::Degenerate),
                    Err(e) => Err(e),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("spectral worker panicked"))
            .collect()
    });
    let mut it = verdicts.into_iter();
    let tracks: [(Base, TrackVerdict); 4] = [Base::A, Base::T, Base::G, Base::C]
        .map(|b| it.next().map(|v| v.map(|v| (b, v))).expect("four tracks"))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .try_into()
        .expect("four tracks");
    let suitable = tracks.iter().all(|(_, v)| v.suitable());
    Ok(PadScreen { tracks, suitable })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    #[default]
    Linear,
    /// `log10(magnitude + 1e-12)`
    Log,
}

/// CSV with a `frequency,magnitude` header and one row per bin, values at
/// 9 significant digits.
pub fn export_spectrum(report: &SpectralReport, mode: ScaleMode) -> String {
    spectrum_csv(&report.magnitudes, report.n, mode)
}

/// [`export_spectrum`] for a bare magnitude vector of an `n`-sample track.
pub fn spectrum_csv(magnitudes: &[f64], n: usize, mode: ScaleMode) -> String {
    let mut out = String::from("frequency,magnitude\n");
    for (k, &m) in magnitudes.iter().enumerate() {
        let value = match mode {
            ScaleMode::Linear => m,
            ScaleMode::Log => (m + 1e-12).log10(),
        };
        let _ = writeln!(
            out,
            "{},{}",
            format_significant(k as f64 / n as f64, 9),
            format_significant(value, 9)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn period3(reps: usize) -> BitTrack {
        BitTrack::from_ascii(&"100".repeat(reps)).unwrap()
    }

    /// Direct O(n^2) evaluation of the definition.
    fn direct_dft(track: &BitTrack) -> Vec<f64> {
        let n = track.len();
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for j in 0..n {
                    if track.get(j) {
                        let angle = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                        re += angle.cos();
                        im += angle.sin();
                    }
                }
                re.hypot(im)
            })
            .collect()
    }

    #[test]
    fn period_three_line() {
        let mags = power_spectrum(&period3(64)).unwrap();
        assert_eq!(mags.len(), 97);
        assert!((mags[64] - 64.0).abs() < 1e-9);
        assert!((mags[0] - 64.0).abs() < 1e-9);
        let r = detect_peaks(&mags, 192, SpectralParams::default()).unwrap();
        assert!(r.codon_peak);
        assert!(!r.suitable_for_pad);
        assert_eq!(r.peaks.len(), 1);
        assert_eq!(r.peaks[0].index, 64);
    }

    #[test]
    fn zero_track() {
        let mags = power_spectrum(&BitTrack::zeros(50)).unwrap();
        assert!(mags.iter().all(|&m| m == 0.0));
        assert_eq!(
            detect_peaks(&mags, 50, SpectralParams::default()),
            Err(SpectralError::DegenerateSpectrum)
        );
        assert_eq!(power_spectrum(&BitTrack::zeros(1)), Err(SpectralError::TrackTooShort(1)));
    }

    #[test]
    fn all_ones_track_is_degenerate_despite_roundoff() {
        let t = BitTrack::from_bits(std::iter::repeat_n(true, 999));
        assert_eq!(analyze_track(&t, SpectralParams::default()), Err(SpectralError::DegenerateSpectrum));
    }

    #[test]
    fn low_frequency_structure_is_flagged() {
        // Long blocks of ones: period 1000 over 20000 samples, line at 0.001.
        let t = BitTrack::from_bits((0..20_000).map(|j| (j / 500) % 2 == 0));
        let r = analyze_track(&t, SpectralParams::default()).unwrap();
        assert!(r.low_freq_flag);
        assert!(!r.codon_peak);
        assert!(!r.suitable_for_pad);
    }

    #[test]
    fn random_track_has_no_codon_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let t = BitTrack::from_bits((0..100_000).map(|_| rng.gen_bool(0.5)));
        let r = analyze_track(&t, SpectralParams::default()).unwrap();
        assert!(!r.codon_peak);
        assert!(r.suitable_for_pad);
    }

    #[test]
    fn fast_matches_direct_on_odd_and_prime_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 5, 7, 97, 243, 257, 360, 1021] {
            let t = BitTrack::from_bits((0..n).map(|_| rng.gen_bool(0.3)));
            let fast = power_spectrum(&t).unwrap();
            let slow = direct_dft(&t);
            for (f, s) in fast.iter().zip(&slow) {
                assert!((f - s).abs() <= 1e-9 * s.max(1.0), "n={n}: {f} vs {s}");
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let mags = power_spectrum(&period3(10)).unwrap();
        for bad in [
            SpectralParams { threshold_ratio: 1.0, ..Default::default() },
            SpectralParams { low_freq_cutoff: 0.5, ..Default::default() },
            SpectralParams { low_freq_cutoff: 0.0, ..Default::default() },
        ] {
            assert!(matches!(detect_peaks(&mags, 30, bad), Err(SpectralError::InvalidParameter(_))));
        }
        assert!(matches!(
            detect_peaks(&mags, 40, SpectralParams::default()),
            Err(SpectralError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn csv_rows_and_log_floor() {
        let r = SpectralReport {
            n: 6,
            magnitudes: vec![3.0, 0.0, 1.5, 0.25],
            median: 0.25,
            peaks: vec![],
            codon_peak: false,
            low_freq_flag: false,
            suitable_for_pad: true,
        };
        let lin = export_spectrum(&r, ScaleMode::Linear);
        assert_eq!(lin, "frequency,magnitude\n0,3\n0.166666667,0\n0.333333333,1.5\n0.5,0.25\n");
        let log = export_spectrum(&r, ScaleMode::Log);
        let second: Vec<&str> = log.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(second[1].parse::<f64>().unwrap(), -12.0);
    }

    #[test]
    fn screen_rejects_short_sequences() {
        let s = LiteralSequence::new("s", "ACGTACGTAC").unwrap();
        assert_eq!(
            screen_pad(&s, SpectralParams::default()),
            Err(SpectralError::SequenceTooShort(10))
        );
    }
}
