//! Frequency-dependent P/N phase skew extraction.
//!
//! Phase delays are taken per frequency sample from the unwrapped phase of
//! the mixed-mode traces. The sign convention makes causal delays positive:
//! a trace e^{-i 2 pi f tau} has phase delay +tau, i.e. these functions
//! return the negation of the raw quantity phase(S)/(2 pi f).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;
use crate::mixed_mode::MixedModeSet;

const TAU_F: f64 = std::f64::consts::TAU;

/// Which differential port the skew is observed at.
///
/// `AtPort2` is extracted from the left-to-right traces (receive at the
/// right pair), `AtPort1` from the right-to-left traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkewDirection {
    AtPort1,
    AtPort2,
}

/// P/N phase skew in seconds per frequency sample, DC excluded.
#[derive(Clone, Debug)]
pub struct SkewProfile {
    grid: FrequencyGrid,
    t_skew: Vec<f64>,
    direction: SkewDirection,
    warnings: Vec<String>,
}

impl SkewProfile {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn t_skew(&self) -> &[f64] {
        &self.t_skew
    }

    pub fn direction(&self) -> SkewDirection {
        self.direction
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Continuous phase of a complex trace.
///
/// The result equals the principal phase modulo 2 pi at every sample and
/// consecutive differences lie in (-pi, pi]. A raw step of exactly +-pi is
/// kept as +pi (the trace is undersampled at that point; such steps are
/// surfaced as warnings by [`pn_skew`]).
pub fn unwrap_phase(samples: &[Complex64]) -> Result<Vec<f64>> {
    unwrap_phase_with_stats(samples).map(|(ph, _)| ph)
}

/// Threshold below which a sample counts as a magnitude null for phase
/// purposes.
pub const NULL_MAGNITUDE: f64 = 1e-12;

fn unwrap_phase_with_stats(samples: &[Complex64]) -> Result<(Vec<f64>, usize)> {
    if samples.len() < 2 {
        return Err(Error::invalid("phase trace", "need at least 2 samples"));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut suspicious = 0usize;
    let mut wraps: f64 = 0.0;
    let mut prev = 0.0f64;
    for (i, z) in samples.iter().enumerate() {
        if z.norm_sqr() == 0.0 {
            return Err(Error::ZeroMagnitudeSample { index: i });
        }
        let principal = z.arg();
        if i == 0 {
            prev = principal;
            out.push(principal);
            continue;
        }
        let diff = principal + TAU_F * wraps - prev;
        // Shift by whole turns so the step lands in (-pi, pi].
        let correction = ((diff - std::f64::consts::PI) / TAU_F).ceil();
        wraps -= correction;
        let unwrapped = principal + TAU_F * wraps;
        if (unwrapped - prev).abs() > 0.9 * std::f64::consts::PI {
            suspicious += 1;
        }
        prev = unwrapped;
        out.push(unwrapped);
    }
    Ok((out, suspicious))
}

/// Per-sample phase delay in seconds: -unwrap_phase(x)/(2 pi f).
///
/// Requires f > 0 at every sample; returns +tau for e^{-i 2 pi f tau}.
pub fn phase_delay(samples: &[Complex64], freqs: &[f64]) -> Result<Vec<f64>> {
    if samples.len() != freqs.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples for {} frequencies",
            samples.len(),
            freqs.len()
        )));
    }
    if let Some(&f) = freqs.iter().find(|&&f| f <= 0.0) {
        return Err(Error::invalid(
            "phase delay grid",
            format!("frequency {f} Hz is not positive"),
        ));
    }
    let phase = unwrap_phase(samples)?;
    Ok(phase
        .iter()
        .zip(freqs)
        .map(|(&p, &f)| -p / (TAU_F * f))
        .collect())
}

/// Extract the P/N phase skew at the requested differential port.
///
/// DC is excluded. Samples whose magnitude is below [`NULL_MAGNITUDE`] have
/// their phase linearly interpolated from the neighboring good samples and
/// a warning is attached. Undersampled phase (steps near pi) is also warned
/// about rather than rejected.
pub fn pn_skew(mm: &MixedModeSet, direction: SkewDirection) -> Result<SkewProfile> {
    let start = mm.grid().nonzero_start();
    let freqs = mm.grid().nonzero();
    if freqs.len() < 2 {
        return Err(Error::invalid(
            "skew grid",
            "need at least 2 positive-frequency samples",
        ));
    }
    let (first, second, names) = match direction {
        SkewDirection::AtPort2 => (&mm.ssd21[start..], &mm.ssd41[start..], ("ssd21", "ssd41")),
        SkewDirection::AtPort1 => (&mm.ssd12[start..], &mm.ssd14[start..], ("ssd12", "ssd14")),
    };
    let mut warnings = Vec::new();
    let delay_a = robust_phase_delay(first, freqs, names.0, &mut warnings)?;
    let delay_b = robust_phase_delay(second, freqs, names.1, &mut warnings)?;
    let t_skew: Vec<f64> = delay_a
        .iter()
        .zip(&delay_b)
        .map(|(&a, &b)| a - b)
        .collect();
    Ok(SkewProfile {
        grid: FrequencyGrid::new(freqs.to_vec())?,
        t_skew,
        direction,
        warnings,
    })
}

/// Phase delay with interpolation across magnitude nulls.
fn robust_phase_delay(
    samples: &[Complex64],
    freqs: &[f64],
    name: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<f64>> {
    let good: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].norm() >= NULL_MAGNITUDE)
        .collect();
    if good.len() == samples.len() {
        let (phase, suspicious) = unwrap_phase_with_stats(samples)?;
        if suspicious > 0 {
            warnings.push(format!(
                "{name}: {suspicious} phase steps near pi; grid may undersample the phase"
            ));
        }
        return Ok(phase
            .iter()
            .zip(freqs)
            .map(|(&p, &f)| -p / (TAU_F * f))
            .collect());
    }
    if good.len() < 2 {
        return Err(Error::ZeroMagnitudeSample {
            index: good.first().copied().unwrap_or(0),
        });
    }
    warnings.push(format!(
        "{name}: phase interpolated across {} samples near magnitude nulls",
        samples.len() - good.len()
    ));
    let good_samples: Vec<Complex64> = good.iter().map(|&i| samples[i]).collect();
    let (good_phase, suspicious) = unwrap_phase_with_stats(&good_samples)?;
    if suspicious > 0 {
        warnings.push(format!(
            "{name}: {suspicious} phase steps near pi; grid may undersample the phase"
        ));
    }
    let mut phase = vec![0.0f64; samples.len()];
    for (slot, &i) in good.iter().enumerate() {
        phase[i] = good_phase[slot];
    }
    // Fill the null samples from the surrounding good ones.
    for i in 0..samples.len() {
        if samples[i].norm() >= NULL_MAGNITUDE {
            continue;
        }
        let before = good.iter().rev().find(|&&g| g < i).copied();
        let after = good.iter().find(|&&g| g > i).copied();
        phase[i] = match (before, after) {
            (Some(a), Some(b)) => {
                let t = (freqs[i] - freqs[a]) / (freqs[b] - freqs[a]);
                phase[a] + t * (phase[b] - phase[a])
            }
            (Some(a), None) => phase[a],
            (None, Some(b)) => phase[b],
            (None, None) => unreachable!("good.len() >= 2"),
        };
    }
    Ok(phase
        .iter()
        .zip(freqs)
        .map(|(&p, &f)| -p / (TAU_F * f))
        .collect())
}
