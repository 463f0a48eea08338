//! Skew-induced insertion-loss deviation (SILD) and its figure of merit.
//!
//! SILD compares the differential insertion-loss magnitude of a channel
//! against its de-skewed magnitude. The de-skewed magnitude removes the
//! P/N skew contribution from both the amplitude and the phase of the
//! differential response, so it is the same for left-to-right and
//! right-to-left transmission on reciprocal channels even though the phase
//! skews themselves are not reciprocal. SILD is computed in the dB domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;
use crate::mixed_mode::{db20, to_mixed_mode, Direction};
use crate::network::SingleEndedNetwork;
use crate::skew::{pn_skew, SkewDirection, SkewProfile};

const TAU_F: f64 = std::f64::consts::TAU;

/// How the per-sample weighted SILD squares are reduced to one number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Plain weighted mean of SILD^2: (1/N) * sum(W_i * SILD_i^2), in dB^2.
    WeightedMean,
    /// Weighted RMS: sqrt(sum(W_i * SILD_i^2) / sum(W_i)), in dB.
    WeightedRms,
}

/// Signal-rate dependent configuration for the figure of merit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FomConfig {
    /// Signaling rate in Hz (baud).
    pub f_b: f64,
    /// Receiver 3 dB bandwidth in Hz.
    pub f_r: f64,
    /// Transmit filter 3 dB bandwidth in Hz.
    pub f_t: f64,
    /// Summation cutoff in Hz.
    pub f_max: f64,
    pub normalization: Normalization,
}

impl FomConfig {
    /// 224 Gb/s PAM4 profile: f_b = 106.25 GHz, f_r = 0.75 f_b, f_t = f_b,
    /// f_max = f_b, weighted-RMS normalization.
    pub fn pam4_224g() -> Self {
        let f_b = 106.25e9;
        FomConfig {
            f_b,
            f_r: 0.75 * f_b,
            f_t: f_b,
            f_max: f_b,
            normalization: Normalization::WeightedRms,
        }
    }

    /// 112 Gb/s PAM4 profile: same shape at f_b = 53.125 GHz.
    pub fn pam4_112g() -> Self {
        let f_b = 53.125e9;
        FomConfig {
            f_b,
            f_r: 0.75 * f_b,
            f_t: f_b,
            f_max: f_b,
            normalization: Normalization::WeightedRms,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("f_b", self.f_b),
            ("f_r", self.f_r),
            ("f_t", self.f_t),
            ("f_max", self.f_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid {
                    what: "fom config",
                    reason: format!("{name} = {v} Hz, expected finite and > 0"),
                });
            }
        }
        Ok(())
    }
}

impl Default for FomConfig {
    fn default() -> Self {
        FomConfig::pam4_224g()
    }
}

/// Per-frequency SILD curves plus the magnitude curves they derive from,
/// all in dB on the positive-frequency grid.
#[derive(Clone, Debug)]
pub struct SildResult {
    grid: FrequencyGrid,
    /// SILD of the right-to-left (12) direction.
    pub sild_1: Vec<f64>,
    /// SILD of the left-to-right (21) direction.
    pub sild_2: Vec<f64>,
    pub deskewed_mag_21: Vec<f64>,
    pub deskewed_mag_12: Vec<f64>,
    pub original_mag_21: Vec<f64>,
    pub original_mag_12: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SildResult {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }
}

/// De-skewed differential insertion-loss magnitudes, linear, for the 21 and
/// 12 directions.
///
/// The skew phase is removed from the entries driven (21 direction) or
/// received (12 direction) on the P side before the pairwise magnitudes are
/// combined, and the two trace magnitudes are then added incoherently,
/// which also removes the phase-skew contribution. With the positive-delay
/// sign convention used by [`pn_skew`], the de-skew factor is
/// e^{+i 2 pi f t_skew}.
pub fn deskewed_magnitude(
    net: &SingleEndedNetwork,
    skew1: &SkewProfile,
    skew2: &SkewProfile,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if skew1.direction() != SkewDirection::AtPort1 || skew2.direction() != SkewDirection::AtPort2 {
        return Err(Error::invalid(
            "skew profiles",
            "expected (AtPort1, AtPort2) in that order",
        ));
    }
    let freqs = net.grid().nonzero();
    if skew1.grid().as_slice() != freqs || skew2.grid().as_slice() != freqs {
        return Err(Error::GridMismatch(
            "skew profiles must share the network's positive-frequency grid".into(),
        ));
    }
    let start = net.grid().nonzero_start();
    let map = net.port_map();
    let (lp, rp, ln, rn) = (map.left_p(), map.right_p(), map.left_n(), map.right_n());
    let mut mag21 = Vec::with_capacity(freqs.len());
    let mut mag12 = Vec::with_capacity(freqs.len());
    for (i, &f) in freqs.iter().enumerate() {
        let k = start + i;
        let e1 = Complex64::from_polar(1.0, TAU_F * f * skew1.t_skew()[i]);
        let e2 = Complex64::from_polar(1.0, TAU_F * f * skew2.t_skew()[i]);
        let d21 = ((net.s(k, rp, lp) * e1 - net.s(k, rp, ln)).norm()
            + (net.s(k, rn, ln) - net.s(k, rn, lp) * e1).norm())
            / 2.0;
        let d12 = ((net.s(k, lp, rp) * e2 - net.s(k, lp, rn)).norm()
            + (net.s(k, ln, rn) - net.s(k, ln, rp) * e2).norm())
            / 2.0;
        mag21.push(d21);
        mag12.push(d12);
    }
    Ok((mag21, mag12))
}

/// Full SILD computation for a network: skew extraction, de-skew, and the
/// dB-domain deviation curves for both directions.
pub fn sild(net: &SingleEndedNetwork) -> Result<SildResult> {
    let mm = to_mixed_mode(net);
    let skew1 = pn_skew(&mm, SkewDirection::AtPort1)?;
    let skew2 = pn_skew(&mm, SkewDirection::AtPort2)?;
    sild_from_parts(net, &skew1, &skew2)
}

/// SILD computation reusing already-extracted skew profiles.
pub fn sild_from_parts(
    net: &SingleEndedNetwork,
    skew1: &SkewProfile,
    skew2: &SkewProfile,
) -> Result<SildResult> {
    if net.grid().nonzero().len() < 2 {
        return Err(Error::invalid(
            "network",
            "need at least 2 positive-frequency samples",
        ));
    }
    let mm = to_mixed_mode(net);
    let start = net.grid().nonzero_start();
    let (desk21, desk12) = deskewed_magnitude(net, skew1, skew2)?;
    let mut warnings: Vec<String> = Vec::new();
    if net.grid().has_dc() {
        warnings.push("DC sample excluded from skew and SILD curves".into());
    }
    warnings.extend(skew1.warnings().iter().cloned());
    warnings.extend(skew2.warnings().iter().cloned());

    let original_mag_21: Vec<f64> = mm.sdd21[start..].iter().map(|v| db20(v.norm())).collect();
    let original_mag_12: Vec<f64> = mm.sdd12[start..].iter().map(|v| db20(v.norm())).collect();
    let deskewed_mag_21: Vec<f64> = desk21.iter().map(|&v| db20(v)).collect();
    let deskewed_mag_12: Vec<f64> = desk12.iter().map(|&v| db20(v)).collect();
    let sild_2: Vec<f64> = original_mag_21
        .iter()
        .zip(&deskewed_mag_21)
        .map(|(o, d)| o - d)
        .collect();
    let sild_1: Vec<f64> = original_mag_12
        .iter()
        .zip(&deskewed_mag_12)
        .map(|(o, d)| o - d)
        .collect();
    Ok(SildResult {
        grid: FrequencyGrid::new(net.grid().nonzero().to_vec())?,
        sild_1,
        sild_2,
        deskewed_mag_21,
        deskewed_mag_12,
        original_mag_21,
        original_mag_12,
        warnings,
    })
}

/// Normalized sinc: sin(pi x)/(pi x), with sinc(0) = 1 and exact zeros at
/// the other integers.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x == x.trunc() {
        return 0.0;
    }
    let px = std::f64::consts::PI * x;
    px.sin() / px
}

/// Spectral weight combining the signaling spectrum with the receiver and
/// transmit filter roll-offs: sinc^2(f/f_b) / (1+(f/f_r)^8) / (1+(f/f_t)^4).
pub fn weight(f: f64, cfg: &FomConfig) -> f64 {
    let s = sinc(f / cfg.f_b);
    s * s / (1.0 + (f / cfg.f_r).powi(8)) / (1.0 + (f / cfg.f_t).powi(4))
}

/// Figure-of-merit values for both directions.
#[derive(Clone, Debug)]
pub struct FomResult {
    /// Right-to-left figure of merit (dB, or dB^2 under `WeightedMean`).
    pub fom_1: f64,
    /// Left-to-right figure of merit.
    pub fom_2: f64,
    /// Samples actually summed.
    pub n_samples: usize,
    /// Highest frequency used; below `cfg.f_max` when the grid ends early.
    pub actual_cutoff_hz: f64,
    pub warnings: Vec<String>,
}

/// Weighted reduction of the SILD curves over (0, f_max].
///
/// A grid that stops short of `f_max` is reduced over what is available and
/// flagged with a warning. Non-uniform grids are resampled to the median
/// step first.
pub fn fom_sild(result: &SildResult, cfg: &FomConfig) -> Result<FomResult> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let freqs = result.grid().as_slice();
    let cutoff = cfg.f_max * (1.0 + 1e-12);
    let band: Vec<usize> = (0..freqs.len()).filter(|&i| freqs[i] <= cutoff).collect();
    if band.len() < 2 {
        return Err(Error::EmptyBand(format!(
            "fewer than 2 samples at or below f_max = {} Hz",
            cfg.f_max
        )));
    }
    let actual_cutoff = freqs[*band.last().unwrap()];
    if result.grid().max_freq() < cfg.f_max * (1.0 - 1e-9) {
        warnings.push(format!(
            "grid reaches {} Hz, below the requested f_max = {} Hz",
            result.grid().max_freq(),
            cfg.f_max
        ));
    }

    let band_f: Vec<f64> = band.iter().map(|&i| freqs[i]).collect();
    let band_s1: Vec<f64> = band.iter().map(|&i| result.sild_1[i]).collect();
    let band_s2: Vec<f64> = band.iter().map(|&i| result.sild_2[i]).collect();

    let band_grid = FrequencyGrid::new(band_f.clone())?;
    let (f_used, s1_used, s2_used) = if band_grid.is_uniform(1e-6) {
        (band_f, band_s1, band_s2)
    } else {
        warnings.push("non-uniform grid resampled to the median step for the summation".into());
        let step = band_grid.median_step();
        let start = band_grid.min_freq();
        let n = (((band_grid.max_freq() - start) / step).floor() as usize) + 1;
        let f_new: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
        let s1_new = interp_linear(&band_f, &band_s1, &f_new);
        let s2_new = interp_linear(&band_f, &band_s2, &f_new);
        (f_new, s1_new, s2_new)
    };

    let n = f_used.len();
    let mut w_sum = 0.0;
    let mut ws1 = 0.0;
    let mut ws2 = 0.0;
    for i in 0..n {
        let w = weight(f_used[i], cfg);
        w_sum += w;
        ws1 += w * s1_used[i] * s1_used[i];
        ws2 += w * s2_used[i] * s2_used[i];
    }
    let (fom_1, fom_2) = match cfg.normalization {
        Normalization::WeightedMean => (ws1 / n as f64, ws2 / n as f64),
        Normalization::WeightedRms => {
            if w_sum <= 0.0 {
                return Err(Error::EmptyBand("all weights vanish in the band".into()));
            }
            ((ws1 / w_sum).sqrt(), (ws2 / w_sum).sqrt())
        }
    };
    Ok(FomResult {
        fom_1,
        fom_2,
        n_samples: n,
        actual_cutoff_hz: actual_cutoff,
        warnings,
    })
}

fn interp_linear(xs: &[f64], ys: &[f64], xq: &[f64]) -> Vec<f64> {
    xq.iter()
        .map(|&x| {
            if x <= xs[0] {
                return ys[0];
            }
            if x >= xs[xs.len() - 1] {
                return ys[ys.len() - 1];
            }
            let j = xs.partition_point(|&v| v < x).max(1);
            let (x0, x1) = (xs[j - 1], xs[j]);
            let t = (x - x0) / (x1 - x0);
            ys[j - 1] + t * (ys[j] - ys[j - 1])
        })
        .collect()
}

/// Worst absolute SILD value within a band.
#[derive(Clone, Copy, Debug)]
pub struct MaxSild {
    /// |SILD| in dB.
    pub value_db: f64,
    /// Frequency where the maximum occurs.
    pub freq_hz: f64,
    /// Direction the maximum belongs to.
    pub direction: Direction,
}

/// Maximum |SILD| over (0, band_max], reported for the worse direction.
pub fn max_abs_sild(result: &SildResult, band_max: f64) -> Result<MaxSild> {
    if !(band_max.is_finite() && band_max > 0.0) {
        return Err(Error::invalid("band", format!("band_max = {band_max} Hz")));
    }
    let freqs = result.grid().as_slice();
    let cutoff = band_max * (1.0 + 1e-12);
    let mut best1: Option<(f64, f64)> = None;
    let mut best2: Option<(f64, f64)> = None;
    for (i, &f) in freqs.iter().enumerate() {
        if f > cutoff {
            break;
        }
        let a1 = result.sild_1[i].abs();
        let a2 = result.sild_2[i].abs();
        if best1.is_none_or(|(v, _)| a1 > v) {
            best1 = Some((a1, f));
        }
        if best2.is_none_or(|(v, _)| a2 > v) {
            best2 = Some((a2, f));
        }
    }
    match (best1, best2) {
        (Some((v1, f1)), Some((v2, f2))) => {
            if v1 >= v2 {
                Ok(MaxSild {
                    value_db: v1,
                    freq_hz: f1,
                    direction: Direction::RightToLeft,
                })
            } else {
                Ok(MaxSild {
                    value_db: v2,
                    freq_hz: f2,
                    direction: Direction::LeftToRight,
                })
            }
        }
        _ => Err(Error::EmptyBand(format!(
            "no samples in (0, {band_max}] Hz"
        ))),
    }
}
