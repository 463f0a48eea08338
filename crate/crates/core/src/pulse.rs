//! Pulse responses of frequency-domain transfer functions.
//!
//! The transfer is resampled onto harmonic bins k/time_window, multiplied
//! by the spectrum of a trapezoidal excitation pulse, extended with
//! Hermitian symmetry and inverse-transformed, so the output is real up to
//! rounding.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;

/// DC-bin fill policy for grids that do not reach f = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DcExtrapolation {
    /// Hold the lowest measured sample.
    Constant,
    /// Extrapolate linearly from the two lowest samples.
    Linear,
}

/// Band-edge taper applied to the transfer before transforming.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralWindow {
    None,
    /// Raised-cosine roll-off over the top 10% of the band.
    RaisedCosineEdge,
}

#[derive(Clone, Copy, Debug)]
pub struct PulseConfig {
    /// Nominal pulse width (one unit interval), seconds.
    pub pulse_width: f64,
    /// 0-100% rise/fall time of the trapezoid, seconds.
    pub rise_time: f64,
    /// Output record length; sets the bin spacing 1/time_window. Must cover
    /// the channel delay with margin (4x or more).
    pub time_window: f64,
    pub dc_extrapolation: DcExtrapolation,
    pub spectral_window: SpectralWindow,
    /// Resample non-harmonic grids instead of rejecting them.
    pub resample: bool,
}

impl Default for PulseConfig {
    /// One 106.25 GBd unit interval with 0.1 UI rise time in a 2 ns window.
    fn default() -> Self {
        let ui = 1.0 / 106.25e9;
        PulseConfig {
            pulse_width: ui,
            rise_time: 0.1 * ui,
            time_window: 2.0e-9,
            dc_extrapolation: DcExtrapolation::Constant,
            spectral_window: SpectralWindow::RaisedCosineEdge,
            resample: true,
        }
    }
}

impl PulseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_width.is_finite() && self.pulse_width > 0.0) {
            return Err(Error::invalid(
                "pulse config",
                format!("pulse_width = {} s", self.pulse_width),
            ));
        }
        if !(self.rise_time.is_finite() && self.rise_time >= 0.0) {
            return Err(Error::invalid(
                "pulse config",
                format!("rise_time = {} s", self.rise_time),
            ));
        }
        if !(self.time_window.is_finite() && self.time_window > 0.0) {
            return Err(Error::invalid(
                "pulse config",
                format!("time_window = {} s", self.time_window),
            ));
        }
        Ok(())
    }
}

/// Real time series produced by [`pulse_response`].
#[derive(Clone, Debug)]
pub struct PulseResponse {
    /// Sample instants, seconds, starting at 0.
    pub time: Vec<f64>,
    /// Real amplitude per instant.
    pub amplitude: Vec<f64>,
    /// Largest imaginary residue relative to the peak amplitude.
    pub imag_residue: f64,
    /// sum |X_k|^2 df over the full Hermitian spectrum.
    pub spectral_energy: f64,
    /// sum |x_n|^2 dt over the record.
    pub time_energy: f64,
}

/// Spectrum of the trapezoidal excitation: a unit-height pulse rising over
/// `rise`, holding for `width - rise`, falling over `rise`, starting at t=0.
fn pulse_spectrum(f: f64, width: f64, rise: f64) -> Complex64 {
    let sinc = |x: f64| {
        if x == 0.0 {
            1.0
        } else {
            let px = std::f64::consts::PI * x;
            px.sin() / px
        }
    };
    let mag = width * sinc(f * width) * sinc(f * rise);
    let phase = -std::f64::consts::PI * f * (width + rise);
    Complex64::from_polar(1.0, phase) * mag
}

/// Compute the pulse response of a transfer function.
///
/// The output record has an odd number of samples 2M+1 with spacing
/// time_window/(2M+1), where M = floor(f_max * time_window) is the number
/// of positive-frequency bins.
pub fn pulse_response(
    transfer: &[Complex64],
    grid: &FrequencyGrid,
    cfg: &PulseConfig,
) -> Result<PulseResponse> {
    cfg.validate()?;
    if transfer.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} transfer samples for {} frequencies",
            transfer.len(),
            grid.len()
        )));
    }
    if grid.len() < 2 {
        return Err(Error::invalid("transfer", "need at least 2 samples"));
    }
    if transfer.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::invalid("transfer", "non-finite sample"));
    }

    let df = 1.0 / cfg.time_window;
    let f_max = grid.max_freq();
    let bins = (f_max / df * (1.0 + 1e-12)).floor() as usize;
    if bins < 2 {
        return Err(Error::invalid(
            "pulse config",
            "time_window too short: fewer than 2 spectral bins fit the grid",
        ));
    }

    if !cfg.resample && !grid_is_harmonic(grid, df) {
        return Err(Error::NonUniformGrid(
            "grid is not harmonic in 1/time_window and resampling is disabled".into(),
        ));
    }

    let freqs = grid.as_slice();
    let sample_at = |f: f64| -> Complex64 {
        if f <= freqs[0] {
            return match cfg.dc_extrapolation {
                DcExtrapolation::Constant => transfer[0],
                DcExtrapolation::Linear => {
                    let t = (f - freqs[0]) / (freqs[1] - freqs[0]);
                    transfer[0] + (transfer[1] - transfer[0]).scale(t)
                }
            };
        }
        if f >= freqs[freqs.len() - 1] {
            return transfer[transfer.len() - 1];
        }
        let j = freqs.partition_point(|&v| v < f).max(1);
        let t = (f - freqs[j - 1]) / (freqs[j] - freqs[j - 1]);
        transfer[j - 1] + (transfer[j] - transfer[j - 1]).scale(t)
    };

    let edge_start = 0.9 * f_max;
    let taper = |f: f64| -> f64 {
        match cfg.spectral_window {
            SpectralWindow::None => 1.0,
            SpectralWindow::RaisedCosineEdge => {
                if f <= edge_start {
                    1.0
                } else {
                    let t = (f - edge_start) / (f_max - edge_start);
                    0.5 * (1.0 + (std::f64::consts::PI * t.min(1.0)).cos())
                }
            }
        }
    };

    let nfft = 2 * bins + 1;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); nfft];
    // DC bin: real magnitude of the extrapolated response.
    let dc = sample_at(0.0).norm() * pulse_spectrum(0.0, cfg.pulse_width, cfg.rise_time).re;
    spectrum[0] = Complex64::new(dc, 0.0);
    for k in 1..=bins {
        let f = k as f64 * df;
        let v = sample_at(f) * taper(f) * pulse_spectrum(f, cfg.pulse_width, cfg.rise_time);
        spectrum[k] = v;
        spectrum[nfft - k] = v.conj();
    }

    let spectral_energy: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() * df;

    let mut buf = spectrum;
    FftPlanner::new().plan_fft_inverse(nfft).process(&mut buf);

    let dt = cfg.time_window / nfft as f64;
    let mut amplitude = Vec::with_capacity(nfft);
    let mut time = Vec::with_capacity(nfft);
    let mut peak = 0.0f64;
    let mut worst_im = 0.0f64;
    let mut time_energy = 0.0f64;
    for (n, v) in buf.iter().enumerate() {
        let x = v * df;
        amplitude.push(x.re);
        time.push(n as f64 * dt);
        peak = peak.max(x.re.abs());
        worst_im = worst_im.max(x.im.abs());
        time_energy += x.norm_sqr() * dt;
    }
    let imag_residue = if peak > 0.0 { worst_im / peak } else { worst_im };
    Ok(PulseResponse {
        time,
        amplitude,
        imag_residue,
        spectral_energy,
        time_energy,
    })
}

fn grid_is_harmonic(grid: &FrequencyGrid, df: f64) -> bool {
    grid.iter().all(|&f| {
        let k = f / df;
        (k - k.round()).abs() <= 1e-9 * k.max(1.0)
    })
}
