//! Synthetic 4-port channel generation.
//!
//! Channels are built from an even/odd-mode model of an ideal matched
//! coupled pair. Both modes share the attenuation A(f) =
//! 10^-(dc + skin*sqrt(f) + diel*f)/20 and propagate with delays
//! t0*(1 +- coupling), so the spectral norm of every S-matrix equals A(f)
//! and the network is passive and reciprocal by construction. The coupling
//! coefficient splits the modal delays, which produces far-end crosstalk
//! that grows with frequency; a matched ideal pair has no near-end terms.
//! P/N skew is introduced by cascading ideal all-pass delay elements onto
//! individual single-ended ports.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;
use crate::network::{PortMap, SMatrix, SingleEndedNetwork};

const TAU_F: f64 = std::f64::consts::TAU;

/// Per-line attenuation model, all coefficients in dB.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossModel {
    /// Frequency-independent loss, dB.
    pub dc_db: f64,
    /// Skin-effect loss, dB per sqrt(Hz).
    pub skin_db_per_sqrt_hz: f64,
    /// Dielectric loss, dB per Hz.
    pub dielectric_db_per_hz: f64,
}

impl LossModel {
    /// Linear attenuation at `f` Hz.
    pub fn attenuation(&self, f: f64) -> f64 {
        let db = self.dc_db + self.skin_db_per_sqrt_hz * f.sqrt() + self.dielectric_db_per_hz * f;
        10f64.powf(-db / 20.0)
    }
}

/// Parameters of the synthetic base channel.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub grid: FrequencyGrid,
    /// Per-line delay t0 in seconds.
    pub base_delay: f64,
    pub loss: LossModel,
    /// Modal delay split in [0, 1); 0 means uncoupled.
    pub coupling: f64,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_delay.is_finite() && self.base_delay >= 0.0) {
            return Err(Error::invalid(
                "channel spec",
                format!("base_delay = {} s, expected >= 0", self.base_delay),
            ));
        }
        if !(0.0..1.0).contains(&self.coupling) {
            return Err(Error::invalid(
                "channel spec",
                format!("coupling = {}, expected in [0, 1)", self.coupling),
            ));
        }
        for (name, v) in [
            ("loss.dc_db", self.loss.dc_db),
            ("loss.skin_db_per_sqrt_hz", self.loss.skin_db_per_sqrt_hz),
            ("loss.dielectric_db_per_hz", self.loss.dielectric_db_per_hz),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "channel spec",
                    format!("{name} = {v}, expected >= 0"),
                ));
            }
        }
        Ok(())
    }
}

/// Which single-ended line a delay element is placed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Line {
    P,
    N,
}

/// Which end of the channel the delay element is placed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Frequency-dependent skew profile of an injected delay element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SkewProfileSpec {
    /// Frequency-independent delay.
    Flat { tau: f64 },
    /// Oscillating profile with an exponentially decaying envelope:
    /// tau(f) = tau_peak * exp(-f/damping_freq) * |sin(2 pi f / osc_freq)|.
    ///
    /// This is a parameterized stand-in shape, not a normative model; it
    /// reproduces peaked, frequency-dependent skew of a chosen amplitude.
    DampedOscillatory {
        tau_peak: f64,
        /// Oscillation period along the frequency axis, Hz.
        osc_freq: f64,
        /// Envelope decay constant, Hz.
        damping_freq: f64,
    },
}

impl SkewProfileSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    "skew profile",
                    format!("{name} = {v}, expected >= 0"),
                ))
            }
        };
        match *self {
            SkewProfileSpec::Flat { tau } => check("tau", tau),
            SkewProfileSpec::DampedOscillatory {
                tau_peak,
                osc_freq,
                damping_freq,
            } => {
                check("tau_peak", tau_peak)?;
                if !(osc_freq.is_finite() && osc_freq > 0.0) {
                    return Err(Error::invalid(
                        "skew profile",
                        format!("osc_freq = {osc_freq} Hz, expected > 0"),
                    ));
                }
                if !(damping_freq.is_finite() && damping_freq > 0.0) {
                    return Err(Error::invalid(
                        "skew profile",
                        format!("damping_freq = {damping_freq} Hz, expected > 0"),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Evaluate a skew profile on a frequency grid.
pub fn skew_profile(spec: &SkewProfileSpec, freqs: &[f64]) -> Vec<f64> {
    match *spec {
        SkewProfileSpec::Flat { tau } => vec![tau; freqs.len()],
        SkewProfileSpec::DampedOscillatory {
            tau_peak,
            osc_freq,
            damping_freq,
        } => freqs
            .iter()
            .map(|&f| tau_peak * (-f / damping_freq).exp() * (TAU_F * f / osc_freq).sin().abs())
            .collect(),
    }
}

/// Generate the ideal coupled differential channel for a spec.
///
/// The result is reciprocal and passive at every sample; reflections and
/// same-side terms are zero.
pub fn ideal_diff_channel(spec: &ChannelSpec) -> Result<SingleEndedNetwork> {
    spec.validate()?;
    let map = PortMap::default();
    let (lp, rp, ln, rn) = (
        map.left_p() - 1,
        map.right_p() - 1,
        map.left_n() - 1,
        map.right_n() - 1,
    );
    let t_even = spec.base_delay * (1.0 + spec.coupling);
    let t_odd = spec.base_delay * (1.0 - spec.coupling);
    let mut matrices = Vec::with_capacity(spec.grid.len());
    for &f in spec.grid.iter() {
        let a = spec.loss.attenuation(f);
        if a > 1.0 {
            return Err(Error::PassivityViolation {
                freq: f,
                magnitude: a,
            });
        }
        let h_even = Complex64::from_polar(a, -TAU_F * f * t_even);
        let h_odd = Complex64::from_polar(a, -TAU_F * f * t_odd);
        let through = (h_even + h_odd) / 2.0;
        let cross = (h_even - h_odd) / 2.0;
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        m[rp][lp] = through;
        m[lp][rp] = through;
        m[rn][ln] = through;
        m[ln][rn] = through;
        m[rp][ln] = cross;
        m[ln][rp] = cross;
        m[rn][lp] = cross;
        m[lp][rn] = cross;
        matrices.push(m);
    }
    SingleEndedNetwork::new(spec.grid.clone(), matrices, map, 50.0)
}

/// Cascade an ideal matched all-pass delay element e^{-i 2 pi f tau(f)}
/// onto one single-ended port.
///
/// Every S-entry with exactly one index on the modified port picks up the
/// delay factor once; the port's own reflection picks it up twice.
/// Reciprocity of the input is preserved. A frequency-dependent tau(f) is
/// applied pointwise without enforcing causality of the resulting phase,
/// which is fine for steady-state frequency-domain metrics but can make
/// time-domain responses of such channels non-causal.
#[allow(clippy::needless_range_loop)]
pub fn inject_se_delay(
    net: &SingleEndedNetwork,
    line: Line,
    side: Side,
    profile: &SkewProfileSpec,
) -> SingleEndedNetwork {
    let map = net.port_map();
    let port = match (line, side) {
        (Line::P, Side::Left) => map.left_p(),
        (Line::P, Side::Right) => map.right_p(),
        (Line::N, Side::Left) => map.left_n(),
        (Line::N, Side::Right) => map.right_n(),
    } - 1;
    let taus = skew_profile(profile, net.grid().as_slice());
    let mut matrices: Vec<SMatrix> = net.matrices().to_vec();
    for (k, m) in matrices.iter_mut().enumerate() {
        let d = Complex64::from_polar(1.0, -TAU_F * net.grid().as_slice()[k] * taus[k]);
        for q in 0..4 {
            if q == port {
                continue;
            }
            m[port][q] *= d;
            m[q][port] *= d;
        }
        m[port][port] *= d * d;
    }
    SingleEndedNetwork::new(
        net.grid().clone(),
        matrices,
        map,
        net.reference_impedance(),
    )
    .expect("delay injection preserves validity")
}
