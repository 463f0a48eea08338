//! TOML channel-spec file for the synth subcommand.
//!
//! ```toml
//! [grid]
//! start_hz = 1.0e7
//! stop_hz = 1.1e11
//! points = 1100
//!
//! [channel]
//! base_delay_s = 5.0e-11
//! coupling = 0.01
//!
//! [channel.loss]
//! dc_db = 0.2
//! skin_db_per_sqrt_hz = 2.0e-6
//! dielectric_db_per_hz = 1.0e-12
//!
//! [[skew]]                    # optional, repeatable, applied in order
//! line = "p"                  # p | n
//! side = "left"               # left | right
//! profile = { kind = "flat", tau_s = 3.0e-12 }
//! ```
//!
//! The damped oscillatory profile takes
//! `{ kind = "damped-oscillatory", tau_peak_s, osc_freq_hz, damping_freq_hz }`.

use serde::Deserialize;

use sildkit::freq::FrequencyGrid;
use sildkit::network::SingleEndedNetwork;
use sildkit::synth::{
    ideal_diff_channel, inject_se_delay, ChannelSpec, Line, LossModel, Side, SkewProfileSpec,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthFile {
    pub grid: GridSpec,
    pub channel: ChannelCfg,
    #[serde(default)]
    pub skew: Vec<SkewCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelCfg {
    pub base_delay_s: f64,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default)]
    pub loss: LossCfg,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossCfg {
    #[serde(default)]
    pub dc_db: f64,
    #[serde(default)]
    pub skin_db_per_sqrt_hz: f64,
    #[serde(default)]
    pub dielectric_db_per_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewCfg {
    pub line: LineCfg,
    pub side: SideCfg,
    pub profile: ProfileCfg,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineCfg {
    P,
    N,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideCfg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileCfg {
    Flat {
        tau_s: f64,
    },
    DampedOscillatory {
        tau_peak_s: f64,
        osc_freq_hz: f64,
        damping_freq_hz: f64,
    },
}

impl From<LineCfg> for Line {
    fn from(v: LineCfg) -> Line {
        match v {
            LineCfg::P => Line::P,
            LineCfg::N => Line::N,
        }
    }
}

impl From<SideCfg> for Side {
    fn from(v: SideCfg) -> Side {
        match v {
            SideCfg::Left => Side::Left,
            SideCfg::Right => Side::Right,
        }
    }
}

impl From<ProfileCfg> for SkewProfileSpec {
    fn from(v: ProfileCfg) -> SkewProfileSpec {
        match v {
            ProfileCfg::Flat { tau_s } => SkewProfileSpec::Flat { tau: tau_s },
            ProfileCfg::DampedOscillatory {
                tau_peak_s,
                osc_freq_hz,
                damping_freq_hz,
            } => SkewProfileSpec::DampedOscillatory {
                tau_peak: tau_peak_s,
                osc_freq: osc_freq_hz,
                damping_freq: damping_freq_hz,
            },
        }
    }
}

impl SynthFile {
    pub fn parse(text: &str) -> Result<SynthFile, String> {
        toml::from_str(text).map_err(|e| format!("spec file: {e}"))
    }

    /// Validate with field-path error messages.
    pub fn validate(&self) -> Result<(), String> {
        if self.grid.points < 2 {
            return Err(format!("grid.points: {} is below 2", self.grid.points));
        }
        if !(self.grid.start_hz.is_finite() && self.grid.start_hz >= 0.0) {
            return Err(format!("grid.start_hz: {} must be >= 0", self.grid.start_hz));
        }
        if !(self.grid.stop_hz.is_finite() && self.grid.stop_hz > self.grid.start_hz) {
            return Err(format!(
                "grid.stop_hz: {} must exceed grid.start_hz",
                self.grid.stop_hz
            ));
        }
        if !(self.channel.base_delay_s.is_finite() && self.channel.base_delay_s >= 0.0) {
            return Err(format!(
                "channel.base_delay_s: {} must be >= 0",
                self.channel.base_delay_s
            ));
        }
        if !(0.0..1.0).contains(&self.channel.coupling) {
            return Err(format!(
                "channel.coupling: {} must be in [0, 1)",
                self.channel.coupling
            ));
        }
        for (path, v) in [
            ("channel.loss.dc_db", self.channel.loss.dc_db),
            (
                "channel.loss.skin_db_per_sqrt_hz",
                self.channel.loss.skin_db_per_sqrt_hz,
            ),
            (
                "channel.loss.dielectric_db_per_hz",
                self.channel.loss.dielectric_db_per_hz,
            ),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{path}: {v} must be >= 0"));
            }
        }
        for (i, s) in self.skew.iter().enumerate() {
            let spec: SkewProfileSpec = s.profile.into();
            spec.validate()
                .map_err(|e| format!("skew[{i}].profile: {e}"))?;
        }
        Ok(())
    }

    /// Build the network, with an optional extra flat P/left delay (sweep).
    pub fn build(&self, extra_flat_tau: Option<f64>) -> Result<SingleEndedNetwork, String> {
        self.validate()?;
        let grid = FrequencyGrid::new(
            (0..self.grid.points)
                .map(|i| {
                    self.grid.start_hz
                        + i as f64 * (self.grid.stop_hz - self.grid.start_hz)
                            / (self.grid.points - 1) as f64
                })
                .collect(),
        )
        .map_err(|e| format!("grid: {e}"))?;
        let spec = ChannelSpec {
            grid,
            base_delay: self.channel.base_delay_s,
            loss: LossModel {
                dc_db: self.channel.loss.dc_db,
                skin_db_per_sqrt_hz: self.channel.loss.skin_db_per_sqrt_hz,
                dielectric_db_per_hz: self.channel.loss.dielectric_db_per_hz,
            },
            coupling: self.channel.coupling,
        };
        let mut net = ideal_diff_channel(&spec).map_err(|e| e.to_string())?;
        for s in &self.skew {
            net = inject_se_delay(&net, s.line.into(), s.side.into(), &s.profile.into());
        }
        if let Some(tau) = extra_flat_tau {
            net = inject_se_delay(&net, Line::P, Side::Left, &SkewProfileSpec::Flat { tau });
        }
        Ok(net)
    }
}
