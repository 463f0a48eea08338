//! Quantifying P/N skew effects in differential high-speed channels.
//!
//! The library parses 4-port S-parameters, extracts the frequency-dependent
//! P/N phase skew seen at each differential port, removes the skew from the
//! differential insertion-loss magnitude, and reduces the difference between
//! the original and de-skewed magnitudes (the skew-induced insertion-loss
//! deviation, SILD) to per-channel figures of merit. A synthetic channel
//! generator, a pulse-response transform and a batch statistics engine
//! support validation and fleet studies.
//!
//! Typical flow:
//!
//! ```
//! use sildkit::freq::FrequencyGrid;
//! use sildkit::sild::{fom_sild, sild, FomConfig};
//! use sildkit::synth::{ideal_diff_channel, inject_se_delay, ChannelSpec, Line, LossModel, Side, SkewProfileSpec};
//!
//! let spec = ChannelSpec {
//!     grid: FrequencyGrid::uniform(1.0e8, 1.1e11, 500).unwrap(),
//!     base_delay: 5.0e-11,
//!     loss: LossModel::default(),
//!     coupling: 0.0,
//! };
//! let base = ideal_diff_channel(&spec).unwrap();
//! let skewed = inject_se_delay(&base, Line::P, Side::Left, &SkewProfileSpec::Flat { tau: 2.0e-12 });
//! let result = sild(&skewed).unwrap();
//! let fom = fom_sild(&result, &FomConfig::pam4_224g()).unwrap();
//! assert!(fom.fom_2 > 0.0 && (fom.fom_1 - fom.fom_2).abs() < 1e-9);
//! ```

pub mod batch;
pub mod error;
pub mod freq;
pub mod mixed_mode;
pub mod network;
pub mod pulse;
pub mod sild;
pub mod skew;
pub mod synth;
pub mod touchstone;

pub use error::{Error, Result};
pub use freq::FrequencyGrid;
pub use mixed_mode::{diff_insertion_loss, to_mixed_mode, Direction, MixedModeSet};
pub use network::{PortMap, SingleEndedNetwork, TwoPortNetwork};
pub use sild::{fom_sild, max_abs_sild, sild, FomConfig, FomResult, MaxSild, SildResult};
pub use skew::{phase_delay, pn_skew, unwrap_phase, SkewDirection, SkewProfile};
pub use touchstone::{parse_touchstone, write_touchstone, TouchstoneOptions};
