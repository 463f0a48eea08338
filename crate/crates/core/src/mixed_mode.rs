//! Differential-to-single-ended decomposition of a 4-port network.
//!
//! Only the traces the skew metrics consume are computed: the four
//! differential-drive to single-ended-receive responses and the two
//! differential through responses, one per propagation direction. A full
//! 4x4 modal transform is deliberately not performed.

use num_complex::Complex64;

use crate::freq::FrequencyGrid;
use crate::network::SingleEndedNetwork;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Signal propagation direction through the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Drive differential port 1 (left pair), receive at port 2 (right pair).
    LeftToRight,
    /// Drive differential port 2, receive at port 1.
    RightToLeft,
}

/// Mixed-mode traces of a 4-port network.
///
/// Naming follows the mixed-mode convention for the default port map:
/// `ssd21` is the P-line receive for left-to-right differential drive,
/// `ssd41` the N-line receive (in N polarity) for the same drive, and
/// `ssd12`/`ssd14` are their right-to-left counterparts.
#[derive(Clone, Debug)]
pub struct MixedModeSet {
    grid: FrequencyGrid,
    pub ssd21: Vec<Complex64>,
    pub ssd41: Vec<Complex64>,
    pub ssd12: Vec<Complex64>,
    pub ssd14: Vec<Complex64>,
    pub sdd21: Vec<Complex64>,
    pub sdd12: Vec<Complex64>,
}

impl MixedModeSet {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }
}

/// Decompose a network into its mixed-mode traces, resolving the single-ended
/// entries through the network's port map.
pub fn to_mixed_mode(net: &SingleEndedNetwork) -> MixedModeSet {
    let map = net.port_map();
    let (lp, rp, ln, rn) = (map.left_p(), map.right_p(), map.left_n(), map.right_n());
    let n = net.grid().len();
    let mut mm = MixedModeSet {
        grid: net.grid().clone(),
        ssd21: Vec::with_capacity(n),
        ssd41: Vec::with_capacity(n),
        ssd12: Vec::with_capacity(n),
        ssd14: Vec::with_capacity(n),
        sdd21: Vec::with_capacity(n),
        sdd12: Vec::with_capacity(n),
    };
    for k in 0..n {
        let ssd21 = (net.s(k, rp, lp) - net.s(k, rp, ln)) / SQRT2;
        let ssd41 = (net.s(k, rn, ln) - net.s(k, rn, lp)) / SQRT2;
        let ssd12 = (net.s(k, lp, rp) - net.s(k, lp, rn)) / SQRT2;
        let ssd14 = (net.s(k, ln, rn) - net.s(k, ln, rp)) / SQRT2;
        mm.sdd21.push((ssd21 + ssd41) / SQRT2);
        mm.sdd12.push((ssd12 + ssd14) / SQRT2);
        mm.ssd21.push(ssd21);
        mm.ssd41.push(ssd41);
        mm.ssd12.push(ssd12);
        mm.ssd14.push(ssd14);
    }
    mm
}

/// Differential through response for the requested direction.
pub fn diff_insertion_loss(mm: &MixedModeSet, direction: Direction) -> &[Complex64] {
    match direction {
        Direction::LeftToRight => &mm.sdd21,
        Direction::RightToLeft => &mm.sdd12,
    }
}

/// 20*log10 of a linear magnitude, clamped to -600 dB below 1e-30.
pub fn db20(magnitude: f64) -> f64 {
    if magnitude < 1e-30 {
        -600.0
    } else {
        20.0 * magnitude.log10()
    }
}

/// Per-sample magnitude of a complex trace, in dB.
pub fn magnitude_db(trace: &[Complex64]) -> Vec<f64> {
    trace.iter().map(|v| db20(v.norm())).collect()
}
