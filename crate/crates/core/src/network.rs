//! Single-ended network data model: per-frequency S-matrices plus the port map
//! identifying the P/N lines of the differential pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::freq::FrequencyGrid;

/// 4x4 S-matrix at one frequency sample, indexed `[row][col]` zero-based.
pub type SMatrix = [[Complex64; 4]; 4];

/// 2x2 S-matrix at one frequency sample (delay-line elements).
pub type SMatrix2 = [[Complex64; 2]; 2];

/// Assignment of the four single-ended ports to the P/N lines and the
/// left/right sides of the channel.
///
/// The default mapping runs P from port 1 to port 2 and N from port 3 to
/// port 4: differential port 1 is (1, 3) on the left, differential port 2
/// is (2, 4) on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PortMap {
    left_p: u8,
    right_p: u8,
    left_n: u8,
    right_n: u8,
}

impl Default for PortMap {
    fn default() -> Self {
        PortMap {
            left_p: 1,
            right_p: 2,
            left_n: 3,
            right_n: 4,
        }
    }
}

impl PortMap {
    /// Ports are 1-based and must form a permutation of {1, 2, 3, 4}.
    pub fn new(left_p: u8, right_p: u8, left_n: u8, right_n: u8) -> Result<Self> {
        let mut seen = [false; 4];
        for p in [left_p, right_p, left_n, right_n] {
            if !(1..=4).contains(&p) || seen[(p - 1) as usize] {
                return Err(Error::invalid(
                    "port map",
                    format!("{left_p},{right_p},{left_n},{right_n} is not a permutation of 1..4"),
                ));
            }
            seen[(p - 1) as usize] = true;
        }
        Ok(PortMap {
            left_p,
            right_p,
            left_n,
            right_n,
        })
    }

    pub fn left_p(&self) -> usize {
        self.left_p as usize
    }
    pub fn right_p(&self) -> usize {
        self.right_p as usize
    }
    pub fn left_n(&self) -> usize {
        self.left_n as usize
    }
    pub fn right_n(&self) -> usize {
        self.right_n as usize
    }

    /// Map with the P and N labels exchanged.
    pub fn swapped_pn(&self) -> PortMap {
        PortMap {
            left_p: self.left_n,
            right_p: self.right_n,
            left_n: self.left_p,
            right_n: self.right_p,
        }
    }

    /// Map with the left and right sides exchanged.
    pub fn flipped_lr(&self) -> PortMap {
        PortMap {
            left_p: self.right_p,
            right_p: self.left_p,
            left_n: self.right_n,
            right_n: self.left_n,
        }
    }
}

/// A 4-port network: frequency grid, per-frequency S-matrices, port map and
/// reference impedance.
#[derive(Clone, Debug)]
pub struct SingleEndedNetwork {
    grid: FrequencyGrid,
    matrices: Vec<SMatrix>,
    port_map: PortMap,
    reference_impedance: f64,
}

impl SingleEndedNetwork {
    pub fn new(
        grid: FrequencyGrid,
        matrices: Vec<SMatrix>,
        port_map: PortMap,
        reference_impedance: f64,
    ) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} matrices for {} frequency samples",
                matrices.len(),
                grid.len()
            )));
        }
        if !(reference_impedance.is_finite() && reference_impedance > 0.0) {
            return Err(Error::invalid(
                "reference impedance",
                format!("{reference_impedance} ohms"),
            ));
        }
        for (k, m) in matrices.iter().enumerate() {
            for row in m {
                for v in row {
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::invalid(
                            "network",
                            format!("non-finite S-matrix entry at sample {k}"),
                        ));
                    }
                }
            }
        }
        Ok(SingleEndedNetwork {
            grid,
            matrices,
            port_map,
            reference_impedance,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn matrices(&self) -> &[SMatrix] {
        &self.matrices
    }

    pub fn port_map(&self) -> PortMap {
        self.port_map
    }

    pub fn reference_impedance(&self) -> f64 {
        self.reference_impedance
    }

    /// S-parameter at sample `k` with 1-based receive/drive port indices.
    pub fn s(&self, k: usize, receive: usize, drive: usize) -> Complex64 {
        self.matrices[k][receive - 1][drive - 1]
    }

    /// Relabel the ports without touching the data.
    pub fn with_port_map(mut self, port_map: PortMap) -> Self {
        self.port_map = port_map;
        self
    }

    /// Largest |S(f) - S(f)^T| entry over all samples.
    #[allow(clippy::needless_range_loop)]
    pub fn reciprocity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in &self.matrices {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    worst = worst.max((m[i][j] - m[j][i]).norm());
                }
            }
        }
        worst
    }
}

/// A 2-port network, used for stand-alone delay-line elements.
#[derive(Clone, Debug)]
pub struct TwoPortNetwork {
    grid: FrequencyGrid,
    matrices: Vec<SMatrix2>,
    reference_impedance: f64,
}

impl TwoPortNetwork {
    pub fn new(grid: FrequencyGrid, matrices: Vec<SMatrix2>, reference_impedance: f64) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} matrices for {} frequency samples",
                matrices.len(),
                grid.len()
            )));
        }
        if !(reference_impedance.is_finite() && reference_impedance > 0.0) {
            return Err(Error::invalid(
                "reference impedance",
                format!("{reference_impedance} ohms"),
            ));
        }
        Ok(TwoPortNetwork {
            grid,
            matrices,
            reference_impedance,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn matrices(&self) -> &[SMatrix2] {
        &self.matrices
    }

    pub fn reference_impedance(&self) -> f64 {
        self.reference_impedance
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_map_validation() {
        assert!(PortMap::new(1, 2, 3, 4).is_ok());
        assert!(PortMap::new(2, 1, 4, 3).is_ok());
        assert!(PortMap::new(1, 1, 3, 4).is_err());
        assert!(PortMap::new(0, 2, 3, 4).is_err());
        assert!(PortMap::new(1, 2, 3, 5).is_err());
    }

    #[test]
    fn swap_and_flip_are_involutions() {
        let m = PortMap::new(2, 4, 1, 3).unwrap();
        assert_eq!(m.swapped_pn().swapped_pn(), m);
        assert_eq!(m.flipped_lr().flipped_lr(), m);
        assert_eq!(m.swapped_pn().left_p(), 1);
        assert_eq!(m.flipped_lr().left_p(), 4);
    }

    #[test]
    fn length_mismatch_rejected() {
        let grid = FrequencyGrid::new(vec![1.0e9, 2.0e9]).unwrap();
        let zero = [[Complex64::new(0.0, 0.0); 4]; 4];
        let err = SingleEndedNetwork::new(grid, vec![zero], PortMap::default(), 50.0);
        assert!(matches!(err, Err(Error::GridMismatch(_))));
    }

    #[test]
    fn non_finite_entry_rejected() {
        let grid = FrequencyGrid::new(vec![1.0e9]).unwrap();
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        m[0][1] = Complex64::new(f64::NAN, 0.0);
        assert!(SingleEndedNetwork::new(grid, vec![m], PortMap::default(), 50.0).is_err());
    }
}
