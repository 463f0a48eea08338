//! Frequency grid shared by all per-frequency arrays.

use crate::error::{Error, Result};

/// Strictly ascending frequency samples in Hz.
///
/// All samples are finite and non-negative. A single leading DC sample
/// (f = 0) is accepted and flagged; operations that divide by frequency
/// skip it via [`FrequencyGrid::nonzero`].
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    freqs: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(freqs: Vec<f64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::invalid("frequency grid", "no samples"));
        }
        for (i, &f) in freqs.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::invalid(
                    "frequency grid",
                    format!("sample {i} is {f}, expected finite and >= 0"),
                ));
            }
            if i > 0 && f <= freqs[i - 1] {
                return Err(Error::NonAscendingFrequency {
                    index: i,
                    prev: freqs[i - 1],
                    next: f,
                });
            }
        }
        Ok(FrequencyGrid { freqs })
    }

    /// Uniform grid with `points` samples from `start` to `stop` inclusive.
    pub fn uniform(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::invalid("frequency grid", "need at least 2 points"));
        }
        let step = (stop - start) / (points - 1) as f64;
        let freqs = (0..points).map(|i| start + i as f64 * step).collect();
        Self::new(freqs)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.freqs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.freqs.iter()
    }

    pub fn min_freq(&self) -> f64 {
        self.freqs[0]
    }

    pub fn max_freq(&self) -> f64 {
        *self.freqs.last().unwrap()
    }

    /// True if the grid starts with a DC (f = 0) sample.
    pub fn has_dc(&self) -> bool {
        self.freqs[0] == 0.0
    }

    /// Index of the first positive-frequency sample (0 or 1).
    pub fn nonzero_start(&self) -> usize {
        usize::from(self.has_dc())
    }

    /// The positive-frequency portion of the grid.
    pub fn nonzero(&self) -> &[f64] {
        &self.freqs[self.nonzero_start()..]
    }

    /// Grid restricted to its positive-frequency samples.
    pub fn without_dc(&self) -> FrequencyGrid {
        FrequencyGrid {
            freqs: self.nonzero().to_vec(),
        }
    }

    /// Median step between consecutive samples.
    pub fn median_step(&self) -> f64 {
        let mut steps: Vec<f64> = self.freqs.windows(2).map(|w| w[1] - w[0]).collect();
        if steps.is_empty() {
            return 0.0;
        }
        steps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        steps[steps.len() / 2]
    }

    /// True if every step matches the median step within `rel_tol`.
    pub fn is_uniform(&self, rel_tol: f64) -> bool {
        let med = self.median_step();
        if med <= 0.0 {
            return false;
        }
        self.freqs
            .windows(2)
            .all(|w| ((w[1] - w[0]) - med).abs() <= rel_tol * med)
    }
}
