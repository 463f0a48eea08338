//! Fleet analysis: per-file figures of merit and summary statistics over a
//! directory of S-parameter files.
//!
//! Files are analyzed in parallel; records are sorted by source id before
//! anything is emitted, so the output is byte-identical across runs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sild::{fom_sild, max_abs_sild, sild, FomConfig};
use crate::touchstone::parse_touchstone;

/// Delta-exceedance thresholds reported by default, dB.
pub const DEFAULT_DELTA_THRESHOLDS: [f64; 3] = [0.01, 0.025, 0.05];

/// Default histogram bin width, dB.
pub const DEFAULT_BIN_WIDTH_DB: f64 = 0.025;

/// Minimum span the default histogram covers, dB.
pub const DEFAULT_HISTOGRAM_SPAN_DB: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorPolicy {
    /// Record unparseable inputs as failures and keep going.
    Continue,
    /// Abort the batch on the first failure.
    FailFast,
}

/// Per-channel analysis outcome.
#[derive(Clone, Debug, Serialize)]
pub struct ChannelRecord {
    pub source_id: String,
    pub fom_1_db: f64,
    pub fom_2_db: f64,
    /// |fom_1 - fom_2|.
    pub delta_db: f64,
    pub max_abs_sild_db: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchFailure {
    pub source_id: String,
    pub error: String,
}

/// Left-closed right-open bins starting at 0 dB.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub bin_width_db: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bin edges; one more entry than counts.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|i| i as f64 * self.bin_width_db)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of non-negative dB values with the requested bin width.
///
/// Bins extend exactly far enough to cover the data; counts always sum to
/// the input length. Values are clamped at 0 from below.
pub fn histogram(values: &[f64], bin_width: f64) -> Histogram {
    assert!(bin_width > 0.0, "bin_width must be positive");
    let mut counts: Vec<u64> = Vec::new();
    for &v in values {
        let idx = (v.max(0.0) / bin_width).floor() as usize;
        if idx >= counts.len() {
            counts.resize(idx + 1, 0);
        }
        counts[idx] += 1;
    }
    Histogram {
        bin_width_db: bin_width,
        counts,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdFraction {
    pub threshold_db: f64,
    pub fraction: f64,
}

/// Fleet-level summary over the successful records.
#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub schema: String,
    /// Number of inputs presented to the batch, including failures.
    pub count: usize,
    /// Histogram of the worse-direction FOM per channel.
    pub histogram: Histogram,
    /// Fraction of channels whose directional FOM difference exceeds each
    /// threshold.
    pub fraction_delta_exceeding: Vec<ThresholdFraction>,
    pub failures: Vec<BatchFailure>,
}

impl BatchSummary {
    /// Fraction for a threshold, when that threshold is reported.
    pub fn fraction_exceeding(&self, threshold_db: f64) -> Option<f64> {
        self.fraction_delta_exceeding
            .iter()
            .find(|t| (t.threshold_db - threshold_db).abs() < 1e-12)
            .map(|t| t.fraction)
    }
}

/// Analyze one Touchstone file into a record.
pub fn analyze_file(path: &Path, cfg: &FomConfig) -> Result<ChannelRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let net = parse_touchstone(&text, None)?;
    let result = sild(&net)?;
    let fom = fom_sild(&result, cfg)?;
    let worst = max_abs_sild(&result, cfg.f_max.min(result.grid().max_freq()))?;
    let mut warnings = result.warnings.clone();
    warnings.extend(fom.warnings.iter().cloned());
    Ok(ChannelRecord {
        source_id: path.display().to_string(),
        fom_1_db: fom.fom_1,
        fom_2_db: fom.fom_2,
        delta_db: (fom.fom_1 - fom.fom_2).abs(),
        max_abs_sild_db: worst.value_db,
        warnings,
    })
}

/// Analyze a collection of files and summarize the fleet.
///
/// Under `Continue` unparseable inputs become entries in
/// `BatchSummary::failures`; under `FailFast` the first error aborts the
/// batch. Records are sorted by `source_id`.
pub fn analyze_batch(
    inputs: &[PathBuf],
    cfg: &FomConfig,
    policy: ErrorPolicy,
) -> Result<(Vec<ChannelRecord>, BatchSummary)> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    cfg.validate()?;

    let mut records: Vec<ChannelRecord> = Vec::new();
    let mut failures: Vec<BatchFailure> = Vec::new();
    match policy {
        ErrorPolicy::FailFast => {
            for path in inputs {
                records.push(analyze_file(path, cfg)?);
            }
        }
        ErrorPolicy::Continue => {
            let outcomes: Vec<(String, Result<ChannelRecord>)> = inputs
                .par_iter()
                .map(|p| (p.display().to_string(), analyze_file(p, cfg)))
                .collect();
            for (source_id, outcome) in outcomes {
                match outcome {
                    Ok(r) => records.push(r),
                    Err(e) => failures.push(BatchFailure {
                        source_id,
                        error: e.to_string(),
                    }),
                }
            }
        }
    }
    records.sort_by(|a, b| a.source_id.cmp(&b.source_id));
    failures.sort_by(|a, b| a.source_id.cmp(&b.source_id));

    let worse_fom: Vec<f64> = records.iter().map(|r| r.fom_1_db.max(r.fom_2_db)).collect();
    let mut hist = histogram(&worse_fom, DEFAULT_BIN_WIDTH_DB);
    let min_bins = (DEFAULT_HISTOGRAM_SPAN_DB / DEFAULT_BIN_WIDTH_DB).round() as usize;
    if hist.counts.len() < min_bins {
        hist.counts.resize(min_bins, 0);
    }

    let n_ok = records.len().max(1);
    let fraction_delta_exceeding = DEFAULT_DELTA_THRESHOLDS
        .iter()
        .map(|&thr| ThresholdFraction {
            threshold_db: thr,
            fraction: records.iter().filter(|r| r.delta_db > thr).count() as f64 / n_ok as f64,
        })
        .collect();

    let summary = BatchSummary {
        schema: "sild-batch-summary/1".into(),
        count: inputs.len(),
        histogram: hist,
        fraction_delta_exceeding,
        failures,
    };
    Ok((records, summary))
}

/// CSV rendering of the records, header included, deterministic formatting.
pub fn records_to_csv(records: &[ChannelRecord]) -> String {
    let mut out = String::from("source_id,fom_1_db,fom_2_db,delta_db,max_abs_sild_db,warnings\n");
    for r in records {
        out.push_str(&csv_field(&r.source_id));
        for v in [r.fom_1_db, r.fom_2_db, r.delta_db, r.max_abs_sild_db] {
            out.push(',');
            out.push_str(&format!("{v:.12e}"));
        }
        out.push(',');
        out.push_str(&csv_field(&r.warnings.join("; ")));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// JSON rendering of the summary.
pub fn summary_to_json(summary: &BatchSummary) -> String {
    serde_json::to_string_pretty(summary).expect("summary serializes")
}
