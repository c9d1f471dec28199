//! Condition reports: the common output shape of every checker.
//!
//! Asymptotic conditions ("bounded", "tends to zero") are undecidable from a
//! finite truncation, so a verdict of `holds` is always qualified as
//! holds-on-truncation and every report records the truncation `K` it was
//! computed on. A `fails` verdict always carries a concrete witness.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::real;

/// Outcome of a condition check on a finite truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No violation found up to the truncation; not a proof of the asymptotic claim.
    HoldsOnTruncation,
    /// An explicit violation was found; see the witness.
    Fails,
    /// The truncation carries too little information to decide.
    Inconclusive,
}

/// Tail behaviour classification of an index series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Vanishing,
    Growing,
}

/// Index (or index pair) pinning down where an extremum or violation occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

impl Witness {
    pub fn single(i: usize) -> Self {
        Witness { i, j: None }
    }

    pub fn pair(i: usize, j: usize) -> Self {
        Witness { i, j: Some(j) }
    }
}

/// Thresholds for the tail-heuristic trend classification.
///
/// The maximum over the last third of the series is compared against the
/// maximum over the middle third; a ratio below `vanish_ratio` reads as
/// vanishing, one up to `bounded_ratio` as bounded, anything larger as growing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendConfig {
    pub vanish_ratio: f64,
    pub bounded_ratio: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        // 0.55 rather than 0.5: the canonical vanishing series 1/j lands exactly
        // on a last-third/middle-third ratio of 1/2.
        TrendConfig { vanish_ratio: 0.55, bounded_ratio: 1.05 }
    }
}

/// Result of a single condition check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    /// The condition's index value (a sup over the truncation), `inf` as sentinel.
    pub index_value: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<Trend>,
    /// Truncation length the report was computed on.
    #[serde(rename = "K")]
    pub truncation: usize,
}

/// Classifies the tail behaviour of a series given in the log domain.
///
/// Returns `None` for series too short to split into thirds meaningfully.
pub fn classify_trend_log(log_values: &[f64], cfg: &TrendConfig) -> Option<Trend> {
    let n = log_values.len();
    if n < 3 {
        return None;
    }
    let (mid, last) = if n < 6 {
        // Too short for thirds; compare last entry against first.
        (log_values[0], log_values[n - 1])
    } else {
        let a = n / 3;
        let b = 2 * n / 3;
        let max_of = |s: &[f64]| s.iter().cloned().fold(f64::NEG_INFINITY, real::max);
        (max_of(&log_values[a..b]), max_of(&log_values[b..]))
    };
    let ratio = real::exp(last - mid);
    Some(if ratio < cfg.vanish_ratio {
        Trend::Vanishing
    } else if ratio <= cfg.bounded_ratio {
        Trend::Bounded
    } else {
        Trend::Growing
    })
}

/// Max of a log-domain series together with its arg-max offset.
pub fn log_max_with_witness(log_values: &[f64]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in log_values.iter().enumerate() {
        match best {
            Some((bv, _)) if v <= bv => {}
            _ => best = Some((v, i)),
        }
    }
    best
}

pub(crate) fn series_report(
    name: &str,
    log_values: &[f64],
    first_index: usize,
    truncation: usize,
    cfg: &TrendConfig,
) -> ConditionReport {
    let (log_max, arg) = log_max_with_witness(log_values).unwrap_or((f64::NEG_INFINITY, 0));
    let trend = classify_trend_log(log_values, cfg);
    let verdict = match trend {
        Some(Trend::Growing) => Verdict::Fails,
        Some(_) => Verdict::HoldsOnTruncation,
        None => Verdict::Inconclusive,
    };
    let witness = if log_values.is_empty() {
        None
    } else if verdict == Verdict::Fails {
        // Witness the tail maximum that exhibits the growth.
        let tail_start = 2 * log_values.len() / 3;
        let (_, tail_arg) =
            log_max_with_witness(&log_values[tail_start.min(log_values.len() - 1)..]).unwrap();
        Some(Witness::single(first_index + tail_start.min(log_values.len() - 1) + tail_arg))
    } else {
        Some(Witness::single(first_index + arg))
    };
    ConditionReport {
        name: String::from(name),
        index_value: real::exp(log_max),
        verdict,
        witness,
        trend,
        truncation,
    }
}
