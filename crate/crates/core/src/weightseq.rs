//! Weight sequences `M = (M_j)`, base sequences `(k_j)`, and growth checkers.
//!
//! A weight sequence satisfies `M_0 = 1 <= M_1 <= mu_2 <= mu_3 <= ...` with
//! `mu_k = M_k/M_{k-1}`; then `m_k = M_k^{1/k}` is nondecreasing as well. All
//! arithmetic is done on `ln M_j` tables: quantities like
//! `(M_{j+k}/(M_j M_k))^{1/(j+k)}` are formed as log-differences and only
//! exponentiated for display, so doubly exponential tables stay representable.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real;
use crate::report::{self, ConditionReport, Trend, TrendConfig, Verdict, Witness};
use crate::weightfn::WeightFunctionSpec;
use crate::{Error, Result};

/// Default truncation length.
pub const DEFAULT_K: usize = 512;

/// Recipe for building a weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// Gevrey sequence `M_k = k^{sk}`, `s >= 1`.
    Gevrey {
        s: f64,
        #[serde(rename = "K", default = "default_k")]
        k: usize,
    },
    /// Factorial power `M_k = (k!)^s`.
    FactorialPower {
        s: f64,
        #[serde(rename = "K", default = "default_k")]
        k: usize,
    },
    /// Explicit log-table `ln M_j` (or plain values via `values`).
    Table {
        #[serde(rename = "logM", default, skip_serializing_if = "Option::is_none")]
        log_m: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
    },
    /// Associated sequence `M^(rho)` of a weight function.
    FromOmega {
        omega: WeightFunctionSpec,
        rho: f64,
        #[serde(rename = "K", default = "default_k")]
        k: usize,
    },
}

fn default_k() -> usize {
    DEFAULT_K
}

/// A positive sequence stored as `ln M_j`, `j = 0..=K`, with `M_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    #[serde(rename = "logM")]
    log_m: Vec<f64>,
    label: String,
    is_weight_sequence: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight_violation: Option<usize>,
}

/// Quotient and root profiles of a weight sequence, in the log domain.
///
/// Index 0 of both tables is a placeholder (the quantities start at `k = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceProfile {
    /// `ln mu_k = ln M_k - ln M_{k-1}`.
    pub log_mu: Vec<f64>,
    /// `ln m_k = ln M_k / k`.
    pub log_root: Vec<f64>,
}

impl WeightSequence {
    /// Builds a sequence from a spec; flags whether the weight-sequence axioms
    /// hold on the truncation.
    pub fn build(spec: &SequenceSpec) -> Result<Self> {
        match spec {
            SequenceSpec::Gevrey { s, k } => {
                if *s < 1.0 || !s.is_finite() {
                    return Err(Error::InvalidSpec(format!("gevrey exponent s = {s}, need s >= 1")));
                }
                let log_m = (0..=*k)
                    .map(|j| if j == 0 { 0.0 } else { s * j as f64 * real::ln(j as f64) })
                    .collect();
                Ok(Self::from_log_table_unchecked(log_m, format!("gevrey({s})")))
            }
            SequenceSpec::FactorialPower { s, k } => {
                if *s <= 0.0 || !s.is_finite() {
                    return Err(Error::InvalidSpec(format!("factorial power s = {s}, need s > 0")));
                }
                let log_m = (0..=*k).map(|j| s * real::ln_factorial(j)).collect();
                Ok(Self::from_log_table_unchecked(log_m, format!("factorial^{s}")))
            }
            SequenceSpec::Table { log_m, values } => match (log_m, values) {
                (Some(log_m), None) => Self::from_log_table(log_m.clone(), "table"),
                (None, Some(values)) => Self::from_values(values, "table"),
                _ => Err(Error::InvalidSpec("table needs exactly one of logM/values".to_string())),
            },
            SequenceSpec::FromOmega { omega, rho, k } => {
                let wf = crate::weightfn::WeightFunction::new(omega.clone())?;
                let assoc = crate::weightfn::associated_sequence(&wf, *rho, *k)?;
                Ok(assoc.to_weight_sequence())
            }
        }
    }

    /// Builds from raw positive values `M_j` (entry 0 must be 1).
    pub fn from_values(values: &[f64], label: &str) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if v <= 0.0 {
                return Err(Error::NonPositive { index: i });
            }
        }
        let log_m: Vec<f64> = values.iter().map(|&v| real::ln(v)).collect();
        Self::from_log_table(log_m, label)
    }

    /// Builds from a `ln M_j` table (entry 0 must be 0).
    pub fn from_log_table(log_m: Vec<f64>, label: &str) -> Result<Self> {
        for (i, &v) in log_m.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        if log_m.len() < 3 {
            return Err(Error::TruncationTooShort { needed: 2, have: log_m.len().saturating_sub(1) });
        }
        if real::abs(log_m[0]) > 1e-12 {
            return Err(Error::InvalidSpec(format!("M_0 must be 1 (got ln M_0 = {})", log_m[0])));
        }
        Ok(Self::from_log_table_unchecked(log_m, label.to_string()))
    }

    fn from_log_table_unchecked(log_m: Vec<f64>, label: String) -> Self {
        let violation = weight_axiom_violation(&log_m);
        WeightSequence {
            log_m,
            label,
            is_weight_sequence: violation.is_none(),
            weight_violation: violation,
        }
    }

    /// Truncation length `K` (indices run `0..=K`).
    pub fn truncation(&self) -> usize {
        self.log_m.len() - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `ln M_j`.
    pub fn log_m(&self, j: usize) -> f64 {
        self.log_m[j]
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_m
    }

    /// Whether `M_0 = 1 <= M_1 <= mu_2 <= ...` holds on the truncation.
    pub fn is_weight_sequence(&self) -> bool {
        self.is_weight_sequence
    }

    /// First index violating the weight-sequence axioms, if any.
    pub fn weight_violation(&self) -> Option<usize> {
        self.weight_violation
    }

    /// Quotients `mu_k` and roots `m_k` in the log domain.
    pub fn profile(&self) -> SequenceProfile {
        let k_max = self.truncation();
        let mut log_mu = Vec::with_capacity(k_max + 1);
        let mut log_root = Vec::with_capacity(k_max + 1);
        log_mu.push(0.0);
        log_root.push(0.0);
        for k in 1..=k_max {
            log_mu.push(self.log_m[k] - self.log_m[k - 1]);
            log_root.push(self.log_m[k] / k as f64);
        }
        let profile = SequenceProfile { log_mu, log_root };
        if self.is_weight_sequence {
            // mu nondecreasing forces m nondecreasing.
            debug_assert!(profile.root_nondecreasing(1e-9));
        }
        profile
    }

    /// Rescales `M_k -> t^k M_k`.
    pub fn scaled(&self, t: f64) -> Self {
        let log_t = real::ln(t);
        let log_m: Vec<f64> =
            self.log_m.iter().enumerate().map(|(k, &v)| v + k as f64 * log_t).collect();
        Self::from_log_table_unchecked(log_m, format!("{}*{}^k", self.label, t))
    }
}

impl SequenceProfile {
    pub fn root_nondecreasing(&self, tol: f64) -> bool {
        self.log_root.windows(2).skip(1).all(|w| w[1] >= w[0] - tol)
    }
}

fn weight_axiom_violation(log_m: &[f64]) -> Option<usize> {
    // 0 <= ln M_1 <= ln mu_2 <= ln mu_3 <= ...
    if log_m.len() < 2 || log_m[1] < -1e-12 {
        return Some(1);
    }
    let mut prev = log_m[1];
    for k in 2..log_m.len() {
        let mu = log_m[k] - log_m[k - 1];
        if mu < prev - 1e-12 {
            return Some(k);
        }
        prev = mu;
    }
    None
}

/// Strictly increasing integer orders with `k_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSequence {
    k: Vec<u64>,
}

impl BaseSequence {
    pub fn new(k: Vec<u64>) -> Result<Self> {
        if k.is_empty() || k[0] != 0 {
            return Err(Error::InvalidSpec("base sequence must start with k_0 = 0".to_string()));
        }
        if let Some(w) = k.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(format!(
                "base sequence not strictly increasing at j = {}",
                w + 1
            )));
        }
        Ok(BaseSequence { k })
    }

    /// `k_j = step * j` for `j = 0..count`.
    pub fn arithmetic(step: u64, count: usize) -> Self {
        BaseSequence { k: (0..count as u64).map(|j| step * j).collect() }
    }

    pub fn orders(&self) -> &[u64] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn last(&self) -> u64 {
        *self.k.last().unwrap()
    }

    /// Bracket `(k_j, k_{j+1})` with `k_j <= l < k_{j+1}`.
    pub fn bracket(&self, l: u64) -> Option<(u64, u64)> {
        let pos = self.k.partition_point(|&k| k <= l);
        if pos == 0 || pos >= self.k.len() {
            return None;
        }
        Some((self.k[pos - 1], self.k[pos]))
    }
}

/// Derivation-closure and moderate-growth indices with witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndices {
    /// `sup_k (M_{k+1}/M_k)^{1/(k+1)}` on the truncation.
    pub dc: ConditionReport,
    /// `sup_{j,k} (M_{j+k}/(M_j M_k))^{1/(j+k)}` on the truncation.
    pub mg: ConditionReport,
}

/// Computes the derivation-closure and moderate-growth indices.
pub fn growth_indices(m: &WeightSequence, cfg: &TrendConfig) -> Result<GrowthIndices> {
    let k_max = m.truncation();
    if k_max < 2 {
        return Err(Error::TruncationTooShort { needed: 2, have: k_max });
    }
    let dc_series: Vec<f64> =
        (0..k_max).map(|k| (m.log_m(k + 1) - m.log_m(k)) / (k + 1) as f64).collect();
    let dc = report::series_report("dc_index", &dc_series, 0, k_max, cfg);

    // Moderate growth: reduce over diagonals s = j + k so a trend is readable.
    let mut shell_max = Vec::with_capacity(k_max - 1);
    let mut best = f64::NEG_INFINITY;
    let mut best_pair = (1, 1);
    for s in 2..=k_max {
        let mut sm = f64::NEG_INFINITY;
        for j in 1..s {
            let k = s - j;
            let v = (m.log_m(s) - m.log_m(j) - m.log_m(k)) / s as f64;
            if v > sm {
                sm = v;
            }
            if v > best {
                best = v;
                best_pair = (j, k);
            }
        }
        shell_max.push(sm);
    }
    let mut mg = report::series_report("mg_index", &shell_max, 2, k_max, cfg);
    mg.index_value = real::exp(best);
    mg.witness = Some(Witness::pair(best_pair.0, best_pair.1));
    if mg.verdict == Verdict::Fails {
        // Keep the tail witness convention: report the shell where growth shows.
        let tail_start = 2 * shell_max.len() / 3;
        if let Some((_, arg)) = report::log_max_with_witness(&shell_max[tail_start..]) {
            let s = 2 + tail_start + arg;
            // arg-max pair within that shell
            let mut bj = 1;
            let mut bv = f64::NEG_INFINITY;
            for j in 1..s {
                let v = (m.log_m(s) - m.log_m(j) - m.log_m(s - j)) / s as f64;
                if v > bv {
                    bv = v;
                    bj = j;
                }
            }
            mg.witness = Some(Witness::pair(bj, s - bj));
        }
    }
    Ok(GrowthIndices { dc, mg })
}

/// `sup_j k_{j+1}/k_j`: bounded means the base sequence is *special*.
pub fn base_sequence_check(k: &BaseSequence, cfg: &TrendConfig) -> ConditionReport {
    let orders = k.orders();
    if orders.len() < 3 {
        return ConditionReport {
            name: String::from("special_base"),
            index_value: f64::INFINITY,
            verdict: Verdict::Inconclusive,
            witness: None,
            trend: None,
            truncation: orders.last().map(|&v| v as usize).unwrap_or(0),
        };
    }
    let ratios: Vec<f64> = orders
        .windows(2)
        .skip(1)
        .map(|w| real::ln(w[1] as f64) - real::ln(w[0] as f64))
        .collect();
    report::series_report("special_base", &ratios, 1, k.last() as usize, cfg)
}

/// `sup_j m_{k_{j+1}} / m'_{k_j}` on the truncation (`m' = m` when `mprime` is `None`).
pub fn lacunary_ratio(
    m: &WeightSequence,
    k: &BaseSequence,
    mprime: Option<&WeightSequence>,
    cfg: &TrendConfig,
) -> Result<ConditionReport> {
    let mp = mprime.unwrap_or(m);
    let trunc = m.truncation().min(mp.truncation());
    if k.last() as usize > trunc {
        return Err(Error::TruncationTooShort { needed: k.last() as usize, have: trunc });
    }
    let prof = m.profile();
    let prof_p = mp.profile();
    let orders = k.orders();
    // Pairs (k_j, k_{j+1}) for j >= 1; k_0 = 0 has no root.
    let series: Vec<f64> = orders
        .windows(2)
        .skip(1)
        .map(|w| prof.log_root[w[1] as usize] - prof_p.log_root[w[0] as usize])
        .collect();
    if series.is_empty() {
        return Ok(ConditionReport {
            name: String::from("lacunary_ratio"),
            index_value: f64::INFINITY,
            verdict: Verdict::Inconclusive,
            witness: None,
            trend: None,
            truncation: trunc,
        });
    }
    Ok(report::series_report("lacunary_ratio", &series, 1, trunc, cfg))
}

/// `sup_j j/m_j`: bounded (resp. vanishing) gates the local Roumieu (resp.
/// Beurling) results. Trend claims are truncation-level evidence only.
pub fn analytic_inclusion_index(m: &WeightSequence, cfg: &TrendConfig) -> ConditionReport {
    let series: Vec<f64> = (1..=m.truncation())
        .map(|j| real::ln(j as f64) - m.log_m(j) / j as f64)
        .collect();
    report::series_report("analytic_inclusion", &series, 1, m.truncation(), cfg)
}

/// The four Liess conditions (a)-(d); (c) is reported as a `g(k)` table, one
/// report per probed `k`.
pub fn liess_report(m: &WeightSequence, n_probe: usize, cfg: &TrendConfig) -> Result<Vec<ConditionReport>> {
    let k_max = m.truncation();
    if n_probe < 2 || n_probe > k_max / 4 {
        return Err(Error::InvalidSpec(format!(
            "n_probe = {n_probe} out of range [2, K/4 = {}]",
            k_max / 4
        )));
    }
    let prof = m.profile();
    let roots = &prof.log_root;
    let mut out = Vec::new();

    // (a) m nondecreasing and j/m_j bounded.
    let mut a = analytic_inclusion_index(m, cfg);
    a.name = String::from("liess_a");
    if let Some(pos) = roots.windows(2).skip(1).position(|w| w[1] < w[0] - 1e-12) {
        a.verdict = Verdict::Fails;
        a.witness = Some(Witness::single(pos + 2));
    }
    out.push(a);

    // (b) m_{j+1}/m_j bounded.
    let b_series: Vec<f64> = (1..k_max).map(|j| roots[j + 1] - roots[j]).collect();
    out.push(report::series_report("liess_b", &b_series, 1, k_max, cfg));

    // (c) g(k) = sup_j m_{kj}/m_j for each probed k.
    for k in 2..=n_probe {
        let series: Vec<f64> = (1..=k_max / k).map(|j| roots[k * j] - roots[j]).collect();
        let mut r = report::series_report("liess_c", &series, 1, k_max, cfg);
        r.name = format!("liess_c_g({k})");
        out.push(r);
    }

    // (d) exists n >= 2 with liminf_j m_{nj}/m_j > 1 (tail minimum on truncation).
    let mut best: Option<(f64, usize, usize)> = None;
    for n in 2..=n_probe {
        let j_max = k_max / n;
        let tail_start = (j_max / 2).max(1);
        let mut tail_min = f64::INFINITY;
        let mut arg = tail_start;
        for j in tail_start..=j_max {
            let v = roots[n * j] - roots[j];
            if v < tail_min {
                tail_min = v;
                arg = j;
            }
        }
        match best {
            Some((bv, _, _)) if tail_min <= bv => {}
            _ => best = Some((tail_min, n, arg)),
        }
    }
    let (log_a, n_star, arg) = best.unwrap();
    let holds = log_a > 1e-9;
    out.push(ConditionReport {
        name: String::from("liess_d"),
        index_value: real::exp(log_a),
        verdict: if holds { Verdict::HoldsOnTruncation } else { Verdict::Fails },
        witness: Some(if holds { Witness::single(n_star) } else { Witness::pair(n_star, arg) }),
        trend: None,
        truncation: k_max,
    });
    Ok(out)
}

/// Result of the triple-scan conditions `m_j <= m_i m_k` / `m_j <= C m_i m_k`
/// over `i < j < ik`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlbanoReport {
    /// Smallest `i_0` such that no violating triple has `i > i_0` (index_value),
    /// or `fails` when violations persist to the edge of the truncation.
    pub plain: ConditionReport,
    /// Smallest constant `C` on the truncation.
    pub with_constant: ConditionReport,
    /// Whether the `(i, j = 2i, k = 3)` specialization trend agrees with the
    /// moderate-growth trend from `growth_indices`.
    pub mg_consistent: bool,
}

/// Scans all triples `i < j < ik` within the truncation.
pub fn albano_check(m: &WeightSequence, cfg: &TrendConfig) -> Result<AlbanoReport> {
    let k_max = m.truncation();
    let prof = m.profile();
    let roots = &prof.log_root;
    // suffix_min[k] = min_{k' >= k} ln m_{k'}
    let mut suffix_min = alloc::vec![f64::INFINITY; k_max + 2];
    for k in (1..=k_max).rev() {
        suffix_min[k] = real::min(roots[k], suffix_min[k + 1]);
    }

    let mut i0: usize = 0;
    let mut worst_log_c = f64::NEG_INFINITY;
    let mut worst = (1usize, 2usize);
    for i in 1..=k_max {
        for j in (i + 1)..=k_max {
            let k_min = j / i + 1; // smallest k with j < ik
            if k_min > k_max {
                continue;
            }
            let log_c = roots[j] - roots[i] - suffix_min[k_min];
            if log_c > worst_log_c {
                worst_log_c = log_c;
                worst = (i, j);
            }
            if log_c > 1e-12 && i > i0 {
                i0 = i;
            }
        }
    }

    let plain_fails = i0 >= k_max.saturating_sub(2).max(1);
    let plain = ConditionReport {
        name: String::from("albano"),
        index_value: i0 as f64,
        verdict: if plain_fails { Verdict::Fails } else { Verdict::HoldsOnTruncation },
        witness: if i0 > 0 { Some(Witness::single(i0)) } else { None },
        trend: None,
        truncation: k_max,
    };
    let with_constant = ConditionReport {
        name: String::from("albano_c"),
        index_value: real::max(real::exp(worst_log_c), 1.0),
        verdict: Verdict::HoldsOnTruncation,
        witness: Some(Witness::pair(worst.0, worst.1)),
        trend: None,
        truncation: k_max,
    };

    // Specialization (i, j = 2i, k = 3) against the moderate-growth trend.
    let spec_series: Vec<f64> =
        (2..=k_max / 2).map(|i| roots[2 * i] - roots[i] - roots[3.min(k_max)]).collect();
    let spec_trend = report::classify_trend_log(&spec_series, cfg);
    let gi = growth_indices(m, cfg)?;
    let mg_consistent = match (spec_trend, gi.mg.trend) {
        (Some(Trend::Growing), t) => t == Some(Trend::Growing),
        (Some(_), t) => t != Some(Trend::Growing),
        (None, _) => true,
    };
    Ok(AlbanoReport { plain, with_constant, mg_consistent })
}
