//! Weight functions `omega`, numerical Legendre conjugation, and associated
//! sequences `M^(rho)_k = exp(phi*(rho k)/rho)` where `phi(t) = omega(e^t)`.
//!
//! `phi` is convex for a valid weight function, so `t -> st - phi(t)` is
//! concave and the conjugate `phi*(s) = sup_{t>=0}(st - phi(t))` is computed by
//! golden-section search on an adaptively doubled bracket.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real;
use crate::report::{self, ConditionReport, Trend, TrendConfig, Verdict, Witness};
use crate::weightseq::WeightSequence;
use crate::{Error, Result};

/// Built-in weight function atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunctionSpec {
    /// `omega(t) = t`.
    Linear,
    /// `omega(t) = t^a`, `0 < a <= 1`.
    Power { a: f64 },
    /// `omega(t) = max(0, ln t)^s`, `s > 1`; vanishes on `[0, 1]`.
    LogPower { s: f64 },
    /// `omega(t) = t / ln(e + t)`.
    LinearOverLog,
}

/// A validated weight function with evaluators for `omega` and `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    spec: WeightFunctionSpec,
    normalized: bool,
}

/// Grid used for the asymptotic validity checks: geometric, 1e-2 to 1e6.
pub const GRID_POINTS: usize = 4096;
const GRID_LO: f64 = 1e-2;
const GRID_HI: f64 = 1e6;

const T_MAX: f64 = 1e12;

impl WeightFunction {
    pub fn new(spec: WeightFunctionSpec) -> Result<Self> {
        let normalized = match &spec {
            WeightFunctionSpec::Linear | WeightFunctionSpec::LinearOverLog => false,
            WeightFunctionSpec::Power { a } => {
                if !(*a > 0.0 && *a <= 1.0) {
                    return Err(Error::InvalidSpec(format!("power exponent a = {a}, need 0 < a <= 1")));
                }
                false
            }
            WeightFunctionSpec::LogPower { s } => {
                if !(*s > 1.0) || !s.is_finite() {
                    return Err(Error::InvalidSpec(format!("log power s = {s}, need s > 1")));
                }
                true
            }
        };
        Ok(WeightFunction { spec, normalized })
    }

    pub fn spec(&self) -> &WeightFunctionSpec {
        &self.spec
    }

    /// Whether `omega` vanishes on `[0, 1]`.
    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn label(&self) -> String {
        match &self.spec {
            WeightFunctionSpec::Linear => String::from("t"),
            WeightFunctionSpec::Power { a } => format!("t^{a}"),
            WeightFunctionSpec::LogPower { s } => format!("ln^{s}"),
            WeightFunctionSpec::LinearOverLog => String::from("t/ln(e+t)"),
        }
    }

    /// `omega(t)` for `t >= 0`.
    pub fn omega(&self, t: f64) -> f64 {
        match &self.spec {
            WeightFunctionSpec::Linear => t,
            WeightFunctionSpec::Power { a } => real::powf(t, *a),
            WeightFunctionSpec::LogPower { s } => {
                if t <= 1.0 {
                    0.0
                } else {
                    real::powf(real::ln(t), *s)
                }
            }
            WeightFunctionSpec::LinearOverLog => t / real::ln(core::f64::consts::E + t),
        }
    }

    /// `phi(t) = omega(e^t)` in closed form per atom, so large `t` does not
    /// round-trip through an overflowing `e^t`.
    pub fn phi(&self, t: f64) -> f64 {
        match &self.spec {
            WeightFunctionSpec::Linear => real::exp(t),
            WeightFunctionSpec::Power { a } => real::exp(a * t),
            WeightFunctionSpec::LogPower { s } => real::powf(real::max(t, 0.0), *s),
            WeightFunctionSpec::LinearOverLog => {
                if t > 690.0 {
                    // ln(e + e^t) = t to double precision here.
                    real::exp(t - real::ln(t))
                } else {
                    real::exp(t) / real::ln(core::f64::consts::E + real::exp(t))
                }
            }
        }
    }

    /// Grid-level evidence for the weight-function axioms: monotonicity,
    /// `omega(0) = 0`, convexity of `phi`, `log t = o(omega)`, and the doubling
    /// index `sup omega(2t)/omega(t)`.
    pub fn validity_report(&self, cfg: &TrendConfig) -> Vec<ConditionReport> {
        let ts = grid();
        let n = ts.len();
        let mut out = Vec::with_capacity(5);

        let origin_ok = real::abs(self.omega(0.0)) < 1e-12;
        out.push(ConditionReport {
            name: String::from("omega_origin"),
            index_value: real::abs(self.omega(0.0)),
            verdict: if origin_ok { Verdict::HoldsOnTruncation } else { Verdict::Fails },
            witness: None,
            trend: None,
            truncation: n,
        });

        let vals: Vec<f64> = ts.iter().map(|&t| self.omega(t)).collect();
        let mono_viol = vals.windows(2).position(|w| w[1] < w[0] - 1e-12);
        out.push(ConditionReport {
            name: String::from("omega_nondecreasing"),
            index_value: 0.0,
            verdict: if mono_viol.is_none() { Verdict::HoldsOnTruncation } else { Verdict::Fails },
            witness: mono_viol.map(|i| Witness::single(i + 1)),
            trend: None,
            truncation: n,
        });

        // phi convexity on a uniform grid in u = ln t.
        let u_lo = real::ln(GRID_LO);
        let du = (real::ln(GRID_HI) - u_lo) / (n - 1) as f64;
        let phis: Vec<f64> = (0..n).map(|i| self.phi(u_lo + du * i as f64)).collect();
        let conv_viol = phis
            .windows(3)
            .position(|w| w[2] - 2.0 * w[1] + w[0] < -1e-9 * (1.0 + real::abs(w[1])));
        out.push(ConditionReport {
            name: String::from("phi_convex"),
            index_value: 0.0,
            verdict: if conv_viol.is_none() { Verdict::HoldsOnTruncation } else { Verdict::Fails },
            witness: conv_viol.map(|i| Witness::single(i + 1)),
            trend: None,
            truncation: n,
        });

        // log t = o(omega(t)): omega(t)/ln t should grow along the tail.
        let little_o: Vec<f64> = ts
            .iter()
            .zip(vals.iter())
            .filter(|(&t, &v)| t > core::f64::consts::E && v > 0.0)
            .map(|(&t, &v)| real::ln(v) - real::ln(real::ln(t)))
            .collect();
        let trend = report::classify_trend_log(&little_o, cfg);
        out.push(ConditionReport {
            name: String::from("log_little_o"),
            index_value: little_o.last().map(|&v| real::exp(v)).unwrap_or(0.0),
            verdict: match trend {
                Some(Trend::Growing) => Verdict::HoldsOnTruncation,
                Some(_) => Verdict::Fails,
                None => Verdict::Inconclusive,
            },
            witness: None,
            trend,
            truncation: n,
        });

        // omega(2t) = O(omega(t)).
        let doubling: Vec<f64> = ts
            .iter()
            .zip(vals.iter())
            .filter(|(_, &v)| v > 0.0)
            .map(|(&t, &v)| real::ln(self.omega(2.0 * t)) - real::ln(v))
            .collect();
        out.push(report::series_report("omega_doubling", &doubling, 0, n, cfg));
        out
    }
}

fn grid() -> Vec<f64> {
    let lo = real::ln(GRID_LO);
    let hi = real::ln(GRID_HI);
    let n = GRID_POINTS;
    (0..n).map(|i| real::exp(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    while b - a > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, g(t))
}

/// Legendre conjugate `phi*(s) = sup_{t >= 0} (st - phi(t))`.
pub fn conjugate(w: &WeightFunction, s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidSpec(format!("conjugate probe s = {s}, need s >= 0")));
    }
    let g = |t: f64| s * t - w.phi(t);
    // Double the bracket while the objective keeps rising.
    let mut hi = 1.0;
    while g(2.0 * hi) > g(hi) {
        hi *= 2.0;
        if hi > T_MAX {
            return Err(Error::BracketFailed { s, t_max: T_MAX });
        }
    }
    let (_, val) = golden_max(g, 0.0, 2.0 * hi, 1e-12 * real::max(1.0, 2.0 * hi));
    // The boundary t = 0 can beat the interior when s is below phi'(0+).
    Ok(real::max(val, g(0.0)))
}

/// The sequence `logM[k] = phi*(rho k)/rho`, `k = 0..=K`, kept unshifted so
/// closed forms like `M^(rho)_k = (rho k/e)^k` for `omega(t) = t` are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedSequence {
    rho: f64,
    log_m: Vec<f64>,
    label: String,
}

impl AssociatedSequence {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn truncation(&self) -> usize {
        self.log_m.len() - 1
    }

    /// `ln M^(rho)_k` (unshifted).
    pub fn log_m(&self, k: usize) -> f64 {
        self.log_m[k]
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_m
    }

    /// `ln m^(rho)_k = ln M^(rho)_k / k`, `k >= 1`.
    pub fn log_root(&self, k: usize) -> f64 {
        self.log_m[k] / k as f64
    }

    /// Converts to a weight sequence by shifting all entries by `-ln M_0`;
    /// the shift is a constant factor `exp(-phi*(0)/rho)` recorded in the label.
    pub fn to_weight_sequence(&self) -> WeightSequence {
        let shift = self.log_m[0];
        let shifted: Vec<f64> = self.log_m.iter().map(|&v| v - shift).collect();
        let label = if real::abs(shift) < 1e-12 {
            self.label.clone()
        } else {
            format!("{} shifted by {:e}", self.label, -shift)
        };
        WeightSequence::from_log_table(shifted, &label)
            .expect("associated sequence log-table is finite")
    }
}

/// Builds `M^(rho)` on `0..=K`.
pub fn associated_sequence(w: &WeightFunction, rho: f64, k: usize) -> Result<AssociatedSequence> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidSpec(format!("rho = {rho}, need rho > 0")));
    }
    if k < 8 {
        return Err(Error::TruncationTooShort { needed: 8, have: k });
    }
    let log_m = (0..=k).map(|j| conjugate(w, rho * j as f64).map(|v| v / rho)).collect::<Result<Vec<f64>>>()?;
    Ok(AssociatedSequence { rho, log_m, label: format!("M^({rho})[{}]", w.label()) })
}

/// Smallest `H` in `{2, 4, 8, ...}` with `sigma^k M^(rho)_k <= C M^(H rho)_k`
/// stable on the truncation; returns `(H, C)`.
pub fn bmt_absorption(w: &WeightFunction, sigma: f64, rho: f64, k: usize) -> Result<(f64, f64)> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSpec(format!("sigma = {sigma}, need sigma > 0")));
    }
    if sigma <= 1.0 {
        // sigma^k M^(rho)_k <= M^(rho)_k already.
        return Ok((1.0, 1.0));
    }
    const H_MAX: f64 = 1024.0;
    let base = associated_sequence(w, rho, k)?;
    let log_sigma = real::ln(sigma);
    let mut h = 2.0;
    let mut best_sup = f64::INFINITY;
    while h <= H_MAX {
        let scaled = associated_sequence(w, h * rho, k)?;
        let d: Vec<f64> =
            (0..=k).map(|j| j as f64 * log_sigma + base.log_m(j) - scaled.log_m(j)).collect();
        let sup_all = d.iter().cloned().fold(f64::NEG_INFINITY, real::max);
        let cut = 2 * (k + 1) / 3;
        let sup_head = d[..cut].iter().cloned().fold(f64::NEG_INFINITY, real::max);
        let sup_tail = d[cut..].iter().cloned().fold(f64::NEG_INFINITY, real::max);
        // Stable: the sup is already attained before the tail third.
        if sup_all.is_finite() && sup_tail <= sup_head + 1e-9 {
            return Ok((h, real::exp(sup_all)));
        }
        best_sup = real::min(best_sup, sup_all);
        h *= 2.0;
    }
    Err(Error::AbsorptionFailed { sigma, best_sup })
}

/// Checks `M^(rho)_{j+k} <= M^(2 rho)_j M^(2 rho)_k` over `j + k <= K`.
///
/// Holds exactly for any valid `omega` by convexity of `phi*`; the report
/// carries the worst log-margin (lhs minus rhs, nonpositive when it holds).
pub fn ommg_check(w: &WeightFunction, rho: f64, k: usize) -> Result<ConditionReport> {
    let single = associated_sequence(w, rho, k)?;
    let double = associated_sequence(w, 2.0 * rho, k)?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = (0, 0);
    for j in 0..=k {
        for i in 0..=(k - j) {
            let margin = single.log_m(j + i) - double.log_m(j) - double.log_m(i);
            if margin > worst {
                worst = margin;
                worst_pair = (j, i);
            }
        }
    }
    let holds = worst <= 1e-9;
    Ok(ConditionReport {
        name: String::from("ommg"),
        index_value: worst,
        verdict: if holds { Verdict::HoldsOnTruncation } else { Verdict::Fails },
        witness: Some(Witness::pair(worst_pair.0, worst_pair.1)),
        trend: None,
        truncation: k,
    })
}
