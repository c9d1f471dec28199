//! Bound-propagation engines: from derivative bounds known only at lacunary
//! orders `k_j` to certified all-order bounds with tracked constants.
//!
//! Every engine follows the same shape: convert the multi-index input bound to
//! directional bounds, geometrically interpolate between the bracketing orders
//! `(k_j, k_{j+1})`, and reassemble multi-index bounds by polarization. The
//! per-order bounds `B_l` are stored in the log domain (their `l`-th powers
//! overflow immediately) and every certificate asserts its own envelope claim
//! `B_l <= C_out (rho_out m'_l)^l` at emission.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real;
use crate::report::{ConditionReport, Trend, TrendConfig, Verdict};
use crate::weightseq::{self, BaseSequence, WeightSequence};
use crate::{Error, Result};

/// Input data: bounds `C (rho m_{k_j})^{k_j}` at the base orders, target
/// comparison sequence `m'` (defaults to `m`), ambient dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LacunaryInput {
    pub k: BaseSequence,
    pub m: WeightSequence,
    pub mprime: Option<WeightSequence>,
    pub c: f64,
    pub rho: f64,
    pub n: usize,
}

impl LacunaryInput {
    pub fn new(
        k: BaseSequence,
        m: WeightSequence,
        mprime: Option<WeightSequence>,
        c: f64,
        rho: f64,
        n: usize,
    ) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidSpec(alloc::format!("C = {c}, need C > 0")));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidSpec(alloc::format!("rho = {rho}, need rho > 0")));
        }
        if n < 1 {
            return Err(Error::InvalidSpec(String::from("dimension n must be >= 1")));
        }
        let trunc = match &mprime {
            Some(mp) => m.truncation().min(mp.truncation()),
            None => m.truncation(),
        };
        if k.last() as usize > trunc {
            return Err(Error::TruncationTooShort { needed: k.last() as usize, have: trunc });
        }
        if let Some(mp) = &mprime {
            let (a, b) = (m.profile(), mp.profile());
            for j in 1..=trunc {
                if a.log_root[j] > b.log_root[j] + 1e-12 {
                    return Err(Error::InvalidSpec(alloc::format!(
                        "m_j <= m'_j violated at j = {j}"
                    )));
                }
            }
        }
        Ok(LacunaryInput { k, m, mprime, c, rho, n })
    }

    fn truncation(&self) -> usize {
        match &self.mprime {
            Some(mp) => self.m.truncation().min(mp.truncation()),
            None => self.m.truncation(),
        }
    }

    /// `(ln m_j, ln m'_j)` tables (index 0 is a placeholder).
    fn roots(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self.m.profile().log_root;
        let b = match &self.mprime {
            Some(mp) => mp.profile().log_root,
            None => a.clone(),
        };
        (a, b)
    }

    /// `ln C_2` where `C_2 = max{1, m_{k_1}/m'_1, sup_{j>=1} m_{k_{j+1}}/m'_{k_j}}`,
    /// the lacunary ratio including the leading `(k_0, k_1)` bracket.
    /// Errors when the ratio grows along the truncation.
    fn log_ratio_bound(&self, cfg: &TrendConfig) -> Result<f64> {
        let r = weightseq::lacunary_ratio(&self.m, &self.k, self.mprime.as_ref(), cfg)?;
        if r.verdict == Verdict::Fails {
            return Err(Error::UnboundedRatio {
                name: "lacunary_ratio",
                witness: r.witness.map(|w| w.i).unwrap_or(0),
            });
        }
        let (rm, rp) = self.roots();
        let k1 = self.k.orders()[1] as usize;
        let mut ln_r = real::max(0.0, rm[k1] - rp[1]);
        if r.index_value.is_finite() && r.index_value > 0.0 {
            ln_r = real::max(ln_r, real::ln(r.index_value));
        }
        Ok(ln_r)
    }

    /// `ln a` where `a = sup k_{j+1}/k_j`; errors when the base sequence is
    /// not special.
    fn log_special_bound(&self, cfg: &TrendConfig) -> Result<f64> {
        let r = weightseq::base_sequence_check(&self.k, cfg);
        if r.verdict == Verdict::Fails {
            return Err(Error::NotSpecial { witness: r.witness.map(|w| w.i).unwrap_or(0) });
        }
        let orders = self.k.orders();
        let mut ln_a = 0.0f64;
        for w in orders.windows(2).skip(1) {
            ln_a = real::max(ln_a, real::ln(w[1] as f64 / w[0] as f64));
        }
        Ok(ln_a)
    }
}

/// Which engine produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Global,
    Local,
    Moment,
    IntervalCg,
}

/// Per-order record of the inequality and bracketing pair used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub ell: usize,
    pub bracket: (u64, u64),
    pub theta: f64,
    pub rule: &'static str,
}

/// All-order certified bounds: `B[l]` is `ln B_l`, and the envelope claim is
/// `B_l <= C_out (rho_out m'_l)^l` for every `l` (asserted at construction).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub regime: Regime,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    pub c_out: f64,
    pub log_c_out: f64,
    pub rho_out: f64,
    pub chain_trace: Vec<ChainStep>,
    /// Derived chain constants (artifact values, recorded for reproducibility).
    pub constants: Vec<(&'static str, f64)>,
}

impl BoundCertificate {
    fn emit(
        regime: Regime,
        b: Vec<f64>,
        log_c_out: f64,
        rho_out: f64,
        chain_trace: Vec<ChainStep>,
        constants: Vec<(&'static str, f64)>,
        input: &LacunaryInput,
    ) -> Result<Self> {
        // Envelope soundness: B_l <= C_out (rho_out m'_l)^l.
        let (rm, rp) = input.roots();
        let ln_rho = real::ln(rho_out);
        for (l, &lb) in b.iter().enumerate() {
            let rhs = if l == 0 { log_c_out } else { log_c_out + l as f64 * (ln_rho + rp[l]) };
            assert!(
                lb <= rhs + 1e-12 * (1.0 + rhs.abs()),
                "certificate envelope violated at l = {l}: {lb} > {rhs}"
            );
        }
        // Base-index exactness: B_{k_j} = C (rho m_{k_j})^{k_j}.
        let (ln_c, ln_rho_in) = (real::ln(input.c), real::ln(input.rho));
        for &kj in input.k.orders() {
            let kj = kj as usize;
            if kj >= b.len() {
                break;
            }
            let expect = if kj == 0 { ln_c } else { ln_c + kj as f64 * (ln_rho_in + rm[kj]) };
            assert!(
                (b[kj] - expect).abs() <= 1e-12 * (1.0 + expect.abs()),
                "base-index exactness violated at k_j = {kj}"
            );
        }
        Ok(BoundCertificate {
            regime,
            b,
            c_out: real::exp(log_c_out),
            log_c_out,
            rho_out,
            chain_trace,
            constants,
        })
    }
}

fn resolve_l(input: &LacunaryInput, l: Option<usize>) -> Result<usize> {
    let k_last = input.k.last() as usize;
    let cap = input.truncation().min(k_last);
    match l {
        None => Ok(cap),
        Some(l) if l <= cap => Ok(l),
        // No bracketing pair exists past k_last: refuse rather than extrapolate.
        Some(l) => Err(Error::InvalidSpec(alloc::format!(
            "L = {l} exceeds the last base order {k_last} (extrapolation refused)"
        ))),
    }
}

/// `ln P_l` where `P_l = (1/l!) sum_{k=1}^l C(l,k) k^l`, the exact
/// polarization reassembly factor (its cap is `(2e)^l`).
fn log_polar_factors(l_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(l_max + 1);
    out.push(0.0); // l = 0: identity
    for l in 1..=l_max {
        let lf = l as f64;
        let ln_lfact = real::ln_factorial(l);
        let mut acc = f64::NEG_INFINITY;
        for k in 1..=l {
            let kf = k as f64;
            let ln_binom = ln_lfact - real::ln_factorial(k) - real::ln_factorial(l - k);
            acc = real::ln_add_exp(acc, ln_binom + lf * real::ln(kf));
        }
        let v = acc - ln_lfact;
        debug_assert!(v <= l as f64 * real::ln(2.0 * core::f64::consts::E) + 1e-9);
        out.push(v);
    }
    out
}

/// Whole-space chain: directional conversion (`C_1 = C`, `rho_1 = n rho`),
/// geometric interpolation with constant 2, polarization reassembly. Emits
/// `rho_out = 2e C_2 n rho`, `C_out = 2C`.
pub fn propagate_global(input: &LacunaryInput, l: Option<usize>) -> Result<BoundCertificate> {
    let cfg = TrendConfig::default();
    let l_max = resolve_l(input, l)?;
    let ln_c2 = input.log_ratio_bound(&cfg)?;
    let (rm, _) = input.roots();
    let (ln_c1, rho1) = (real::ln(input.c), input.n as f64 * input.rho);
    let ln_rho1 = real::ln(rho1);
    let polar = log_polar_factors(l_max);

    let mut b = Vec::with_capacity(l_max + 1);
    let mut trace = Vec::with_capacity(l_max + 1);
    for ell in 0..=l_max {
        let (lb, step) = match base_or_bracket(input, ell) {
            Bracketing::Base(kj) => (
                input_log_bound(input, kj, &rm),
                ChainStep { ell, bracket: (kj as u64, kj as u64), theta: 0.0, rule: "base" },
            ),
            Bracketing::Pair(kj, kj1) => {
                let theta = (ell - kj) as f64 / (kj1 - kj) as f64;
                let interp = kj as f64 * (1.0 - theta) * (ln_rho1 + rm[kj.max(1)])
                    + kj1 as f64 * theta * (ln_rho1 + rm[kj1]);
                let interp = if kj == 0 {
                    kj1 as f64 * theta * (ln_rho1 + rm[kj1])
                } else {
                    interp
                };
                (
                    real::ln(2.0) + ln_c1 + interp + polar[ell],
                    ChainStep {
                        ell,
                        bracket: (kj as u64, kj1 as u64),
                        theta,
                        rule: "interp+polar",
                    },
                )
            }
        };
        b.push(lb);
        trace.push(step);
    }

    let rho_out = 2.0 * core::f64::consts::E * real::exp(ln_c2) * rho1;
    BoundCertificate::emit(
        Regime::Global,
        b,
        real::ln(2.0 * input.c),
        rho_out,
        trace,
        alloc::vec![("C1", input.c), ("rho1", rho1), ("C2", real::exp(ln_c2))],
        input,
    )
}

enum Bracketing {
    Base(usize),
    Pair(usize, usize),
}

fn base_or_bracket(input: &LacunaryInput, ell: usize) -> Bracketing {
    if input.k.orders().binary_search(&(ell as u64)).is_ok() {
        return Bracketing::Base(ell);
    }
    let (kj, kj1) = input
        .k
        .bracket(ell as u64)
        .expect("resolve_l keeps ell within the base range");
    Bracketing::Pair(kj as usize, kj1 as usize)
}

fn input_log_bound(input: &LacunaryInput, kj: usize, rm: &[f64]) -> f64 {
    if kj == 0 {
        real::ln(input.c)
    } else {
        real::ln(input.c) + kj as f64 * (real::ln(input.rho) + rm[kj])
    }
}

/// Local (relatively compact `U` in `V`) chain with the additive Taylor term
/// `(k_{j+1}-k_j)^{l-k_j}` absorbed via `k_j <= A m_{k_j}`. `c_geom` is the
/// mixed-interpolation universal constant for the `(U, V)` pair.
///
/// With `beurling` set, the two-regime split applies: past the cut index where
/// `k_j/m_{k_j} <= n rho`, the envelope rate is exactly linear in `rho`; the
/// head regime is folded into `C_out`.
pub fn propagate_local(
    input: &LacunaryInput,
    l: Option<usize>,
    c_geom: f64,
    beurling: bool,
) -> Result<BoundCertificate> {
    if !(c_geom >= 1.0) {
        return Err(Error::InvalidSpec(alloc::format!("C_geom = {c_geom}, need C_geom >= 1")));
    }
    let cfg = TrendConfig::default();
    let l_max = resolve_l(input, l)?;
    let ln_c2 = input.log_ratio_bound(&cfg)?;
    let ln_a = input.log_special_bound(&cfg)?;
    let a = real::exp(ln_a);

    // j/m_j trend: bounded for Roumieu, vanishing for Beurling.
    let incl = weightseq::analytic_inclusion_index(&input.m, &cfg);
    match (beurling, incl.trend) {
        (_, Some(Trend::Growing)) => {
            return Err(Error::TrendViolation { name: "j/m_j bounded" })
        }
        (true, Some(Trend::Bounded)) | (true, None) => {
            return Err(Error::TrendViolation { name: "j/m_j vanishing" })
        }
        _ => {}
    }
    let cap_a = incl.index_value; // A = sup j/m_j on truncation

    let (rm, rp) = input.roots();
    let (ln_c1, rho1) = (real::ln(input.c), input.n as f64 * input.rho);
    let ln_rho1 = real::ln(rho1);
    let ln_cgeom = real::ln(c_geom);
    let polar = log_polar_factors(l_max);
    let orders = input.k.orders();
    let k1 = orders[1] as usize;

    let mut b = Vec::with_capacity(l_max + 1);
    let mut trace = Vec::with_capacity(l_max + 1);
    for ell in 0..=l_max {
        let (lb, step) = match base_or_bracket(input, ell) {
            Bracketing::Base(kj) => (
                input_log_bound(input, kj, &rm),
                ChainStep { ell, bracket: (kj as u64, kj as u64), theta: 0.0, rule: "base" },
            ),
            Bracketing::Pair(kj, kj1) => {
                let theta = (ell - kj) as f64 / (kj1 - kj) as f64;
                let interp = if kj == 0 {
                    kj1 as f64 * theta * (ln_rho1 + rm[kj1])
                } else {
                    kj as f64 * (1.0 - theta) * (ln_rho1 + rm[kj])
                        + kj1 as f64 * theta * (ln_rho1 + rm[kj1])
                };
                let additive = (ell - kj) as f64 * real::ln((kj1 - kj) as f64)
                    + if kj == 0 { 0.0 } else { kj as f64 * (ln_rho1 + rm[kj]) };
                let ln_dv = ln_c1
                    + (kj1 - kj) as f64 * ln_cgeom
                    + real::ln_add_exp(interp, additive);
                (
                    ln_dv + polar[ell],
                    ChainStep {
                        ell,
                        bracket: (kj as u64, kj1 as u64),
                        theta,
                        rule: "mixed+polar",
                    },
                )
            }
        };
        b.push(lb);
        trace.push(step);
    }

    // Envelope. Roumieu rate covers the additive term via (a-1)A; the leading
    // bracket's C_geom^{k_1} and k_1/m'_1 candidates fold into the constants.
    let ln_rate_r = real::ln(2.0 * core::f64::consts::E)
        + (a - 1.0) * ln_cgeom
        + real::max(
            real::max(ln_c2 + ln_rho1, real::ln(real::max((a - 1.0) * cap_a, 1e-300))),
            real::max(ln_rho1, real::ln(k1 as f64) - rp[1]),
        );
    let log_c_base = real::ln(2.0 * input.c) + k1 as f64 * ln_cgeom;

    let (log_c_out, rho_out) = if beurling {
        // Linear-in-rho envelope rate; everything before the cut (including
        // the whole leading bracket) is folded into the constant.
        let ln_rate_b = real::ln(2.0 * core::f64::consts::E)
            + (a - 1.0) * ln_cgeom
            + ln_rho1
            + real::max(ln_c2, real::ln(real::max(a - 1.0, 1.0)));
        // Cut: first base index past which k_i/m_{k_i} <= rho1 holds onward.
        let mut k_cut = l_max + 1;
        for (idx, &ki) in orders.iter().enumerate() {
            let tail_ok = orders[idx..].iter().all(|&kk| {
                let kk = kk as usize;
                kk == 0 || real::ln(kk as f64) - rm[kk] <= ln_rho1 + 1e-12
            });
            if tail_ok {
                k_cut = ki as usize;
                break;
            }
        }
        let k_cut_eff = k_cut.max(k1);
        let mut log_c = log_c_base;
        for ell in 1..k_cut_eff.min(l_max + 1) {
            log_c = real::max(log_c, b[ell] - ell as f64 * (ln_rate_b + rp[ell]));
        }
        (log_c, real::exp(ln_rate_b))
    } else {
        (log_c_base, real::exp(ln_rate_r))
    };

    BoundCertificate::emit(
        Regime::Local,
        b,
        log_c_out,
        rho_out,
        trace,
        alloc::vec![
            ("C1", input.c),
            ("rho1", rho1),
            ("C2", real::exp(ln_c2)),
            ("a", a),
            ("A", cap_a),
            ("C_geom", c_geom),
        ],
        input,
    )
}

/// Moment chain: `||x^alpha f||` bounds at base orders propagate by exact
/// geometric interpolation of `|x|^l |f(x)|`; the dimensional inflation is
/// `sigma_1 = n^{3/2} sigma`. Emits `sigma_out = n^{3/2} C_2 sigma`, `C_out = C`.
pub fn propagate_moment(
    input: &LacunaryInput,
    l: Option<usize>,
    sigma: f64,
) -> Result<BoundCertificate> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSpec(alloc::format!("sigma = {sigma}, need sigma > 0")));
    }
    let cfg = TrendConfig::default();
    let l_max = resolve_l(input, l)?;
    let ln_c2 = input.log_ratio_bound(&cfg)?;
    let (rm, _) = input.roots();
    let ln_c = real::ln(input.c);
    let sigma1 = real::powf(input.n as f64, 1.5) * sigma;
    let (ln_sigma, ln_sigma1) = (real::ln(sigma), real::ln(sigma1));

    let mut b = Vec::with_capacity(l_max + 1);
    let mut trace = Vec::with_capacity(l_max + 1);
    for ell in 0..=l_max {
        let (lb, step) = match base_or_bracket(input, ell) {
            Bracketing::Base(kj) => {
                let lb = if kj == 0 { ln_c } else { ln_c + kj as f64 * (ln_sigma + rm[kj]) };
                (lb, ChainStep { ell, bracket: (kj as u64, kj as u64), theta: 0.0, rule: "base" })
            }
            Bracketing::Pair(kj, kj1) => {
                let theta = (ell - kj) as f64 / (kj1 - kj) as f64;
                let interp = if kj == 0 {
                    kj1 as f64 * theta * (ln_sigma1 + rm[kj1])
                } else {
                    kj as f64 * (1.0 - theta) * (ln_sigma1 + rm[kj])
                        + kj1 as f64 * theta * (ln_sigma1 + rm[kj1])
                };
                (
                    ln_c + interp,
                    ChainStep {
                        ell,
                        bracket: (kj as u64, kj1 as u64),
                        theta,
                        rule: "moment-interp",
                    },
                )
            }
        };
        b.push(lb);
        trace.push(step);
    }

    let sigma_out = real::exp(ln_c2) * sigma1;
    // Base bounds use the uninflated sigma; exactness is checked against it.
    let as_input = LacunaryInput { rho: sigma, ..input.clone() };
    BoundCertificate::emit(
        Regime::Moment,
        b,
        ln_c,
        sigma_out,
        trace,
        alloc::vec![("sigma1", sigma1), ("C2", real::exp(ln_c2))],
        &as_input,
    )
}

/// Interval sup-norm chain via the Cartan-Gorny inequality. Roumieu emits
/// `rho_out = C5 max{rho, C4/|I|}`; Beurling bisects over `log rho` for the
/// largest input rate whose output rate stays at or below `sigma_target`.
pub fn propagate_interval_cg(
    input: &LacunaryInput,
    l: Option<usize>,
    interval_len: f64,
    beurling: bool,
    sigma_target: Option<f64>,
) -> Result<BoundCertificate> {
    if !(interval_len > 0.0) {
        return Err(Error::InvalidSpec(alloc::format!("|I| = {interval_len}, need |I| > 0")));
    }
    if input.n != 1 {
        return Err(Error::InvalidSpec(String::from("interval chain is one-dimensional")));
    }
    let cfg = TrendConfig::default();
    input.log_ratio_bound(&cfg)?;
    input.log_special_bound(&cfg)?;
    let incl = weightseq::analytic_inclusion_index(&input.m, &cfg);
    match (beurling, incl.trend) {
        (_, Some(Trend::Growing)) => {
            return Err(Error::TrendViolation { name: "j/m_j bounded" })
        }
        (true, Some(Trend::Bounded)) | (true, None) => {
            return Err(Error::TrendViolation { name: "j/m_j vanishing" })
        }
        _ => {}
    }

    if !beurling {
        return cg_chain_at(input, l, interval_len, input.rho, input.c, &cfg, false);
    }
    let target = sigma_target.ok_or_else(|| {
        Error::InvalidSpec(String::from("beurling mode needs sigma_target"))
    })?;

    // Beurling envelope rate is linear in the input rate (head regime folded
    // into the constant); the output rate is monotone, so bisect over log rho.
    let ln_c2 = input.log_ratio_bound(&cfg)?;
    let ln_a = input.log_special_bound(&cfg)?;
    let a = real::exp(ln_a);
    let c5 = real::exp(a + 1.0) * real::exp(real::max(ln_c2, 0.0));
    let slope = c5 * real::max(1.0, (a - 1.0) / interval_len);
    let rate_of = |rho: f64| -> f64 { slope * rho };
    let ln_rho_max = real::ln(input.rho);
    let ln_rho_min = ln_rho_max - 140.0;
    if rate_of(real::exp(ln_rho_min)) > target {
        return Err(Error::RateSearchFailed {
            target,
            achieved: rate_of(real::exp(ln_rho_min)),
        });
    }
    if rate_of(input.rho) <= target {
        return cg_chain_at(input, l, interval_len, input.rho, input.c, &cfg, true);
    }
    let (mut lo, mut hi) = (ln_rho_min, ln_rho_max);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if rate_of(real::exp(mid)) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho_found = real::exp(lo);
    let probe = LacunaryInput { rho: rho_found, ..input.clone() };
    cg_chain_at(&probe, l, interval_len, rho_found, input.c, &cfg, true)
}

fn cg_chain_at(
    input: &LacunaryInput,
    l: Option<usize>,
    interval_len: f64,
    rho: f64,
    c: f64,
    cfg: &TrendConfig,
    beurling: bool,
) -> Result<BoundCertificate> {
    let l_max = resolve_l(input, l)?;
    let (rm, _) = input.roots();
    let ln_c = real::ln(c);
    let ln_rho = real::ln(rho);
    let base_bound = |kj: usize| -> f64 {
        if kj == 0 {
            ln_c
        } else {
            ln_c + kj as f64 * (ln_rho + rm[kj])
        }
    };

    let mut b = Vec::with_capacity(l_max + 1);
    let mut trace = Vec::with_capacity(l_max + 1);
    for ell in 0..=l_max {
        let (lb, step) = match base_or_bracket(input, ell) {
            Bracketing::Base(kj) => (
                base_bound(kj),
                ChainStep { ell, bracket: (kj as u64, kj as u64), theta: 0.0, rule: "base" },
            ),
            Bracketing::Pair(kj, kj1) => {
                let theta = (ell - kj) as f64 / (kj1 - kj) as f64;
                let (bk, bk1) = (base_bound(kj), base_bound(kj1));
                let branch_interp = theta * bk1;
                let branch_taylor =
                    (ell - kj) as f64 * real::ln((kj1 - kj) as f64 / interval_len) + theta * bk;
                let lb = real::ln(4.0)
                    + 2.0 * (ell - kj) as f64
                    + (kj1 - kj) as f64
                    + (1.0 - theta) * bk
                    + real::max(branch_interp, branch_taylor);
                (
                    lb,
                    ChainStep {
                        ell,
                        bracket: (kj as u64, kj1 as u64),
                        theta,
                        rule: "cartan-gorny",
                    },
                )
            }
        };
        b.push(lb);
        trace.push(step);
    }

    let ln_c2 = input.log_ratio_bound(cfg)?;
    let ln_a = input.log_special_bound(cfg)?;
    let a = real::exp(ln_a);
    let incl = weightseq::analytic_inclusion_index(&input.m, cfg);
    let cap_a = incl.index_value;
    let k1 = input.k.orders()[1] as usize;
    let (_, rp) = input.roots();
    let c5 = real::exp(a + 1.0) * real::exp(real::max(ln_c2, 0.0));
    let c4 = real::max(real::max((a - 1.0) * cap_a, 1.0), k1 as f64 / real::exp(rm[1]));
    // 8C per the chain (two branches folded), plus the leading bracket's
    // un-amortized e^{k_1} factor.
    let log_c_base = real::ln(8.0 * c) + k1 as f64;
    let (log_c_out, rho_out) = if beurling {
        let rate = c5 * rho * real::max(1.0, (a - 1.0) / interval_len);
        let ln_rate = real::ln(rate);
        // Cut: first base index past which k_i/m_{k_i} <= rho holds onward;
        // the leading bracket is always head regime.
        let orders = input.k.orders();
        let mut k_cut = l_max + 1;
        for (idx, &ki) in orders.iter().enumerate() {
            let tail_ok = orders[idx..].iter().all(|&kk| {
                let kk = kk as usize;
                kk == 0 || real::ln(kk as f64) - rm[kk] <= real::ln(rho) + 1e-12
            });
            if tail_ok {
                k_cut = ki as usize;
                break;
            }
        }
        let k_cut_eff = k_cut.max(k1);
        let mut log_c = log_c_base;
        for ell in 1..k_cut_eff.min(l_max + 1) {
            log_c = real::max(log_c, b[ell] - ell as f64 * (ln_rate + rp[ell]));
        }
        (log_c, rate)
    } else {
        (log_c_base, c5 * real::max(rho, c4 / interval_len))
    };

    BoundCertificate::emit(
        Regime::IntervalCg,
        b,
        log_c_out,
        rho_out,
        trace,
        alloc::vec![
            ("C4", c4),
            ("C5", c5),
            ("a", a),
            ("A", cap_a),
            ("rho_used", rho),
        ],
        &LacunaryInput { rho, c, ..input.clone() },
    )
}

/// Theorem settings whose hypothesis checklists [`equality_verdict`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Whole-space `L^p` class equality (global chain hypotheses).
    BLp,
    /// The compactly-supported variant; same hypotheses as `BLp`.
    D,
    /// Local Roumieu equality: special base, bounded ratio, `j/m_j` bounded.
    ELpRoumieu,
    /// Local Beurling equality: special base, bounded ratio, `j/m_j` vanishing.
    ELpBeurling,
    /// Gelfand-Shilov style equality: bounded ratio plus moderate growth.
    S,
    /// Interval sup-norm equality via Cartan-Gorny (Roumieu hypotheses).
    BLinftyInterval,
}

/// Checklist outcome: `verdict` is `holds_on_truncation` ("theorem applies" at
/// this truncation) only when every hypothesis check passes. Never claims
/// class equality beyond hypothesis verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub setting: Setting,
    pub verdict: Verdict,
    pub checks: Vec<ConditionReport>,
}

/// Runs exactly the hypothesis checks the chosen theorem setting demands.
pub fn equality_verdict(
    m: &WeightSequence,
    k: &BaseSequence,
    setting: Setting,
    cfg: &TrendConfig,
) -> Result<VerdictReport> {
    let mut checks = Vec::new();
    checks.push(weightseq::lacunary_ratio(m, k, None, cfg)?);
    match setting {
        Setting::BLp | Setting::D => {}
        Setting::ELpRoumieu | Setting::BLinftyInterval => {
            checks.push(weightseq::base_sequence_check(k, cfg));
            checks.push(weightseq::analytic_inclusion_index(m, cfg));
        }
        Setting::ELpBeurling => {
            checks.push(weightseq::base_sequence_check(k, cfg));
            let mut incl = weightseq::analytic_inclusion_index(m, cfg);
            incl.name = String::from("analytic_inclusion_vanishing");
            // Beurling needs j/m_j -> 0, not merely bounded.
            if incl.trend != Some(Trend::Vanishing) && incl.verdict == Verdict::HoldsOnTruncation
            {
                incl.verdict = Verdict::Fails;
            }
            checks.push(incl);
        }
        Setting::S => {
            checks.push(weightseq::growth_indices(m, cfg)?.mg);
        }
    }
    let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fails) {
        Verdict::Fails
    } else if checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::HoldsOnTruncation
    };
    Ok(VerdictReport { setting, verdict, checks })
}
