//! Counterexample construction: given a totally ordered family of weight
//! sequences, build `(N, (k_j), (l_j))` whose lacunary class along `(k_j)`
//! differs from the full class. The base sequence this produces is inherently
//! non-special: the chosen indices explode tetrationally, which is why all
//! values live in the level-index domain of [`crate::tower`].
//!
//! Everything is done in the log2 domain so that the `A_l = 2^(2^l)` blocks
//! contribute the exact value `2^l` to log2-quantities with no rounding.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real;
use crate::report::{ConditionReport, Trend, Verdict, Witness};
use crate::tower::{Idx, Mag, Val};
use crate::weightfn::{self, WeightFunction, WeightFunctionSpec};
use crate::{Error, Result};

const LN2: f64 = core::f64::consts::LN_2;
const EXACT_STEPS: usize = 4096;
const MAX_LEVEL: u32 = 12;
const BISECT_ITERS: usize = 200;

/// A parameterized, totally ordered family `s -> M^(s)` with divergent roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `M^(s)_j = j^(s j)`; evaluable at any index scale.
    GevreyFamily,
    /// Associated sequences `M^(s)_k = exp(phi*(s k)/s)` of a weight function;
    /// only evaluable while `s k` stays inside the conjugate's bracket range.
    FromOmegaFamily { omega: WeightFunctionSpec },
}

/// Evaluator with the parsed weight function cached for the omega case.
pub struct Family {
    spec: FamilySpec,
    wf: Option<WeightFunction>,
}

impl Family {
    pub fn new(spec: FamilySpec) -> Result<Family> {
        let wf = match &spec {
            FamilySpec::GevreyFamily => None,
            FamilySpec::FromOmegaFamily { omega } => Some(WeightFunction::new(omega.clone())?),
        };
        Ok(Family { spec, wf })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    /// `log2 M^(s)_k`.
    pub fn log2_m(&self, s: f64, k: &Idx) -> Result<Val> {
        let km = k.to_mag();
        if km.is_zero() {
            return Ok(Val::ZERO);
        }
        match &self.spec {
            FamilySpec::GevreyFamily => {
                // log2 M = s * k * log2 k; k >= 1 so log2 k >= 0.
                let l2k = km.log2();
                debug_assert!(!l2k.negative);
                Ok(Val::pos(Mag::from_f64(s).mul(&km).mul(&l2k.mag)))
            }
            FamilySpec::FromOmegaFamily { .. } => {
                let kf = km.to_f64().ok_or(Error::InvalidSpec(String::from(
                    "omega family is not evaluable at tower-scale indices",
                )))?;
                let wf = self.wf.as_ref().unwrap();
                let log_m = weightfn::conjugate(wf, s * kf)? / s;
                Ok(Val::from_f64(log_m / LN2))
            }
        }
    }

    /// `log2 M^(s)_k / denom`, computed in factored order. At tower scale the
    /// expanded product `s * k * log2 k` collapses onto `k` in the
    /// representation, so dividing it afterwards by a `k`-sized denominator
    /// loses the whole answer; multiplying the near-unit quotient `k/denom`
    /// first keeps every factor at a resolvable level.
    pub fn log2_m_over(&self, s: f64, k: &Idx, denom: &Val) -> Result<Val> {
        match &self.spec {
            FamilySpec::GevreyFamily => {
                let km = k.to_mag();
                if km.is_zero() {
                    return Ok(Val::ZERO);
                }
                let q = Val::pos(km).div(denom);
                Ok(q.mul(&Val::from_f64(s)).mul(&km.log2()))
            }
            FamilySpec::FromOmegaFamily { .. } => Ok(self.log2_m(s, k)?.div(denom)),
        }
    }

    /// `log2 M^(1/j)_k - k log2 j` (the log2 of the property-(2) target),
    /// factored as `k (log2 k / j - log2 j)` for the Gevrey family so the
    /// difference is taken below the collapse level.
    pub fn log2_n_at_k(&self, j: usize, k: &Idx) -> Result<Val> {
        let jf = j as f64;
        match &self.spec {
            FamilySpec::GevreyFamily => {
                let km = k.to_mag();
                let t = km
                    .log2()
                    .mul(&Val::from_f64(1.0 / jf))
                    .sub(&Val::from_f64(real::log2(jf)));
                Ok(Val::pos(km).mul(&t))
            }
            FamilySpec::FromOmegaFamily { .. } => {
                let m = self.log2_m(1.0 / jf, k)?;
                Ok(m.sub(&Val::pos(k.to_mag().mul(&Mag::from_f64(real::log2(jf))))))
            }
        }
    }

    /// Probe-truncation validation: total order in `s` and divergent roots.
    pub fn validate(&self, s_grid: &[f64]) -> Result<()> {
        let mut grid: Vec<f64> = s_grid.to_vec();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for j in 1..=64u64 {
            let idx = Idx::from_u64(j);
            for w in grid.windows(2) {
                let lo = self.log2_m(w[0], &idx)?;
                let hi = self.log2_m(w[1], &idx)?;
                if lo.cmp_val(&hi) == core::cmp::Ordering::Greater
                    && !lo.rel_close(&hi, 1e-9)
                {
                    return Err(Error::InvalidSpec(format!(
                        "family not totally ordered: M^({})_{j} > M^({})_{j}",
                        w[0], w[1]
                    )));
                }
            }
        }
        // Divergence evidence: roots at j = 64 exceed roots at j = 8.
        for &s in &grid {
            let lo = self.log2_m(s, &Idx::from_u64(8))?.div(&Val::from_f64(8.0));
            let hi = self.log2_m(s, &Idx::from_u64(64))?.div(&Val::from_f64(64.0));
            if hi.cmp_val(&lo) != core::cmp::Ordering::Greater {
                return Err(Error::InvalidSpec(format!(
                    "family roots not divergent on probe truncation at s = {s}"
                )));
            }
        }
        Ok(())
    }
}

/// The constructed witness. `ell`/`k` interlace as `l_1 < k_1 < l_2 < ...`;
/// `log_nu2` and `log_n2` hold `log2 nu` and `log2 N` at the distinguished
/// indices in that same interleaved order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleWitness {
    pub jmax: usize,
    pub ell: Vec<Idx>,
    pub k: Vec<Idx>,
    #[serde(rename = "logNu2")]
    pub log_nu2: Vec<Val>,
    #[serde(rename = "logN2")]
    pub log_n2: Vec<Val>,
    pub family: FamilySpec,
}

/// `log2 nu_{k_j}` block value at candidate `k` (the eq-mon2 right-hand side):
/// `(log2 M^(1/j)_k - k log2 j - 2^(l_j) - log2 M^(j)_(l_j)) / (k - l_j)`.
fn log2_nu_k(fam: &Family, j: usize, k: &Idx, ell_j: &Idx) -> Result<Val> {
    let jf = j as f64;
    let diff = k.sub_idx(ell_j);
    // Factored term-by-term division; see log2_m_over for why.
    let m_over = fam.log2_m_over(1.0 / jf, k, &diff)?;
    let jlog = Val::pos(k.to_mag()).div(&diff).mul(&Val::from_f64(real::log2(jf)));
    let tail = Val::pos(ell_j.to_mag().exp2()).add(&fam.log2_m(jf, ell_j)?);
    Ok(m_over.sub(&jlog).sub(&tail.div(&diff)))
}

/// `log2 nu_{l_(j+1)}` block value at candidate `l` (the eq-mon right-hand
/// side): `(k_j log2 j + 2^l + log2 M^(j+1)_l - log2 M^(1/j)_(k_j)) / (l - k_j)`.
fn log2_nu_ell(fam: &Family, j: usize, ell: &Idx, k_j: &Idx) -> Result<Val> {
    let jf = j as f64;
    let diff = ell.sub_idx(k_j);
    let jlog = Val::pos(k_j.to_mag()).div(&diff).mul(&Val::from_f64(real::log2(jf)));
    let block = Val::pos(ell.to_mag().exp2()).div(&diff);
    let m_new = fam.log2_m_over(jf + 1.0, ell, &diff)?;
    let m_old = fam.log2_m_over(1.0 / jf, k_j, &diff)?;
    Ok(jlog.add(&block).add(&m_new).sub(&m_old))
}

/// Smallest index strictly greater than `start` satisfying `pred`.
///
/// Walks the successor chain through an exact zone, then grows tetrationally
/// and bisects in representation space. Minimality is exact in the successor
/// zone; past it, only up to the representation's resolution.
fn search_min(
    start: &Idx,
    mut pred: impl FnMut(&Idx) -> Result<bool>,
    stage: &'static str,
) -> Result<Idx> {
    let mut c = start.succ();
    for _ in 0..EXACT_STEPS {
        if pred(&c)? {
            return Ok(c);
        }
        c = c.succ();
    }
    // Tetrational growth from the last false candidate.
    let mut lo = c.to_mag();
    let mut g = lo;
    loop {
        g = if g.cmp_mag(&Mag::from_u64(2)) == core::cmp::Ordering::Less {
            Mag::from_u64(2)
        } else {
            g.exp2()
        };
        if g.level > MAX_LEVEL {
            return Err(Error::SearchCeiling { stage, ceiling_log2: g.r });
        }
        if pred(&Idx { base: g, offset: 0 })? {
            break;
        }
        lo = g;
    }
    let mut hi = g;
    for _ in 0..BISECT_ITERS {
        let mid = lo.rep_mid(&hi);
        if mid == lo || mid == hi {
            break;
        }
        if pred(&Idx { base: mid, offset: 0 })? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi.level == 0 {
        // Integerize and restore exact minimality.
        let mut n = real::ceil(hi.r) as u64;
        while !pred(&Idx::from_u64(n))? {
            n += 1;
        }
        while n > 1 && pred(&Idx::from_u64(n - 1))? {
            n -= 1;
        }
        return Ok(Idx::from_u64(n));
    }
    Ok(Idx { base: hi, offset: 0 })
}

/// Runs the greedy-minimal appendix construction.
pub fn build_counterexample(fam: &Family, jmax: usize) -> Result<CounterexampleWitness> {
    if jmax < 1 {
        return Err(Error::InvalidSpec(String::from("jmax must be >= 1")));
    }
    let mut s_grid: Vec<f64> = (1..=jmax.max(2)).map(|j| j as f64).collect();
    s_grid.extend((2..=jmax.max(2)).map(|j| 1.0 / j as f64));
    fam.validate(&s_grid)?;

    // l_1: smallest l >= 1 with nu_1 = (A_l M^(1)_l)^(1/l) >= 1, i.e.
    // (2^l + log2 M^(1)_l)/l >= 0.
    let nu1_at = |fam: &Family, ell: &Idx| -> Result<Val> {
        let num = Val::pos(ell.to_mag().exp2()).add(&fam.log2_m(1.0, ell)?);
        Ok(num.div(&ell.sub_idx(&Idx::from_u64(0))))
    };
    let ell1 = search_min(
        &Idx::from_u64(0),
        |c| Ok(nu1_at(fam, c)?.cmp_val(&Val::ZERO) != core::cmp::Ordering::Less),
        "ell_1",
    )?;
    let nu_ell1 = nu1_at(fam, &ell1)?;

    let mut ell = alloc::vec![ell1];
    let mut k: Vec<Idx> = Vec::new();
    let mut log_nu2 = alloc::vec![nu_ell1];

    for j in 1..=jmax {
        // k_j: smallest k > l_j with nu_(l_j) <= nu_(k_j) (eq-mon2 for j >= 2,
        // the "sufficiently large k_1" condition for j = 1).
        let ell_j = ell[j - 1];
        let nu_prev = log_nu2[2 * j - 2];
        let kj = search_min(
            &ell_j,
            |c| {
                Ok(log2_nu_k(fam, j, c, &ell_j)?.cmp_val(&nu_prev)
                    != core::cmp::Ordering::Less)
            },
            "k_j",
        )?;
        log_nu2.push(log2_nu_k(fam, j, &kj, &ell_j)?);
        k.push(kj);

        if j == jmax {
            break;
        }
        // l_(j+1): smallest l > k_j with nu_(k_j) <= nu_(l_(j+1)) (eq-mon).
        let nu_kj = log_nu2[2 * j - 1];
        let ell_next = search_min(
            &kj,
            |c| {
                Ok(log2_nu_ell(fam, j, c, &kj)?.cmp_val(&nu_kj)
                    != core::cmp::Ordering::Less)
            },
            "ell_j",
        )?;
        log_nu2.push(log2_nu_ell(fam, j, &ell_next, &kj)?);
        ell.push(ell_next);
    }

    // Minimality at successor-representable choices: the predecessor violates
    // the defining inequality (positions found by walking are minimal by
    // construction; re-check the k_j / l_(j+1) that are plain integers).
    for j in 1..=jmax {
        let kj = &k[j - 1];
        if kj.base.level == 0 && kj.offset == 0 && kj.sub_idx(&ell[j - 1]).mag.cmp_mag(&Mag::ONE) == core::cmp::Ordering::Greater {
            let prev = Idx::from_u64(kj.base.r as u64 - 1);
            let ok = log2_nu_k(fam, j, &prev, &ell[j - 1])?
                .cmp_val(&log_nu2[2 * j - 2])
                == core::cmp::Ordering::Less;
            assert!(ok, "k_{j} is not minimal");
        }
    }

    // nu must be nondecreasing across blocks.
    for w in log_nu2.windows(2) {
        assert!(
            w[0].cmp_val(&w[1]) != core::cmp::Ordering::Greater || w[0].rel_close(&w[1], 1e-12),
            "nu blocks are not nondecreasing"
        );
    }
    // nu_1 >= 1.
    assert!(log_nu2[0].cmp_val(&Val::ZERO) != core::cmp::Ordering::Less);

    // Cumulative log2 N at the distinguished indices, in interleaved order.
    let mut log_n2 = Vec::with_capacity(2 * jmax);
    let mut acc = Val::pos(ell[0].to_mag()).mul(&log_nu2[0]);
    log_n2.push(acc);
    for j in 1..=jmax {
        acc = acc.add(&k[j - 1].sub_idx(&ell[j - 1]).mul(&log_nu2[2 * j - 1]));
        log_n2.push(acc);
        if j < jmax {
            acc = acc.add(&ell[j].sub_idx(&k[j - 1]).mul(&log_nu2[2 * j]));
            log_n2.push(acc);
        }
    }

    Ok(CounterexampleWitness {
        jmax,
        ell,
        k,
        log_nu2,
        log_n2,
        family: fam.spec().clone(),
    })
}

/// Re-checks the witness properties in the log2 domain:
/// interlacing, the two block identities, nu-monotonicity, and the growth of
/// the lacunary-type ratio along the constructed indices.
pub fn verify_counterexample(w: &CounterexampleWitness, fam: &Family) -> Result<ConditionReport> {
    let fail = |i: usize| ConditionReport {
        name: String::from("counterexample"),
        index_value: f64::INFINITY,
        verdict: Verdict::Fails,
        witness: Some(Witness::single(i)),
        trend: None,
        truncation: w.jmax,
    };
    if w.ell.len() != w.jmax
        || w.k.len() != w.jmax
        || w.log_nu2.len() != 2 * w.jmax
        || w.log_n2.len() != 2 * w.jmax
    {
        return Err(Error::InvalidSpec(String::from("witness arrays have inconsistent lengths")));
    }

    // (1) interlacing l_1 < k_1 < l_2 < ...
    for j in 0..w.jmax {
        if w.ell[j].cmp_idx(&w.k[j]) != core::cmp::Ordering::Less {
            return Ok(fail(j + 1));
        }
        if j + 1 < w.jmax && w.k[j].cmp_idx(&w.ell[j + 1]) != core::cmp::Ordering::Less {
            return Ok(fail(j + 1));
        }
    }

    // (2) log2 N_(k_j) = -k_j log2 j + log2 M^(1/j)_(k_j) to 1e-9.
    // (3) log2 N_(l_j) = 2^(l_j) + log2 M^(j)_(l_j) to 1e-9.
    for j in 1..=w.jmax {
        let jf = j as f64;
        let target2 = fam.log2_n_at_k(j, &w.k[j - 1])?;
        if !w.log_n2[2 * j - 1].rel_close(&target2, 1e-9) {
            return Ok(fail(j));
        }
        let target3 =
            Val::pos(w.ell[j - 1].to_mag().exp2()).add(&fam.log2_m(jf, &w.ell[j - 1])?);
        if !w.log_n2[2 * j - 2].rel_close(&target3, 1e-9) {
            return Ok(fail(j));
        }
    }

    // nu nondecreasing with nu_1 >= 1.
    if w.log_nu2[0].cmp_val(&Val::ZERO) == core::cmp::Ordering::Less {
        return Ok(fail(1));
    }
    for (i, pair) in w.log_nu2.windows(2).enumerate() {
        if pair[0].cmp_val(&pair[1]) == core::cmp::Ordering::Greater
            && !pair[0].rel_close(&pair[1], 1e-12)
        {
            return Ok(fail(i + 1));
        }
    }

    // Lacunary-ratio mechanism: n_(k_(j+1))/n_(k_j)-type growth dominated by
    // 2^(2^(l_(j+1)))^(1/l_(j+1)), i.e. log2-ratio >= 2^(l_(j+1))/l_(j+1),
    // a strictly increasing series.
    let mut growing = true;
    let mut prev: Option<Val> = None;
    for j in 1..w.jmax {
        let r = Val::pos(w.ell[j].to_mag().exp2()).div(&Val::pos(w.ell[j].to_mag()));
        if let Some(p) = &prev {
            if r.cmp_val(p) != core::cmp::Ordering::Greater {
                growing = false;
            }
        }
        prev = Some(r);
    }

    Ok(ConditionReport {
        name: String::from("counterexample"),
        // The lacunary ratio of N along (k_j) is unbounded; inf as sentinel.
        index_value: f64::INFINITY,
        verdict: Verdict::HoldsOnTruncation,
        witness: None,
        trend: Some(if growing { Trend::Growing } else { Trend::Bounded }),
        truncation: w.jmax,
    })
}
