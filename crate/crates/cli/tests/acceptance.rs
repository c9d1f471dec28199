//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Runtime budgets are asserted alongside the numerics.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use ultraweights_core::construct::{build_counterexample, verify_counterexample, Family, FamilySpec};
use ultraweights_core::corpus::{norm, FunctionSpec, PNorm, SampledFunction};
use ultraweights_core::interp::{favard, kolmogorov_constant, polarization_apply, verification_suite};
use ultraweights_core::lacunary::{
    equality_verdict, propagate_global, propagate_interval_cg, LacunaryInput, Setting,
};
use ultraweights_core::weightfn::{associated_sequence, conjugate, ommg_check, WeightFunction, WeightFunctionSpec};
use ultraweights_core::weightseq::{BaseSequence, SequenceSpec, WeightSequence};
use ultraweights_core::{Trend, TrendConfig, Verdict};

/// Collects failures for one criterion and prints exactly one summary line.
struct Criterion {
    name: &'static str,
    start: Instant,
    limit: Option<Duration>,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str, limit_secs: Option<u64>) -> Self {
        Criterion {
            name,
            start: Instant::now(),
            limit: limit_secs.map(Duration::from_secs),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if let Some(limit) = self.limit {
            if elapsed > limit {
                self.failures.push(format!("runtime {elapsed:.2?} exceeds budget {limit:?}"));
            }
        }
        if self.failures.is_empty() {
            println!("[PASS] {} ({elapsed:.2?})", self.name);
        } else {
            println!("[FAIL] {}: {}", self.name, self.failures[0]);
            panic!("{}: {} failure(s): {:?}", self.name, self.failures.len(), self.failures);
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0f64.max(b.abs())
}

#[test]
fn criterion_favard_kolmogorov_constants() {
    let mut c = Criterion::new("Favard/Kolmogorov constants", Some(1));
    c.check((favard(0, 1e-12) - 1.0).abs() < 1e-10, || "favard(0) != 1".into());
    c.check((favard(1, 1e-12) - PI / 2.0).abs() < 1e-10, || "favard(1) != pi/2".into());
    c.check((favard(2, 1e-12) - PI * PI / 8.0).abs() < 1e-10, || "favard(2) != pi^2/8".into());
    let k21 = kolmogorov_constant(2, 1).unwrap();
    c.check((k21 - 2.0f64.sqrt()).abs() < 1e-10, || format!("K(2,1) = {k21}, want sqrt(2)"));
    for r in 0..=100 {
        let v = favard(r, 1e-10);
        c.check((1.0..=2.0).contains(&v), || format!("favard({r}) = {v} outside [1, 2]"));
    }
    for m in 2..=50 {
        for j in 1..m {
            let v = kolmogorov_constant(m, j).unwrap();
            c.check(v <= 2.0 + 1e-12, || format!("K({m},{j}) = {v} > 2"));
        }
    }
    c.finish();
}

#[test]
fn criterion_inequality_suite() {
    let mut c = Criterion::new("inequality suite (full corpus, m <= 12, p in {1,2,inf})", Some(60));
    let reports = verification_suite(12).unwrap();
    let functions: std::collections::BTreeSet<&str> =
        reports.iter().map(|r| r.function.as_str()).collect();
    c.check(functions.len() >= 6, || format!("corpus has only {} functions", functions.len()));
    let mut ps = std::collections::BTreeSet::new();
    for r in &reports {
        ps.insert(r.p.label());
        c.check(r.pass, || {
            format!(
                "violation: {} {} j={} m={} p={} margin={}",
                r.function,
                r.kind.label(),
                r.j,
                r.m,
                r.p.label(),
                r.margin
            )
        });
    }
    c.check(ps.len() == 3, || format!("exponents covered: {ps:?}"));
    c.finish();
}

/// All exponent vectors of the given dimension with total degree in [1, max].
fn exponent_vectors(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            if cur.iter().sum::<u32>() >= 1 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(cur, pos + 1, left - e, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, max, &mut out);
    out
}

#[test]
fn criterion_polarization_exactness() {
    let mut c = Criterion::new("polarization exactness (deg <= 6, n <= 3)", Some(10));
    let falling = |b: u32, a: u32| -> f64 {
        // b! / (b - a)!
        (b - a + 1..=b).map(|x| x as f64).product::<f64>()
    };
    for dim in 1..=3usize {
        let point: Vec<f64> = [0.3, -0.7, 0.9][..dim].to_vec();
        let betas = exponent_vectors(dim, 6);
        let alphas = betas.clone();
        for beta in &betas {
            let deg: u32 = beta.iter().sum();
            let mut coeffs = BTreeMap::new();
            let key: Vec<String> = beta.iter().map(|e| e.to_string()).collect();
            coeffs.insert(key.join(","), 1.0);
            let f = SampledFunction::new(FunctionSpec::Poly { coeffs }).unwrap();
            for alpha in alphas.iter().filter(|a| a.iter().sum::<u32>() == deg) {
                // d^alpha x^beta = prod_i beta_i!/(beta_i - alpha_i)! x^(beta_i - alpha_i).
                let mut expect = 1.0;
                for i in 0..dim {
                    if alpha[i] > beta[i] {
                        expect = 0.0;
                        break;
                    }
                    expect *= falling(beta[i], alpha[i])
                        * point[i].powi((beta[i] - alpha[i]) as i32);
                }
                let got = polarization_apply(&f, alpha, &point).unwrap();
                c.check((got - expect).abs() < 1e-9, || {
                    format!("alpha={alpha:?} beta={beta:?}: got {got}, want {expect}")
                });
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_legendre_machinery() {
    let mut c = Criterion::new("Legendre machinery (omega = t, t^(1/2), K = 256)", None);
    let linear = WeightFunction::new(WeightFunctionSpec::Linear).unwrap();
    let sqrt = WeightFunction::new(WeightFunctionSpec::Power { a: 0.5 }).unwrap();

    // omega(t) = t: log M^(rho)_k = k ln(rho k / e) whenever rho k >= 1.
    for rho in [0.5, 1.0, 2.0] {
        let assoc = associated_sequence(&linear, rho, 256).unwrap();
        for k in 1..=256usize {
            if rho * k as f64 >= 1.0 {
                let want = k as f64 * (rho * k as f64 / E).ln();
                c.check(rel_close(assoc.log_m(k), want, 1e-8), || {
                    format!("rho={rho} k={k}: log M = {}, want {want}", assoc.log_m(k))
                });
            }
        }
    }

    // Fenchel-Young: phi(t) + phi*(s) >= s t on a probe grid.
    for wf in [&linear, &sqrt] {
        for si in 1..=32 {
            let s = si as f64 / 2.0;
            let star = conjugate(wf, s).unwrap();
            for ti in 0..=40 {
                let t = ti as f64 / 2.0;
                let lhs = wf.phi(t) + star;
                let rhs = s * t;
                c.check(lhs >= rhs - 1e-6 * 1.0f64.max(rhs), || {
                    format!("Fenchel-Young fails at s={s} t={t}: {lhs} < {rhs}")
                });
            }
        }
    }

    // Doubling absorption of the associated family holds up to K = 256.
    for (wf, label) in [(&linear, "t"), (&sqrt, "t^0.5")] {
        let r = ommg_check(wf, 1.0, 256).unwrap();
        c.check(r.verdict == Verdict::HoldsOnTruncation, || {
            format!("ommg check fails for omega = {label}: {:?}", r.verdict)
        });
    }

    // Index identity m^(N rho)_k = m^(rho)_(N k).
    for wf in [&linear, &sqrt] {
        let base = associated_sequence(wf, 0.5, 256).unwrap();
        for n in [2usize, 3, 4] {
            let scaled = associated_sequence(wf, 0.5 * n as f64, 64).unwrap();
            for k in 1..=64usize {
                let a = scaled.log_root(k);
                let b = base.log_root(n * k);
                c.check(rel_close(a, b, 1e-9), || {
                    format!("index identity fails: N={n} k={k}: {a} vs {b}")
                });
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_propagation_soundness() {
    let mut c = Criterion::new("propagation soundness (hand constants + end-to-end)", Some(5));

    // gevrey(1), k_j = 2j, n = 1, C = rho = 1: C_out = 2, rho_out = 4e, and the
    // certificate reproduces the inputs exactly at base orders.
    let m = WeightSequence::build(&SequenceSpec::Gevrey { s: 1.0, k: 128 }).unwrap();
    let prof = m.profile();
    let input = LacunaryInput::new(BaseSequence::arithmetic(2, 33), m, None, 1.0, 1.0, 1).unwrap();
    let cert = propagate_global(&input, None).unwrap();
    c.check((cert.c_out - 2.0).abs() < 1e-12, || format!("C_out = {}", cert.c_out));
    c.check((cert.rho_out - 4.0 * E).abs() < 1e-9, || format!("rho_out = {}", cert.rho_out));
    for j in 0..=32usize {
        let kj = 2 * j;
        let want = if kj == 0 { 0.0 } else { kj as f64 * prof.log_root[kj] };
        c.check((cert.b[kj] - want).abs() < 1e-9, || {
            format!("base order {kj}: ln B = {}, input = {want}", cert.b[kj])
        });
    }

    // f(x) = 1/(1 - x/2) on [-1, 1]: ||f^(l)||_inf = 2 l!, so M_j = j!, C = 2,
    // rho = 1 makes the inputs at k_j = 2j the true norms. The interval
    // certificate must dominate every measured norm up to order 20.
    let m = WeightSequence::build(&SequenceSpec::FactorialPower { s: 1.0, k: 64 }).unwrap();
    let input = LacunaryInput::new(BaseSequence::arithmetic(2, 16), m, None, 2.0, 1.0, 1).unwrap();
    let cert = propagate_interval_cg(&input, Some(20), 2.0, false, None).unwrap();
    let f = SampledFunction::new(FunctionSpec::Geometric { c: 0.5 }).unwrap();
    for ell in 0..=20usize {
        let true_norm = norm(&f, ell, PNorm::Inf, None).unwrap().value;
        c.check(cert.b[ell] >= true_norm.ln() - 1e-9, || {
            format!("order {ell}: certificate {} below measured {}", cert.b[ell], true_norm.ln())
        });
    }
    c.finish();
}

#[test]
fn criterion_hypothesis_fidelity() {
    let mut c = Criterion::new("hypothesis-check fidelity (dichotomy + built witness)", None);
    let cfg = TrendConfig::default();

    // Arithmetic base: the local Roumieu checklist passes for gevrey(s).
    for s in [1.5, 2.0, 3.0] {
        let m = WeightSequence::build(&SequenceSpec::Gevrey { s, k: 256 }).unwrap();
        let k = BaseSequence::arithmetic(2, 64);
        let r = equality_verdict(&m, &k, Setting::ELpRoumieu, &cfg).unwrap();
        c.check(r.verdict == Verdict::HoldsOnTruncation, || {
            format!("gevrey({s}) with k_j = 2j: {:?}", r.verdict)
        });
    }

    // Doubly exponential base k_j = 2^(2^j): the root ratio m_(k_(j+1))/m_(k_j)
    // blows up, and the checklist fails with a concrete ratio witness.
    let m = WeightSequence::build(&SequenceSpec::Gevrey { s: 2.0, k: 65536 }).unwrap();
    let k = BaseSequence::new(vec![0, 4, 16, 256, 65536]).unwrap();
    let r = equality_verdict(&m, &k, Setting::ELpRoumieu, &cfg).unwrap();
    c.check(r.verdict == Verdict::Fails, || format!("expected fails, got {:?}", r.verdict));
    let ratio = r.checks.iter().find(|ck| ck.name == "lacunary_ratio").unwrap();
    c.check(ratio.verdict == Verdict::Fails && ratio.witness.is_some(), || {
        format!("ratio check: {:?} witness {:?}", ratio.verdict, ratio.witness)
    });

    // The constructed counterexample reproduces the same mechanism: the
    // lacunary ratio of the built sequence along (k_j) grows without bound.
    let fam = Family::new(FamilySpec::GevreyFamily).unwrap();
    let w = build_counterexample(&fam, 4).unwrap();
    let report = verify_counterexample(&w, &fam).unwrap();
    c.check(report.verdict == Verdict::HoldsOnTruncation, || {
        format!("witness verification: {:?}", report.verdict)
    });
    c.check(report.trend == Some(Trend::Growing), || {
        format!("ratio trend along built witness: {:?}", report.trend)
    });
    c.finish();
}

#[test]
fn criterion_appendix_construction() {
    let mut c = Criterion::new("counterexample construction (jmax = 6)", Some(5));
    let fam = Family::new(FamilySpec::GevreyFamily).unwrap();
    let w = build_counterexample(&fam, 6).unwrap();
    let as_u64 = |idx: &ultraweights_core::tower::Idx| idx.to_mag().to_f64();
    c.check(as_u64(&w.ell[0]) == Some(1.0), || format!("l_1 = {:?}", w.ell[0]));
    c.check(as_u64(&w.k[0]) == Some(4.0), || format!("k_1 = {:?}", w.k[0]));
    c.check(as_u64(&w.ell[1]) == Some(5.0), || format!("l_2 = {:?}", w.ell[1]));
    let report = verify_counterexample(&w, &fam).unwrap();
    c.check(report.verdict == Verdict::HoldsOnTruncation, || {
        format!("verification verdict: {:?}", report.verdict)
    });
    // Minimality of the greedy first block, re-derived by hand: with l_1 = 1
    // the k_1 condition is (k^k / 4)^(1/(k-1)) >= 4; k = 3 gives
    // (27/4)^(1/2) < 4 while k = 4 gives exactly 4.
    c.check((27.0f64 / 4.0).sqrt() < 4.0, || "k = 3 should violate the block bound".into());
    c.check((256.0f64 / 4.0).powf(1.0 / 3.0) >= 4.0 - 1e-12, || {
        "k = 4 should satisfy the block bound".into()
    });
    c.finish();
}

#[test]
fn criterion_determinism_across_threads() {
    let mut c = Criterion::new("byte-identical reports across --threads 1 and 8", None);
    let dir = tempfile::tempdir().unwrap();
    let jobs = [
        (
            "check.json",
            r#"{"command":"check","m":{"kind":"gevrey","s":2.0,"K":128},"base":{"step":2,"count":33},"setting":"e_lp_roumieu","output":{"path":"check.json","format":"json"}}"#,
            "check.json",
        ),
        (
            "verify.json",
            r#"{"command":"verify","functions":[{"kind":"sin"},{"kind":"monomial","m":6}],"kinds":["lk","cg"],"m_max":8,"p":["inf"],"output":{"path":"verify.csv","format":"csv"}}"#,
            "verify.csv",
        ),
        (
            "sweep.json",
            r#"{"command":"sweep","rho_values":[0.25,0.5,1.0,2.0,4.0],"job":{"engine":"global","k":{"step":2,"count":33},"m":{"kind":"gevrey","s":1.0,"K":128}},"output":{"path":"sweep.csv","format":"csv"}}"#,
            "sweep.csv",
        ),
        (
            "construct.json",
            r#"{"command":"construct","family":{"kind":"gevrey_family"},"jmax":4,"output":{"path":"construct.json","format":"json"}}"#,
            "construct.json",
        ),
    ];
    for (job_file, body, report_file) in jobs {
        let job_path = dir.path().join(job_file);
        std::fs::write(&job_path, body).unwrap();
        let mut outputs = Vec::new();
        for threads in ["1", "8"] {
            let out_dir = dir.path().join(format!("out-{threads}-{job_file}"));
            let status = Command::new(env!("CARGO_BIN_EXE_ultraweights"))
                .arg("--job")
                .arg(&job_path)
                .arg("--out-dir")
                .arg(&out_dir)
                .arg("--threads")
                .arg(threads)
                .status()
                .unwrap();
            c.check(status.code() == Some(0), || {
                format!("{job_file} with --threads {threads}: exit {:?}", status.code())
            });
            outputs.push(std::fs::read(out_dir.join(report_file)).unwrap_or_default());
        }
        c.check(!outputs[0].is_empty() && outputs[0] == outputs[1], || {
            format!("{report_file} differs between --threads 1 and --threads 8")
        });
    }
    c.finish();
}
