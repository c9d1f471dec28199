//! Batch front end: a self-describing JSON job file in, JSON/CSV reports out.
//!
//! Exit codes: 0 = all verdicts non-failing, 1 = input error, 2 = a hypothesis
//! check or inequality failed. Reports are byte-deterministic for identical
//! jobs regardless of `--threads`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};

use ultraweights_core::construct::{build_counterexample, verify_counterexample, Family, FamilySpec};
use ultraweights_core::corpus::{FunctionSpec, PNorm, SampledFunction};
use ultraweights_core::interp::{
    favard, kolmogorov_constant, polarization_apply, verify_on_function, BoundKind, Geometry,
    MarginReport, VerifySettings,
};
use ultraweights_core::lacunary::{
    equality_verdict, propagate_global, propagate_interval_cg, propagate_local, propagate_moment,
    BoundCertificate, LacunaryInput, Setting, VerdictReport,
};
use ultraweights_core::weightfn::{
    associated_sequence, bmt_absorption, ommg_check, WeightFunction, WeightFunctionSpec,
};
use ultraweights_core::weightseq::{
    analytic_inclusion_index, base_sequence_check, growth_indices, lacunary_ratio, BaseSequence,
    SequenceSpec, WeightSequence,
};
use ultraweights_core::{ConditionReport, Error as CoreError, TrendConfig, Verdict};

#[derive(Parser, Debug)]
#[command(name = "ultraweights", about = "Job runner for lacunary regularity checks")]
struct Cli {
    /// Job specification file (JSON).
    #[arg(long)]
    job: Option<PathBuf>,
    /// Directory report files are written into.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for parallelizable jobs.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Run the built-in invariant suite and exit.
    #[arg(long, default_value_t = false)]
    seed_check: bool,
}

/// Input problems (exit 1) vs failed hypothesis/inequality checks (exit 2).
enum Failure {
    Input(String),
    Hypothesis(String),
}

impl Failure {
    fn from_core(e: CoreError) -> Failure {
        match e {
            CoreError::UnboundedRatio { .. }
            | CoreError::NotSpecial { .. }
            | CoreError::TrendViolation { .. }
            | CoreError::RateSearchFailed { .. }
            | CoreError::AbsorptionFailed { .. } => Failure::Hypothesis(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type JobResult<T> = Result<T, Failure>;

fn core<T>(r: ultraweights_core::Result<T>) -> JobResult<T> {
    r.map_err(Failure::from_core)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

impl Default for Format {
    fn default() -> Self {
        Format::Json
    }
}

#[derive(Debug, Clone, Deserialize)]
struct Output {
    path: String,
    #[serde(default)]
    format: Format,
}

/// Base sequence either as explicit orders or `step * j` for `j < count`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BaseSpec {
    Orders(Vec<u64>),
    Arithmetic { step: u64, count: usize },
}

impl BaseSpec {
    fn build(&self) -> JobResult<BaseSequence> {
        match self {
            BaseSpec::Orders(k) => core(BaseSequence::new(k.clone())),
            BaseSpec::Arithmetic { step, count } => Ok(BaseSequence::arithmetic(*step, *count)),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Engine {
    Global,
    Local,
    Moment,
    IntervalCg,
}

#[derive(Debug, Clone, Deserialize)]
struct PropagateSpec {
    engine: Engine,
    k: BaseSpec,
    m: SequenceSpec,
    #[serde(default)]
    mprime: Option<SequenceSpec>,
    #[serde(default = "one")]
    c: f64,
    #[serde(default = "one")]
    rho: f64,
    #[serde(default = "one_usize")]
    n: usize,
    /// Highest propagated order; defaults to the last base order.
    #[serde(rename = "L", default)]
    l: Option<usize>,
    #[serde(default)]
    c_geom: Option<f64>,
    #[serde(default)]
    beurling: bool,
    #[serde(default)]
    sigma: Option<f64>,
    #[serde(default)]
    interval_len: Option<f64>,
    #[serde(default)]
    sigma_target: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum JobSpec {
    /// Hypothesis checklist for a weight sequence (and optional base sequence).
    Check {
        m: SequenceSpec,
        #[serde(default)]
        base: Option<BaseSpec>,
        #[serde(default)]
        setting: Option<Setting>,
        output: Output,
    },
    /// Weight-function validity, associated sequence, and absorption reports.
    Conjugate {
        omega: WeightFunctionSpec,
        #[serde(default = "one")]
        rho: f64,
        #[serde(rename = "K", default = "default_k")]
        k: usize,
        #[serde(default)]
        sigma: Option<f64>,
        output: Output,
    },
    /// One propagation certificate.
    Propagate {
        #[serde(flatten)]
        spec: PropagateSpec,
        output: Output,
    },
    /// Empirical inequality margins over a function corpus.
    Verify {
        functions: Vec<FunctionSpec>,
        #[serde(default)]
        kinds: Option<Vec<BoundKind>>,
        m_max: usize,
        #[serde(default)]
        p: Option<Vec<PNorm>>,
        /// Half-width for the taylor/mixed geometry.
        #[serde(default = "one")]
        a: f64,
        output: Output,
    },
    /// Build a lacunary counterexample witness and re-verify it.
    Construct {
        family: FamilySpec,
        #[serde(default = "default_jmax")]
        jmax: usize,
        output: Output,
    },
    /// Propagation certificates over a grid of input rates.
    Sweep {
        rho_values: Vec<f64>,
        job: PropagateSpec,
        output: Output,
    },
}

fn default_k() -> usize {
    256
}

fn default_jmax() -> usize {
    6
}

#[derive(Debug, Serialize)]
struct CheckReport {
    label: String,
    #[serde(rename = "K")]
    truncation: usize,
    checks: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<VerdictReport>,
}

#[derive(Debug, Serialize)]
struct ConjugateReport {
    omega: String,
    rho: f64,
    #[serde(rename = "K")]
    truncation: usize,
    validity: Vec<ConditionReport>,
    ommg: ConditionReport,
    #[serde(rename = "logM")]
    log_m: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    absorption: Option<Absorption>,
}

#[derive(Debug, Serialize)]
struct Absorption {
    sigma: f64,
    h: f64,
    c: f64,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    rho: f64,
    rho_out: f64,
    c_out: f64,
    log_c_out: f64,
}

#[derive(Debug, Serialize)]
struct ConstructReport {
    witness: ultraweights_core::construct::CounterexampleWitness,
    verification: ConditionReport,
}

/// Deterministic ordered parallel map: results land in input order no matter
/// how work is striped across workers.
fn par_map_ordered<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    let threads = threads.max(1).min(n.max(1));
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    let mut acc = Vec::new();
                    let mut i = w;
                    while i < n {
                        acc.push((i, f(&items[i])));
                        i += threads;
                    }
                    acc
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|o| o.unwrap()).collect()
}

fn write_report(out_dir: &Path, out: &Output, body: String) -> JobResult<PathBuf> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(&out.path);
    fs::write(&path, body)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> JobResult<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn conditions_csv(checks: &[ConditionReport]) -> String {
    let mut out = String::from("name,index_value,verdict,witness_i,witness_j,trend,K\n");
    for c in checks {
        let verdict = serde_json::to_value(c.verdict).unwrap();
        let trend = match c.trend {
            Some(t) => serde_json::to_value(t).unwrap().as_str().unwrap().to_string(),
            None => String::new(),
        };
        let (wi, wj) = match c.witness {
            Some(w) => (w.i.to_string(), w.j.map(|j| j.to_string()).unwrap_or_default()),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_escape(&c.name),
            c.index_value,
            verdict.as_str().unwrap(),
            wi,
            wj,
            trend,
            c.truncation
        ));
    }
    out
}

fn margins_csv(rows: &[MarginReport]) -> String {
    let mut out = String::from("function,kind,j,m,p,lhs,bound,margin,pass,quad_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&r.function),
            r.kind.label(),
            r.j,
            r.m,
            r.p.label(),
            r.lhs,
            r.bound,
            r.margin,
            r.pass,
            r.quad_error
        ));
    }
    out
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("rho,rho_out,c_out,log_c_out\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.rho, r.rho_out, r.c_out, r.log_c_out));
    }
    out
}

fn build_lacunary_input(spec: &PropagateSpec) -> JobResult<LacunaryInput> {
    let m = core(WeightSequence::build(&spec.m))?;
    let mprime = match &spec.mprime {
        Some(s) => Some(core(WeightSequence::build(s))?),
        None => None,
    };
    let k = spec.k.build()?;
    core(LacunaryInput::new(k, m, mprime, spec.c, spec.rho, spec.n))
}

fn run_propagate(spec: &PropagateSpec) -> JobResult<BoundCertificate> {
    let input = build_lacunary_input(spec)?;
    match spec.engine {
        Engine::Global => core(propagate_global(&input, spec.l)),
        Engine::Local => {
            core(propagate_local(&input, spec.l, spec.c_geom.unwrap_or(1.0), spec.beurling))
        }
        Engine::Moment => {
            let sigma = spec
                .sigma
                .ok_or_else(|| Failure::Input("moment engine needs sigma".to_string()))?;
            core(propagate_moment(&input, spec.l, sigma))
        }
        Engine::IntervalCg => {
            let len = spec
                .interval_len
                .ok_or_else(|| Failure::Input("interval_cg engine needs interval_len".to_string()))?;
            core(propagate_interval_cg(&input, spec.l, len, spec.beurling, spec.sigma_target))
        }
    }
}

/// Runs one job; returns true when every verdict in the report is non-failing.
fn run_job(job: &JobSpec, out_dir: &Path, threads: usize) -> JobResult<bool> {
    let cfg = TrendConfig::default();
    match job {
        JobSpec::Check { m, base, setting, output } => {
            let seq = core(WeightSequence::build(m))?;
            let gi = core(growth_indices(&seq, &cfg))?;
            let mut checks = vec![gi.dc, gi.mg, analytic_inclusion_index(&seq, &cfg)];
            let mut verdict = None;
            if let Some(b) = base {
                let k = b.build()?;
                checks.push(base_sequence_check(&k, &cfg));
                checks.push(core(lacunary_ratio(&seq, &k, None, &cfg))?);
                if let Some(s) = setting {
                    verdict = Some(core(equality_verdict(&seq, &k, *s, &cfg))?);
                }
            } else if setting.is_some() {
                return Err(Failure::Input("check with a setting needs a base sequence".into()));
            }
            let failing = checks.iter().any(|c| c.verdict == Verdict::Fails)
                || verdict.as_ref().map(|v| v.verdict == Verdict::Fails).unwrap_or(false);
            let report = CheckReport {
                label: seq.label().to_string(),
                truncation: seq.truncation(),
                checks,
                verdict,
            };
            let body = match output.format {
                Format::Json => to_json(&report)?,
                Format::Csv => conditions_csv(&report.checks),
            };
            let path = write_report(out_dir, output, body)?;
            println!("check: wrote {}", path.display());
            Ok(!failing)
        }
        JobSpec::Conjugate { omega, rho, k, sigma, output } => {
            let wf = core(WeightFunction::new(omega.clone()))?;
            let validity = wf.validity_report(&cfg);
            let assoc = core(associated_sequence(&wf, *rho, *k))?;
            let ommg = core(ommg_check(&wf, *rho, *k))?;
            let absorption = match sigma {
                Some(s) => {
                    let (h, c) = core(bmt_absorption(&wf, *s, *rho, *k))?;
                    Some(Absorption { sigma: *s, h, c })
                }
                None => None,
            };
            let failing = validity.iter().chain([&ommg]).any(|c| c.verdict == Verdict::Fails);
            let report = ConjugateReport {
                omega: wf.label(),
                rho: *rho,
                truncation: assoc.truncation(),
                validity,
                ommg,
                log_m: assoc.log_table().to_vec(),
                absorption,
            };
            let body = match output.format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let mut all = report.validity.clone();
                    all.push(report.ommg.clone());
                    conditions_csv(&all)
                }
            };
            let path = write_report(out_dir, output, body)?;
            println!("conjugate: wrote {}", path.display());
            Ok(!failing)
        }
        JobSpec::Propagate { spec, output } => {
            let cert = run_propagate(spec)?;
            let body = match output.format {
                Format::Json => to_json(&cert)?,
                Format::Csv => {
                    return Err(Failure::Input("propagate reports are JSON only".into()))
                }
            };
            let path = write_report(out_dir, output, body)?;
            println!("propagate: wrote {} (rho_out = {}, C_out = {})", path.display(), cert.rho_out, cert.c_out);
            Ok(true)
        }
        JobSpec::Verify { functions, kinds, m_max, p, a, output } => {
            if *m_max < 2 {
                return Err(Failure::Input("m_max must be >= 2".into()));
            }
            let kinds = kinds.clone().unwrap_or_else(|| {
                vec![BoundKind::Lk, BoundKind::Taylor, BoundKind::Mixed, BoundKind::Cg]
            });
            let ps = p.clone().unwrap_or_else(|| vec![PNorm::Inf]);
            let mut fns = Vec::new();
            for spec in functions {
                fns.push(core(SampledFunction::new(spec.clone()))?);
            }
            // Whole-line interpolation only covers functions with finite norms
            // on all of R; polynomials and the geometric member (pole) get the
            // interval-based bounds instead.
            let lk_applicable = |f: &SampledFunction, pn: PNorm| match f.spec() {
                FunctionSpec::Gaussian => true,
                FunctionSpec::Sin | FunctionSpec::LacunaryTrig { .. } => pn == PNorm::Inf,
                _ => false,
            };
            // One task per (function, kind, p, m, j) cell.
            let mut tasks = Vec::new();
            for f in &fns {
                for &kind in &kinds {
                    for &pn in &ps {
                        if kind == BoundKind::Cg && pn != PNorm::Inf {
                            continue;
                        }
                        if kind == BoundKind::Lk && !lk_applicable(f, pn) {
                            continue;
                        }
                        for m in 2..=*m_max {
                            for j in 1..m {
                                tasks.push((f.clone(), kind, pn, m, j));
                            }
                        }
                    }
                }
            }
            let a = *a;
            let results = par_map_ordered(&tasks, threads, |(f, kind, pn, m, j)| {
                let s = VerifySettings {
                    j: *j,
                    m: *m,
                    p: *pn,
                    geometry: Geometry { a, interval_len: 2.0 * a, ..Geometry::default() },
                    domain: None,
                };
                verify_on_function(f, *kind, &s)
            });
            let mut rows = Vec::with_capacity(results.len());
            for r in results {
                rows.push(core(r)?);
            }
            let failing = rows.iter().any(|r| !r.pass);
            let body = match output.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => margins_csv(&rows),
            };
            let path = write_report(out_dir, output, body)?;
            println!("verify: wrote {} ({} rows, {} failing)", path.display(), rows.len(), rows.iter().filter(|r| !r.pass).count());
            Ok(!failing)
        }
        JobSpec::Construct { family, jmax, output } => {
            let fam = core(Family::new(family.clone()))?;
            let witness = core(build_counterexample(&fam, *jmax))?;
            let verification = core(verify_counterexample(&witness, &fam))?;
            let failing = verification.verdict == Verdict::Fails;
            let report = ConstructReport { witness, verification };
            let body = match output.format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    return Err(Failure::Input("construct reports are JSON only".into()))
                }
            };
            let path = write_report(out_dir, output, body)?;
            println!("construct: wrote {}", path.display());
            Ok(!failing)
        }
        JobSpec::Sweep { rho_values, job, output } => {
            if rho_values.is_empty() {
                return Err(Failure::Input("sweep needs at least one rho value".into()));
            }
            let results = par_map_ordered(rho_values, threads, |&rho| {
                let mut spec = job.clone();
                spec.rho = rho;
                run_propagate(&spec).map(|cert| SweepRow {
                    rho,
                    rho_out: cert.rho_out,
                    c_out: cert.c_out,
                    log_c_out: cert.log_c_out,
                })
            });
            let mut rows = Vec::with_capacity(results.len());
            for r in results {
                rows.push(r?);
            }
            let body = match output.format {
                Format::Json => to_json(&rows)?,
                Format::Csv => sweep_csv(&rows),
            };
            let path = write_report(out_dir, output, body)?;
            println!("sweep: wrote {} ({} rows)", path.display(), rows.len());
            Ok(true)
        }
    }
}

fn seed_check() -> ExitCode {
    use std::f64::consts::{E, PI};
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("seed-check {name}: {}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    check("favard(0) = 1", (favard(0, 1e-12) - 1.0).abs() < 1e-10);
    check("favard(1) = pi/2", (favard(1, 1e-12) - PI / 2.0).abs() < 1e-10);
    check("favard(2) = pi^2/8", (favard(2, 1e-12) - PI * PI / 8.0).abs() < 1e-10);
    check(
        "kolmogorov(2,1) = sqrt(2)",
        kolmogorov_constant(2, 1).map(|v| (v - 2.0f64.sqrt()).abs() < 1e-10).unwrap_or(false),
    );

    let polar_ok = (|| {
        let mut coeffs = std::collections::BTreeMap::new();
        coeffs.insert("2,1".to_string(), 1.0);
        let f = SampledFunction::new(FunctionSpec::Poly { coeffs }).ok()?;
        let v = polarization_apply(&f, &[2, 1], &[0.7, -0.3]).ok()?;
        Some((v - 2.0).abs() < 1e-9)
    })()
    .unwrap_or(false);
    check("polarization d^(2,1) x^2 y = 2", polar_ok);

    let global_ok = (|| {
        let m = WeightSequence::build(&SequenceSpec::Gevrey { s: 1.0, k: 128 }).ok()?;
        let input =
            LacunaryInput::new(BaseSequence::arithmetic(2, 33), m, None, 1.0, 1.0, 1).ok()?;
        let cert = propagate_global(&input, None).ok()?;
        Some((cert.c_out - 2.0).abs() < 1e-12 && (cert.rho_out - 4.0 * E).abs() < 1e-9)
    })()
    .unwrap_or(false);
    check("global chain constants (C_out = 2, rho_out = 4e)", global_ok);

    let construct_ok = (|| {
        let fam = Family::new(FamilySpec::GevreyFamily).ok()?;
        let w = build_counterexample(&fam, 2).ok()?;
        let first = w.ell.first()?.to_mag().to_f64()?;
        let k1 = w.k.first()?.to_mag().to_f64()?;
        let report = verify_counterexample(&w, &fam).ok()?;
        Some(first == 1.0 && k1 == 4.0 && report.verdict != Verdict::Fails)
    })()
    .unwrap_or(false);
    check("counterexample build/verify round-trip (jmax = 2)", construct_ok);

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.seed_check {
        return seed_check();
    }
    let Some(job_path) = &cli.job else {
        eprintln!("input error: either --job or --seed-check is required");
        return ExitCode::from(1);
    };
    let text = match fs::read_to_string(job_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("input error: cannot read {}: {e}", job_path.display());
            return ExitCode::from(1);
        }
    };
    let job: JobSpec = match serde_json::from_str(&text) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("input error at line {}, column {}: {e}", e.line(), e.column());
            return ExitCode::from(1);
        }
    };
    match run_job(&job, &cli.out_dir, cli.threads) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hypothesis failure: a verdict in the report is failing");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Hypothesis(msg)) => {
            eprintln!("hypothesis failure: {msg}");
            ExitCode::from(2)
        }
    }
}
