//! Test functions with exact high-order derivatives and norm evaluation.
//!
//! Every member carries a closed-form derivative evaluator; truncated-Taylor
//! (jet) arithmetic lives in [`jet`] as an independent cross-check, because
//! divided differences are useless at order 40.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::real;
use crate::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// JSON-facing function description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `sin x`.
    Sin,
    /// `x^m`.
    Monomial { m: usize },
    /// `e^{-x^2}`.
    Gaussian,
    /// `1/(1 - cx)` on `[-1, 1]`, `|c| < 1`.
    Geometric { c: f64 },
    /// `sum_{j<terms} b^{-sj} cos(b^j x)`.
    LacunaryTrig { b: f64, s: f64, terms: usize },
    /// Multivariate polynomial; keys are comma-separated exponents ("2,1" is `x^2 y`).
    Poly { coeffs: BTreeMap<String, f64> },
}

/// Multivariate polynomial in expanded form.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// `(exponents, coefficient)` pairs; all exponent vectors share the length `dim`.
    terms: Vec<(Vec<u32>, f64)>,
    dim: usize,
}

impl Poly {
    pub fn new(mut terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("polynomial needs at least one term".to_string()));
        }
        let dim = terms[0].0.len();
        if dim == 0 {
            return Err(Error::InvalidSpec("polynomial dimension must be positive".to_string()));
        }
        for (e, c) in &terms {
            if e.len() != dim {
                return Err(Error::InvalidSpec("inconsistent exponent lengths".to_string()));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite { index: 0 });
            }
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Poly { terms, dim })
    }

    pub fn from_map(coeffs: &BTreeMap<String, f64>) -> Result<Self> {
        let mut terms = Vec::with_capacity(coeffs.len());
        for (key, &c) in coeffs {
            let exps = key
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<core::result::Result<Vec<u32>, _>>()
                .map_err(|_| Error::InvalidSpec(format!("bad exponent key {key:?}")))?;
            terms.push((exps, c));
        }
        Poly::new(terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total degree.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &ei) in x.iter().zip(e.iter()) {
                for _ in 0..ei {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative `∂^alpha`.
    pub fn partial(&self, alpha: &[u32]) -> Poly {
        let mut terms = Vec::new();
        'term: for (e, c) in &self.terms {
            let mut coeff = *c;
            let mut exps = e.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if exps[i] < a {
                    continue 'term;
                }
                for r in 0..a {
                    coeff *= (exps[i] - r) as f64;
                }
                exps[i] -= a;
            }
            terms.push((exps, coeff));
        }
        if terms.is_empty() {
            terms.push((alloc::vec![0; self.dim], 0.0));
        }
        Poly { terms, dim: self.dim }
    }
}

/// A corpus member: spec plus scale, with a derivative evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    spec: FunctionSpec,
    poly: Option<Poly>,
    scale: f64,
    max_order: usize,
    label: String,
}

impl SampledFunction {
    pub fn new(spec: FunctionSpec) -> Result<Self> {
        let (poly, max_order, label) = match &spec {
            FunctionSpec::Sin => (None, MAX_ORDER, String::from("sin")),
            FunctionSpec::Monomial { m } => {
                if *m > MAX_ORDER {
                    return Err(Error::OrderUnsupported { order: *m, max_order: MAX_ORDER });
                }
                (None, MAX_ORDER, format!("x^{m}"))
            }
            FunctionSpec::Gaussian => (None, MAX_ORDER, String::from("gauss")),
            FunctionSpec::Geometric { c } => {
                if !(c.abs() < 1.0) || *c == 0.0 {
                    return Err(Error::InvalidSpec(format!("geometric ratio c = {c}, need 0 < |c| < 1")));
                }
                (None, MAX_ORDER, format!("geom({c})"))
            }
            FunctionSpec::LacunaryTrig { b, s, terms } => {
                if !(*b > 1.0) || !(*s > 0.0) || *terms < 2 {
                    return Err(Error::InvalidSpec(format!(
                        "lacunary trig needs b > 1, s > 0, terms >= 2 (got b={b}, s={s}, terms={terms})"
                    )));
                }
                // Highest frequency is b^(terms-1); cap the order so the
                // amplitude b^{j(k-s)} stays inside f64 range.
                let cap = (*s + 690.0 / ((*terms as f64 - 1.0) * real::ln(*b))) as usize;
                (None, cap.min(MAX_ORDER), format!("lac({b},{s})"))
            }
            FunctionSpec::Poly { coeffs } => {
                let p = Poly::from_map(coeffs)?;
                let label = format!("poly(dim {})", p.dim());
                (Some(p), MAX_ORDER, label)
            }
        };
        Ok(SampledFunction { spec, poly, scale: 1.0, max_order, label })
    }

    /// The member scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut s = self.clone();
        s.scale *= lambda;
        s
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_univariate(&self) -> bool {
        match &self.poly {
            Some(p) => p.dim() == 1,
            None => true,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.poly.as_ref()
    }

    /// Default evaluation interval per member.
    pub fn default_domain(&self) -> (f64, f64) {
        match &self.spec {
            FunctionSpec::Sin | FunctionSpec::LacunaryTrig { .. } => (0.0, 2.0 * core::f64::consts::PI),
            FunctionSpec::Gaussian => (-8.0, 8.0),
            _ => (-1.0, 1.0),
        }
    }

    /// Window on which the order-`k` Gaussian derivative tail is below 1e-12
    /// of its peak; other members use their default domain.
    pub fn norm_window(&self, order: usize) -> (f64, f64) {
        match &self.spec {
            FunctionSpec::Gaussian => {
                // Solve w^2 - k ln(2w) ~ 40 by fixed point from w = 8.
                let k = order as f64;
                let mut w: f64 = 8.0;
                for _ in 0..8 {
                    w = real::sqrt(40.0 + k * real::ln(real::max(2.0 * w, 2.0)));
                }
                let w = real::max(w, 8.0);
                (-w, w)
            }
            _ => self.default_domain(),
        }
    }

    /// `f^{(order)}(x)` by closed form.
    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        if order > self.max_order {
            return Err(Error::OrderUnsupported { order, max_order: self.max_order });
        }
        let v = match &self.spec {
            FunctionSpec::Sin => sin_shifted(x, order),
            FunctionSpec::Monomial { m } => {
                if order > *m {
                    0.0
                } else {
                    let mut c = 1.0;
                    for i in 0..order {
                        c *= (*m - i) as f64;
                    }
                    c * real::powf(x, (*m - order) as f64)
                }
            }
            FunctionSpec::Gaussian => {
                // f^(k) = (-1)^k H_k(x) e^{-x^2}, physicists' Hermite recurrence.
                let mut h_prev = 1.0;
                let mut h = 2.0 * x;
                if order == 0 {
                    h = 1.0;
                } else {
                    for k in 1..order {
                        let next = 2.0 * x * h - 2.0 * k as f64 * h_prev;
                        h_prev = h;
                        h = next;
                    }
                }
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                sign * h * real::exp(-x * x)
            }
            FunctionSpec::Geometric { c } => {
                // f^(l) = l! c^l (1 - cx)^{-l-1}.
                let base = 1.0 - c * x;
                let log_mag = real::ln_factorial(order) + order as f64 * real::ln(c.abs())
                    - (order as f64 + 1.0) * real::ln(base.abs());
                let mut sign = if base < 0.0 && order % 2 == 0 { -1.0 } else { 1.0 };
                if *c < 0.0 && order % 2 == 1 {
                    sign = -sign;
                }
                sign * real::exp(log_mag)
            }
            FunctionSpec::LacunaryTrig { b, s, terms } => {
                let mut acc = 0.0;
                for j in 0..*terms {
                    let freq = real::powf(*b, j as f64);
                    let amp = real::powf(*b, j as f64 * (order as f64 - s));
                    acc += amp * cos_shifted(freq * x, order);
                }
                acc
            }
            FunctionSpec::Poly { .. } => {
                let p = self.poly.as_ref().unwrap();
                if p.dim() != 1 {
                    return Err(Error::InvalidSpec(
                        "univariate derivative on a multivariate polynomial".to_string(),
                    ));
                }
                p.partial(&[order as u32]).eval(&[x])
            }
        };
        Ok(self.scale * v)
    }
}

/// `sin(x + k pi/2)` via the exact quarter-turn table; adding `k pi/2` to a
/// large argument in f64 would wash out the phase.
fn sin_shifted(x: f64, k: usize) -> f64 {
    match k % 4 {
        0 => real::sin(x),
        1 => real::cos(x),
        2 => -real::sin(x),
        _ => -real::cos(x),
    }
}

/// `cos(x + k pi/2)`, same convention.
fn cos_shifted(x: f64, k: usize) -> f64 {
    match k % 4 {
        0 => real::cos(x),
        1 => -real::sin(x),
        2 => -real::cos(x),
        _ => real::sin(x),
    }
}

/// Norm exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PNorm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl PNorm {
    pub fn exponent(self) -> Option<f64> {
        match self {
            PNorm::One => Some(1.0),
            PNorm::Two => Some(2.0),
            PNorm::Inf => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Inf => "inf",
        }
    }
}

/// Norm value with the refinement error estimate and the window used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub error: f64,
    pub window: (f64, f64),
}

const REL_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 20;

/// `||f^{(order)}||_{L^p}` on `domain` (default: the member's norm window).
///
/// `p = inf` uses a doubling grid sup; `p < inf` composite Simpson, both with
/// a 1e-8 relative stopping rule.
pub fn norm(
    f: &SampledFunction,
    order: usize,
    p: PNorm,
    domain: Option<(f64, f64)>,
) -> Result<NormEstimate> {
    let (a, b) = domain.unwrap_or_else(|| f.norm_window(order));
    if !(b > a) {
        return Err(Error::InvalidSpec(format!("empty norm window [{a}, {b}]")));
    }
    match p.exponent() {
        None => {
            let mut n = 128usize;
            let mut prev = grid_sup(f, order, a, b, n)?;
            for _ in 0..MAX_DOUBLINGS {
                n *= 2;
                let cur = grid_sup(f, order, a, b, n)?;
                let diff = (cur - prev).abs();
                if diff <= REL_TOL * cur.abs().max(1e-300) {
                    return Ok(NormEstimate { value: cur, error: diff, window: (a, b) });
                }
                prev = cur;
            }
            Err(Error::NormNotConverged { last: prev, previous: prev })
        }
        Some(pexp) => {
            let mut n = 128usize;
            let mut prev = simpson_p(f, order, pexp, a, b, n)?;
            for _ in 0..MAX_DOUBLINGS {
                n *= 2;
                let cur = simpson_p(f, order, pexp, a, b, n)?;
                let diff = (cur - prev).abs();
                if diff <= REL_TOL * cur.abs().max(1e-300) {
                    let value = real::powf(cur, 1.0 / pexp);
                    let error = if cur > 0.0 { value * diff / (pexp * cur) } else { 0.0 };
                    return Ok(NormEstimate { value, error, window: (a, b) });
                }
                prev = cur;
            }
            Err(Error::NormNotConverged {
                last: real::powf(prev, 1.0 / pexp),
                previous: real::powf(prev, 1.0 / pexp),
            })
        }
    }
}

fn grid_sup(f: &SampledFunction, order: usize, a: f64, b: f64, n: usize) -> Result<f64> {
    let h = (b - a) / n as f64;
    let mut sup = 0.0f64;
    for i in 0..=n {
        let v = f.derivative(order, a + h * i as f64)?.abs();
        if v > sup {
            sup = v;
        }
    }
    Ok(sup)
}

fn simpson_p(f: &SampledFunction, order: usize, pexp: f64, a: f64, b: f64, n: usize) -> Result<f64> {
    let h = (b - a) / n as f64;
    let g = |x: f64| -> Result<f64> {
        Ok(real::powf(f.derivative(order, x)?.abs(), pexp))
    };
    let mut acc = g(a)? + g(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

/// `d_v^order f(x)`, the order-th derivative of `t -> f(x + tv)` at `t = 0`,
/// exact for polynomials. `v` need not be a unit vector (the polarization
/// identity averages directions).
pub fn directional_derivative(
    f: &SampledFunction,
    v: &[f64],
    order: usize,
    point: &[f64],
) -> Result<f64> {
    let p = f.as_poly().ok_or(Error::NotPolynomial)?;
    if v.len() != p.dim() || point.len() != p.dim() {
        return Err(Error::InvalidSpec(format!(
            "direction/point dimension mismatch (polynomial dim {})",
            p.dim()
        )));
    }
    Ok(f.scale * directional_coefficient(p, v, order, point) * factorial(order))
}

/// Coefficient of `t^order` in `f(x + tv)`.
fn directional_coefficient(p: &Poly, v: &[f64], order: usize, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (exps, c) in &p.terms {
        // Convolve the per-variable binomial expansions of (x_i + t v_i)^{e_i}.
        let mut conv = alloc::vec![0.0f64; order + 1];
        conv[0] = 1.0;
        for (i, &e) in exps.iter().enumerate() {
            let e = e as usize;
            let mut var = alloc::vec![0.0f64; order + 1];
            for r in 0..=e.min(order) {
                var[r] = binomial(e, r) * powi(x[i], e - r) * powi(v[i], r);
            }
            let mut next = alloc::vec![0.0f64; order + 1];
            for (a, &ca) in conv.iter().enumerate() {
                if ca == 0.0 {
                    continue;
                }
                for (b, &cb) in var.iter().enumerate() {
                    if a + b <= order {
                        next[a + b] += ca * cb;
                    }
                }
            }
            conv = next;
        }
        total += c * conv[order];
    }
    total
}

fn powi(x: f64, n: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n {
        acc *= i as f64;
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Truncated-Taylor (jet) arithmetic: coefficient vectors of `g(t) = f(x0+t)`.
/// Used as an independent oracle for the closed-form evaluators.
pub mod jet {
    use alloc::vec::Vec;

    /// `exp(u(t))` for a polynomial jet `u` via `v' = u'v`.
    pub fn exp(u: &[f64], n: usize) -> Vec<f64> {
        let mut v = alloc::vec![0.0f64; n + 1];
        v[0] = libm::exp(u[0]);
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=k.min(u.len() - 1) {
                acc += i as f64 * u[i] * v[k - i];
            }
            v[k] = acc / k as f64;
        }
        v
    }

    /// `1/u(t)` via `w_k = -(1/u_0) sum u_i w_{k-i}`.
    pub fn recip(u: &[f64], n: usize) -> Vec<f64> {
        let mut w = alloc::vec![0.0f64; n + 1];
        w[0] = 1.0 / u[0];
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=k.min(u.len() - 1) {
                acc += u[i] * w[k - i];
            }
            w[k] = -acc / u[0];
        }
        w
    }

    /// Jets of `sin(theta0 + lambda t)` and `cos(theta0 + lambda t)` by the
    /// coupled ODE recurrence (no closed-form phase shifts involved).
    pub fn sin_cos(theta0: f64, lambda: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut s = alloc::vec![0.0f64; n + 1];
        let mut c = alloc::vec![0.0f64; n + 1];
        s[0] = libm::sin(theta0);
        c[0] = libm::cos(theta0);
        for k in 0..n {
            s[k + 1] = lambda * c[k] / (k + 1) as f64;
            c[k + 1] = -lambda * s[k] / (k + 1) as f64;
        }
        (s, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn make(spec: FunctionSpec) -> SampledFunction {
        SampledFunction::new(spec).unwrap()
    }

    fn sin() -> SampledFunction {
        make(FunctionSpec::Sin)
    }

    fn gaussian() -> SampledFunction {
        make(FunctionSpec::Gaussian)
    }

    fn geometric(c: f64) -> SampledFunction {
        make(FunctionSpec::Geometric { c })
    }

    fn lacunary() -> SampledFunction {
        make(FunctionSpec::LacunaryTrig { b: 2.0, s: 1.5, terms: 40 })
    }

    fn poly(terms: &[(&[u32], f64)]) -> SampledFunction {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            let key: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            coeffs.insert(key.join(","), *c);
        }
        make(FunctionSpec::Poly { coeffs })
    }

    #[test]
    fn order_zero_is_the_function() {
        let fs = [sin(), gaussian(), geometric(0.5), lacunary(), make(FunctionSpec::Monomial { m: 4 })];
        for f in &fs {
            let (a, b) = f.default_domain();
            for i in 0..=32 {
                let x = a + (b - a) * i as f64 / 32.0;
                let direct = match f.spec() {
                    FunctionSpec::Sin => libm::sin(x),
                    FunctionSpec::Monomial { m } => libm::pow(x, *m as f64),
                    FunctionSpec::Gaussian => libm::exp(-x * x),
                    FunctionSpec::Geometric { c } => 1.0 / (1.0 - c * x),
                    FunctionSpec::LacunaryTrig { b, s, terms } => (0..*terms)
                        .map(|j| {
                            libm::pow(*b, -s * j as f64) * libm::cos(libm::pow(*b, j as f64) * x)
                        })
                        .sum(),
                    FunctionSpec::Poly { .. } => unreachable!(),
                };
                let got = f.derivative(0, x).unwrap();
                assert!((got - direct).abs() < 1e-12 * (1.0 + direct.abs()), "{} x={x}", f.label());
            }
        }
    }

    #[test]
    fn divided_difference_consistency() {
        // Central difference of f^{(k)} approximates f^{(k+1)} with O(h^2)
        // error; halving h must shrink the defect by about 4.
        for f in [sin(), gaussian(), geometric(0.5)] {
            for k in 0..4usize {
                let x = 0.3;
                let exact = f.derivative(k + 1, x).unwrap();
                let dd = |h: f64| {
                    (f.derivative(k, x + h).unwrap() - f.derivative(k, x - h).unwrap()) / (2.0 * h)
                };
                let e1 = (dd(1e-3) - exact).abs();
                let e2 = (dd(5e-4) - exact).abs();
                assert!(e2 < e1 / 2.0 + 1e-10, "{} k={k}: {e1} -> {e2}", f.label());
            }
        }
    }

    #[test]
    fn gaussian_matches_exp_jet() {
        // e^{-(x0+t)^2} as an exp-jet of the quadratic -(x0+t)^2.
        let f = gaussian();
        for x0 in [0.0, 0.7, -1.3] {
            let u = [-x0 * x0, -2.0 * x0, -1.0];
            let v = jet::exp(&u, 20);
            for k in 0..=20usize {
                let exact = f.derivative(k, x0).unwrap();
                let from_jet = v[k] * factorial(k);
                assert!(
                    (exact - from_jet).abs() < 1e-8 * (1.0 + from_jet.abs()),
                    "x0={x0} k={k}: {exact} vs {from_jet}"
                );
            }
        }
    }

    #[test]
    fn geometric_matches_recip_jet() {
        for c in [0.5, -0.3] {
            let f = geometric(c);
            for x0 in [0.0, 0.4, -0.9] {
                let u = [1.0 - c * x0, -c];
                let w = jet::recip(&u, 20);
                for k in 0..=20usize {
                    let exact = f.derivative(k, x0).unwrap();
                    let from_jet = w[k] * factorial(k);
                    assert!(
                        (exact - from_jet).abs() < 1e-8 * (1.0 + from_jet.abs()),
                        "c={c} x0={x0} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn sin_and_lacunary_match_ode_jets() {
        let f = sin();
        let x0 = 0.9;
        let (s, _) = jet::sin_cos(x0, 1.0, 16);
        for k in 0..=16usize {
            let exact = f.derivative(k, x0).unwrap();
            assert!((exact - s[k] * factorial(k)).abs() < 1e-10);
        }
        // Lacunary sum: add per-frequency cosine jets.
        let f = lacunary();
        let (b, sexp, terms) = (2.0f64, 1.5f64, 40usize);
        let n = 12;
        let mut total = alloc::vec![0.0f64; n + 1];
        for j in 0..terms {
            let lam = libm::pow(b, j as f64);
            let (_, c) = jet::sin_cos(lam * x0, lam, n);
            let amp = libm::pow(b, -sexp * j as f64);
            for k in 0..=n {
                total[k] += amp * c[k];
            }
        }
        for k in 0..=n {
            let exact = f.derivative(k, x0).unwrap();
            let from_jet = total[k] * factorial(k);
            assert!(
                (exact - from_jet).abs() < 1e-7 * (1.0 + from_jet.abs()),
                "k={k}: {exact} vs {from_jet}"
            );
        }
    }

    #[test]
    fn geometric_half_norm_closed_form() {
        // c = 1/2 on [-1,1]: ||f^(l)||_inf = l! 2^{-l} (1/2)^{-l-1} = 2 l!.
        let f = geometric(0.5);
        for l in [0usize, 1, 3, 7, 12] {
            let n = norm(&f, l, PNorm::Inf, None).unwrap();
            let expect = 2.0 * factorial(l);
            assert!(
                (n.value - expect).abs() < 1e-6 * expect,
                "l={l}: {} vs {expect}",
                n.value
            );
        }
    }

    #[test]
    fn norm_examples() {
        let n = norm(&sin(), 5, PNorm::Inf, Some((0.0, 2.0 * PI))).unwrap();
        assert!((n.value - 1.0).abs() < 1e-7);

        let f = make(FunctionSpec::Monomial { m: 3 });
        let n = norm(&f, 1, PNorm::Inf, None).unwrap();
        assert!((n.value - 3.0).abs() < 1e-7);

        // Gaussian L2 over R: (pi/2)^{1/4}.
        let n = norm(&gaussian(), 0, PNorm::Two, None).unwrap();
        let expect = libm::pow(PI / 2.0, 0.25);
        assert!((n.value - expect).abs() < 1e-6, "{} vs {expect}", n.value);
        assert!(n.window.0 <= -8.0 && n.window.1 >= 8.0);

        // sin over a period: L1 = 4, L2 = sqrt(pi).
        let n = norm(&sin(), 0, PNorm::One, Some((0.0, 2.0 * PI))).unwrap();
        assert!((n.value - 4.0).abs() < 1e-6);
        let n = norm(&sin(), 0, PNorm::Two, Some((0.0, 2.0 * PI))).unwrap();
        assert!((n.value - libm::sqrt(PI)).abs() < 1e-6);
    }

    #[test]
    fn norm_error_dominates_last_increment() {
        for p in [PNorm::One, PNorm::Two, PNorm::Inf] {
            let n = norm(&gaussian(), 3, p, None).unwrap();
            assert!(n.error <= REL_TOL * n.value.abs() / if p == PNorm::Inf { 1.0 } else { 1.0 } + 1e-12);
            assert!(n.value.is_finite() && n.value > 0.0);
        }
    }

    #[test]
    fn norm_homogeneity() {
        let f = gaussian();
        let g = f.scaled(3.5);
        for (order, p) in [(0usize, PNorm::Inf), (2, PNorm::Two), (4, PNorm::One)] {
            let a = norm(&f, order, p, None).unwrap().value;
            let b = norm(&g, order, p, None).unwrap().value;
            assert!((b - 3.5 * a).abs() < 1e-10 * (1.0 + b.abs()), "order={order}");
        }
    }

    #[test]
    fn directional_examples() {
        // f = xy, v = (1,0), order 1 at (0,3): d/dt (t)(3) = 3.
        let f = poly(&[(&[1, 1], 1.0)]);
        let v = directional_derivative(&f, &[1.0, 0.0], 1, &[0.0, 3.0]).unwrap();
        assert!((v - 3.0).abs() < 1e-12);

        // f = x^2 y, v = (0,1), order 1 at (2,0): x^2 = 4.
        let f = poly(&[(&[2, 1], 1.0)]);
        let v = directional_derivative(&f, &[0.0, 1.0], 1, &[2.0, 0.0]).unwrap();
        assert!((v - 4.0).abs() < 1e-12);

        // f = x^2 y, v = (1,1)/sqrt 2, order 3: constant 3!/(2 sqrt2) = 3/sqrt2.
        let r = 1.0 / libm::sqrt(2.0);
        for pt in [[0.0, 0.0], [1.0, -2.0]] {
            let v = directional_derivative(&f, &[r, r], 3, &pt).unwrap();
            assert!((v - 3.0 / libm::sqrt(2.0)).abs() < 1e-12, "pt={pt:?}");
        }

        // Non-unit directions are allowed: f = x^2, v = (2): g(t) = (x+2t)^2, g'' = 8.
        let f = poly(&[(&[2], 1.0)]);
        let v = directional_derivative(&f, &[2.0], 2, &[0.3]).unwrap();
        assert!((v - 8.0).abs() < 1e-12);

        assert_eq!(
            directional_derivative(&sin(), &[1.0], 1, &[0.0]),
            Err(Error::NotPolynomial)
        );
    }

    #[test]
    fn poly_partials() {
        // f = 2 x^2 y + y^3, d^2/dx dy = 4x... actually d_x d_y f = 4x.
        let mut coeffs = BTreeMap::new();
        coeffs.insert("2,1".to_string(), 2.0);
        coeffs.insert("0,3".to_string(), 1.0);
        let p = Poly::from_map(&coeffs).unwrap();
        let q = p.partial(&[1, 1]);
        for x in [0.0, 1.5, -2.0] {
            assert!((q.eval(&[x, 7.0]) - 4.0 * x).abs() < 1e-12);
        }
        assert_eq!(p.degree(), 3);
        // Vanishing partial.
        let z = p.partial(&[5, 0]);
        assert_eq!(z.eval(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn lacunary_order_cap() {
        let f = lacunary();
        assert!(f.max_order() >= 12, "cap {}", f.max_order());
        assert!(f.derivative(f.max_order(), 1.0).unwrap().is_finite());
        assert!(matches!(
            f.derivative(f.max_order() + 1, 1.0),
            Err(Error::OrderUnsupported { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(SampledFunction::new(FunctionSpec::Geometric { c: 1.0 }).is_err());
        assert!(SampledFunction::new(FunctionSpec::LacunaryTrig { b: 1.0, s: 1.0, terms: 4 }).is_err());
        assert!(SampledFunction::new(FunctionSpec::Monomial { m: 65 }).is_err());
        let mut coeffs = BTreeMap::new();
        coeffs.insert("1,x".to_string(), 1.0);
        assert!(SampledFunction::new(FunctionSpec::Poly { coeffs }).is_err());
    }
}
