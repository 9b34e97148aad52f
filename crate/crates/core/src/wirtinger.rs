//! Finite-difference Wirtinger calculus on `C^ν`.
//!
//! For `f = u + iv` and coordinate `z_j = x_j + i y_j`:
//!
//! ```text
//! ∂f/∂z_j  = ½ (∂f/∂x_j − i ∂f/∂y_j)     (W-derivative)
//! ∂f/∂z_j* = ½ (∂f/∂x_j + i ∂f/∂y_j)     (CW-derivative)
//! ```
//!
//! The real partials are central differences. [`check_property_suite`] uses
//! these to verify the calculus rules (conjugation, linearity, product,
//! division, chain) numerically, and [`check_lms_gradient`] verifies the CW
//! gradient of the instantaneous LMS cost that drives every filter update.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::ComplexVector;

/// Central-difference step used when callers have no better choice.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Division and chain rules are skipped when `|g(c)|` is at or below this.
pub const SINGULARITY_GUARD: f64 = 0.1;

/// What is known about a probe's dependence on `z` and `z*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analyticity {
    General,
    /// Taylor-expandable in `z` alone.
    Holomorphic,
    /// Taylor-expandable in `z*` alone.
    AntiHolomorphic,
    RealValued,
}

type Evaluator = dyn Fn(&[Complex64]) -> Complex64 + Send + Sync;

/// A complex function on `C^ν` that can be differentiated numerically.
#[derive(Clone)]
pub struct ComplexFunctionProbe {
    arity: usize,
    analyticity: Analyticity,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for ComplexFunctionProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexFunctionProbe")
            .field("arity", &self.arity)
            .field("analyticity", &self.analyticity)
            .finish_non_exhaustive()
    }
}

impl ComplexFunctionProbe {
    pub fn new<F>(arity: usize, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        assert!(arity >= 1, "probe arity must be positive");
        Self {
            arity,
            analyticity: Analyticity::General,
            evaluator: Arc::new(f),
        }
    }

    pub fn with_analyticity(mut self, analyticity: Analyticity) -> Self {
        self.analyticity = analyticity;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn analyticity(&self) -> Analyticity {
        self.analyticity
    }

    /// Evaluates at `c`, failing on a dimension mismatch or non-finite value.
    pub fn eval(&self, c: &ComplexVector) -> Result<Complex64> {
        if c.dim() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: c.dim(),
            });
        }
        self.eval_raw(c.as_slice())
    }

    fn eval_raw(&self, c: &[Complex64]) -> Result<Complex64> {
        let v = (self.evaluator)(c);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("probe evaluated to {v} inside the stencil")))
        }
    }

    /// `z ↦ f(z)*`.
    pub fn conj(&self) -> Self {
        let f = self.evaluator.clone();
        let analyticity = match self.analyticity {
            Analyticity::Holomorphic => Analyticity::AntiHolomorphic,
            Analyticity::AntiHolomorphic => Analyticity::Holomorphic,
            other => other,
        };
        Self {
            arity: self.arity,
            analyticity,
            evaluator: Arc::new(move |z| f(z).conj()),
        }
    }

    /// `α f + β g`.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Self {
        let (f, g) = (self.evaluator.clone(), other.evaluator.clone());
        Self::new(self.arity, move |z| alpha * f(z) + beta * g(z))
    }

    /// `f · g`.
    pub fn product(&self, other: &Self) -> Self {
        let (f, g) = (self.evaluator.clone(), other.evaluator.clone());
        Self::new(self.arity, move |z| f(z) * g(z))
    }

    /// `f / g`.
    pub fn quotient(&self, other: &Self) -> Self {
        let (f, g) = (self.evaluator.clone(), other.evaluator.clone());
        Self::new(self.arity, move |z| f(z) / g(z))
    }

    /// `outer ∘ self`, where `outer` is a function of one complex variable.
    pub fn compose_into(&self, outer: &Self) -> Self {
        assert_eq!(outer.arity, 1, "outer function of a composition must be univariate");
        let (f, s) = (self.evaluator.clone(), outer.evaluator.clone());
        Self::new(self.arity, move |z| s(&[f(z)]))
    }
}

/// W and CW gradients of a probe at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerPair {
    pub w_grad: ComplexVector,
    pub cw_grad: ComplexVector,
    pub point: ComplexVector,
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")))
    }
}

/// Central differences of `f` along the real and imaginary axis of each coordinate.
fn real_partials(f: &ComplexFunctionProbe, c: &ComplexVector, h: f64) -> Result<Vec<(Complex64, Complex64)>> {
    check_step(h)?;
    if c.dim() != f.arity {
        return Err(Error::DimensionMismatch {
            expected: f.arity,
            got: c.dim(),
        });
    }
    let mut x: Vec<Complex64> = c.as_slice().to_vec();
    let mut out = Vec::with_capacity(c.dim());
    for j in 0..c.dim() {
        let orig = x[j];
        let mut diff = |delta: Complex64| -> Result<Complex64> {
            x[j] = orig + delta;
            let plus = f.eval_raw(&x)?;
            x[j] = orig - delta;
            let minus = f.eval_raw(&x)?;
            x[j] = orig;
            Ok((plus - minus) / (2.0 * h))
        };
        let dx = diff(Complex64::new(h, 0.0))?;
        let dy = diff(Complex64::new(0.0, h))?;
        out.push((dx, dy));
    }
    Ok(out)
}

fn combine(partials: &[(Complex64, Complex64)], sign: f64) -> Result<ComplexVector> {
    let i = Complex64::i();
    ComplexVector::new(partials.iter().map(|&(dx, dy)| 0.5 * (dx + sign * i * dy)).collect())
}

/// Numerical W-derivative `∂f/∂z` per coordinate.
pub fn w_derivative(f: &ComplexFunctionProbe, c: &ComplexVector, h: f64) -> Result<ComplexVector> {
    combine(&real_partials(f, c, h)?, -1.0)
}

/// Numerical CW-derivative `∂f/∂z*` per coordinate.
pub fn cw_derivative(f: &ComplexFunctionProbe, c: &ComplexVector, h: f64) -> Result<ComplexVector> {
    combine(&real_partials(f, c, h)?, 1.0)
}

/// Both derivatives from a single stencil.
pub fn wirtinger_pair(f: &ComplexFunctionProbe, c: &ComplexVector, h: f64) -> Result<WirtingerPair> {
    let partials = real_partials(f, c, h)?;
    Ok(WirtingerPair {
        w_grad: combine(&partials, -1.0)?,
        cw_grad: combine(&partials, 1.0)?,
        point: c.clone(),
    })
}

/// First-order expansion remainder
/// `|f(c+δ) − f(c) − Σ (δ_j ∂f/∂z_j + δ_j* ∂f/∂z_j*)| / ‖δ‖`.
///
/// Tends to zero with `‖δ‖` for functions differentiable in the real sense.
pub fn first_order_remainder(f: &ComplexFunctionProbe, c: &ComplexVector, delta: &ComplexVector, h: f64) -> Result<f64> {
    let pair = wirtinger_pair(f, c, h)?;
    if delta.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: delta.dim(),
        });
    }
    let shifted: Vec<Complex64> = c.iter().zip(delta).map(|(a, b)| a + b).collect();
    let lin: Complex64 = delta
        .iter()
        .zip(pair.w_grad.iter().zip(pair.cw_grad.iter()))
        .map(|(d, (w, cw))| d * w + d.conj() * cw)
        .sum();
    let rem = f.eval_raw(&shifted)? - f.eval(c)? - lin;
    Ok(rem.norm() / delta.norm_sqr().sqrt())
}

fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max_dev` divided by `max(1, max |b|)`: absolute for O(1) values,
/// relative once finite-difference error grows with the function scale.
fn scaled_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|y| y.norm()).fold(1.0, f64::max);
    max_dev(a, b) / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleStatus {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one calculus identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleCheck {
    pub rule: String,
    /// Largest coordinatewise `|lhs − rhs|` over `max(1, max |rhs|)`; NaN when skipped.
    pub deviation: f64,
    pub status: RuleStatus,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyReport {
    pub checks: Vec<RuleCheck>,
}

impl PropertyReport {
    fn record(&mut self, rule: impl Into<String>, deviation: f64, tol: f64) {
        let status = if deviation <= tol { RuleStatus::Pass } else { RuleStatus::Fail };
        self.checks.push(RuleCheck {
            rule: rule.into(),
            deviation,
            status,
        });
    }

    fn skip(&mut self, rule: impl Into<String>) {
        self.checks.push(RuleCheck {
            rule: rule.into(),
            deviation: f64::NAN,
            status: RuleStatus::Skipped,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != RuleStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RuleCheck> {
        self.checks.iter().filter(|c| c.status == RuleStatus::Fail)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.status != RuleStatus::Skipped)
            .map(|c| c.deviation)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, rule: &str) -> Option<&RuleCheck> {
        self.checks.iter().find(|c| c.rule == rule)
    }

    pub fn merge(&mut self, other: PropertyReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                RuleStatus::Pass => "PASS",
                RuleStatus::Fail => "FAIL",
                RuleStatus::Skipped => "SKIP",
            };
            writeln!(f, "[{tag}] {:<28} {:.3e}", c.rule, c.deviation)?;
        }
        Ok(())
    }
}

/// Fixed non-holomorphic outer function for the chain rule: `S(u) = u² u* + (½ + i) u*`.
fn chain_outer() -> ComplexFunctionProbe {
    let k = Complex64::new(0.5, 1.0);
    ComplexFunctionProbe::new(1, move |u| u[0] * u[0] * u[0].conj() + k * u[0].conj())
}

fn scalar(v: Complex64) -> Result<ComplexVector> {
    ComplexVector::new(vec![v])
}

fn chain_rule(report: &mut PropertyReport, name: &str, inner: &ComplexFunctionProbe, outer: &ComplexFunctionProbe, c: &ComplexVector, h: f64, tol: f64) -> Result<()> {
    let t = inner.eval(c)?;
    let s_at = wirtinger_pair(outer, &scalar(t)?, h)?;
    let (s_w, s_cw) = (s_at.w_grad[0], s_at.cw_grad[0]);
    let comp = wirtinger_pair(&inner.compose_into(outer), c, h)?;
    let t_pair = wirtinger_pair(inner, c, h)?;
    let tc_pair = wirtinger_pair(&inner.conj(), c, h)?;
    let rhs_w: Vec<Complex64> = (0..c.dim()).map(|j| s_w * t_pair.w_grad[j] + s_cw * tc_pair.w_grad[j]).collect();
    let rhs_cw: Vec<Complex64> = (0..c.dim()).map(|j| s_w * t_pair.cw_grad[j] + s_cw * tc_pair.cw_grad[j]).collect();
    report.record(format!("{name}_w"), scaled_dev(comp.w_grad.as_slice(), &rhs_w), tol);
    report.record(format!("{name}_cw"), scaled_dev(comp.cw_grad.as_slice(), &rhs_cw), tol);
    Ok(())
}

fn analyticity_rules(report: &mut PropertyReport, label: &str, p: &ComplexFunctionProbe, pair: &WirtingerPair, tol: f64) {
    let zero = vec![Complex64::new(0.0, 0.0); pair.point.dim()];
    match p.analyticity() {
        Analyticity::Holomorphic => {
            report.record(format!("holomorphic_cw_zero({label})"), scaled_dev(pair.cw_grad.as_slice(), &zero), tol)
        }
        Analyticity::AntiHolomorphic => {
            report.record(format!("antiholomorphic_w_zero({label})"), scaled_dev(pair.w_grad.as_slice(), &zero), tol)
        }
        Analyticity::RealValued => {
            let conj_w: Vec<Complex64> = pair.w_grad.iter().map(|c| c.conj()).collect();
            report.record(format!("real_conjugate_pair({label})"), scaled_dev(pair.cw_grad.as_slice(), &conj_w), tol)
        }
        Analyticity::General => {}
    }
}

/// Numerically verifies the Wirtinger calculus rules for `f`, `g` at `c`.
///
/// Rules checked (W and CW forms each): conjugation `(∂f/∂z)* = ∂f*/∂z*` and
/// `(∂f/∂z*)* = ∂f*/∂z`, linearity, product, division (skipped when
/// `|g(c)| <= 0.1`) and chain rule through a fixed non-holomorphic outer
/// function (and through `g` itself when `g` is univariate). Probes tagged as
/// holomorphic, anti-holomorphic or real-valued get the matching vanishing or
/// conjugate-pair check.
pub fn check_property_suite(f: &ComplexFunctionProbe, g: &ComplexFunctionProbe, c: &ComplexVector, tol: f64) -> Result<PropertyReport> {
    check_property_suite_with_step(f, g, c, tol, DEFAULT_STEP)
}

pub fn check_property_suite_with_step(f: &ComplexFunctionProbe, g: &ComplexFunctionProbe, c: &ComplexVector, tol: f64, h: f64) -> Result<PropertyReport> {
    if f.arity() != g.arity() {
        return Err(Error::DimensionMismatch {
            expected: f.arity(),
            got: g.arity(),
        });
    }
    let mut report = PropertyReport::default();
    let fc = f.eval(c)?;
    let gc = g.eval(c)?;
    let fp = wirtinger_pair(f, c, h)?;
    let gp = wirtinger_pair(g, c, h)?;
    let fconj = wirtinger_pair(&f.conj(), c, h)?;

    let conj = |v: &ComplexVector| -> Vec<Complex64> { v.iter().map(|x| x.conj()).collect() };
    report.record("conjugation_w", scaled_dev(&conj(&fp.w_grad), fconj.cw_grad.as_slice()), tol);
    report.record("conjugation_cw", scaled_dev(&conj(&fp.cw_grad), fconj.w_grad.as_slice()), tol);

    let alpha = Complex64::new(0.7, -1.3);
    let beta = Complex64::new(-0.4, 0.25);
    let lin = wirtinger_pair(&f.linear_combination(alpha, g, beta), c, h)?;
    let combo = |a: &ComplexVector, b: &ComplexVector| -> Vec<Complex64> { a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect() };
    report.record("linearity_w", scaled_dev(lin.w_grad.as_slice(), &combo(&fp.w_grad, &gp.w_grad)), tol);
    report.record("linearity_cw", scaled_dev(lin.cw_grad.as_slice(), &combo(&fp.cw_grad, &gp.cw_grad)), tol);

    let prod = wirtinger_pair(&f.product(g), c, h)?;
    let prod_rhs = |a: &ComplexVector, b: &ComplexVector| -> Vec<Complex64> { a.iter().zip(b).map(|(df, dg)| df * gc + fc * dg).collect() };
    report.record("product_w", scaled_dev(prod.w_grad.as_slice(), &prod_rhs(&fp.w_grad, &gp.w_grad)), tol);
    report.record("product_cw", scaled_dev(prod.cw_grad.as_slice(), &prod_rhs(&fp.cw_grad, &gp.cw_grad)), tol);

    if gc.norm() > SINGULARITY_GUARD {
        let quot = wirtinger_pair(&f.quotient(g), c, h)?;
        let quot_rhs = |a: &ComplexVector, b: &ComplexVector| -> Vec<Complex64> {
            a.iter().zip(b).map(|(df, dg)| (df * gc - fc * dg) / (gc * gc)).collect()
        };
        report.record("division_w", scaled_dev(quot.w_grad.as_slice(), &quot_rhs(&fp.w_grad, &gp.w_grad)), tol);
        report.record("division_cw", scaled_dev(quot.cw_grad.as_slice(), &quot_rhs(&fp.cw_grad, &gp.cw_grad)), tol);
    } else {
        report.skip("division_w");
        report.skip("division_cw");
    }

    chain_rule(&mut report, "chain", f, &chain_outer(), c, h, tol)?;
    if g.arity() == 1 {
        chain_rule(&mut report, "chain_g_of_f", f, g, c, h, tol)?;
    }

    analyticity_rules(&mut report, "f", f, &fp, tol);
    analyticity_rules(&mut report, "g", g, &gp, tol);
    Ok(report)
}

/// Gradient rules for the four sesquilinear forms in `f`:
/// `⟨f, w⟩ = w^H f`, `⟨w, f⟩ = f^H w`, `⟨f*, w⟩` and `⟨w, f*⟩`.
pub fn check_inner_product_rules(w: &ComplexVector, c: &ComplexVector, tol: f64) -> Result<PropertyReport> {
    let n = w.dim();
    if c.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.dim() });
    }
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let w_conj: Vec<Complex64> = w.iter().map(|x| x.conj()).collect();
    let wv: Vec<Complex64> = w.as_slice().to_vec();

    // ⟨a, b⟩ = Σ a_i b_i*
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
    let forms: [(&str, Box<dyn Fn(&[Complex64], &[Complex64]) -> Complex64 + Send + Sync>, &[Complex64], &[Complex64]); 4] = [
        ("inner_f_w", Box::new(move |f, w| inner(f, w)), &w_conj, &zero),
        ("inner_w_f", Box::new(move |f, w| inner(w, f)), &zero, &wv),
        ("inner_fconj_w", Box::new(move |f, w| {
            let fc: Vec<Complex64> = f.iter().map(|x| x.conj()).collect();
            inner(&fc, w)
        }), &zero, &w_conj),
        ("inner_w_fconj", Box::new(move |f, w| {
            let fc: Vec<Complex64> = f.iter().map(|x| x.conj()).collect();
            inner(w, &fc)
        }), &wv, &zero),
    ];

    let mut report = PropertyReport::default();
    for (name, form, expect_w, expect_cw) in forms {
        let wvec = wv.clone();
        let form = Arc::new(form);
        let probe = ComplexFunctionProbe::new(n, move |f| form(f, &wvec));
        let pair = wirtinger_pair(&probe, c, DEFAULT_STEP)?;
        report.record(format!("{name}_w"), scaled_dev(pair.w_grad.as_slice(), expect_w), tol);
        report.record(format!("{name}_cw"), scaled_dev(pair.cw_grad.as_slice(), expect_cw), tol);
    }
    Ok(report)
}

/// Instantaneous LMS cost `L(w) = |d − w^H z|²` as a probe over `w`.
pub fn lms_cost_probe(z: &ComplexVector, d: Complex64) -> ComplexFunctionProbe {
    let z = z.as_slice().to_vec();
    ComplexFunctionProbe::new(z.len(), move |w| {
        let y: Complex64 = z.iter().zip(w).map(|(zi, wi)| wi.conj() * zi).sum();
        Complex64::new((d - y).norm_sqr(), 0.0)
    })
    .with_analyticity(Analyticity::RealValued)
}

/// Max coordinatewise deviation between the numerical CW gradient of
/// `|d − w^H z|²` in `w` and the closed form `−e* z`, `e = d − w^H z`.
pub fn lms_gradient_deviation(z: &ComplexVector, d: Complex64, w: &ComplexVector) -> Result<f64> {
    let e = d - z.hermitian_dot(w)?;
    let analytic: Vec<Complex64> = z.iter().map(|zi| -e.conj() * zi).collect();
    let numeric = cw_derivative(&lms_cost_probe(z, d), w, DEFAULT_STEP)?;
    Ok(max_dev(numeric.as_slice(), &analytic))
}

/// True when the CW gradient of the LMS cost equals `−e* z` within `tol`.
pub fn check_lms_gradient(z: &ComplexVector, d: Complex64, w: &ComplexVector, tol: f64) -> Result<bool> {
    Ok(lms_gradient_deviation(z, d, w)? <= tol)
}

/// One term `coeff · Π_j z_j^{p_j} (z_j*)^{q_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub z_pow: Vec<u32>,
    pub zc_pow: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.z_pow.iter().chain(&self.zc_pow).sum()
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut v = self.coeff;
        for (j, zj) in z.iter().enumerate() {
            v *= zj.powu(self.z_pow[j]) * zj.conj().powu(self.zc_pow[j]);
        }
        v
    }

    /// Derivative in `z_j` (or `z_j*` when `conj`), the other variable held constant.
    fn partial(&self, z: &[Complex64], j: usize, conj: bool) -> Complex64 {
        let p = if conj { self.zc_pow[j] } else { self.z_pow[j] };
        if p == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut t = self.clone();
        if conj {
            t.zc_pow[j] -= 1;
        } else {
            t.z_pow[j] -= 1;
        }
        t.coeff *= p as f64;
        t.eval(z)
    }
}

/// Polynomial in `(z, z*)` with rule-based symbolic W/CW gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerPolynomial {
    pub arity: usize,
    pub terms: Vec<Monomial>,
}

impl WirtingerPolynomial {
    /// Random polynomial with `n_terms` terms of total degree at most `max_degree`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, arity: usize, max_degree: u32, n_terms: usize) -> Self {
        let terms = (0..n_terms)
            .map(|_| {
                let target = rng.random_range(0..=max_degree);
                let mut z_pow = vec![0u32; arity];
                let mut zc_pow = vec![0u32; arity];
                for _ in 0..target {
                    let j = rng.random_range(0..arity);
                    if rng.random_bool(0.5) {
                        z_pow[j] += 1;
                    } else {
                        zc_pow[j] += 1;
                    }
                }
                Monomial {
                    coeff: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    z_pow,
                    zc_pow,
                }
            })
            .collect();
        Self { arity, terms }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// `∂p/∂z_j`, treating `z*` as constant.
    pub fn w_grad(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.arity).map(|j| self.terms.iter().map(|t| t.partial(z, j, false)).sum()).collect()
    }

    /// `∂p/∂z_j*`, treating `z` as constant.
    pub fn cw_grad(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.arity).map(|j| self.terms.iter().map(|t| t.partial(z, j, true)).sum()).collect()
    }

    pub fn analyticity(&self) -> Analyticity {
        let has_z = self.terms.iter().any(|t| t.z_pow.iter().any(|&p| p > 0));
        let has_zc = self.terms.iter().any(|t| t.zc_pow.iter().any(|&p| p > 0));
        match (has_z, has_zc) {
            (_, false) => Analyticity::Holomorphic,
            (false, true) => Analyticity::AntiHolomorphic,
            _ => Analyticity::General,
        }
    }

    pub fn probe(&self) -> ComplexFunctionProbe {
        let p = self.clone();
        let a = p.analyticity();
        ComplexFunctionProbe::new(self.arity, move |z| p.eval(z)).with_analyticity(a)
    }

    /// Max deviation of the numerical W/CW gradients from the rule-based ones.
    pub fn gradient_deviation(&self, c: &ComplexVector, h: f64) -> Result<f64> {
        let pair = wirtinger_pair(&self.probe(), c, h)?;
        let w = self.w_grad(c.as_slice());
        let cw = self.cw_grad(c.as_slice());
        Ok(max_dev(pair.w_grad.as_slice(), &w).max(max_dev(pair.cw_grad.as_slice(), &cw)))
    }
}
