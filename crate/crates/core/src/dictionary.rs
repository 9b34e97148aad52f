//! Growing kernel expansions and the novelty admission rule.
//!
//! A [`Dictionary`] stores centers `z(k)` with one complex coefficient each.
//! Two feature spaces are supported:
//!
//! - [`FeatureSpace::ComplexifiedReal`]: a real kernel acting on the stacked
//!   images `(Re z, Im z)`, with `Φ(z) = κ(·, (x, y)) + i κ(·, (x, y))` so that
//!   `⟨Φ(z), Φ(z')⟩ = 2 κ((x, y), (x', y'))`. The coefficient of center `k`
//!   packs the pair `(a(k), b(k))` as `a(k) + i b(k)`.
//! - [`FeatureSpace::PureComplex`]: the kernel is evaluated directly on the
//!   stored vectors and `⟨Φ(z), Φ(z')⟩ = κ(z, z')`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ComplexVector, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSpace {
    ComplexifiedReal,
    PureComplex,
}

impl FeatureSpace {
    fn tag(&self) -> &'static str {
        match self {
            FeatureSpace::ComplexifiedReal => "complexified_real",
            FeatureSpace::PureComplex => "pure_complex",
        }
    }

    fn check_kernel(&self, kernel: &KernelSpec) -> Result<()> {
        kernel.validate()?;
        if *self == FeatureSpace::ComplexifiedReal && matches!(kernel, KernelSpec::ComplexGaussian { .. }) {
            return Err(Error::KernelMismatch {
                kernel: kernel.name(),
                context: "the complexified real feature space".into(),
            });
        }
        Ok(())
    }
}

/// Which side of the inner product the weight sits on for pure complex
/// expansions.
///
/// `FeatureFirst` predicts `⟨Φ(z), w⟩ = Σ a(k) ⟨Φ(z), Φ(z(k))⟩` and with the
/// complex linear kernel reproduces the explicit CLMS output `w^H z`.
/// `WeightFirst` predicts `⟨w, Φ(z)⟩ = Σ a(k) ⟨Φ(z(k)), Φ(z)⟩`. The two agree
/// for real kernels and differ by conjugation of the kernel for complex ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputModel {
    #[default]
    FeatureFirst,
    WeightFirst,
}

/// Thresholds of the novelty criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoveltyParams {
    /// Minimum RKHS distance to every stored center.
    pub delta1: f64,
    /// Minimum a-priori error magnitude.
    pub delta2: f64,
}

impl NoveltyParams {
    pub fn new(delta1: f64, delta2: f64) -> Result<Self> {
        let p = Self { delta1, delta2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta1 > 0.0 && self.delta2 > 0.0 && self.delta1.is_finite() && self.delta2.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "novelty thresholds must be positive, got delta1={} delta2={}",
                self.delta1, self.delta2
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Admit,
    /// Closer than `delta1` to an existing center.
    RejectNear,
    /// Error magnitude below `delta2`.
    RejectSmallError,
}

/// `⟨Φ(z), Φ(zp)⟩` in the given feature space.
pub fn feature_inner(z: &ComplexVector, zp: &ComplexVector, space: FeatureSpace, kernel: &KernelSpec) -> Result<Complex64> {
    space.check_kernel(kernel)?;
    match space {
        FeatureSpace::ComplexifiedReal => Ok(Complex64::new(2.0 * kernel.eval_real_image(z, zp)?, 0.0)),
        FeatureSpace::PureComplex => kernel.eval(z, zp),
    }
}

/// `‖Φ(z) − Φ(center)‖²` through the kernel trick, clamped at zero.
pub fn rkhs_distance_sq(z: &ComplexVector, center: &ComplexVector, space: FeatureSpace, kernel: &KernelSpec) -> Result<f64> {
    let zz = feature_inner(z, z, space, kernel)?;
    let cc = feature_inner(center, center, space, kernel)?;
    let zc = feature_inner(z, center, space, kernel)?;
    Ok(distance_from_parts(zz.re, cc.re, zc.re))
}

fn distance_from_parts(zz: f64, cc: f64, zc_re: f64) -> f64 {
    (zz + cc - 2.0 * zc_re).max(0.0)
}

/// Kernel expansion with insertion-ordered centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    space: FeatureSpace,
    kernel: KernelSpec,
    centers: Vec<ComplexVector>,
    coeffs: Vec<Complex64>,
    // ⟨Φ(c), Φ(c)⟩ per center, reused by the distance scan
    self_inner: Vec<f64>,
}

impl Dictionary {
    pub fn new(space: FeatureSpace, kernel: KernelSpec) -> Result<Self> {
        space.check_kernel(&kernel)?;
        Ok(Self {
            space,
            kernel,
            centers: Vec::new(),
            coeffs: Vec::new(),
            self_inner: Vec::new(),
        })
    }

    pub fn space(&self) -> FeatureSpace {
        self.space
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.centers.first().map(ComplexVector::dim)
    }

    pub fn centers(&self) -> &[ComplexVector] {
        &self.centers
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn inner(&self, z: &ComplexVector, zp: &ComplexVector) -> Result<Complex64> {
        feature_inner(z, zp, self.space, &self.kernel)
    }

    fn check_dim(&self, z: &ComplexVector) -> Result<()> {
        match self.dim() {
            Some(d) if d != z.dim() => Err(Error::DimensionMismatch { expected: d, got: z.dim() }),
            _ => Ok(()),
        }
    }

    /// Appends a center. Coefficients are never revisited afterwards.
    pub fn push(&mut self, center: ComplexVector, coeff: Complex64) -> Result<()> {
        self.check_dim(&center)?;
        if !coeff.is_finite() {
            return Err(Error::Numeric(format!("non-finite coefficient {coeff}")));
        }
        let own = self.inner(&center, &center)?.re;
        self.centers.push(center);
        self.coeffs.push(coeff);
        self.self_inner.push(own);
        Ok(())
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scale_coeffs(&mut self, factor: Complex64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    /// Filter output with the default [`OutputModel::FeatureFirst`].
    pub fn evaluate(&self, z: &ComplexVector) -> Result<Complex64> {
        self.evaluate_with(z, OutputModel::FeatureFirst)
    }

    /// Filter output at `z`; an empty dictionary yields zero.
    ///
    /// Complexified real: `Σ (a+b) κ(z, z(k)) + i Σ (a−b) κ(z, z(k))` on the
    /// stacked images. Pure complex: `Σ a(k) ⟨Φ(z), Φ(z(k))⟩` or, for
    /// `WeightFirst`, `Σ a(k) ⟨Φ(z(k)), Φ(z)⟩`.
    pub fn evaluate_with(&self, z: &ComplexVector, model: OutputModel) -> Result<Complex64> {
        self.check_dim(z)?;
        let mut out = Complex64::new(0.0, 0.0);
        match self.space {
            FeatureSpace::ComplexifiedReal => {
                let (mut re, mut im) = (0.0, 0.0);
                for (center, coeff) in self.centers.iter().zip(&self.coeffs) {
                    let k = self.kernel.eval_real_image(z, center)?;
                    let (a, b) = (coeff.re, coeff.im);
                    re += (a + b) * k;
                    im += (a - b) * k;
                }
                out = Complex64::new(re, im);
            }
            FeatureSpace::PureComplex => {
                for (center, coeff) in self.centers.iter().zip(&self.coeffs) {
                    let k = match model {
                        OutputModel::FeatureFirst => self.kernel.eval(z, center)?,
                        OutputModel::WeightFirst => self.kernel.eval(center, z)?,
                    };
                    out += coeff * k;
                }
            }
        }
        Ok(out)
    }

    /// `min_k ‖Φ(z) − Φ(z(k))‖`, or `None` when empty.
    pub fn min_distance(&self, z: &ComplexVector) -> Result<Option<f64>> {
        self.check_dim(z)?;
        if self.is_empty() {
            return Ok(None);
        }
        let zz = self.inner(z, z)?.re;
        let mut best = f64::INFINITY;
        for (center, &cc) in self.centers.iter().zip(&self.self_inner) {
            let zc = self.inner(z, center)?.re;
            best = best.min(distance_from_parts(zz, cc, zc));
        }
        Ok(Some(best.sqrt()))
    }

    /// Serialises to a line-oriented text format.
    ///
    /// ```text
    /// cklms-dictionary v1
    /// space complexified_real
    /// kernel real_gaussian sigma=5
    /// dim 2
    /// centers 1
    /// 0.1 -0.2 0.3 0.4 | 0.25 -0.5
    /// ```
    ///
    /// Each center row lists `re im` per coordinate, then `|`, then the
    /// coefficient. Floats use shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("cklms-dictionary v1\n");
        let _ = writeln!(s, "space {}", self.space.tag());
        let _ = writeln!(s, "kernel {}", self.kernel);
        let _ = writeln!(s, "dim {}", self.dim().unwrap_or(0));
        let _ = writeln!(s, "centers {}", self.len());
        for (center, coeff) in self.centers.iter().zip(&self.coeffs) {
            for c in center {
                let _ = write!(s, "{} {} ", c.re, c.im);
            }
            let _ = writeln!(s, "| {} {}", coeff.re, coeff.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of input, expected {what}"),
            })
        };
        let perr = |line: usize, message: String| Error::Parse { line, message };

        let (ln, header) = next("header")?;
        if header != "cklms-dictionary v1" {
            return Err(perr(ln, format!("unknown header {header:?}")));
        }
        let (ln, space_line) = next("space")?;
        let space = match space_line.strip_prefix("space ") {
            Some("complexified_real") => FeatureSpace::ComplexifiedReal,
            Some("pure_complex") => FeatureSpace::PureComplex,
            _ => return Err(perr(ln, format!("bad space line {space_line:?}"))),
        };
        let (ln, kernel_line) = next("kernel")?;
        let kernel = parse_kernel(kernel_line).map_err(|m| perr(ln, m))?;
        let (ln, dim_line) = next("dim")?;
        let dim: usize = field(dim_line, "dim").map_err(|m| perr(ln, m))?;
        let (ln, count_line) = next("centers")?;
        let count: usize = field(count_line, "centers").map_err(|m| perr(ln, m))?;

        let mut dict = Dictionary::new(space, kernel).map_err(|e| perr(ln, e.to_string()))?;
        for _ in 0..count {
            let (ln, row) = next("center row")?;
            let (lhs, rhs) = row.split_once('|').ok_or_else(|| perr(ln, "missing '|' separator".into()))?;
            let nums = parse_floats(lhs).map_err(|m| perr(ln, m))?;
            if nums.len() != 2 * dim {
                return Err(perr(ln, format!("expected {} center values, got {}", 2 * dim, nums.len())));
            }
            let coeff = parse_floats(rhs).map_err(|m| perr(ln, m))?;
            if coeff.len() != 2 {
                return Err(perr(ln, "coefficient needs exactly two values".into()));
            }
            let center = ComplexVector::new(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()).map_err(|e| perr(ln, e.to_string()))?;
            dict.push(center, Complex64::new(coeff[0], coeff[1])).map_err(|e| perr(ln, e.to_string()))?;
        }
        if let Some((ln, extra)) = lines.next() {
            return Err(perr(ln, format!("trailing content {extra:?}")));
        }
        Ok(dict)
    }
}

fn field<T: std::str::FromStr>(line: &str, key: &str) -> std::result::Result<T, String> {
    line.strip_prefix(key)
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("expected '{key} <value>', got {line:?}"))
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}"))).collect()
}

fn parse_kernel(line: &str) -> std::result::Result<KernelSpec, String> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("kernel") {
        return Err(format!("expected kernel line, got {line:?}"));
    }
    let name = parts.next().ok_or("missing kernel name")?;
    let param = |key: &str, parts: &mut std::str::SplitWhitespace<'_>| -> std::result::Result<String, String> {
        parts
            .next()
            .and_then(|p| p.strip_prefix(key))
            .and_then(|p| p.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| format!("kernel {name} needs {key}=<value>"))
    };
    let bad = |v: String| format!("bad kernel parameter {v:?}");
    match name {
        "real_gaussian" => {
            let v = param("sigma", &mut parts)?;
            Ok(KernelSpec::RealGaussian { sigma: v.parse().map_err(|_| bad(v))? })
        }
        "complex_gaussian" => {
            let v = param("sigma", &mut parts)?;
            Ok(KernelSpec::ComplexGaussian { sigma: v.parse().map_err(|_| bad(v))? })
        }
        "polynomial" => {
            let v = param("degree", &mut parts)?;
            Ok(KernelSpec::Polynomial { degree: v.parse().map_err(|_| bad(v))? })
        }
        "complex_linear" => Ok(KernelSpec::ComplexLinear),
        other => Err(format!("unknown kernel {other:?}")),
    }
}

/// Novelty criterion: reject when the closest center is within `delta1`, then
/// when the error magnitude is below `delta2`. An empty dictionary always admits.
pub fn novelty_admit(dict: &Dictionary, z: &ComplexVector, err_mag: f64, p: &NoveltyParams) -> Result<Admission> {
    let Some(dis) = dict.min_distance(z)? else {
        return Ok(Admission::Admit);
    };
    Ok(if dis < p.delta1 {
        Admission::RejectNear
    } else if err_mag < p.delta2 {
        Admission::RejectSmallError
    } else {
        Admission::Admit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cv(v: &[Complex64]) -> ComplexVector {
        ComplexVector::new(v.to_vec()).unwrap()
    }

    const RG: KernelSpec = KernelSpec::RealGaussian { sigma: 1.0 };

    #[test]
    fn feature_inner_examples() {
        let z = cv(&[c(0.3, -0.4), c(1.0, 2.0)]);
        let v = feature_inner(&z, &z, FeatureSpace::ComplexifiedReal, &RG).unwrap();
        assert_eq!(v, c(2.0, 0.0));

        let i = cv(&[c(0.0, 1.0)]);
        let v = feature_inner(&i, &i, FeatureSpace::PureComplex, &KernelSpec::ComplexGaussian { sigma: 1.0 }).unwrap();
        assert_abs_diff_eq!(v.re, 54.598_150_033_144_236, epsilon = 1e-12);

        let v = feature_inner(&z, &z, FeatureSpace::PureComplex, &KernelSpec::ComplexLinear).unwrap();
        assert_abs_diff_eq!(v.re, z.norm_sqr(), epsilon = 1e-15);

        assert!(matches!(
            feature_inner(&z, &z, FeatureSpace::ComplexifiedReal, &KernelSpec::ComplexGaussian { sigma: 1.0 }),
            Err(Error::KernelMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let z = cv(&[c(0.3, -0.4)]);
        assert_eq!(rkhs_distance_sq(&z, &z, FeatureSpace::ComplexifiedReal, &RG).unwrap(), 0.0);

        let other = cv(&[c(-1.0, 0.7)]);
        let d = rkhs_distance_sq(&z, &other, FeatureSpace::ComplexifiedReal, &RG).unwrap();
        let k = RG.eval_real_image(&z, &other).unwrap();
        assert_abs_diff_eq!(d, 4.0 - 4.0 * k, epsilon = 1e-14);
        assert!((0.0..4.0).contains(&d));

        let d = rkhs_distance_sq(&cv(&[c(1.0, 0.0)]), &cv(&[c(0.0, 0.0)]), FeatureSpace::PureComplex, &KernelSpec::ComplexLinear).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn novelty_examples() {
        let p = NoveltyParams::new(0.15, 0.2).unwrap();
        let mut dict = Dictionary::new(FeatureSpace::ComplexifiedReal, RG).unwrap();
        let z = cv(&[c(0.5, 0.5)]);
        assert_eq!(novelty_admit(&dict, &z, 0.0, &p).unwrap(), Admission::Admit);

        dict.push(z.clone(), c(1.0, 0.0)).unwrap();
        assert_eq!(novelty_admit(&dict, &z, 10.0, &p).unwrap(), Admission::RejectNear);

        // ‖Φ(z) − Φ(c)‖ = 0.5 ⇔ 4(1 − κ) = 0.25 ⇔ ‖p − q‖² = −ln(15/16) with σ = 1
        let gap = (-(15.0f64 / 16.0).ln()).sqrt();
        let far = cv(&[c(0.5 + gap, 0.5)]);
        assert_abs_diff_eq!(dict.min_distance(&far).unwrap().unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(novelty_admit(&dict, &far, 0.1, &p).unwrap(), Admission::RejectSmallError);
        assert_eq!(novelty_admit(&dict, &far, 0.2, &p).unwrap(), Admission::Admit);

        assert!(NoveltyParams::new(0.0, 0.2).is_err());
        assert!(NoveltyParams::new(0.1, -1.0).is_err());
    }

    #[test]
    fn expansion_examples() {
        let dict = Dictionary::new(FeatureSpace::ComplexifiedReal, RG).unwrap();
        let z = cv(&[c(0.2, 0.1)]);
        assert_eq!(dict.evaluate(&z).unwrap(), c(0.0, 0.0));

        let mut dict = dict;
        dict.push(z.clone(), c(1.0, 0.0)).unwrap();
        assert_eq!(dict.evaluate(&z).unwrap(), c(1.0, 1.0));
        assert!(matches!(dict.evaluate(&cv(&[c(0.0, 0.0), c(0.0, 0.0)])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_complex_linear_expansion_matches_explicit_weight() {
        // Σ a_k ⟨z, z_k⟩ = w^H z with w = Σ a_k* z_k
        let centers = [cv(&[c(1.0, 2.0), c(-0.5, 0.3)]), cv(&[c(0.1, -0.7), c(0.9, 0.9)]), cv(&[c(-1.2, 0.0), c(0.4, -0.6)])];
        let coeffs = [c(0.3, -0.2), c(-1.0, 0.5), c(0.05, 0.8)];
        let mut dict = Dictionary::new(FeatureSpace::PureComplex, KernelSpec::ComplexLinear).unwrap();
        for (z, a) in centers.iter().zip(coeffs) {
            dict.push(z.clone(), a).unwrap();
        }
        let mut w = vec![c(0.0, 0.0); 2];
        for (z, a) in centers.iter().zip(coeffs) {
            for (wi, zi) in w.iter_mut().zip(z) {
                *wi += a.conj() * zi;
            }
        }
        let w = ComplexVector::new(w).unwrap();
        let x = cv(&[c(0.6, -0.1), c(-0.3, 1.4)]);
        let explicit = x.hermitian_dot(&w).unwrap();
        assert!((dict.evaluate(&x).unwrap() - explicit).norm() < 1e-14);
        // the other output model conjugates each kernel value
        let alt: Complex64 = centers.iter().zip(coeffs).map(|(z, a)| a * x.hermitian_dot(z).unwrap().conj()).sum();
        assert!((dict.evaluate_with(&x, OutputModel::WeightFirst).unwrap() - alt).norm() < 1e-14);
    }

    #[test]
    fn expansion_is_linear_in_coefficients() {
        let mut dict = Dictionary::new(FeatureSpace::PureComplex, KernelSpec::ComplexGaussian { sigma: 2.0 }).unwrap();
        dict.push(cv(&[c(0.1, 0.2)]), c(0.5, -0.5)).unwrap();
        dict.push(cv(&[c(-0.4, 0.3)]), c(1.5, 0.25)).unwrap();
        let z = cv(&[c(0.3, 0.3)]);
        let base = dict.evaluate(&z).unwrap();
        let lambda = c(-0.7, 1.1);
        let mut scaled = dict.clone();
        scaled.scale_coeffs(lambda);
        assert!((scaled.evaluate(&z).unwrap() - lambda * base).norm() < 1e-13);

        // complexified: real-linear in (a, b)
        let mut dict = Dictionary::new(FeatureSpace::ComplexifiedReal, RG).unwrap();
        dict.push(cv(&[c(0.1, 0.2)]), c(0.5, -0.5)).unwrap();
        let base = dict.evaluate(&z).unwrap();
        dict.scale_coeffs(c(-2.5, 0.0));
        assert!((dict.evaluate(&z).unwrap() - base * -2.5).norm() < 1e-14);
    }

    #[test]
    fn text_roundtrip() {
        let mut dict = Dictionary::new(FeatureSpace::ComplexifiedReal, KernelSpec::RealGaussian { sigma: 5.0 }).unwrap();
        dict.push(cv(&[c(0.1, -0.2), c(1.0 / 3.0, 4.5e-17)]), c(0.25, -0.5)).unwrap();
        dict.push(cv(&[c(-7.0, 0.0), c(0.0, 2.0)]), c(1e300, -1e-300)).unwrap();
        let text = dict.to_text();
        assert!(text.starts_with("cklms-dictionary v1\nspace complexified_real\nkernel real_gaussian sigma=5\ndim 2\ncenters 2\n"));
        assert_eq!(Dictionary::from_text(&text).unwrap(), dict);

        let empty = Dictionary::new(FeatureSpace::PureComplex, KernelSpec::Polynomial { degree: 3 }).unwrap();
        assert_eq!(Dictionary::from_text(&empty.to_text()).unwrap(), empty);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let bad = "cklms-dictionary v1\nspace pure_complex\nkernel complex_linear\ndim 1\ncenters 1\n0.5 | 1 0\n";
        match Dictionary::from_text(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Dictionary::from_text("nope").is_err());
        let mismatch = "cklms-dictionary v1\nspace complexified_real\nkernel complex_gaussian sigma=1\ndim 1\ncenters 0\n";
        assert!(Dictionary::from_text(mismatch).is_err());
    }
}
