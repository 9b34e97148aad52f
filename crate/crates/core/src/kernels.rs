//! Reproducing kernels on `C^ν` and Gram-matrix utilities.
//!
//! Every two-argument kernel follows one slot convention: `κ(a, b)` keeps the
//! first argument free and conjugates the second. For the complex Gaussian this
//! is `exp(-Σ (a_i - b_i*)² / σ²)`, for the complex linear kernel `Σ a_i b_i*`.
//! Real kernels (real Gaussian, polynomial) are symmetric and refuse vectors
//! with nonzero imaginary parts.

use std::fmt;
use std::ops::Index;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, nonempty point of `C^ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = entries.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    /// Builds a vector with zero imaginary parts.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im == 0.0)
    }

    /// The stacked real image `(Re z, Im z)` in `R^{2ν}`, returned with zero
    /// imaginary parts.
    pub fn real_image(&self) -> Self {
        let re = self.0.iter().map(|c| Complex64::new(c.re, 0.0));
        let im = self.0.iter().map(|c| Complex64::new(c.im, 0.0));
        Self(re.chain(im).collect())
    }

    /// `w^H z` with `self` as `z`.
    pub fn hermitian_dot(&self, w: &ComplexVector) -> Result<Complex64> {
        check_dims(self, w)?;
        Ok(self.0.iter().zip(&w.0).map(|(z, w)| z * w.conj()).sum())
    }

    fn first_complex(&self) -> Option<usize> {
        self.0.iter().position(|c| c.im != 0.0)
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a ComplexVector {
    type Item = &'a Complex64;
    type IntoIter = std::slice::Iter<'a, Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn check_dims(a: &ComplexVector, b: &ComplexVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

fn check_real(v: &ComplexVector) -> Result<()> {
    match v.first_complex() {
        Some(index) => Err(Error::ComplexArgument { index }),
        None => Ok(()),
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kernel width must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

/// Real Gaussian kernel `exp(-‖x - y‖² / σ²)` on real vectors.
pub fn eval_real_gaussian(x: &ComplexVector, y: &ComplexVector, sigma: f64) -> Result<f64> {
    check_dims(x, y)?;
    check_real(x)?;
    check_real(y)?;
    check_sigma(sigma)?;
    let dist: f64 = x.iter().zip(y).map(|(a, b)| (a.re - b.re).powi(2)).sum();
    Ok((-dist / (sigma * sigma)).exp())
}

/// Complex Gaussian kernel `exp(-Σ (z_i - w_i*)² / σ²)`.
pub fn eval_complex_gaussian(z: &ComplexVector, w: &ComplexVector, sigma: f64) -> Result<Complex64> {
    check_dims(z, w)?;
    check_sigma(sigma)?;
    Ok(complex_gaussian_unchecked(z.as_slice(), w.as_slice(), sigma))
}

fn complex_gaussian_unchecked(z: &[Complex64], w: &[Complex64], sigma: f64) -> Complex64 {
    let s: Complex64 = z
        .iter()
        .zip(w)
        .map(|(a, b)| {
            let d = a - b.conj();
            d * d
        })
        .sum();
    (-s / (sigma * sigma)).exp()
}

/// Inhomogeneous polynomial kernel `(1 + x·y)^degree` on real vectors.
pub fn eval_polynomial(x: &ComplexVector, y: &ComplexVector, degree: u32) -> Result<f64> {
    check_dims(x, y)?;
    check_real(x)?;
    check_real(y)?;
    if degree == 0 {
        return Err(Error::InvalidParameter("polynomial degree must be >= 1".into()));
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a.re * b.re).sum();
    Ok(powi(1.0 + dot, degree))
}

/// Complex linear kernel `Σ z_i w_i*`, i.e. `w^H z`.
pub fn eval_complex_linear(z: &ComplexVector, w: &ComplexVector) -> Result<Complex64> {
    z.hermitian_dot(w)
}

fn powi(base: f64, degree: u32) -> f64 {
    base.powi(degree as i32)
}

/// Kernel selection plus parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    RealGaussian { sigma: f64 },
    ComplexGaussian { sigma: f64 },
    Polynomial { degree: u32 },
    ComplexLinear,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::RealGaussian { sigma } | KernelSpec::ComplexGaussian { sigma } => check_sigma(sigma),
            KernelSpec::Polynomial { degree } if degree == 0 => {
                Err(Error::InvalidParameter("polynomial degree must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::RealGaussian { .. } => "real_gaussian",
            KernelSpec::ComplexGaussian { .. } => "complex_gaussian",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::ComplexLinear => "complex_linear",
        }
    }

    /// Real-valued kernels that only accept real arguments.
    pub fn is_real(&self) -> bool {
        matches!(self, KernelSpec::RealGaussian { .. } | KernelSpec::Polynomial { .. })
    }

    /// `κ(a, b)` with the second slot conjugated.
    pub fn eval(&self, a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
        match *self {
            KernelSpec::RealGaussian { sigma } => eval_real_gaussian(a, b, sigma).map(Complex64::from),
            KernelSpec::ComplexGaussian { sigma } => eval_complex_gaussian(a, b, sigma),
            KernelSpec::Polynomial { degree } => eval_polynomial(a, b, degree).map(Complex64::from),
            KernelSpec::ComplexLinear => eval_complex_linear(a, b),
        }
    }

    /// Evaluates the kernel on the stacked real images `(Re a, Im a)` and
    /// `(Re b, Im b)` in `R^{2ν}` without materialising them.
    ///
    /// The complex linear kernel restricted to real images is the Euclidean dot
    /// product. The complex Gaussian has no real-image form and is rejected.
    pub fn eval_real_image(&self, a: &ComplexVector, b: &ComplexVector) -> Result<f64> {
        check_dims(a, b)?;
        let a = a.as_slice();
        let b = b.as_slice();
        match *self {
            KernelSpec::RealGaussian { sigma } => {
                check_sigma(sigma)?;
                let dist: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
                Ok((-dist / (sigma * sigma)).exp())
            }
            KernelSpec::Polynomial { degree } => {
                if degree == 0 {
                    return Err(Error::InvalidParameter("polynomial degree must be >= 1".into()));
                }
                Ok(powi(1.0 + real_image_dot(a, b), degree))
            }
            KernelSpec::ComplexLinear => Ok(real_image_dot(a, b)),
            KernelSpec::ComplexGaussian { .. } => Err(Error::KernelMismatch {
                kernel: self.name(),
                context: "stacked real images".into(),
            }),
        }
    }
}

// (Re a, Im a)·(Re b, Im b) = Re Σ a_i b_i*
fn real_image_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::RealGaussian { sigma } | KernelSpec::ComplexGaussian { sigma } => {
                write!(f, "{} sigma={}", self.name(), sigma)
            }
            KernelSpec::Polynomial { degree } => write!(f, "{} degree={}", self.name(), degree),
            KernelSpec::ComplexLinear => write!(f, "{}", self.name()),
        }
    }
}

/// Kernel matrix `K[i][j] = κ(points[i], points[j])`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    entries: DMatrix<Complex64>,
    points: Vec<ComplexVector>,
}

impl GramMatrix {
    /// Wraps an explicit matrix. No Hermitian check is made here; see
    /// [`check_positive_definite`].
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        Ok(Self { entries, points: Vec::new() })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn points(&self) -> &[ComplexVector] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// `max |K[i][j] - conj(K[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part `(K + K^H) / 2`.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Tolerance for treating a Gram matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Builds the Gram matrix of `points` under `spec`.
pub fn gram(points: &[ComplexVector], spec: &KernelSpec) -> Result<GramMatrix> {
    let first = points.first().ok_or(Error::EmptyVector)?;
    spec.validate()?;
    let n = points.len();
    for p in points {
        check_dims(first, p)?;
    }
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = spec.eval(&points[i], &points[j])?;
        }
    }
    Ok(GramMatrix {
        entries,
        points: points.to_vec(),
    })
}

/// True iff the smallest eigenvalue of the Hermitian part is `>= -tol`.
///
/// Fails when the matrix deviates from Hermitian by more than
/// `max(tol, HERMITIAN_TOL)`.
pub fn check_positive_definite(g: &GramMatrix, tol: f64) -> Result<bool> {
    let herm_tol = tol.max(HERMITIAN_TOL);
    let deviation = g.hermitian_deviation();
    if deviation > herm_tol {
        return Err(Error::NotHermitian {
            deviation,
            tol: herm_tol,
        });
    }
    Ok(g.min_eigenvalue() >= -tol)
}
