//! Streaming adaptive filters with a predict-then-update step.
//!
//! Every filter starts from zero weights (an empty dictionary for the kernel
//! filters), so the first prediction is exactly zero. Each step computes the
//! a-priori output `d̂(n)` from the state left by step `n−1`, forms
//! `e(n) = d(n) − d̂(n)` and then updates.

mod kernel;
mod linear;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dictionary::{NoveltyParams, OutputModel};
use crate::error::{Error, Result};
use crate::kernels::{ComplexVector, KernelSpec};

pub use kernel::{DualRealKlms, Ncklms1, Ncklms2};
pub use linear::{Nclms, WlNclms};

/// Guard on the input energy of the linear filters' normalisation.
pub const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "NCLMS")]
    Nclms,
    #[serde(rename = "WLNCLMS")]
    WlNclms,
    #[serde(rename = "NCKLMS1")]
    Ncklms1,
    #[serde(rename = "NCKLMS2")]
    Ncklms2,
    #[serde(rename = "DualRealKLMS")]
    DualRealKlms,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Nclms => "NCLMS",
            Algorithm::WlNclms => "WLNCLMS",
            Algorithm::Ncklms1 => "NCKLMS1",
            Algorithm::Ncklms2 => "NCKLMS2",
            Algorithm::DualRealKlms => "DualRealKLMS",
        }
    }

    pub fn is_kernel(&self) -> bool {
        matches!(self, Algorithm::Ncklms1 | Algorithm::Ncklms2 | Algorithm::DualRealKlms)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the dual-channel real KLMS feeds its two channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualInput {
    /// Real channel sees `Re z`, imaginary channel sees `Im z`.
    #[default]
    Split,
    /// Both channels see the stacked regressor `(Re z, Im z)`.
    Stacked,
}

/// Per-algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub algorithm: Algorithm,
    /// Column label in reports; defaults to the algorithm name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novelty: Option<NoveltyParams>,
    /// NCKLMS2 only.
    #[serde(default)]
    pub output_model: OutputModel,
    /// DualRealKLMS only.
    #[serde(default)]
    pub dual_input: DualInput,
}

impl FilterConfig {
    pub fn linear(algorithm: Algorithm, mu: f64) -> Self {
        Self {
            algorithm,
            label: None,
            mu,
            kernel: None,
            novelty: None,
            output_model: OutputModel::default(),
            dual_input: DualInput::default(),
        }
    }

    pub fn kernel(algorithm: Algorithm, mu: f64, kernel: KernelSpec, novelty: Option<NoveltyParams>) -> Self {
        Self {
            kernel: Some(kernel),
            novelty,
            ..Self::linear(algorithm, mu)
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.algorithm.name().to_owned())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!("{}: step size must be positive, got {}", self.label(), self.mu)));
        }
        match (self.algorithm.is_kernel(), &self.kernel) {
            (true, None) => return Err(Error::Config(format!("{}: kernel algorithm needs a kernel", self.label()))),
            (false, Some(_)) => return Err(Error::Config(format!("{}: linear algorithm takes no kernel", self.label()))),
            _ => {}
        }
        if let Some(k) = &self.kernel {
            k.validate()?;
            let ok = match self.algorithm {
                Algorithm::Ncklms1 | Algorithm::DualRealKlms => !matches!(k, KernelSpec::ComplexGaussian { .. }),
                Algorithm::Ncklms2 => matches!(k, KernelSpec::ComplexGaussian { .. } | KernelSpec::ComplexLinear),
                _ => true,
            };
            if !ok {
                return Err(Error::KernelMismatch {
                    kernel: k.name(),
                    context: self.algorithm.name().to_owned(),
                });
            }
        }
        if let Some(p) = &self.novelty {
            if !self.algorithm.is_kernel() {
                return Err(Error::Config(format!("{}: novelty criterion needs a kernel algorithm", self.label())));
            }
            p.validate()?;
        }
        Ok(())
    }
}

/// Output of one predict-then-update step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub prediction: Complex64,
    pub error: Complex64,
    /// Whether the sample entered the dictionary (always false for linear filters).
    pub admitted: bool,
    pub dict_size: usize,
}

impl StepResult {
    fn new(desired: Complex64, prediction: Complex64, admitted: bool, dict_size: usize) -> Result<Self> {
        if !prediction.is_finite() {
            return Err(Error::Numeric(format!("prediction diverged to {prediction}")));
        }
        Ok(Self {
            prediction,
            error: desired - prediction,
            admitted,
            dict_size,
        })
    }
}

fn check_sample(z: &ComplexVector, d: Complex64, input_dim: usize) -> Result<()> {
    if z.dim() != input_dim {
        return Err(Error::DimensionMismatch { expected: input_dim, got: z.dim() });
    }
    if !d.is_finite() {
        return Err(Error::Numeric(format!("desired value {d} is not finite")));
    }
    Ok(())
}

/// Any of the supported filters behind one streaming interface.
#[derive(Debug, Clone)]
pub enum Filter {
    Nclms(Nclms),
    WlNclms(WlNclms),
    Ncklms1(Ncklms1),
    Ncklms2(Ncklms2),
    DualRealKlms(DualRealKlms),
}

impl Filter {
    pub fn new(cfg: &FilterConfig, input_dim: usize) -> Result<Self> {
        cfg.validate()?;
        if input_dim == 0 {
            return Err(Error::Config("input dimension must be positive".into()));
        }
        let kernel = cfg.kernel.unwrap_or(KernelSpec::ComplexLinear);
        Ok(match cfg.algorithm {
            Algorithm::Nclms => Filter::Nclms(Nclms::new(input_dim, cfg.mu)),
            Algorithm::WlNclms => Filter::WlNclms(WlNclms::new(input_dim, cfg.mu)),
            Algorithm::Ncklms1 => Filter::Ncklms1(Ncklms1::new(input_dim, cfg.mu, kernel, cfg.novelty)?),
            Algorithm::Ncklms2 => Filter::Ncklms2(Ncklms2::new(input_dim, cfg.mu, kernel, cfg.novelty)?.with_output_model(cfg.output_model)),
            Algorithm::DualRealKlms => Filter::DualRealKlms(DualRealKlms::new(input_dim, cfg.mu, kernel, cfg.novelty, cfg.dual_input)?),
        })
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        match self {
            Filter::Nclms(f) => f.step(z, d),
            Filter::WlNclms(f) => f.step(z, d),
            Filter::Ncklms1(f) => f.step(z, d),
            Filter::Ncklms2(f) => f.step(z, d),
            Filter::DualRealKlms(f) => f.step(z, d),
        }
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        match self {
            Filter::Nclms(f) => f.predict(z),
            Filter::WlNclms(f) => f.predict(z),
            Filter::Ncklms1(f) => f.predict(z),
            Filter::Ncklms2(f) => f.predict(z),
            Filter::DualRealKlms(f) => f.predict(z),
        }
    }

    /// Number of samples processed so far.
    pub fn iteration(&self) -> u64 {
        match self {
            Filter::Nclms(f) => f.iteration(),
            Filter::WlNclms(f) => f.iteration(),
            Filter::Ncklms1(f) => f.iteration(),
            Filter::Ncklms2(f) => f.iteration(),
            Filter::DualRealKlms(f) => f.iteration(),
        }
    }

    pub fn dict_size(&self) -> usize {
        match self {
            Filter::Nclms(_) | Filter::WlNclms(_) => 0,
            Filter::Ncklms1(f) => f.dictionary().len(),
            Filter::Ncklms2(f) => f.dictionary().len(),
            Filter::DualRealKlms(f) => f.dict_size(),
        }
    }
}
