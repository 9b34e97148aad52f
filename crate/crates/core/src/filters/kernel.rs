use num_complex::Complex64;

use super::{check_sample, DualInput, StepResult, NORM_EPS};
use crate::dictionary::{novelty_admit, Admission, Dictionary, FeatureSpace, NoveltyParams, OutputModel};
use crate::error::{Error, Result};
use crate::kernels::{ComplexVector, KernelSpec};

fn admit(dict: &Dictionary, z: &ComplexVector, err_mag: f64, novelty: Option<&NoveltyParams>) -> Result<bool> {
    Ok(match novelty {
        None => true,
        Some(p) => novelty_admit(dict, z, err_mag, p)? == Admission::Admit,
    })
}

/// Normalized complex KLMS through complexified real kernels.
///
/// With `γ = 2 κ(z(n), z(n))` evaluated on the stacked image in `R^{2L}`:
///
/// ```text
/// d̂(n) = Σ (a(k)+b(k)) κ(z(n), z(k)) + i Σ (a(k)−b(k)) κ(z(n), z(k))
/// a(n) = μ (Re e(n) + Im e(n)) / γ
/// b(n) = μ (Re e(n) − Im e(n)) / γ
/// ```
///
/// The pair is stored as the dictionary coefficient `a(n) + i b(n)`.
#[derive(Debug, Clone)]
pub struct Ncklms1 {
    mu: f64,
    input_dim: usize,
    novelty: Option<NoveltyParams>,
    dict: Dictionary,
    n: u64,
}

impl Ncklms1 {
    pub fn new(input_dim: usize, mu: f64, kernel: KernelSpec, novelty: Option<NoveltyParams>) -> Result<Self> {
        Ok(Self {
            mu,
            input_dim,
            novelty,
            dict: Dictionary::new(FeatureSpace::ComplexifiedReal, kernel)?,
            n: 0,
        })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        check_sample(z, Complex64::new(0.0, 0.0), self.input_dim)?;
        self.dict.evaluate(z)
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        check_sample(z, d, self.input_dim)?;
        let prediction = self.dict.evaluate(z)?;
        let e = d - prediction;
        let gamma = 2.0 * self.dict.kernel().eval_real_image(z, z)?;
        // Φ(z) = 0 (linear kernel at the origin): the update is zero.
        let mut admitted = false;
        if gamma > NORM_EPS && admit(&self.dict, z, e.norm(), self.novelty.as_ref())? {
            let a = self.mu * (e.re + e.im) / gamma;
            let b = self.mu * (e.re - e.im) / gamma;
            self.dict.push(z.clone(), Complex64::new(a, b))?;
            admitted = true;
        }
        self.n += 1;
        StepResult::new(d, prediction, admitted, self.dict.len())
    }
}

/// Normalized complex KLMS with a pure complex kernel.
///
/// `γ = κ(z(n), z(n))` (real for the complex Gaussian and complex linear
/// kernels) and `a(n) = μ e(n) / γ`.
#[derive(Debug, Clone)]
pub struct Ncklms2 {
    mu: f64,
    input_dim: usize,
    novelty: Option<NoveltyParams>,
    model: OutputModel,
    dict: Dictionary,
    n: u64,
}

impl Ncklms2 {
    pub fn new(input_dim: usize, mu: f64, kernel: KernelSpec, novelty: Option<NoveltyParams>) -> Result<Self> {
        if !matches!(kernel, KernelSpec::ComplexGaussian { .. } | KernelSpec::ComplexLinear) {
            return Err(Error::KernelMismatch {
                kernel: kernel.name(),
                context: "NCKLMS2".into(),
            });
        }
        Ok(Self {
            mu,
            input_dim,
            novelty,
            model: OutputModel::default(),
            dict: Dictionary::new(FeatureSpace::PureComplex, kernel)?,
            n: 0,
        })
    }

    pub fn with_output_model(mut self, model: OutputModel) -> Self {
        self.model = model;
        self
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        check_sample(z, Complex64::new(0.0, 0.0), self.input_dim)?;
        self.dict.evaluate_with(z, self.model)
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        check_sample(z, d, self.input_dim)?;
        let prediction = self.dict.evaluate_with(z, self.model)?;
        let e = d - prediction;
        let kzz = self.dict.kernel().eval(z, z)?;
        debug_assert!(kzz.im.abs() <= 1e-9 * kzz.re.abs().max(1.0));
        let gamma = kzz.re;
        let mut admitted = false;
        if gamma > NORM_EPS && admit(&self.dict, z, e.norm(), self.novelty.as_ref())? {
            self.dict.push(z.clone(), e * (self.mu / gamma))?;
            admitted = true;
        }
        self.n += 1;
        StepResult::new(d, prediction, admitted, self.dict.len())
    }
}

/// Two independent normalized real KLMS filters, one for `Re d` and one for
/// `Im d`.
///
/// Each channel predicts `y = Σ c(k) κ(p, p(k))` from its real regressor `p`,
/// takes its own real error and appends `c(n) = μ e / κ(p, p)`. With
/// [`DualInput::Split`] the channels see `Re z` and `Im z`; with
/// [`DualInput::Stacked`] both see `(Re z, Im z)`.
#[derive(Debug, Clone)]
pub struct DualRealKlms {
    mu: f64,
    input_dim: usize,
    novelty: Option<NoveltyParams>,
    input: DualInput,
    re_channel: Dictionary,
    im_channel: Dictionary,
    n: u64,
}

impl DualRealKlms {
    pub fn new(input_dim: usize, mu: f64, kernel: KernelSpec, novelty: Option<NoveltyParams>, input: DualInput) -> Result<Self> {
        if matches!(kernel, KernelSpec::ComplexGaussian { .. }) {
            return Err(Error::KernelMismatch {
                kernel: kernel.name(),
                context: "DualRealKLMS".into(),
            });
        }
        Ok(Self {
            mu,
            input_dim,
            novelty,
            input,
            re_channel: Dictionary::new(FeatureSpace::PureComplex, kernel)?,
            im_channel: Dictionary::new(FeatureSpace::PureComplex, kernel)?,
            n: 0,
        })
    }

    pub fn channels(&self) -> (&Dictionary, &Dictionary) {
        (&self.re_channel, &self.im_channel)
    }

    /// Centers held by both channels together.
    pub fn dict_size(&self) -> usize {
        self.re_channel.len() + self.im_channel.len()
    }

    pub fn iteration(&self) -> u64 {
        self.n
    }

    fn regressors(&self, z: &ComplexVector) -> Result<(ComplexVector, ComplexVector)> {
        Ok(match self.input {
            DualInput::Split => {
                let re: Vec<f64> = z.iter().map(|c| c.re).collect();
                let im: Vec<f64> = z.iter().map(|c| c.im).collect();
                (ComplexVector::from_real(&re)?, ComplexVector::from_real(&im)?)
            }
            DualInput::Stacked => {
                let p = z.real_image();
                (p.clone(), p)
            }
        })
    }

    pub fn predict(&self, z: &ComplexVector) -> Result<Complex64> {
        check_sample(z, Complex64::new(0.0, 0.0), self.input_dim)?;
        let (pr, pi) = self.regressors(z)?;
        Ok(Complex64::new(self.re_channel.evaluate(&pr)?.re, self.im_channel.evaluate(&pi)?.re))
    }

    fn update_channel(dict: &mut Dictionary, p: ComplexVector, err: f64, mu: f64, novelty: Option<&NoveltyParams>) -> Result<bool> {
        let gamma = dict.kernel().eval(&p, &p)?.re;
        if gamma > NORM_EPS && admit(dict, &p, err.abs(), novelty)? {
            dict.push(p, Complex64::new(mu * err / gamma, 0.0))?;
            return Ok(true);
        }
        Ok(false)
    }

    pub fn step(&mut self, z: &ComplexVector, d: Complex64) -> Result<StepResult> {
        check_sample(z, d, self.input_dim)?;
        let (pr, pi) = self.regressors(z)?;
        let prediction = Complex64::new(self.re_channel.evaluate(&pr)?.re, self.im_channel.evaluate(&pi)?.re);
        let e = d - prediction;
        let a = Self::update_channel(&mut self.re_channel, pr, e.re, self.mu, self.novelty.as_ref())?;
        let b = Self::update_channel(&mut self.im_channel, pi, e.im, self.mu, self.novelty.as_ref())?;
        self.n += 1;
        StepResult::new(d, prediction, a || b, self.dict_size())
    }
}
