//! Test signals, nonlinear channels, additive noise and sample framing.
//!
//! All indices are 0-based; the sample before the first one is taken as zero
//! when a channel needs history.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::ComplexVector;

/// Fixed amplitude of the input generator.
pub const INPUT_AMPLITUDE: f64 = 0.70;

// ChaCha stream ids: signal and noise draws never share a keystream.
const SIGNAL_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalConfig {
    /// Circularity: `√2/2` is circular, values near 0 or 1 strongly non-circular.
    pub rho: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl SignalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        Ok(())
    }
}

/// `s(n) = 0.70 (√(1−ρ²) X(n) + i ρ Y(n))` with independent standard normal
/// `X`, `Y`.
pub fn generate_input(cfg: &SignalConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, SIGNAL_STREAM);
    let re_scale = INPUT_AMPLITUDE * (1.0 - cfg.rho * cfg.rho).sqrt();
    let im_scale = INPUT_AMPLITUDE * cfg.rho;
    Ok((0..cfg.n_samples)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex64::new(re_scale * x, im_scale * y)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    SoftNonlinear,
    StrongNonlinear,
    Identification,
}

const EQ_TAPS: [Complex64; 2] = [Complex64::new(-0.9, 0.8), Complex64::new(0.6, -0.7)];

/// Taps `h(k) = 0.432 (1 + cos(2π(k−3)/5) − (1 + cos(2π(k−3)/10)) i)`, `k = 1..5`.
pub fn identification_taps() -> [Complex64; 5] {
    let mut h = [Complex64::new(0.0, 0.0); 5];
    for (i, tap) in h.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        let re = 1.0 + (2.0 * PI * (k - 3.0) / 5.0).cos();
        let im = 1.0 + (2.0 * PI * (k - 3.0) / 10.0).cos();
        *tap = 0.432 * Complex64::new(re, -im);
    }
    h
}

impl ChannelKind {
    /// Linear FIR taps applied before the memoryless nonlinearity.
    pub fn taps(&self) -> Vec<Complex64> {
        match self {
            ChannelKind::SoftNonlinear | ChannelKind::StrongNonlinear => EQ_TAPS.to_vec(),
            ChannelKind::Identification => identification_taps().to_vec(),
        }
    }

    /// Coefficients of `t²` and `t³`.
    fn polynomial(&self) -> (Complex64, Complex64) {
        match self {
            ChannelKind::SoftNonlinear => (Complex64::new(0.1, 0.15), Complex64::new(0.06, 0.05)),
            ChannelKind::StrongNonlinear => (Complex64::new(0.2, 0.25), Complex64::new(0.12, 0.09)),
            ChannelKind::Identification => (Complex64::new(0.15, -0.1), Complex64::new(0.0, 0.0)),
        }
    }

    pub fn nonlinearity(&self, t: Complex64) -> Complex64 {
        let (c2, c3) = self.polynomial();
        let t2 = t * t;
        t + c2 * t2 + c3 * t2 * t
    }
}

/// Linear stage `t(n) = Σ_k taps[k] s(n−k)` with zero pre-history.
pub fn fir(s: &[Complex64], taps: &[Complex64]) -> Vec<Complex64> {
    (0..s.len())
        .map(|n| taps.iter().enumerate().filter(|(k, _)| *k <= n).map(|(k, h)| h * s[n - k]).sum())
        .collect()
}

/// Passes `s` through the channel: FIR stage then polynomial nonlinearity.
pub fn apply_channel(s: &[Complex64], kind: ChannelKind) -> Result<Vec<Complex64>> {
    if s.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(fir(s, &kind.taps()).into_iter().map(|t| kind.nonlinearity(t)).collect())
}

/// Adds circular complex Gaussian noise at `snr_db` relative to the empirical
/// power of `q`. `None` disables noise.
pub fn add_awgn(q: &[Complex64], snr_db: Option<f64>, seed: u64) -> Result<Vec<Complex64>> {
    if q.is_empty() {
        return Err(Error::EmptyVector);
    }
    let Some(snr_db) = snr_db else {
        return Ok(q.to_vec());
    };
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(q.to_vec());
    }
    if !snr_db.is_finite() {
        return Err(Error::Config(format!("invalid SNR {snr_db}")));
    }
    let power = q.iter().map(|v| v.norm_sqr()).sum::<f64>() / q.len() as f64;
    let sd = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let mut rng = rng_for(seed, NOISE_STREAM);
    Ok(q.iter()
        .map(|v| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            v + Complex64::new(sd * x, sd * y)
        })
        .collect())
}

/// Which experiment a [`DataSet`] was framed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Equalization,
    Identification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSetMeta {
    pub task: Task,
    pub filter_len: usize,
    pub delay: usize,
    pub channel: Option<ChannelKind>,
    pub rho: Option<f64>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    /// Index (0-based) of the source sample paired with the first regressor.
    pub first_index: usize,
    /// Source samples with no complete window, dropped at the edges.
    pub dropped: usize,
}

/// Regressor/desired pairs ready to stream through a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub regressors: Vec<ComplexVector>,
    pub desired: Vec<Complex64>,
    pub meta: DataSetMeta,
}

impl DataSet {
    pub fn len(&self) -> usize {
        self.desired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired.is_empty()
    }

    /// Columnar text: `n,re0,im0,…,re{L-1},im{L-1},d_re,d_im` with a header row.
    pub fn to_columnar(&self) -> String {
        let l = self.meta.filter_len;
        let mut s = String::from("n");
        for k in 0..l {
            let _ = write!(s, ",re{k},im{k}");
        }
        s.push_str(",d_re,d_im\n");
        for (i, (z, d)) in self.regressors.iter().zip(&self.desired).enumerate() {
            let _ = write!(s, "{}", self.meta.first_index + i);
            for c in z {
                let _ = write!(s, ",{},{}", c.re, c.im);
            }
            let _ = writeln!(s, ",{},{}", d.re, d.im);
        }
        s
    }
}

fn check_framing(len: usize, filter_len: usize, delay: usize) -> Result<()> {
    if filter_len == 0 {
        return Err(Error::Config("filter length must be >= 1".into()));
    }
    if filter_len + delay > len {
        return Err(Error::Config(format!(
            "filter length {filter_len} plus delay {delay} exceeds signal length {len}"
        )));
    }
    Ok(())
}

/// Pairs `(r(n+D), r(n+D−1), …, r(n+D−L+1))` with `s(n)`, keeping only `n`
/// whose window lies inside `r`.
pub fn frame_equalization(r: &[Complex64], s: &[Complex64], filter_len: usize, delay: usize) -> Result<DataSet> {
    if r.len() != s.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), got: r.len() });
    }
    check_framing(r.len(), filter_len, delay)?;
    let first = (filter_len - 1).saturating_sub(delay);
    let last = r.len() - 1 - delay;
    let mut regressors = Vec::with_capacity(last + 1 - first);
    let mut desired = Vec::with_capacity(last + 1 - first);
    for n in first..=last {
        let top = n + delay;
        regressors.push(ComplexVector::new((0..filter_len).map(|k| r[top - k]).collect())?);
        desired.push(s[n]);
    }
    Ok(DataSet {
        meta: DataSetMeta {
            task: Task::Equalization,
            filter_len,
            delay,
            channel: None,
            rho: None,
            snr_db: None,
            seed: None,
            first_index: first,
            dropped: s.len() - desired.len(),
        },
        regressors,
        desired,
    })
}

/// Pairs the clean input window `(s(n), …, s(n−L+1))` with the observed
/// channel output `x(n)`.
pub fn frame_identification(s: &[Complex64], x: &[Complex64], filter_len: usize) -> Result<DataSet> {
    if s.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), got: x.len() });
    }
    check_framing(s.len(), filter_len, 0)?;
    let first = filter_len - 1;
    let mut regressors = Vec::with_capacity(s.len() - first);
    let mut desired = Vec::with_capacity(s.len() - first);
    for n in first..s.len() {
        regressors.push(ComplexVector::new((0..filter_len).map(|k| s[n - k]).collect())?);
        desired.push(x[n]);
    }
    Ok(DataSet {
        meta: DataSetMeta {
            task: Task::Identification,
            filter_len,
            delay: 0,
            channel: None,
            rho: None,
            snr_db: None,
            seed: None,
            first_index: first,
            dropped: first,
        },
        regressors,
        desired,
    })
}
