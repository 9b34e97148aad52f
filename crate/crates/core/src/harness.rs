//! Monte-Carlo learning curves.
//!
//! Trial `t` uses seed `base_seed + t` for both its signal and its noise
//! (distinct RNG streams). Trials run in parallel, but squared errors are
//! summed in trial order so results do not depend on scheduling. Averaging
//! happens on the linear MSE scale; the dB transform and the display
//! smoothing come afterwards.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::NoveltyParams;
use crate::error::{Error, Result};
use crate::filters::{Algorithm, Filter, FilterConfig};
use crate::kernels::KernelSpec;
use crate::signals::{add_awgn, apply_channel, frame_equalization, frame_identification, generate_input, ChannelKind, DataSet, SignalConfig, Task};

fn default_smoothing() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub channel: ChannelKind,
    pub rho: f64,
    /// Output SNR in dB; `null` disables the noise.
    pub snr_db: Option<f64>,
    pub n_samples: usize,
    pub n_trials: usize,
    #[serde(rename = "L")]
    pub filter_len: usize,
    #[serde(rename = "D", default)]
    pub delay: usize,
    pub algorithms: Vec<FilterConfig>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_smoothing")]
    pub smoothing_window: usize,
}

/// Kernel width used throughout the benchmark presets.
pub const BENCHMARK_SIGMA: f64 = 5.0;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be >= 1".into()));
        }
        if self.smoothing_window == 0 {
            return Err(Error::Config("smoothing_window must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(Error::Config("snr_db must be a number or null".into()));
            }
        }
        SignalConfig {
            rho: self.rho,
            n_samples: self.n_samples,
            seed: self.base_seed,
        }
        .validate()?;
        let delay = if self.task == Task::Identification { 0 } else { self.delay };
        if self.filter_len == 0 || self.filter_len + delay > self.n_samples {
            return Err(Error::Config(format!(
                "L = {} and D = {} do not fit in {} samples",
                self.filter_len, delay, self.n_samples
            )));
        }
        let mut seen = HashSet::new();
        for alg in &self.algorithms {
            alg.validate()?;
            let label = alg.label();
            if label.is_empty() || label.contains(',') {
                return Err(Error::Config(format!("label {label:?} must be nonempty and free of commas")));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::Config(format!("duplicate algorithm label {label:?}")));
            }
        }
        Ok(())
    }

    /// Soft nonlinear channel equalization at 16 dB, `L = 5`, `D = 2`, 5000
    /// samples, comparing NCKLMS1, NCKLMS2, NCLMS and WL-NCLMS.
    pub fn benchmark_equalization(rho: f64, n_trials: usize) -> Self {
        Self {
            task: Task::Equalization,
            channel: ChannelKind::SoftNonlinear,
            rho,
            snr_db: Some(16.0),
            n_samples: 5000,
            n_trials,
            filter_len: 5,
            delay: 2,
            algorithms: vec![default_ncklms1(), default_ncklms2(), default_nclms(), default_wlnclms()],
            base_seed: 0,
            smoothing_window: default_smoothing(),
        }
    }

    /// Identification channel at 18 dB, `L = 5`, 10000 samples, comparing
    /// NCKLMS1, NCKLMS2 and NCLMS.
    pub fn benchmark_identification(rho: f64, n_trials: usize) -> Self {
        Self {
            task: Task::Identification,
            channel: ChannelKind::Identification,
            rho,
            snr_db: Some(18.0),
            n_samples: 10_000,
            n_trials,
            filter_len: 5,
            delay: 0,
            algorithms: vec![default_ncklms1(), default_ncklms2(), default_nclms()],
            base_seed: 0,
            smoothing_window: default_smoothing(),
        }
    }

    /// Frames the data of one trial.
    pub fn dataset(&self, trial: usize) -> Result<DataSet> {
        let seed = self.base_seed.wrapping_add(trial as u64);
        let s = generate_input(&SignalConfig {
            rho: self.rho,
            n_samples: self.n_samples,
            seed,
        })?;
        let q = apply_channel(&s, self.channel)?;
        let observed = add_awgn(&q, self.snr_db, seed)?;
        let mut ds = match self.task {
            Task::Equalization => frame_equalization(&observed, &s, self.filter_len, self.delay)?,
            Task::Identification => frame_identification(&s, &observed, self.filter_len)?,
        };
        ds.meta.channel = Some(self.channel);
        ds.meta.rho = Some(self.rho);
        ds.meta.snr_db = self.snr_db;
        ds.meta.seed = Some(seed);
        Ok(ds)
    }
}

pub fn default_ncklms1() -> FilterConfig {
    FilterConfig::kernel(
        Algorithm::Ncklms1,
        0.5,
        KernelSpec::RealGaussian { sigma: BENCHMARK_SIGMA },
        Some(NoveltyParams { delta1: 0.15, delta2: 0.2 }),
    )
}

pub fn default_ncklms2() -> FilterConfig {
    FilterConfig::kernel(
        Algorithm::Ncklms2,
        0.25,
        KernelSpec::ComplexGaussian { sigma: BENCHMARK_SIGMA },
        Some(NoveltyParams { delta1: 0.1, delta2: 0.2 }),
    )
}

pub fn default_nclms() -> FilterConfig {
    FilterConfig::linear(Algorithm::Nclms, 1.0 / 16.0)
}

pub fn default_wlnclms() -> FilterConfig {
    FilterConfig::linear(Algorithm::WlNclms, 1.0 / 16.0)
}

/// Split-channel baseline with the NCKLMS1 step size, kernel and thresholds.
pub fn default_dual_real_klms() -> FilterConfig {
    FilterConfig::kernel(
        Algorithm::DualRealKlms,
        0.5,
        KernelSpec::RealGaussian { sigma: BENCHMARK_SIGMA },
        Some(NoveltyParams { delta1: 0.15, delta2: 0.2 }),
    )
}

/// Ensemble-averaged squared a-priori error of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub label: String,
    /// Mean `|e(n)|²` across trials.
    pub mse: Vec<f64>,
    /// `10 log10(mse)`.
    pub mse_db: Vec<f64>,
    /// Centered moving average of `mse_db`, for display.
    pub smoothed_db: Vec<f64>,
    pub trials: usize,
    /// Mean dictionary size after each step (kernel algorithms only).
    pub dict_size: Option<Vec<f64>>,
    /// Wall-clock throughput summed over trials; not part of the CSV.
    pub samples_per_sec: f64,
}

impl LearningCurve {
    pub fn len(&self) -> usize {
        self.mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mse.is_empty()
    }

    pub fn final_dict_size(&self) -> Option<f64> {
        self.dict_size.as_ref().and_then(|d| d.last().copied())
    }

    /// Builds a curve from an already averaged linear MSE trace.
    pub fn from_mse(label: impl Into<String>, mse: Vec<f64>, smoothing_window: usize) -> Self {
        let mse_db: Vec<f64> = mse.iter().map(|&m| to_db(m)).collect();
        let smoothed_db = moving_average(&mse_db, smoothing_window);
        Self {
            label: label.into(),
            mse,
            mse_db,
            smoothed_db,
            trials: 1,
            dict_size: None,
            samples_per_sec: 0.0,
        }
    }
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Centered moving average with a window of `width` samples, shrunk at the edges.
pub fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let n = values.len();
    if width <= 1 || n == 0 {
        return values.to_vec();
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let before = width / 2;
    let after = width - 1 - before;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

struct TrialTrace {
    sq_err: Vec<f64>,
    dict_size: Vec<usize>,
    seconds: f64,
}

/// Streams `ds` through a fresh filter built from `cfg`.
pub fn run_filter(cfg: &FilterConfig, ds: &DataSet) -> Result<(Vec<f64>, Vec<usize>)> {
    let t = trace_filter(cfg, ds)?;
    Ok((t.sq_err, t.dict_size))
}

fn trace_filter(cfg: &FilterConfig, ds: &DataSet) -> Result<TrialTrace> {
    let start = Instant::now();
    let mut filter = Filter::new(cfg, ds.meta.filter_len)?;
    let mut sq_err = Vec::with_capacity(ds.len());
    let mut dict_size = Vec::with_capacity(ds.len());
    for (z, &d) in ds.regressors.iter().zip(&ds.desired) {
        let r = filter.step(z, d)?;
        sq_err.push(r.error.norm_sqr());
        dict_size.push(r.dict_size);
    }
    Ok(TrialTrace {
        sq_err,
        dict_size,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Learning curves keyed by label, in configuration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curves: IndexMap<String, LearningCurve>,
}

impl ExperimentResult {
    pub fn get(&self, label: &str) -> Option<&LearningCurve> {
        self.curves.get(label)
    }

    /// `iter,<label>_mse_db[,<label>_dict_size]...`, one row per iteration,
    /// with the smoothed dB curve.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter");
        for (label, c) in &self.curves {
            let _ = write!(out, ",{label}_mse_db");
            if c.dict_size.is_some() {
                let _ = write!(out, ",{label}_dict_size");
            }
        }
        out.push('\n');
        let rows = self.curves.values().map(LearningCurve::len).max().unwrap_or(0);
        for i in 0..rows {
            let _ = write!(out, "{}", i + 1);
            for c in self.curves.values() {
                let _ = write!(out, ",{:.6}", c.smoothed_db[i]);
                if let Some(d) = &c.dict_size {
                    let _ = write!(out, ",{:.3}", d[i]);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs every trial and averages per iteration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let per_trial: Vec<Result<Vec<TrialTrace>>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| {
            let ds = cfg.dataset(t)?;
            cfg.algorithms
                .iter()
                .map(|alg| trace_filter(alg, &ds).map_err(|e| Error::Numeric(format!("trial {t}, {}: {e}", alg.label()))))
                .collect()
        })
        .collect();
    let per_trial: Vec<Vec<TrialTrace>> = per_trial.into_iter().collect::<Result<_>>()?;

    let trials = cfg.n_trials as f64;
    let mut curves = IndexMap::new();
    for (a, alg) in cfg.algorithms.iter().enumerate() {
        let len = per_trial[0][a].sq_err.len();
        let mut mse = vec![0.0; len];
        let mut dict = vec![0.0; len];
        let mut seconds = 0.0;
        for trial in &per_trial {
            let tr = &trial[a];
            for (m, e) in mse.iter_mut().zip(&tr.sq_err) {
                *m += e;
            }
            for (d, s) in dict.iter_mut().zip(&tr.dict_size) {
                *d += *s as f64;
            }
            seconds += tr.seconds;
        }
        mse.iter_mut().for_each(|m| *m /= trials);
        dict.iter_mut().for_each(|d| *d /= trials);
        let mut curve = LearningCurve::from_mse(alg.label(), mse, cfg.smoothing_window);
        curve.trials = cfg.n_trials;
        curve.dict_size = alg.algorithm.is_kernel().then_some(dict);
        curve.samples_per_sec = if seconds > 0.0 { (len * cfg.n_trials) as f64 / seconds } else { f64::INFINITY };
        curves.insert(alg.label(), curve);
    }
    Ok(ExperimentResult { curves })
}

/// Mean linear MSE over the last `tail_fraction` of the curve, in dB.
pub fn steady_state_mse(curve: &LearningCurve, tail_fraction: f64) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::Config(format!("curve {:?} is empty", curve.label)));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Config(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let n = curve.len();
    let count = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let tail = &curve.mse[n - count..];
    Ok(to_db(tail.iter().sum::<f64>() / count as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub steady_state_db: f64,
    pub final_dict_size: Option<f64>,
    pub samples_per_sec: f64,
}

/// Ranks curves by steady-state MSE (ascending, ties by label).
pub fn compare_report<'a, I>(curves: I, tail_fraction: f64) -> Result<Vec<ReportRow>>
where
    I: IntoIterator<Item = &'a LearningCurve>,
{
    let mut rows = curves
        .into_iter()
        .map(|c| {
            Ok(ReportRow {
                label: c.label.clone(),
                steady_state_db: steady_state_mse(c, tail_fraction)?,
                final_dict_size: c.final_dict_size(),
                samples_per_sec: c.samples_per_sec,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.len() < 2 {
        return Err(Error::Config("a comparison needs at least two curves".into()));
    }
    rows.sort_by(|a, b| a.steady_state_db.total_cmp(&b.steady_state_db).then_with(|| a.label.cmp(&b.label)));
    Ok(rows)
}

pub fn render_report(rows: &[ReportRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max("algorithm".len());
    let mut s = format!("{:<width$}  {:>14}  {:>10}  {:>14}\n", "algorithm", "steady_db", "dict_size", "samples/sec");
    for r in rows {
        let dict = r.final_dict_size.map(|d| format!("{d:.1}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:<width$}  {:>14.3}  {:>10}  {:>14.0}", r.label, r.steady_state_db, dict, r.samples_per_sec);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::benchmark_equalization(std::f64::consts::FRAC_1_SQRT_2, 3);
        cfg.n_samples = 300;
        cfg.smoothing_window = 10;
        cfg
    }

    #[test]
    fn moving_average_edges() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(moving_average(&v, 1), v.to_vec());
        assert_eq!(moving_average(&v, 3), vec![1.5, 2.0, 3.0, 4.0, 4.5]);
        let m = moving_average(&v, 4);
        // window covers i-2..=i+1
        assert_abs_diff_eq!(m[0], 1.5);
        assert_abs_diff_eq!(m[2], 2.5);
        assert_abs_diff_eq!(m[4], 4.0);
    }

    #[test]
    fn steady_state_examples() {
        let c = LearningCurve::from_mse("flat", vec![0.01; 50], 1);
        assert_abs_diff_eq!(steady_state_mse(&c, 0.1).unwrap(), -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(steady_state_mse(&c, 1.0).unwrap(), -20.0, epsilon = 1e-12);

        let c = LearningCurve::from_mse("ramp", vec![1.0, 2.0, 3.0, 6.0], 1);
        assert_abs_diff_eq!(steady_state_mse(&c, 1.0).unwrap(), to_db(3.0), epsilon = 1e-12);
        assert_abs_diff_eq!(steady_state_mse(&c, 0.5).unwrap(), to_db(4.5), epsilon = 1e-12);

        assert!(steady_state_mse(&LearningCurve::from_mse("e", vec![], 1), 0.5).is_err());
        assert!(steady_state_mse(&c, 0.0).is_err());
    }

    #[test]
    fn compare_orders_and_breaks_ties() {
        let a = LearningCurve::from_mse("beta", vec![0.1; 10], 1);
        let b = LearningCurve::from_mse("alpha", vec![0.1; 10], 1);
        let c = LearningCurve::from_mse("gamma", vec![0.01; 10], 1);
        let rows = compare_report([&a, &b, &c], 0.5).unwrap();
        let labels: Vec<_> = rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["gamma", "alpha", "beta"]);
        assert!(compare_report([&a], 0.5).is_err());
        assert!(render_report(&rows).contains("gamma"));
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_config();
        assert!(cfg.validate().is_ok());
        cfg.n_trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.algorithms.push(default_nclms());
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.contains("duplicate")));
        let mut cfg = small_config();
        cfg.rho = 2.0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.algorithms[0].label = Some("a,b".into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_field_names() {
        let cfg = small_config();
        let json = cfg.to_json();
        for key in ["\"task\"", "\"channel\"", "\"rho\"", "\"snr_db\"", "\"n_samples\"", "\"n_trials\"", "\"L\"", "\"D\"", "\"algorithms\"", "\"base_seed\"", "\"smoothing_window\""] {
            assert!(json.contains(key), "missing {key}");
        }
        assert_eq!(ExperimentConfig::from_json(&json).unwrap(), cfg);
        assert!(ExperimentConfig::from_json(r#"{"task":"equalization"}"#).is_err());
    }

    #[test]
    fn curve_length_matches_framing() {
        let cfg = small_config();
        let res = run_experiment(&cfg).unwrap();
        let framed = cfg.dataset(0).unwrap().len();
        assert_eq!(framed, 300 - 4);
        for c in res.curves.values() {
            assert_eq!(c.len(), framed);
            assert_eq!(c.mse_db.len(), framed);
            assert_eq!(c.smoothed_db.len(), framed);
            assert!(c.mse.iter().all(|m| *m >= 0.0));
            assert_eq!(c.trials, 3);
        }
        assert!(res.get("NCKLMS1").unwrap().dict_size.is_some());
        assert!(res.get("NCLMS").unwrap().dict_size.is_none());
    }

    #[test]
    fn averaging_is_linear_then_db() {
        let mut cfg = small_config();
        cfg.algorithms = vec![default_nclms()];
        let res = run_experiment(&cfg).unwrap();
        let mut manual = vec![0.0; res.get("NCLMS").unwrap().len()];
        for t in 0..cfg.n_trials {
            let ds = cfg.dataset(t).unwrap();
            let (sq, _) = run_filter(&default_nclms(), &ds).unwrap();
            for (m, e) in manual.iter_mut().zip(sq) {
                *m += e;
            }
        }
        let curve = res.get("NCLMS").unwrap();
        for (i, m) in manual.iter().enumerate() {
            assert_eq!(curve.mse[i], m / 3.0);
            assert_eq!(curve.mse_db[i], to_db(m / 3.0));
        }
    }

    #[test]
    fn csv_is_deterministic_and_shaped() {
        let cfg = small_config();
        let a = run_experiment(&cfg).unwrap().to_csv();
        let b = run_experiment(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let header = a.lines().next().unwrap();
        assert_eq!(
            header,
            "iter,NCKLMS1_mse_db,NCKLMS1_dict_size,NCKLMS2_mse_db,NCKLMS2_dict_size,NCLMS_mse_db,WLNCLMS_mse_db"
        );
        assert_eq!(a.lines().count(), 1 + 296);
        assert!(a.lines().nth(1).unwrap().starts_with("1,"));
    }

    #[test]
    fn trial_order_does_not_matter() {
        // a three-trial run equals the average of the individual runs
        let cfg = small_config();
        let full = run_experiment(&cfg).unwrap();
        let mut sum = vec![0.0; full.get("NCKLMS2").unwrap().len()];
        for t in (0..3).rev() {
            let mut one = cfg.clone();
            one.n_trials = 1;
            one.base_seed = t;
            let r = run_experiment(&one).unwrap();
            for (s, m) in sum.iter_mut().zip(&r.get("NCKLMS2").unwrap().mse) {
                *s += m;
            }
        }
        for (a, b) in sum.iter().zip(&full.get("NCKLMS2").unwrap().mse) {
            assert!((a / 3.0 - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }
}
