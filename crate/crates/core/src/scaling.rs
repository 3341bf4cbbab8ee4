//! Least-squares fits: logarithmic growth of S₂ in time and ln N scaling of
//! the growth factor and the saturation value.

use std::collections::BTreeMap;

use crate::ensemble::EnsembleSummary;
use crate::entropy::{equilibration_time, saturation_value, Saturation};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
    /// Coefficient of determination; 1 when the data have no variance.
    pub r_squared: f64,
    pub n_samples: usize,
    /// Regressor range the fit was restricted to.
    pub window: (f64, f64),
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares of y = a + b·x.
pub fn ols(x: &[f64], y: &[f64]) -> Result<FitResult> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, found: n });
    }
    let (x, y) = (&x[..n], &y[..n]);
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("fit regressor has no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        intercept,
        slope,
        rms_residual: (ss_res / nf).sqrt(),
        r_squared,
        n_samples: n,
        window: (lo, hi),
    })
}

const WINDOW_EPS: f64 = 1e-9;

/// Fits values ≈ α + β·log₂(t / 1 μs) over samples with t (in μs) inside the
/// closed window. `times` are in seconds.
pub fn fit_log_time(times: &[f64], values: &[f64], window_us: (f64, f64)) -> Result<FitResult> {
    // Grid points sit on the bounds only up to rounding of the s → μs scale.
    let lo = window_us.0 * (1.0 - WINDOW_EPS);
    let hi = window_us.1 * (1.0 + WINDOW_EPS);
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .map(|(t, v)| (t * 1e6, *v))
        .filter(|(t_us, _)| *t_us > 0.0 && *t_us >= lo && *t_us <= hi)
        .map(|(t_us, v)| (t_us.log2(), v))
        .unzip();
    if x.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: x.len(),
        });
    }
    let mut fit = ols(&x, &y)?;
    fit.window = window_us;
    Ok(fit)
}

/// Fits value ≈ a + b·ln N.
pub fn fit_ln_n(points: &BTreeMap<usize, f64>) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: points.len(),
        });
    }
    if points.keys().any(|&n| n == 0) {
        return Err(Error::Config("bath size must be ≥ 1 for a ln N fit".into()));
    }
    let x: Vec<f64> = points.keys().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = points.values().copied().collect();
    ols(&x, &y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingOptions {
    pub fit_window_us: (f64, f64),
    pub saturation_t_min_us: f64,
    /// Smallest N included in the equilibration-time statistics.
    pub t_eq_min_size: usize,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions {
            fit_window_us: (50.0, 300.0),
            saturation_t_min_us: 5000.0,
            t_eq_min_size: 15,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeAnalysis {
    pub n_spins: usize,
    pub realizations: usize,
    pub growth: FitResult,
    pub saturation: Saturation,
    /// Seconds; `None` when S₂ never reaches its saturation on the grid.
    pub equilibration_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub sizes: Vec<SizeAnalysis>,
    /// β against ln N.
    pub beta_fit: FitResult,
    /// S̄₂ against ln N.
    pub saturation_fit: FitResult,
    /// Mean and standard deviation of T_eq (seconds) over N ≥ t_eq_min_size.
    pub t_eq_mean: Option<f64>,
    pub t_eq_std: Option<f64>,
    pub options: ScalingOptions,
}

impl ScalingReport {
    pub fn t_eq_relative_spread(&self) -> Option<f64> {
        Some(self.t_eq_std? / self.t_eq_mean?)
    }
}

pub fn analyze_size(summary: &EnsembleSummary, opts: &ScalingOptions) -> Result<SizeAnalysis> {
    let growth = fit_log_time(&summary.times, &summary.s2.mean, opts.fit_window_us)?;
    let saturation = saturation_value(
        &summary.times,
        &summary.s2.mean,
        opts.saturation_t_min_us * 1e-6,
    )?;
    let equilibration_time =
        match equilibration_time(&summary.times, &summary.s2.mean, saturation.mean) {
            Ok(t) => Some(t),
            Err(Error::NotEquilibrated(_)) => None,
            Err(e) => return Err(e),
        };
    Ok(SizeAnalysis {
        n_spins: summary.n_spins,
        realizations: summary.realizations,
        growth,
        saturation,
        equilibration_time,
    })
}

pub fn analyze_sizes(
    summaries: &BTreeMap<usize, EnsembleSummary>,
    opts: &ScalingOptions,
) -> Result<ScalingReport> {
    let sizes = summaries
        .values()
        .map(|s| analyze_size(s, opts))
        .collect::<Result<Vec<_>>>()?;
    let beta: BTreeMap<usize, f64> = sizes.iter().map(|s| (s.n_spins, s.growth.slope)).collect();
    let sat: BTreeMap<usize, f64> = sizes
        .iter()
        .map(|s| (s.n_spins, s.saturation.mean))
        .collect();
    let teq: Vec<f64> = sizes
        .iter()
        .filter(|s| s.n_spins >= opts.t_eq_min_size)
        .filter_map(|s| s.equilibration_time)
        .collect();
    let (t_eq_mean, t_eq_std) = if teq.is_empty() {
        (None, None)
    } else {
        let n = teq.len() as f64;
        let m = teq.iter().sum::<f64>() / n;
        let v = teq.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / n;
        (Some(m), Some(v.sqrt()))
    };
    Ok(ScalingReport {
        beta_fit: fit_ln_n(&beta)?,
        saturation_fit: fit_ln_n(&sat)?,
        sizes,
        t_eq_mean,
        t_eq_std,
        options: *opts,
    })
}
