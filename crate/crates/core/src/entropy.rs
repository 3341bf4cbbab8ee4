//! Entanglement entropy of the central spin and correlation Rényi entropies of
//! the Hamming-weight spectrum, plus saturation and equilibration detection.
//! All entropies are in bits.

use crate::dynamics::IntensitySpectrum;
use crate::error::{Error, Result};

/// Largest |Σ I_n − 1| accepted by the Rényi entropies.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Von Neumann entropy of the central spin, whose eigenvalues are (1 ± FID)/2.
pub fn entanglement_entropy(fid: f64) -> Result<f64> {
    if fid.is_nan() || fid.abs() > 1.0 {
        return Err(Error::FidDomain(fid));
    }
    let up = 0.5 * (1.0 + fid);
    let down = 0.5 * (1.0 - fid);
    Ok((-(plogp(up) + plogp(down))).clamp(0.0, 1.0))
}

fn check_spectrum(spec: &IntensitySpectrum) -> Result<()> {
    let total = spec.total();
    if total.is_nan() || (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized(total));
    }
    if let Some(&neg) = spec.intensities.iter().find(|&&v| v < 0.0) {
        // Round-off from a Fourier readout can leave tiny negative values.
        if neg < -NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized(total));
        }
    }
    Ok(())
}

/// S₁ = −Σ_n I_n log₂ I_n.
pub fn renyi_s1(spec: &IntensitySpectrum) -> Result<f64> {
    check_spectrum(spec)?;
    Ok(-spec.intensities.iter().map(|&p| plogp(p)).sum::<f64>())
}

/// S₂ = −log₂ Σ_n I_n².
pub fn renyi_s2(spec: &IntensitySpectrum) -> Result<f64> {
    check_spectrum(spec)?;
    let purity: f64 = spec.intensities.iter().map(|p| p * p).sum();
    Ok(-purity.log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyKind {
    Entanglement,
    S1,
    S2,
}

/// Entropy time series on a shared grid (times in seconds).
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub s_ent: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    /// Standard deviations across realizations, when this is an ensemble mean.
    pub spread: Option<EntropySpread>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropySpread {
    pub s_ent: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl EntropyTrace {
    pub fn series(&self, kind: EntropyKind) -> &[f64] {
        match kind {
            EntropyKind::Entanglement => &self.s_ent,
            EntropyKind::S1 => &self.s1,
            EntropyKind::S2 => &self.s2,
        }
    }

    pub fn saturation(&self, kind: EntropyKind, t_min: f64) -> Result<Saturation> {
        saturation_value(&self.times, self.series(kind), t_min)
    }

    pub fn equilibration_time(&self, kind: EntropyKind, saturation: f64) -> Result<f64> {
        equilibration_time(&self.times, self.series(kind), saturation)
    }
}

/// Mean and standard deviation of a trace over its late-time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Saturation {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

pub const MIN_SATURATION_SAMPLES: usize = 10;

/// Mean of `values` over samples with time strictly above `t_min`. A grid
/// point that equals `t_min` up to rounding is excluded.
pub fn saturation_value(times: &[f64], values: &[f64], t_min: f64) -> Result<Saturation> {
    let cut = t_min + t_min.abs() * 1e-9;
    let window: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t > cut)
        .map(|(_, v)| *v)
        .collect();
    if window.len() < MIN_SATURATION_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SATURATION_SAMPLES,
            found: window.len(),
        });
    }
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(Saturation {
        mean,
        std: var.sqrt(),
        samples: window.len(),
    })
}

/// First grid time at which the trace reaches `saturation`.
pub fn equilibration_time(times: &[f64], values: &[f64], saturation: f64) -> Result<f64> {
    times
        .iter()
        .zip(values)
        .find(|(_, v)| **v >= saturation)
        .map(|(t, _)| *t)
        .ok_or(Error::NotEquilibrated(saturation))
}
