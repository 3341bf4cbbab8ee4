//! Phase-encoding readout: equally spaced rotation angles and the discrete
//! Fourier transform that turns SIG_φ back into order intensities.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dynamics::IntensitySpectrum;
use crate::error::{Error, Result};

/// φ_k = 2πk / n_phases for k = 0..n_phases.
pub fn phase_grid(n_phases: usize) -> impl Iterator<Item = f64> {
    (0..n_phases).map(move |k| TAU * k as f64 / n_phases as f64)
}

/// Smallest power of two that resolves orders up to ±n_spins without aliasing.
pub fn default_n_phases(n_spins: usize) -> usize {
    (2 * n_spins + 2).next_power_of_two()
}

/// I_n = (1/K) Σ_k SIG_k e^{−i n φ_k} for n = −N..=N.
///
/// Returns the real spectrum together with the largest imaginary residue.
pub fn extract_intensities(
    signal: &[f64],
    n_spins: usize,
    time: f64,
) -> Result<(IntensitySpectrum, f64)> {
    let k = signal.len();
    if k < 2 * n_spins + 1 {
        return Err(Error::Aliasing {
            n_phases: k,
            n_spins,
            min: 2 * n_spins + 1,
        });
    }
    let n = n_spins as i64;
    let mut max_imag = 0.0f64;
    let intensities = (-n..=n)
        .map(|order| {
            let acc: Complex64 = signal
                .iter()
                .enumerate()
                .map(|(j, &s)| {
                    // Reduce the index first so the angle stays small.
                    let idx = (order * j as i64).rem_euclid(k as i64);
                    let angle = -TAU * idx as f64 / k as f64;
                    Complex64::from_polar(s, angle)
                })
                .sum();
            let v = acc / k as f64;
            max_imag = max_imag.max(v.im.abs());
            v.re
        })
        .collect();
    Ok((IntensitySpectrum::new(intensities, time), max_imag))
}
