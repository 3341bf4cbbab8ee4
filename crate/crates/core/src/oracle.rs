//! Brute-force density-matrix simulation of the phase-encoded echo protocol.
//!
//! The full 2^{N+1} × 2^{N+1} deviation density matrix is evolved, the bath is
//! rotated collectively about x, the dynamics is reversed, the central spin is
//! read out and the signal is Fourier analysed over the rotation angle. Only
//! meant for small baths; it is the reference the analytic engine is checked
//! against.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::IntensitySpectrum;
use crate::error::{Error, Result};
use crate::fourier;
use crate::geometry::CouplingSet;

/// Largest bath the oracle accepts unless the caller raises the cap.
pub const DEFAULT_MAX_SPINS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Deviation density matrix of central spin + N bath spins, row-major.
///
/// Basis index bit N is the central spin, bit j < N is bath spin j; a set bit
/// means spin down (σz = −1).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n_spins: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseState {
    /// ρ(0) = (σx/2) ⊗ (𝟙/2)^⊗N.
    pub fn initial(n_spins: usize) -> Self {
        let dim = 1usize << (n_spins + 1);
        let cs = 1usize << n_spins;
        let mut data = vec![ZERO; dim * dim];
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        for a in 0..dim {
            data[a * dim + (a ^ cs)] = v;
        }
        DenseState { n_spins, dim, data }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|a| self.get(a, a)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err = 0.0f64;
        for a in 0..self.dim {
            for b in a..self.dim {
                err = err.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        err
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Central-spin reduced matrix Tr_B[ρ], as [[ρ00, ρ01], [ρ10, ρ11]].
    pub fn central_reduced(&self) -> [[Complex64; 2]; 2] {
        let half = self.dim / 2;
        let mut out = [[ZERO; 2]; 2];
        for (s, row) in out.iter_mut().enumerate() {
            for (s2, cell) in row.iter_mut().enumerate() {
                *cell = (0..half)
                    .map(|b| self.get(s * half + b, s2 * half + b))
                    .sum();
            }
        }
        out
    }

    /// Tr[Tr_B[ρ] σx].
    pub fn central_x(&self) -> f64 {
        let r = self.central_reduced();
        (r[0][1] + r[1][0]).re
    }

    /// Coefficient of the product operator σ_a^CS ⊗ Π_j σ_{b_j}^j, normalised
    /// so that ρ(0) has coefficient 1 on σx^CS ⊗ 𝟙. Each Pauli is given as
    /// 'I', 'X', 'Y' or 'Z'; `bath` lists bath spins 0..N in order.
    pub fn pauli_coefficient(&self, central: char, bath: &[char]) -> Result<f64> {
        if bath.len() != self.n_spins {
            return Err(Error::Dimension {
                expected: self.n_spins,
                got: bath.len(),
            });
        }
        let mut ops = bath.to_vec();
        ops.push(central);
        // Tr[P ρ] with P = ⊗ σ; P maps basis |b⟩ to phase · |b ⊕ flip⟩.
        let mut flip = 0usize;
        for (bit, op) in ops.iter().enumerate() {
            match op {
                'X' | 'Y' => flip |= 1 << bit,
                'I' | 'Z' => {}
                other => {
                    return Err(Error::Config(format!("unknown Pauli label {other:?}")))
                }
            }
        }
        let mut acc = ZERO;
        for b in 0..self.dim {
            let mut phase = Complex64::new(1.0, 0.0);
            for (bit, op) in ops.iter().enumerate() {
                let down = (b >> bit) & 1 == 1;
                phase *= match (op, down) {
                    ('Z', true) => Complex64::new(-1.0, 0.0),
                    // σy|0⟩ = i|1⟩, σy|1⟩ = −i|0⟩
                    ('Y', false) => Complex64::new(0.0, 1.0),
                    ('Y', true) => Complex64::new(0.0, -1.0),
                    _ => Complex64::new(1.0, 0.0),
                };
            }
            // ⟨b ⊕ flip| P |b⟩ = phase, so Tr[P ρ] = Σ_b phase · ρ[b][b ⊕ flip].
            acc += phase * self.get(b, b ^ flip);
        }
        // ρ(0) = P_x / D in these units, and Tr[P_x P_x] = D.
        Ok(acc.re)
    }
}

fn check_dims(state: &DenseState, c: &CouplingSet) -> Result<()> {
    if state.n_spins != c.n_spins() {
        return Err(Error::Dimension {
            expected: c.n_spins(),
            got: state.n_spins,
        });
    }
    Ok(())
}

/// Diagonal energies ⟨b|H|b⟩ of H = Σ_j ω_j σz^CS σz^j.
fn diagonal_energies(c: &CouplingSet) -> Vec<f64> {
    let n = c.n_spins();
    let dim = 1usize << (n + 1);
    (0..dim)
        .map(|b| {
            let sign = |bit: usize| if (b >> bit) & 1 == 1 { -1.0 } else { 1.0 };
            sign(n)
                * c.omegas()
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * sign(j))
                    .sum::<f64>()
        })
        .collect()
}

/// ρ → U ρ U† with U = e^{−iHt}. Negative `t` gives the reversed dynamics U†ρU.
pub fn evolve(state: &DenseState, c: &CouplingSet, t: f64) -> Result<DenseState> {
    check_dims(state, c)?;
    let phases: Vec<Complex64> = diagonal_energies(c)
        .into_iter()
        .map(|e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let dim = state.dim;
    let mut out = state.clone();
    for (a, row) in out.data.chunks_exact_mut(dim).enumerate() {
        let pa = phases[a];
        for (z, pb) in row.iter_mut().zip(&phases) {
            *z *= pa * pb.conj();
        }
    }
    Ok(out)
}

#[inline]
fn times_i(s: f64, z: Complex64) -> Complex64 {
    Complex64::new(-s * z.im, s * z.re)
}

/// Conjugation by R_x(φ) = exp(i φ/2 Σ_j σx^j) acting on the bath only.
pub fn rotate_bath(state: &DenseState, phi: f64) -> DenseState {
    let mut out = state.clone();
    let (s, c) = (0.5 * phi).sin_cos();
    let dim = out.dim;
    for j in 0..out.n_spins {
        let bit = 1usize << j;
        // Left: r = c𝟙 + i s σx mixes rows b and b ⊕ bit.
        for r0 in (0..dim).filter(|r| r & bit == 0) {
            let (lo, hi) = out.data.split_at_mut((r0 | bit) * dim);
            let row0 = &mut lo[r0 * dim..(r0 + 1) * dim];
            let row1 = &mut hi[..dim];
            for (a, b) in row0.iter_mut().zip(row1.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * c + times_i(s, y);
                *b = times_i(s, x) + y * c;
            }
        }
        // Right: r† = c𝟙 − i s σx mixes columns.
        for pair in out.data.chunks_exact_mut(2 * bit) {
            let (left, right) = pair.split_at_mut(bit);
            for (a, b) in left.iter_mut().zip(right.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * c - times_i(s, y);
                *b = y * c - times_i(s, x);
            }
        }
    }
    out
}

/// π pulse about x on the central spin: ρ → X ρ X.
pub fn central_pi_pulse(state: &DenseState) -> DenseState {
    let cs = 1usize << state.n_spins;
    let dim = state.dim;
    let mut out = state.clone();
    for a in 0..dim {
        for b in 0..dim {
            out.data[a * dim + b] = state.data[(a ^ cs) * dim + (b ^ cs)];
        }
    }
    out
}

fn check_size(n_spins: usize, cap: usize) -> Result<()> {
    if n_spins > cap {
        return Err(Error::OracleTooLarge { n_spins, cap });
    }
    Ok(())
}

/// Literal protocol output: the recorded signals and the extracted spectrum.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub phases: Vec<f64>,
    pub signals: Vec<f64>,
    pub spectrum: IntensitySpectrum,
    /// Largest |Im I_n| left by the Fourier transform.
    pub max_imag: f64,
}

/// SIG_φ(2t) = Tr[Tr_B[U† R ρ(t) R† U] σx].
pub fn protocol_signal(rho_t: &DenseState, c: &CouplingSet, t: f64, phi: f64) -> Result<f64> {
    let rotated = rotate_bath(rho_t, phi);
    Ok(evolve(&rotated, c, -t)?.central_x())
}

pub fn run_protocol(c: &CouplingSet, t: f64, n_phases: usize) -> Result<ProtocolRun> {
    run_protocol_capped(c, t, n_phases, DEFAULT_MAX_SPINS)
}

pub fn run_protocol_capped(
    c: &CouplingSet,
    t: f64,
    n_phases: usize,
    max_spins: usize,
) -> Result<ProtocolRun> {
    let n = c.n_spins();
    check_size(n, max_spins)?;
    if n_phases < 2 * n + 2 {
        return Err(Error::Aliasing {
            n_phases,
            n_spins: n,
            min: 2 * n + 2,
        });
    }
    let rho_t = evolve(&DenseState::initial(n), c, t)?;
    let phases: Vec<f64> = fourier::phase_grid(n_phases).collect();
    let signals = phases
        .par_iter()
        .map(|&phi| protocol_signal(&rho_t, c, t, phi))
        .collect::<Result<Vec<_>>>()?;
    let (spectrum, max_imag) = fourier::extract_intensities(&signals, n, t)?;
    Ok(ProtocolRun {
        phases,
        signals,
        spectrum,
        max_imag,
    })
}

/// Largest elementwise gap between the two echo routes:
/// U†(t) ρ_φ(t) U(t) versus X · U(t) (X ρ_φ(t) X) U†(t) · X.
pub fn pi_pulse_deviation(c: &CouplingSet, t: f64, phi: f64) -> Result<f64> {
    check_size(c.n_spins(), DEFAULT_MAX_SPINS)?;
    let rho_phi = rotate_bath(&evolve(&DenseState::initial(c.n_spins()), c, t)?, phi);
    let reversed = evolve(&rho_phi, c, -t)?;
    let pulsed = central_pi_pulse(&evolve(&central_pi_pulse(&rho_phi), c, t)?);
    Ok(reversed.max_abs_diff(&pulsed))
}

pub fn pi_pulse_equivalence_check(c: &CouplingSet, t: f64) -> Result<bool> {
    Ok(pi_pulse_deviation(c, t, 0.7)? < 1e-10)
}

/// FID as the configuration sum (1/2^{N+1}) Σ_k cos(2⟨φ_k|H|φ_k⟩ t) over
/// all 2^{N+1} z-basis configurations.
pub fn fid_configuration_sum(c: &CouplingSet, t: f64) -> f64 {
    let e = diagonal_energies(c);
    e.iter().map(|e| (2.0 * e * t).cos()).sum::<f64>() / e.len() as f64
}
