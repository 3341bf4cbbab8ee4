//! Cross-checks between the analytic engine and the dense oracle.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;

use crate::dynamics::{encoded_signal, fid, hamming_intensities};
use crate::ensemble::{realization_couplings, EnsembleConfig};
use crate::error::Result;
use crate::fourier::default_n_phases;
use crate::geometry::{realization_rng, CouplingSet};
use crate::oracle::{
    evolve, fid_configuration_sum, pi_pulse_deviation, protocol_signal, run_protocol_capped,
    DenseState,
};

pub const INTENSITY_TOL: f64 = 1e-9;
pub const FID_TOL: f64 = 1e-12;
pub const ECHO_TOL: f64 = 1e-10;
pub const PI_PULSE_TOL: f64 = 1e-10;

/// Largest deviations found for one coupling set at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InstanceCheck {
    pub n_spins: usize,
    pub time: f64,
    /// max_n |I_n(analytic) − I_n(protocol)|
    pub intensity: f64,
    /// |fid − configuration sum|
    pub fid_sum: f64,
    /// |fid − Tr[σx ρ_CS(t)]| from the evolved density matrix
    pub fid_dense: f64,
    /// |SIG_0 − 1|, analytic and oracle
    pub sig0: f64,
    /// |SIG_π − Π cos(4ω t)|, analytic and oracle
    pub sig_pi: f64,
    pub fourier_imag: f64,
    pub pi_pulse: f64,
}

impl InstanceCheck {
    pub fn passed(&self) -> bool {
        self.intensity < INTENSITY_TOL
            && self.fid_sum < FID_TOL
            && self.fid_dense < FID_TOL
            && self.sig0 < ECHO_TOL
            && self.sig_pi < ECHO_TOL
            && self.fourier_imag < ECHO_TOL
            && self.pi_pulse < PI_PULSE_TOL
    }

    pub fn worst(&self, other: &InstanceCheck) -> InstanceCheck {
        InstanceCheck {
            n_spins: self.n_spins.max(other.n_spins),
            time: f64::NAN,
            intensity: self.intensity.max(other.intensity),
            fid_sum: self.fid_sum.max(other.fid_sum),
            fid_dense: self.fid_dense.max(other.fid_dense),
            sig0: self.sig0.max(other.sig0),
            sig_pi: self.sig_pi.max(other.sig_pi),
            fourier_imag: self.fourier_imag.max(other.fourier_imag),
            pi_pulse: self.pi_pulse.max(other.pi_pulse),
        }
    }
}

/// Runs every oracle comparison for `c` at time `t`.
pub fn check_instance(c: &CouplingSet, t: f64, max_spins: usize) -> Result<InstanceCheck> {
    let n = c.n_spins();
    let run = run_protocol_capped(c, t, default_n_phases(n), max_spins)?;
    let analytic = hamming_intensities(c, t);
    let intensity = analytic
        .intensities
        .iter()
        .zip(&run.spectrum.intensities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let f = fid(c, t);
    let rho_t = evolve(&DenseState::initial(n), c, t)?;
    let echo_pi: f64 = c.omegas().iter().map(|w| (4.0 * w * t).cos()).product();
    let oracle_sig0 = protocol_signal(&rho_t, c, t, 0.0)?;
    let oracle_sig_pi = protocol_signal(&rho_t, c, t, PI)?;

    Ok(InstanceCheck {
        n_spins: n,
        time: t,
        intensity,
        fid_sum: (f - fid_configuration_sum(c, t)).abs(),
        fid_dense: (f - rho_t.central_x()).abs(),
        sig0: (encoded_signal(c, t, 0.0) - 1.0)
            .abs()
            .max((oracle_sig0 - 1.0).abs()),
        sig_pi: (encoded_signal(c, t, PI) - echo_pi)
            .abs()
            .max((oracle_sig_pi - echo_pi).abs()),
        fourier_imag: run.max_imag,
        pi_pulse: pi_pulse_deviation(c, t, 0.7)?,
    })
}

/// Aggregate over many instances.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub instances: usize,
    pub failures: Vec<InstanceCheck>,
    pub worst: InstanceCheck,
}

impl VerifyReport {
    pub fn add(&mut self, check: InstanceCheck) {
        self.worst = if self.instances == 0 {
            check
        } else {
            self.worst.worst(&check)
        };
        self.instances += 1;
        if !check.passed() {
            self.failures.push(check);
        }
    }

    pub fn passed(&self) -> bool {
        self.instances > 0 && self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.worst;
        let line = |f: &mut fmt::Formatter<'_>, name: &str, v: f64, tol: f64| {
            let mark = if v < tol { "ok  " } else { "FAIL" };
            writeln!(f, "  {mark} {name:<34} max {v:.3e}  (tol {tol:.0e})")
        };
        writeln!(f, "oracle vs analytic over {} instances", self.instances)?;
        line(f, "intensities I_n", w.intensity, INTENSITY_TOL)?;
        line(f, "FID vs configuration sum", w.fid_sum, FID_TOL)?;
        line(f, "FID vs evolved density matrix", w.fid_dense, FID_TOL)?;
        line(f, "echo SIG_0 = 1", w.sig0, ECHO_TOL)?;
        line(f, "echo SIG_pi = prod cos(4wt)", w.sig_pi, ECHO_TOL)?;
        line(f, "Fourier imaginary residue", w.fourier_imag, ECHO_TOL)?;
        line(f, "pi-pulse reversal equivalence", w.pi_pulse, PI_PULSE_TOL)?;
        write!(
            f,
            "{}: {} of {} instances failed",
            if self.passed() { "PASS" } else { "FAIL" },
            self.failures.len(),
            self.instances
        )
    }
}

/// Checks `instances` orientations of the configured geometry, each at
/// `times_per_instance` times drawn uniformly from (0, t_max].
pub fn verify_ensemble(
    cfg: &EnsembleConfig,
    instances: usize,
    times_per_instance: usize,
    max_spins: usize,
) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut report = VerifyReport::default();
    for i in 0..instances {
        let c = realization_couplings(cfg, i)?;
        // Seed differs from the orientation draw of the same index.
        let mut rng = realization_rng(cfg.master_seed ^ 0x7665_7269_6679, i as u64);
        for _ in 0..times_per_instance {
            let t = cfg.grid.t_max * (1.0 - rng.random::<f64>());
            report.add(check_instance(&c, t, max_spins)?);
        }
    }
    Ok(report)
}
