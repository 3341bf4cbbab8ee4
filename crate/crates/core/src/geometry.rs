//! Bath geometry: concentric coplanar rings of bath spins around the central
//! spin, random field orientations, and the resulting ZZ coupling constants.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ring radius ratio between consecutive rings.
pub const DEFAULT_RADIUS_GROWTH: f64 = 1.05;

/// Target median of |ω|/2π over first-ring spins and uniformly random field
/// directions, in Hz.
pub const DEFAULT_FIRST_RING_MEDIAN_HZ: f64 = 350.0;

/// Median of |3u² − 1| for u uniform on [−1, 1].
///
/// For an in-plane bond and an isotropic field direction, cos θ is uniform on
/// [−1, 1]; solving P(|3u² − 1| ≤ m) = 1/2 gives m = √351 / 24.
pub fn median_angle_factor() -> f64 {
    351f64.sqrt() / 24.0
}

/// Coupling prefactor (rad/s) that puts the first-ring median of |ω|/2π at
/// `median_hz`.
pub fn calibrate_coupling_scale(median_hz: f64) -> f64 {
    TAU * median_hz / median_angle_factor()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub spins_per_ring: usize,
    pub n_rings: usize,
    /// Radius of the innermost ring, nm.
    pub base_radius_nm: f64,
    pub radius_growth_factor: f64,
    /// Dipolar prefactor at the base radius, rad/s.
    pub coupling_scale: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            spins_per_ring: 5,
            n_rings: 3,
            base_radius_nm: 0.3,
            radius_growth_factor: DEFAULT_RADIUS_GROWTH,
            coupling_scale: calibrate_coupling_scale(DEFAULT_FIRST_RING_MEDIAN_HZ),
        }
    }
}

impl GeometryConfig {
    pub fn n_spins(&self) -> usize {
        self.spins_per_ring * self.n_rings
    }

    pub fn validate(&self) -> Result<()> {
        if self.spins_per_ring < 1 {
            return Err(Error::Config("spins_per_ring must be ≥ 1".into()));
        }
        if self.n_rings < 1 {
            return Err(Error::Config("n_rings must be ≥ 1".into()));
        }
        if !(self.base_radius_nm.is_finite() && self.base_radius_nm > 0.0) {
            return Err(Error::Geometry(format!(
                "base_radius_nm must be > 0 (got {}); a bath spin would sit on the central spin",
                self.base_radius_nm
            )));
        }
        if !(self.radius_growth_factor.is_finite() && self.radius_growth_factor > 1.0) {
            return Err(Error::Config(format!(
                "radius_growth_factor must be > 1 (got {})",
                self.radius_growth_factor
            )));
        }
        if !self.coupling_scale.is_finite() {
            return Err(Error::Config("coupling_scale must be finite".into()));
        }
        Ok(())
    }

    /// Radius of ring `k` (1-based), nm.
    pub fn ring_radius(&self, k: usize) -> f64 {
        self.base_radius_nm * self.radius_growth_factor.powi(k as i32 - 1)
    }

    /// Bath spin positions in nm, ring by ring, all in the z = 0 plane.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let per = self.spins_per_ring;
        let mut out = Vec::with_capacity(self.n_spins());
        for k in 1..=self.n_rings {
            let r = self.ring_radius(k);
            // Half-step offset between neighbouring rings avoids aligned spokes.
            let offset = k as f64 * PI / per as f64;
            for i in 0..per {
                let a = TAU * i as f64 / per as f64 + offset;
                out.push([r * a.cos(), r * a.sin(), 0.0]);
            }
        }
        out
    }
}

/// Direction of the static field in the molecule frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orientation([f64; 3]);

impl Orientation {
    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Geometry(format!("cannot normalize field direction {v:?}")));
        }
        Ok(Orientation([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn field_direction(&self) -> [f64; 3] {
        self.0
    }

    pub fn reversed(&self) -> Self {
        Orientation([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// RNG substream for realization `index` under `master_seed`.
pub fn realization_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Uniform direction on the unit sphere (z uniform on [−1, 1], azimuth uniform).
pub fn sample_orientation<R: Rng + ?Sized>(rng: &mut R) -> Orientation {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = TAU * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    Orientation([s * phi.cos(), s * phi.sin(), z])
}

/// ZZ coupling constants ω_j (rad/s) of one molecular orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSet {
    omegas: Vec<f64>,
}

impl CouplingSet {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = omegas.iter().find(|w| !w.is_finite()) {
            return Err(Error::Geometry(format!("non-finite coupling {bad}")));
        }
        Ok(CouplingSet { omegas })
    }

    /// Couplings given as ω/2π in Hz.
    pub fn from_hz(hz: &[f64]) -> Result<Self> {
        Self::new(hz.iter().map(|f| TAU * f).collect())
    }

    /// Parses one ω/2π value (Hz) per line; blank lines and `#` comments are skipped.
    pub fn parse_hz_list(text: &str) -> Result<Self> {
        let mut hz = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| {
                Error::Config(format!("coupling list line {}: cannot parse {line:?}", lineno + 1))
            })?;
            hz.push(v);
        }
        if hz.is_empty() {
            return Err(Error::Config("coupling list is empty".into()));
        }
        Self::from_hz(&hz)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn n_spins(&self) -> usize {
        self.omegas.len()
    }
}

/// Couplings ω_j = scale · (3cos²θ_j − 1) / (r_j / base_radius)³.
pub fn build_bath(cfg: &GeometryConfig, orient: &Orientation) -> Result<CouplingSet> {
    cfg.validate()?;
    let n = orient.field_direction();
    let omegas = cfg
        .positions()
        .into_iter()
        .map(|p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if r == 0.0 {
                return Err(Error::Geometry("bath spin placed at the origin".into()));
            }
            let cos = (p[0] * n[0] + p[1] * n[1] + p[2] * n[2]) / r;
            let reduced = r / cfg.base_radius_nm;
            Ok(cfg.coupling_scale * (3.0 * cos * cos - 1.0) / reduced.powi(3))
        })
        .collect::<Result<Vec<_>>>()?;
    CouplingSet::new(omegas)
}
