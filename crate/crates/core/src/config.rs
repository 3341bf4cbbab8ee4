//! Run configuration: a sectioned TOML file plus command-line overrides.
//!
//! ```toml
//! [geometry]
//! spins_per_ring = 5
//! n_rings = 3
//! base_radius_nm = 0.3
//! radius_growth_factor = 1.05
//! first_ring_median_hz = 350.0   # or coupling_scale = <rad/s>
//! couplings_file = "couplings.txt"  # optional fixed ω/2π list, Hz
//!
//! [ensemble]
//! n_realizations = 300
//! master_seed = 0
//! t_max_us = 8000.0
//! n_steps = 801
//! threads = 4
//!
//! [protocol]
//! n_phases = 32
//! max_oracle_spins = 10
//!
//! [scaling]
//! sizes = [5, 10, 15, 20, 25, 30]
//! fit_window_us = [50.0, 300.0]
//! saturation_t_min_us = 5000.0
//! t_eq_min_size = 15
//! realizations = { "30" = 100 }
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ensemble::{EnsembleConfig, TimeGrid};
use crate::error::{Error, Result};
use crate::geometry::{calibrate_coupling_scale, CouplingSet, GeometryConfig};
use crate::oracle::DEFAULT_MAX_SPINS;
use crate::scaling::ScalingOptions;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    protocol: RawProtocol,
    #[serde(default)]
    scaling: RawScaling,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    spins_per_ring: Option<i64>,
    n_rings: Option<i64>,
    base_radius_nm: Option<f64>,
    radius_growth_factor: Option<f64>,
    coupling_scale: Option<f64>,
    first_ring_median_hz: Option<f64>,
    couplings_file: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    n_realizations: Option<i64>,
    master_seed: Option<u64>,
    t_max_us: Option<f64>,
    n_steps: Option<i64>,
    threads: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    n_phases: Option<i64>,
    max_oracle_spins: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    sizes: Option<Vec<i64>>,
    fit_window_us: Option<[f64; 2]>,
    saturation_t_min_us: Option<f64>,
    t_eq_min_size: Option<i64>,
    realizations: Option<BTreeMap<String, i64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// `None` selects the smallest power of two ≥ 2N + 2.
    pub n_phases: Option<usize>,
    pub max_oracle_spins: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub sizes: Vec<usize>,
    pub options: ScalingOptions,
    /// Per-size realization counts overriding `ensemble.n_realizations`.
    pub realizations: BTreeMap<usize, usize>,
}

impl ScalingConfig {
    pub fn realizations_for(&self, size: usize, default: usize) -> usize {
        self.realizations.get(&size).copied().unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ensemble: EnsembleConfig,
    pub couplings_file: Option<PathBuf>,
    pub threads: Option<usize>,
    pub protocol: ProtocolConfig,
    pub scaling: ScalingConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ensemble: EnsembleConfig::default(),
            couplings_file: None,
            threads: None,
            protocol: ProtocolConfig {
                n_phases: None,
                max_oracle_spins: DEFAULT_MAX_SPINS,
            },
            scaling: ScalingConfig {
                sizes: vec![5, 10, 15, 20, 25, 30],
                options: ScalingOptions::default(),
                realizations: BTreeMap::new(),
            },
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line flags that override the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub nspins: Option<usize>,
    pub realizations: Option<usize>,
    pub tmax_us: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub couplings_file: Option<PathBuf>,
}

fn count(key: &str, v: i64, min: i64) -> Result<usize> {
    if v < min {
        return Err(Error::Config(format!("{key} must be ≥ {min}")));
    }
    Ok(v as usize)
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Config(format!("{key} must be > 0")));
    }
    Ok(v)
}

/// Parses and validates configuration text, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {}", e.message())))?;
    let mut cfg = RunConfig::default();

    let g = raw.geometry;
    let geom = &mut cfg.ensemble.geometry;
    if let Some(v) = g.spins_per_ring {
        geom.spins_per_ring = count("spins_per_ring", v, 1)?;
    }
    if let Some(v) = g.n_rings {
        geom.n_rings = count("n_rings", v, 1)?;
    }
    if let Some(v) = g.base_radius_nm {
        geom.base_radius_nm = positive("base_radius_nm", v)?;
    }
    if let Some(v) = g.radius_growth_factor {
        if !(v.is_finite() && v > 1.0) {
            return Err(Error::Config("radius_growth_factor must be > 1".into()));
        }
        geom.radius_growth_factor = v;
    }
    match (g.coupling_scale, g.first_ring_median_hz) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "coupling_scale and first_ring_median_hz are mutually exclusive".into(),
            ))
        }
        (Some(v), None) => geom.coupling_scale = positive("coupling_scale", v)?,
        (None, Some(v)) => {
            geom.coupling_scale = calibrate_coupling_scale(positive("first_ring_median_hz", v)?)
        }
        (None, None) => {}
    }
    cfg.couplings_file = g.couplings_file;

    let e = raw.ensemble;
    if let Some(v) = e.n_realizations {
        cfg.ensemble.n_realizations = count("n_realizations", v, 1)?;
    }
    if let Some(v) = e.master_seed {
        cfg.ensemble.master_seed = v;
    }
    if let Some(v) = e.t_max_us {
        cfg.ensemble.grid.t_max = positive("t_max_us", v)? * 1e-6;
    }
    if let Some(v) = e.n_steps {
        cfg.ensemble.grid.n_steps = count("n_steps", v, 2)?;
    }
    if let Some(v) = e.threads {
        cfg.threads = Some(count("threads", v, 1)?);
    }

    let p = raw.protocol;
    if let Some(v) = p.n_phases {
        cfg.protocol.n_phases = Some(count("n_phases", v, 2)?);
    }
    if let Some(v) = p.max_oracle_spins {
        cfg.protocol.max_oracle_spins = count("max_oracle_spins", v, 1)?;
    }

    let s = raw.scaling;
    if let Some(v) = s.sizes {
        cfg.scaling.sizes = v
            .into_iter()
            .map(|n| count("sizes", n, 1))
            .collect::<Result<_>>()?;
    }
    if let Some([lo, hi]) = s.fit_window_us {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config("fit_window_us must satisfy 0 < lo < hi".into()));
        }
        cfg.scaling.options.fit_window_us = (lo, hi);
    }
    if let Some(v) = s.saturation_t_min_us {
        cfg.scaling.options.saturation_t_min_us = positive("saturation_t_min_us", v)?;
    }
    if let Some(v) = s.t_eq_min_size {
        cfg.scaling.options.t_eq_min_size = count("t_eq_min_size", v, 1)?;
    }
    if let Some(map) = s.realizations {
        for (k, v) in map {
            let size: usize = k
                .parse()
                .map_err(|_| Error::Config(format!("scaling.realizations: bad size {k:?}")))?;
            cfg.scaling.realizations.insert(size, count("realizations", v, 1)?);
        }
    }

    if let Some(dir) = raw.output.dir {
        cfg.output_dir = dir;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn geometry(&self) -> &GeometryConfig {
        &self.ensemble.geometry
    }

    pub fn n_spins(&self) -> usize {
        self.geometry().n_spins()
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        let ring = self.geometry().spins_per_ring;
        if let Some(&bad) = self.scaling.sizes.iter().find(|&&n| n % ring != 0) {
            return Err(Error::SizeNotMultiple { size: bad, ring });
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.ensemble.master_seed = seed;
        }
        if let Some(n) = o.nspins {
            let ring = self.geometry().spins_per_ring;
            if n == 0 || n % ring != 0 {
                return Err(Error::Config(format!(
                    "nspins must be a positive multiple of spins_per_ring ({ring}), got {n}"
                )));
            }
            self.ensemble.geometry.n_rings = n / ring;
        }
        if let Some(r) = o.realizations {
            if r == 0 {
                return Err(Error::Config("realizations must be ≥ 1".into()));
            }
            self.ensemble.n_realizations = r;
        }
        if let Some(t) = o.tmax_us {
            self.ensemble.grid.t_max = positive("tmax-us", t)? * 1e-6;
        }
        if let Some(s) = o.steps {
            if s < 2 {
                return Err(Error::Config("steps must be ≥ 2".into()));
            }
            self.ensemble.grid.n_steps = s;
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(t) = o.threads {
            if t == 0 {
                return Err(Error::Config("threads must be ≥ 1".into()));
            }
            self.threads = Some(t);
        }
        if let Some(path) = &o.couplings_file {
            self.couplings_file = Some(path.clone());
        }
        self.validate()
    }

    /// The fixed coupling list, when one is configured.
    pub fn fixed_couplings(&self) -> Result<Option<CouplingSet>> {
        let Some(path) = &self.couplings_file else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CouplingSet::parse_hz_list(&text)
            .map(Some)
            .map_err(|e| Error::Parse {
                path: path.clone(),
                msg: e.to_string(),
            })
    }

    pub fn time_grid(&self) -> TimeGrid {
        self.ensemble.grid
    }
}
