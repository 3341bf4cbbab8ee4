//! Deterministic Monte Carlo over molecular orientations.
//!
//! Realization `i` draws its orientation from the ChaCha stream `i` of the
//! master seed, so every realization is a pure function of (seed, i). Workers
//! evaluate realizations in parallel chunks; results are folded strictly in
//! index order with compensated sums, which makes the summary bit-identical
//! for any worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dynamics::{cluster_weights, fid, IntensitySpectrum};
use crate::entropy::{entanglement_entropy, renyi_s1, renyi_s2, EntropySpread, EntropyTrace};
use crate::error::{Error, Result};
use crate::geometry::{build_bath, realization_rng, sample_orientation, CouplingSet, GeometryConfig};

/// Realizations evaluated per parallel batch before folding.
const CHUNK: usize = 64;

/// Uniform time grid from 0 to `t_max` (seconds) with `n_steps` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_max: 8000e-6,
            n_steps: 801,
        }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(Error::Config("n_steps must be ≥ 2".into()));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::Config("t_max_us must be > 0".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_steps - 1) as f64;
        (0..self.n_steps)
            .map(|i| self.t_max * i as f64 / last)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    pub master_seed: u64,
    pub grid: TimeGrid,
    pub geometry: GeometryConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_realizations: 300,
            master_seed: 0,
            grid: TimeGrid::default(),
            geometry: GeometryConfig::default(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations < 1 {
            return Err(Error::Config("n_realizations must be ≥ 1".into()));
        }
        self.grid.validate()?;
        self.geometry.validate()
    }
}

/// Couplings of realization `index`.
pub fn realization_couplings(cfg: &EnsembleConfig, index: usize) -> Result<CouplingSet> {
    let mut rng = realization_rng(cfg.master_seed, index as u64);
    build_bath(&cfg.geometry, &sample_orientation(&mut rng))
}

/// Every observable of one coupling set on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationTrace {
    pub fid: Vec<f64>,
    pub s_ent: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub spectra: Vec<IntensitySpectrum>,
}

pub fn simulate(c: &CouplingSet, times: &[f64]) -> Result<RealizationTrace> {
    let mut out = RealizationTrace {
        fid: Vec::with_capacity(times.len()),
        s_ent: Vec::with_capacity(times.len()),
        s1: Vec::with_capacity(times.len()),
        s2: Vec::with_capacity(times.len()),
        spectra: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let f = fid(c, t);
        let spec = cluster_weights(c, t).spread_over_orders();
        out.fid.push(f);
        out.s_ent.push(entanglement_entropy(f)?);
        out.s1.push(renyi_s1(&spec)?);
        out.s2.push(renyi_s2(&spec)?);
        out.spectra.push(spec);
    }
    Ok(out)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Debug)]
struct Moments {
    sum: Vec<CompensatedSum>,
    sum_sq: Vec<CompensatedSum>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments {
            sum: vec![CompensatedSum::default(); len],
            sum_sq: vec![CompensatedSum::default(); len],
        }
    }

    fn add(&mut self, values: &[f64]) {
        for ((s, q), &v) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(values) {
            s.add(v);
            q.add(v * v);
        }
    }

    fn finish(&self, count: usize) -> Stat {
        let n = count as f64;
        let mean: Vec<f64> = self.sum.iter().map(|s| s.value() / n).collect();
        let std = self
            .sum_sq
            .iter()
            .zip(&mean)
            .map(|(q, m)| (q.value() / n - m * m).max(0.0).sqrt())
            .collect();
        Stat { mean, std }
    }
}

/// Per-time ensemble mean and (population) standard deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct Stat {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    /// Seconds.
    pub times: Vec<f64>,
    pub n_spins: usize,
    pub realizations: usize,
    pub fid: Stat,
    pub s_ent: Stat,
    pub s1: Stat,
    pub s2: Stat,
    /// `intensity.mean[i]` is the mean spectrum at `times[i]`, orders −N..=N.
    pub intensity: Vec<Stat>,
}

impl EnsembleSummary {
    pub fn entropy_trace(&self) -> EntropyTrace {
        EntropyTrace {
            times: self.times.clone(),
            s_ent: self.s_ent.mean.clone(),
            s1: self.s1.mean.clone(),
            s2: self.s2.mean.clone(),
            spread: Some(EntropySpread {
                s_ent: self.s_ent.std.clone(),
                s1: self.s1.std.clone(),
                s2: self.s2.std.clone(),
            }),
        }
    }

    pub fn mean_spectrum(&self, index: usize) -> IntensitySpectrum {
        IntensitySpectrum::new(self.intensity[index].mean.clone(), self.times[index])
    }

    /// Mean intensity of order `n` over the whole grid.
    pub fn order_series(&self, n: i64) -> Vec<f64> {
        let idx = (n + self.n_spins as i64) as usize;
        self.intensity.iter().map(|s| s.mean[idx]).collect()
    }
}

struct Reducer {
    count: usize,
    fid: Moments,
    s_ent: Moments,
    s1: Moments,
    s2: Moments,
    intensity: Vec<Moments>,
}

impl Reducer {
    fn new(n_times: usize, n_spins: usize) -> Self {
        Reducer {
            count: 0,
            fid: Moments::new(n_times),
            s_ent: Moments::new(n_times),
            s1: Moments::new(n_times),
            s2: Moments::new(n_times),
            intensity: vec![Moments::new(2 * n_spins + 1); n_times],
        }
    }

    fn add(&mut self, r: &RealizationTrace) {
        self.count += 1;
        self.fid.add(&r.fid);
        self.s_ent.add(&r.s_ent);
        self.s1.add(&r.s1);
        self.s2.add(&r.s2);
        for (m, spec) in self.intensity.iter_mut().zip(&r.spectra) {
            m.add(&spec.intensities);
        }
    }

    fn finish(self, times: Vec<f64>, n_spins: usize) -> EnsembleSummary {
        let n = self.count;
        EnsembleSummary {
            times,
            n_spins,
            realizations: n,
            fid: self.fid.finish(n),
            s_ent: self.s_ent.finish(n),
            s1: self.s1.finish(n),
            s2: self.s2.finish(n),
            intensity: self.intensity.iter().map(|m| m.finish(n)).collect(),
        }
    }
}

/// Ensemble over `cfg.n_realizations` random orientations on the current
/// rayon pool.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let times = cfg.grid.times();
    let n_spins = cfg.geometry.n_spins();
    let mut reducer = Reducer::new(times.len(), n_spins);
    let indices: Vec<usize> = (0..cfg.n_realizations).collect();
    for chunk in indices.chunks(CHUNK) {
        let traces = chunk
            .par_iter()
            .map(|&i| simulate(&realization_couplings(cfg, i)?, &times))
            .collect::<Result<Vec<_>>>()?;
        for r in &traces {
            reducer.add(r);
        }
    }
    Ok(reducer.finish(times, n_spins))
}

/// Runs `f` on a dedicated pool with `threads` workers, or on the current
/// pool when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let Some(threads) = threads else {
        return Ok(f());
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("threads: {e}")))?;
    Ok(pool.install(f))
}

/// As [`run_ensemble`], on a dedicated pool with `threads` workers.
pub fn run_ensemble_with_threads(cfg: &EnsembleConfig, threads: usize) -> Result<EnsembleSummary> {
    with_threads(Some(threads), || run_ensemble(cfg))?
}

/// Single fixed coupling set summarized with zero spread.
pub fn summarize_couplings(c: &CouplingSet, grid: &TimeGrid) -> Result<EnsembleSummary> {
    grid.validate()?;
    let times = grid.times();
    let mut reducer = Reducer::new(times.len(), c.n_spins());
    reducer.add(&simulate(c, &times)?);
    Ok(reducer.finish(times, c.n_spins()))
}

/// One ensemble per bath size. `realizations_for(N)` sets the realization
/// count of each size.
pub fn entropy_vs_size(
    sizes: &[usize],
    template: &EnsembleConfig,
    realizations_for: impl Fn(usize) -> usize,
) -> Result<BTreeMap<usize, EnsembleSummary>> {
    let ring = template.geometry.spins_per_ring;
    let mut out = BTreeMap::new();
    for &size in sizes {
        if size == 0 || ring == 0 || size % ring != 0 {
            return Err(Error::SizeNotMultiple { size, ring });
        }
        let cfg = EnsembleConfig {
            n_realizations: realizations_for(size),
            geometry: GeometryConfig {
                n_rings: size / ring,
                ..template.geometry
            },
            ..*template
        };
        out.insert(size, run_ensemble(&cfg)?);
    }
    Ok(out)
}
