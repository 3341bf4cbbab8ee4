//! Simulation of multi-spin correlation growth in the central spin model.
//!
//! A central spin couples to N bath spins through commuting ZZ terms. The
//! crate computes the free induction decay, the entanglement entropy of the
//! central spin, the Hamming-weight intensity spectrum read out by phase
//! encoding, and the correlation Rényi entropies of that spectrum, averaged
//! over random molecular orientations.
//!
//! * [`dynamics`] is the closed-form engine used for production runs.
//! * [`oracle`] simulates the echo protocol on the full density matrix and is
//!   used to validate the closed forms for small baths.
//! * [`ensemble`] and [`scaling`] run the orientation average and the fits
//!   over bath size.

pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod oracle;
pub mod output;
pub mod scaling;
pub mod verify;

pub use dynamics::{
    cluster_weights, encoded_signal, fid, hamming_intensities, ClusterWeightDistribution,
    IntensitySpectrum,
};
pub use ensemble::{run_ensemble, EnsembleConfig, EnsembleSummary, TimeGrid};
pub use entropy::{entanglement_entropy, renyi_s1, renyi_s2, EntropyTrace};
pub use error::{Error, Result};
pub use geometry::{build_bath, sample_orientation, CouplingSet, GeometryConfig, Orientation};
pub use scaling::{fit_ln_n, fit_log_time, FitResult};
