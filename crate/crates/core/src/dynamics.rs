//! Closed-form dynamics under the commuting ZZ Hamiltonian
//! H = Σ_j ω_j σz^CS σz^j.
//!
//! Each bath spin acts independently on the central spin: after time t spin j
//! has joined the correlated cluster with weight q_j = sin²(2ω_j t). The
//! number of correlated spins is therefore Poisson-binomial, and a cluster of
//! m spins spreads binomially over x-basis Hamming weights −m, −m+2, …, m.

use crate::geometry::CouplingSet;

/// Free induction decay Π_j cos(2 ω_j t).
pub fn fid(c: &CouplingSet, t: f64) -> f64 {
    c.omegas().iter().map(|w| (2.0 * w * t).cos()).product()
}

/// Per-spin probability of having been pulled into the correlated cluster.
pub fn flip_weights(c: &CouplingSet, t: f64) -> Vec<f64> {
    c.omegas()
        .iter()
        .map(|w| {
            let s = (2.0 * w * t).sin();
            s * s
        })
        .collect()
}

/// Distribution of the number of successes over independent Bernoulli trials
/// with success probabilities `probs`, by direct O(N²) convolution.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut pmf = Vec::with_capacity(probs.len() + 1);
    pmf.push(1.0);
    for &q in probs {
        let stay = 1.0 - q;
        pmf.push(0.0);
        for m in (1..pmf.len()).rev() {
            pmf[m] = pmf[m] * stay + pmf[m - 1] * q;
        }
        pmf[0] *= stay;
    }
    pmf
}

/// Total squared amplitude p_m of terms correlating the central spin with
/// exactly m bath spins.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterWeightDistribution {
    pub weights: Vec<f64>,
    pub time: f64,
}

impl ClusterWeightDistribution {
    pub fn n_spins(&self) -> usize {
        self.weights.len() - 1
    }

    /// Spreads every size-m cluster over Hamming orders with weights
    /// C(m, (m+n)/2) / 2^m.
    pub fn spread_over_orders(&self) -> IntensitySpectrum {
        let n = self.n_spins();
        // Non-negative orders only; the spectrum is mirrored afterwards.
        let mut half = vec![0.0; n + 1];
        // Row m of Pascal's triangle divided by 2^m.
        let mut row = Vec::with_capacity(n + 1);
        row.push(1.0);
        for (m, &p) in self.weights.iter().enumerate() {
            if m > 0 {
                row.push(0.0);
                for k in (1..=m).rev() {
                    row[k] = 0.5 * (row[k] + row[k - 1]);
                }
                row[0] *= 0.5;
            }
            // order = 2k − m ≥ 0
            for k in m.div_ceil(2)..=m {
                half[2 * k - m] += p * row[k];
            }
        }
        let mut intensities = vec![0.0; 2 * n + 1];
        for (order, v) in half.into_iter().enumerate() {
            intensities[n + order] = v;
            intensities[n - order] = v;
        }
        IntensitySpectrum {
            intensities,
            time: self.time,
        }
    }
}

pub fn cluster_weights(c: &CouplingSet, t: f64) -> ClusterWeightDistribution {
    ClusterWeightDistribution {
        weights: poisson_binomial(&flip_weights(c, t)),
        time: t,
    }
}

/// Intensities I_n = C^x_n² of Hamming weights n = −N..=N.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensitySpectrum {
    /// Index `n + N` holds order `n`.
    pub intensities: Vec<f64>,
    pub time: f64,
}

impl IntensitySpectrum {
    /// Wraps raw intensities ordered −N..=N. Panics on an even length.
    pub fn new(intensities: Vec<f64>, time: f64) -> Self {
        assert!(intensities.len() % 2 == 1, "spectrum needs 2N + 1 orders");
        IntensitySpectrum { intensities, time }
    }

    pub fn n_spins(&self) -> usize {
        (self.intensities.len() - 1) / 2
    }

    /// Intensity of order `n`; zero outside −N..=N.
    pub fn order(&self, n: i64) -> f64 {
        let idx = n + self.n_spins() as i64;
        if idx < 0 {
            return 0.0;
        }
        self.intensities.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.intensities.iter().sum()
    }

    /// (order, intensity) pairs from −N to N.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.n_spins() as i64;
        self.intensities
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - n, v))
    }
}

pub fn hamming_intensities(c: &CouplingSet, t: f64) -> IntensitySpectrum {
    cluster_weights(c, t).spread_over_orders()
}

/// SIG_φ(2t) = Σ_n e^{inφ} I_n = I_0 + 2 Σ_{n>0} I_n cos(nφ).
pub fn encoded_signal(c: &CouplingSet, t: f64, phi: f64) -> f64 {
    signal_from_spectrum(&hamming_intensities(c, t), phi)
}

pub fn signal_from_spectrum(spec: &IntensitySpectrum, phi: f64) -> f64 {
    let n = spec.n_spins() as i64;
    spec.order(0)
        + 2.0
            * (1..=n)
                .map(|k| spec.order(k) * (k as f64 * phi).cos())
                .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn couplings(hz: &[f64]) -> CouplingSet {
        CouplingSet::from_hz(hz).unwrap()
    }

    fn random_couplings() -> impl Strategy<Value = (CouplingSet, f64)> {
        (prop::collection::vec(-1500.0f64..1500.0, 1..20), 0.0f64..2e-3)
            .prop_map(|(hz, t)| (couplings(&hz), t))
    }

    /// Subset enumeration of the Poisson-binomial mass.
    fn subset_oracle(q: &[f64]) -> Vec<f64> {
        let n = q.len();
        let mut pmf = vec![0.0; n + 1];
        for mask in 0u32..(1 << n) {
            let mut p = 1.0;
            for (j, &qj) in q.iter().enumerate() {
                p *= if mask >> j & 1 == 1 { qj } else { 1.0 - qj };
            }
            pmf[mask.count_ones() as usize] += p;
        }
        pmf
    }

    #[test]
    fn fid_identity_and_single_zero() {
        let c = couplings(&[120.0, -800.0, 33.0]);
        assert_eq!(fid(&c, 0.0), 1.0);
        let w = 2.0 * PI * 500.0;
        let t = PI / 4.0 / w;
        assert_abs_diff_eq!(fid(&couplings(&[500.0]), t), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cluster_weights_at_zero_time() {
        let p = cluster_weights(&couplings(&[100.0, 200.0, 300.0]), 0.0);
        assert_eq!(p.weights, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fair_coin_pair() {
        assert_eq!(poisson_binomial(&[0.5, 0.5]), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn poisson_binomial_matches_subset_enumeration() {
        let c = couplings(&[
            910.0, -455.0, 1180.0, 75.0, -620.0, 333.3, -1002.0, 48.0, 700.0, -260.0,
        ]);
        for &t in &[3.7e-5, 1.9e-4, 8.8e-4, 4.1e-3] {
            let q = flip_weights(&c, t);
            let fast = cluster_weights(&c, t).weights;
            for (a, b) in fast.iter().zip(subset_oracle(&q)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_spin_fully_flipped() {
        let w = 2.0 * PI * 500.0;
        let t = PI / 4.0 / w;
        let spec = hamming_intensities(&couplings(&[500.0]), t);
        assert_abs_diff_eq!(spec.order(0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.order(1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.order(-1), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn spectrum_at_zero_time() {
        let spec = hamming_intensities(&couplings(&[100.0, -40.0]), 0.0);
        assert_eq!(spec.intensities, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn binomial_spreading_of_pure_cluster() {
        // All weight on m = 3: orders ±3 get 1/8, ±1 get 3/8.
        let p = ClusterWeightDistribution {
            weights: vec![0.0, 0.0, 0.0, 1.0],
            time: 0.0,
        };
        let s = p.spread_over_orders();
        assert_eq!(
            s.intensities,
            vec![0.125, 0.0, 0.375, 0.0, 0.375, 0.0, 0.125]
        );
    }

    #[test]
    fn signal_echo_identities() {
        let c = couplings(&[910.0, -455.0, 1180.0, 75.0, -620.0]);
        for &t in &[0.0, 5e-5, 3e-4, 2e-3] {
            assert_abs_diff_eq!(encoded_signal(&c, t, 0.0), 1.0, epsilon = 1e-12);
            let expect: f64 = c.omegas().iter().map(|w| (4.0 * w * t).cos()).product();
            assert_abs_diff_eq!(encoded_signal(&c, t, PI), expect, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn normalization_and_symmetry((c, t) in random_couplings()) {
            let p = cluster_weights(&c, t);
            prop_assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.weights.iter().all(|&w| w >= 0.0));
            let f = fid(&c, t);
            prop_assert!((p.weights[0] - f * f).abs() < 1e-12);

            let s = p.spread_over_orders();
            prop_assert!((s.total() - 1.0).abs() < 1e-12);
            let n = s.n_spins() as i64;
            for k in 0..=n {
                prop_assert_eq!(s.order(k), s.order(-k));
            }
            prop_assert!(s.order(0) >= f * f - 1e-15);
        }

        #[test]
        fn parity_selects_cluster_sizes(weights in prop::collection::vec(0.0f64..1.0, 2..12)) {
            // Putting weight only on even m leaves odd orders empty, and vice versa.
            let even: Vec<f64> = weights.iter().enumerate().map(|(m, &w)| if m % 2 == 0 { w } else { 0.0 }).collect();
            let s = ClusterWeightDistribution { weights: even, time: 0.0 }.spread_over_orders();
            for (n, v) in s.iter() {
                if n % 2 != 0 {
                    prop_assert_eq!(v, 0.0);
                }
            }
        }

        #[test]
        fn spectrum_matches_dft_of_signal((c, t) in random_couplings()) {
            let n = c.n_spins();
            let k = 2 * n + 2;
            let signal: Vec<f64> = fourier::phase_grid(k).map(|phi| encoded_signal(&c, t, phi)).collect();
            let (via_dft, imag) = fourier::extract_intensities(&signal, n, t).unwrap();
            prop_assert!(imag < 1e-10);
            let direct = hamming_intensities(&c, t);
            for (a, b) in direct.intensities.iter().zip(&via_dft.intensities) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn invariant_under_permutation_and_sign((c, t) in random_couplings(), seed in any::<u64>()) {
            let mut w = c.omegas().to_vec();
            let len = w.len();
            w.rotate_left((seed as usize) % len);
            for (j, x) in w.iter_mut().enumerate() {
                if (seed >> (j % 64)) & 1 == 1 {
                    *x = -*x;
                }
            }
            let d = CouplingSet::new(w).unwrap();
            prop_assert!((fid(&c, t) - fid(&d, t)).abs() < 1e-12);
            let (a, b) = (hamming_intensities(&c, t), hamming_intensities(&d, t));
            for (x, y) in a.intensities.iter().zip(&b.intensities) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
