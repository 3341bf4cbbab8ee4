//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cspin_core::dynamics::{cluster_weights, encoded_signal, fid, hamming_intensities};
use cspin_core::ensemble::{
    entropy_vs_size, run_ensemble, run_ensemble_with_threads, EnsembleConfig, EnsembleSummary,
};
use cspin_core::entropy::{entanglement_entropy, renyi_s1, renyi_s2};
use cspin_core::fourier::default_n_phases;
use cspin_core::geometry::CouplingSet;
use cspin_core::oracle::{
    evolve, fid_configuration_sum, protocol_signal, run_protocol, DenseState,
};
use cspin_core::output::{intensities_csv, traces_csv};
use cspin_core::scaling::{analyze_sizes, ols, ScalingOptions};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn random_couplings(rng: &mut ChaCha8Rng, n: usize) -> CouplingSet {
    let hz: Vec<f64> = (0..n).map(|_| rng.random_range(-1500.0..1500.0)).collect();
    CouplingSet::from_hz(&hz).unwrap()
}

fn random_time(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1e-6..1e-3)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_intensity = 0.0f64;
    for n in 1..=8 {
        for _ in 0..20 {
            let c = random_couplings(&mut rng, n);
            for _ in 0..10 {
                let t = random_time(&mut rng);
                let run = run_protocol(&c, t, default_n_phases(n)).unwrap();
                let analytic = hamming_intensities(&c, t);
                for (a, b) in analytic.intensities.iter().zip(&run.spectrum.intensities) {
                    worst_intensity = worst_intensity.max((a - b).abs());
                }
            }
        }
    }
    let mut worst_fid = 0.0f64;
    for n in 1..=12 {
        for _ in 0..20 {
            let c = random_couplings(&mut rng, n);
            let t = random_time(&mut rng);
            worst_fid = worst_fid.max((fid(&c, t) - fid_configuration_sum(&c, t)).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_intensity < 1e-9 && worst_fid < 1e-12 && elapsed < Duration::from_secs(120),
        format!(
            "max |ΔI_n| {worst_intensity:.2e} (< 1e-9), max |ΔFID| {worst_fid:.2e} (< 1e-12), {:.1} s (< 120 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn single_spin_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let c = random_couplings(&mut rng, 1);
        let t = random_time(&mut rng);
        let x = 2.0 * c.omegas()[0] * t;
        let spec = hamming_intensities(&c, t);
        worst = worst
            .max((fid(&c, t) - x.cos()).abs())
            .max((spec.order(0) - x.cos().powi(2)).abs())
            .max((spec.order(1) - x.sin().powi(2) / 2.0).abs())
            .max((spec.order(-1) - x.sin().powi(2) / 2.0).abs());
    }
    // 2ωt = π/2
    let omega = 2.0 * PI * 700.0;
    let c = CouplingSet::new(vec![omega]).unwrap();
    let t = FRAC_PI_2 / (2.0 * omega);
    let spec = hamming_intensities(&c, t);
    let s_ent = entanglement_entropy(fid(&c, t)).unwrap();
    let s2 = renyi_s2(&spec).unwrap();
    worst = worst.max((s_ent - 1.0).abs()).max((s2 - 1.0).abs());
    outcome(
        worst < 1e-12,
        format!("max deviation {worst:.2e} (< 1e-12), S_ent = {s_ent:.15}, S2 = {s2:.15}"),
    )
}

fn normalization_and_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let mut order_violation = 0.0f64;
    for _ in 0..500 {
        let n = rng.random_range(1..=30);
        let c = random_couplings(&mut rng, n);
        let t = rng.random_range(0.0..8e-3);
        let spec = hamming_intensities(&c, t);
        let weights = cluster_weights(&c, t);
        worst = worst
            .max((spec.total() - 1.0).abs())
            .max((weights.weights.iter().sum::<f64>() - 1.0).abs())
            .max((weights.weights[0] - fid(&c, t).powi(2)).abs());
        for k in 1..=n as i64 {
            worst = worst.max((spec.order(k) - spec.order(-k)).abs());
        }
        let s1 = renyi_s1(&spec).unwrap();
        let s2 = renyi_s2(&spec).unwrap();
        let bound = ((2 * n + 1) as f64).log2();
        order_violation = order_violation.max(s2 - s1).max(s1 - bound);
    }
    outcome(
        worst < 1e-9 && order_violation < 1e-9,
        format!("max deviation {worst:.2e}, max S2 ≤ S1 ≤ log2(2N+1) violation {order_violation:.2e} (< 1e-9)"),
    )
}

fn echo_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut analytic = 0.0f64;
    for _ in 0..500 {
        let n = rng.random_range(1..=30);
        let c = random_couplings(&mut rng, n);
        let t = random_time(&mut rng);
        let echo: f64 = c.omegas().iter().map(|w| (4.0 * w * t).cos()).product();
        analytic = analytic
            .max((encoded_signal(&c, t, 0.0) - 1.0).abs())
            .max((encoded_signal(&c, t, PI) - echo).abs());
    }
    let mut oracle = 0.0f64;
    for n in 1..=8 {
        for _ in 0..10 {
            let c = random_couplings(&mut rng, n);
            let t = random_time(&mut rng);
            let echo: f64 = c.omegas().iter().map(|w| (4.0 * w * t).cos()).product();
            let rho_t = evolve(&DenseState::initial(n), &c, t).unwrap();
            oracle = oracle
                .max((protocol_signal(&rho_t, &c, t, 0.0).unwrap() - 1.0).abs())
                .max((protocol_signal(&rho_t, &c, t, PI).unwrap() - echo).abs());
        }
    }
    outcome(
        analytic < 1e-10 && oracle < 1e-10,
        format!("analytic max {analytic:.2e}, oracle max {oracle:.2e} (< 1e-10)"),
    )
}

fn index_of(times: &[f64], t_us: f64) -> usize {
    times
        .iter()
        .position(|t| (t * 1e6 - t_us).abs() < 1e-6)
        .unwrap_or_else(|| panic!("{t_us} μs is not on the grid"))
}

fn fid_entanglement(s: &EnsembleSummary, elapsed: Duration) -> Outcome {
    let mut max_fid = 0.0f64;
    let mut max_dev = 0.0f64;
    for (i, &t) in s.times.iter().enumerate() {
        if t * 1e6 > 200.0 {
            max_fid = max_fid.max(s.fid.mean[i].abs());
            max_dev = max_dev.max((s.s_ent.mean[i] - 1.0).abs());
        }
    }
    let late = s.s_ent.mean[index_of(&s.times, 2000.0)];
    let early = s.s_ent.mean[index_of(&s.times, 500.0)];
    outcome(
        max_fid < 0.05 && max_dev < 0.05 && late > early && elapsed < Duration::from_secs(300),
        format!(
            "t > 200 μs: max |FID| {max_fid:.4} (< 0.05), max |S_ent − 1| {max_dev:.4} (< 0.05); \
             S_ent(2000) − S_ent(500) = {:.3e} (> 0); {:.1} s (< 300 s)",
            late - early,
            elapsed.as_secs_f64()
        ),
    )
}

/// Slope in bits/μs of an OLS line through the samples with t in [lo, hi] μs.
fn slope_per_us(times: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t * 1e6 >= lo - 1e-6 && **t * 1e6 <= hi + 1e-6)
        .map(|(t, v)| (t * 1e6, *v))
        .unzip();
    ols(&x, &y).unwrap().slope
}

fn intensity_and_renyi_shape(s: &EnsembleSummary) -> Outcome {
    let times = &s.times;
    let mut failures = Vec::new();

    // Upper envelope of I_0: maxima over consecutive 200 μs blocks may not
    // rise by more than three standard errors of the ensemble mean.
    let i0 = s.order_series(0);
    let idx0 = s.n_spins;
    let se: Vec<f64> = s
        .intensity
        .iter()
        .map(|st| st.std[idx0] / (s.realizations as f64).sqrt())
        .collect();
    let dt_us = (times[1] - times[0]) * 1e6;
    let block = ((200.0 / dt_us).round() as usize).max(1);
    let maxima: Vec<(f64, f64)> = (1..times.len())
        .collect::<Vec<_>>()
        .chunks(block)
        .map(|idx| {
            let &best = idx
                .iter()
                .max_by(|&&a, &&b| i0[a].total_cmp(&i0[b]))
                .unwrap();
            (i0[best], se[best])
        })
        .collect();
    let mut worst_rise = f64::NEG_INFINITY;
    let mut envelope_ok = i0[0] >= maxima[0].0;
    for w in maxima.windows(2) {
        let rise = w[1].0 - w[0].0;
        worst_rise = worst_rise.max(rise);
        if rise > 3.0 * w[0].1.max(w[1].1) {
            envelope_ok = false;
        }
    }
    if !envelope_ok {
        failures.push("I_0 envelope");
    }

    // Orders 1..6 reach half their maximum one after another.
    let half_max_times: Vec<f64> = (1..=6i64.min(s.n_spins as i64))
        .map(|n| {
            let series = s.order_series(n);
            let peak = series.iter().cloned().fold(0.0, f64::max);
            let i = series.iter().position(|&v| v >= peak / 2.0).unwrap();
            (times[i] * 1e6 * 10.0).round() / 10.0
        })
        .collect();
    let sequential = half_max_times.windows(2).all(|w| w[0] < w[1]);
    if !sequential {
        failures.push("order sequence");
    }

    let rising = slope_per_us(times, &s.s2.mean, 450.0, 550.0);
    if rising <= 0.0 {
        failures.push("S2 rising at 500 μs");
    }
    let t_end = times.last().unwrap() * 1e6;
    let tail = slope_per_us(times, &s.s2.mean, 5000.0 + dt_us, t_end);
    if tail.abs() >= 1e-4 {
        failures.push("S2 tail flat");
    }

    outcome(
        failures.is_empty(),
        format!(
            "I_0 block-max rise {worst_rise:.2e} (≤ 3σ_mean: {}); half-max times {half_max_times:?} μs \
             (increasing: {sequential}); dS2/dt at 500 μs {rising:.2e} bits/μs (> 0); \
             tail slope {tail:.2e} bits/μs (|·| < 1e-4){}",
            envelope_ok,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join(", "))
            }
        ),
    )
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn size_scaling(template: &EnsembleConfig) -> Outcome {
    let start = Instant::now();
    let sizes = [5, 10, 15, 20, 25, 30];
    let opts = ScalingOptions::default();
    let by_size: BTreeMap<usize, EnsembleSummary> =
        entropy_vs_size(&sizes, template, |_| template.n_realizations).unwrap();
    let report = analyze_sizes(&by_size, &opts).unwrap();
    let elapsed = start.elapsed();
    let b = &report.beta_fit;
    let s = &report.saturation_fit;
    let mut failures = Vec::new();
    if b.r_squared < 0.95 || s.r_squared < 0.95 {
        failures.push("R²");
    }
    if !(within(b.intercept, 0.65, 0.3) && within(b.slope, 0.07, 0.3)) {
        failures.push("β coefficients");
    }
    if !(within(s.intercept, 1.34, 0.3) && within(s.slope, 0.71, 0.3)) {
        failures.push("S2 saturation coefficients");
    }
    let (mean, spread) = match (report.t_eq_mean, report.t_eq_relative_spread()) {
        (Some(m), Some(r)) => (m * 1e6, r),
        _ => (f64::NAN, f64::NAN),
    };
    if spread.is_nan() || spread >= 0.2 {
        failures.push("T_eq spread");
    }
    if !within(mean, 2145.5, 0.4) {
        failures.push("T_eq mean");
    }
    if elapsed >= Duration::from_secs(1800) {
        failures.push("runtime");
    }
    outcome(
        failures.is_empty(),
        format!(
            "β = {:.3} + {:.4} ln N (R² {:.4}); S2 = {:.3} + {:.3} ln N (R² {:.4}); \
             T_eq(N ≥ 15) = {mean:.1} μs, spread {spread:.3}; {:.1} s{}",
            b.intercept,
            b.slope,
            b.r_squared,
            s.intercept,
            s.slope,
            s.r_squared,
            elapsed.as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join(", "))
            }
        ),
    )
}

fn determinism(template: &EnsembleConfig) -> Outcome {
    let cfg = EnsembleConfig {
        n_realizations: 150,
        ..*template
    };
    let render = |s: EnsembleSummary| format!("{}{}", traces_csv(&s), intensities_csv(&s));
    let reference = render(run_ensemble_with_threads(&cfg, 1).unwrap());
    let repeated = render(run_ensemble_with_threads(&cfg, 1).unwrap());
    let identical = [2, 3, 8]
        .iter()
        .all(|&threads| render(run_ensemble_with_threads(&cfg, threads).unwrap()) == reference);
    outcome(
        identical && repeated == reference,
        format!(
            "{} bytes of CSV identical across repeats and 1, 2, 3, 8 threads: {}",
            reference.len(),
            identical && repeated == reference
        ),
    )
}

fn performance(template: &EnsembleConfig) -> Outcome {
    let mut cfg = *template;
    cfg.geometry.n_rings = 30 / cfg.geometry.spins_per_ring;
    let start = Instant::now();
    let s = run_ensemble(&cfg).unwrap();
    let elapsed = start.elapsed();
    outcome(
        s.n_spins == 30
            && s.times.len() == 801
            && s.realizations == 300
            && elapsed < Duration::from_secs(300),
        format!(
            "N = {}, {} points, {} realizations in {:.2} s (< 300 s)",
            s.n_spins,
            s.times.len(),
            s.realizations,
            elapsed.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let template = EnsembleConfig::default();
    assert_eq!(template.geometry.n_spins(), 15);
    assert_eq!(template.n_realizations, 300);

    let mut results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", oracle_equivalence()),
        ("single-spin closed forms", single_spin_closed_forms()),
        ("normalization and symmetry", normalization_and_symmetry()),
        ("echo identities", echo_identities()),
    ];
    let start = Instant::now();
    let main_run = run_ensemble(&template).unwrap();
    let elapsed = start.elapsed();
    results.push(("FID and entanglement saturation", fid_entanglement(&main_run, elapsed)));
    results.push(("intensity spreading and S2 shape", intensity_and_renyi_shape(&main_run)));
    results.push(("size scaling", size_scaling(&template)));
    results.push(("determinism", determinism(&template)));
    results.push(("performance", performance(&template)));

    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("{mark} {}. {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
