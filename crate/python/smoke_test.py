"""Smoke test for the cspin extension module.

Build and install first:

    cd crates/python && maturin build --release -o dist && pip install dist/cspin-*.whl
"""

import math
import sys
import tempfile
from pathlib import Path

import numpy as np

import cspin


def check(name, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return ok


def main():
    results = []
    hz = [850.0, -410.5, 120.0, 333.3]
    c = cspin.CouplingSet.from_hz(hz)
    w = 2 * np.pi * np.array(hz)
    t = 2.3e-4

    results.append(check("fid is the cosine product", abs(c.fid(t) - np.prod(np.cos(2 * w * t))) < 1e-12))

    q = np.sin(2 * w * t) ** 2
    p = np.array([1.0])
    for qj in q:
        p = np.convolve(p, [1 - qj, qj])
    results.append(check("cluster weights", np.allclose(c.cluster_weights(t), p, atol=1e-12)))

    spec = c.hamming_intensities(t)
    i = np.array(spec.intensities)
    results.append(check("normalized and symmetric", abs(i.sum() - 1) < 1e-12 and np.array_equal(i, i[::-1])))
    results.append(check("dense protocol agrees", np.allclose(c.run_protocol(t).intensities, i, atol=1e-9)))
    results.append(check("echo at pi", abs(c.encoded_signal(t, math.pi) - np.prod(np.cos(4 * w * t))) < 1e-12))
    results.append(check("S2 <= S1", spec.renyi_s2() <= spec.renyi_s1() + 1e-12))
    results.append(check("S2 from a list", abs(cspin.renyi_s2(list(i)) - (-math.log2(np.sum(i**2)))) < 1e-12))
    results.append(check("entanglement entropy at fid 0", abs(cspin.entanglement_entropy(0.0) - 1) < 1e-15))

    geom = cspin.GeometryConfig(n_rings=2)
    bath = geom.build_bath((0.0, 0.0, 1.0))
    results.append(check("geometry builds ten couplings", len(bath) == 10 and geom.n_spins == 10))

    s = cspin.run_ensemble(n_realizations=50, master_seed=3, n_steps=201, geometry=geom)
    results.append(check("ensemble starts at fid 1", s.fid_mean[0] == 1.0 and s.s2_mean[0] == 0.0))
    again = cspin.run_ensemble(n_realizations=50, master_seed=3, n_steps=201, geometry=geom, threads=2)
    results.append(check("ensemble is deterministic", s.traces_csv() == again.traces_csv()))
    with tempfile.TemporaryDirectory() as d:
        paths = s.write(d)
        header = Path(paths[0]).read_text().splitlines()[0]
        results.append(check("traces.csv header", header.startswith("time_us,fid_mean,fid_std")))

    times = np.arange(0, 801) * 1e-5
    values = 1.5 + 0.8 * np.log2(np.maximum(times, 1e-12) * 1e6)
    fit = cspin.fit_log_time(list(times), list(values))
    results.append(check("log-time fit", abs(fit.slope - 0.8) < 1e-9 and fit.n_samples == 26))
    lnfit = cspin.fit_ln_n({n: 1.34 + 0.71 * math.log(n) for n in (5, 10, 15, 20)})
    results.append(check("ln N fit", abs(lnfit.intercept - 1.34) < 1e-9 and abs(lnfit.slope - 0.71) < 1e-9))

    report = cspin.scaling_sweep([5, 10, 15], n_realizations=30)
    results.append(check("scaling sweep", report.sizes == [5, 10, 15] and "S2bar" in report.report()))

    try:
        cspin.GeometryConfig(n_rings=0)
        results.append(check("zero rings rejected", False))
    except ValueError as e:
        results.append(check("zero rings rejected", "n_rings" in str(e)))

    failed = results.count(False)
    print(f"{len(results) - failed} passed, {failed} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
