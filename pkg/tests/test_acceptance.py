"""Acceptance criteria; one PASS/FAIL line per criterion is printed in the terminal summary."""

import time

import numpy as np
import pytest

from lsign import arith, cli, euler, gl2, oscillate, siegel
from lsign.arith import CoefficientSeries
from oracles import tau_schoolbook

criterion = pytest.mark.criterion


@criterion(1, "tau(n) goldens for n <= 100 and exact Hecke recurrence to 1e4, under 10 s")
def test_exact_goldens():
    t0 = time.perf_counter()
    tau = gl2.delta_q_expansion(10**4).exact_coeffs
    assert tau[:100] == tau_schoolbook(100)
    assert (tau[1], tau[3], tau[5]) == (-24, -1472, -6048)
    checked = 0
    for p in arith.sieve_for(10**4).primes:
        p = int(p)
        q = p
        while q * p <= 10**4:
            assert tau[q * p - 1] == tau[p - 1] * tau[q - 1] - p**11 * tau[q // p - 1]
            checked += 1
            q *= p
    assert checked > 0
    assert time.perf_counter() - t0 < 10


@criterion(2, "|tau(p)| < 2 p^(11/2) for p <= 1e4; Satake reassembly matches to 1e-9 relative for n <= 1e3")
def test_deligne_and_reassembly(delta_1e4):
    tau = delta_1e4.exact_coeffs
    for p in arith.sieve_for(10**4).primes:
        p = int(p)
        assert tau[p - 1] ** 2 < 4 * p**11
    N = 1000
    data = gl2.satake_angles(delta_1e4, N)
    back = euler.assemble_series(data, N).values
    want = delta_1e4.normalized[:N]
    nz = want != 0
    rel = np.abs(back[nz] - want[nz]) / np.abs(want[nz])
    assert rel.max() < 1e-9
    assert np.all(np.abs(back[~nz]) < 1e-9)


def _rankin_holds(data, N):
    a = euler.assemble_series(data, N).values
    rs = euler.assemble_series(euler.rankin_selberg(data, data.conjugate()), N).values
    tol = 1e-9 * np.maximum(1.0, np.abs(rs))
    assert np.all(np.abs(rs.imag) <= tol)
    assert np.all(np.abs(a) ** 2 <= rs.real + tol)
    primes = arith.sieve_for(N).primes
    primes = primes[primes <= N]
    assert np.all(np.abs(np.abs(a[primes - 1]) ** 2 - rs.real[primes - 1]) <= tol[primes - 1])


@criterion(3, "Rankin-Selberg inequality to 1e4 on Delta and 10 synthetic GL2/GL3 sets, equality at primes")
def test_rankin_selberg(delta_1e4):
    N = 10**4
    _rankin_holds(gl2.satake_angles(delta_1e4, N), N)
    for seed in range(5):
        for m in (2, 3):
            _rankin_holds(euler.synth_satake(m, N, "ramanujan-uniform", seed), N)


@criterion(4, "moments of normalized tau on [1e3, 1e6]: c > 0, residual exponent <= 3/5 + 0.05, under 2 min")
def test_moment_asymptotics(delta_1e6):
    f, build = delta_1e6
    t0 = time.perf_counter()
    N = 10**6
    xs = oscillate.dyadic_points(1000, N) + [N]
    cap = 3 / 5 + 0.05
    second = oscillate.second_moment_fit(f.series(), xs)
    assert second.c > 0 and second.residual_exponent <= cap, second
    data = gl2.satake_angles(f, N)
    rs = euler.assemble_series(euler.rankin_selberg(data, data.conjugate()), N).real()
    first = oscillate.first_moment_fit(rs, xs)
    assert first.c > 0 and first.residual_exponent <= cap, first
    assert build + time.perf_counter() - t0 < 120


@criterion(5, "r = 0.61: every window from x0 <= 1e3 to 1e5 changes sign; cumulative exponent to 1e6 >= 0.34")
def test_window_criterion(delta_1e6):
    f, _ = delta_1e6
    prof = oscillate.gl2_selfdual().with_r(0.61)
    assert prof.valid
    rep = oscillate.scan_windows(f.series(), prof, 1, 10**5)
    assert rep.x0 is not None and rep.x0 <= 1000
    assert all(w.changes >= 1 for w in rep.windows if w.x >= rep.x0)
    assert rep.cumulative[-1][0] > 0.9e6
    assert rep.cumulative_exponent >= (1 - 0.61) - 0.05


@criterion(6, "10 synthetic spinor sets to 1e4: |a_F| <= d_4, |lambda| <= d_5, exact rational round trip")
def test_siegel_pipeline():
    N = 10**4
    d4 = arith.divisor_function(4, N).to_float()
    d5 = arith.divisor_function(5, N).to_float()
    for seed in range(10):
        triples = siegel.synth_triples(N, seed, symplectic=seed % 2 == 1)
        aF = siegel.spinor_series(triples, N)
        lam = siegel.normalized_eigenvalues(aF)
        assert np.all(np.abs(aF.values) <= d4 * (1 + 1e-9))
        assert np.all(np.abs(lam.values) <= d5 * (1 + 1e-9))
        exact = aF.to_exact()
        back = arith.unscale_mobius(siegel.normalized_eigenvalues(exact))
        assert list(back.values) == list(exact.values)


@criterion(7, "validity predicate accepts the presets, rejects r below threshold; one-signed input gives no changes")
def test_criterion_engine():
    from fractions import Fraction

    expected = {"gl2-selfdual": Fraction(3, 5), "siegel-spinor": Fraction(41, 47)}
    expected.update({f"glm-ramanujan({m})": Fraction(m * m - 1, m * m + 1) for m in range(2, 7)})
    for name, thr in expected.items():
        prof = oscillate.get_preset(name)
        assert prof.threshold == thr and prof.valid
        assert not prof.with_r(float(thr) - 1e-6).valid
    rng = np.random.default_rng(0)
    for sign in (1.0, -1.0):
        vals = sign * rng.exponential(size=20000)
        vals[rng.integers(0, 20000, 500)] = 0.0
        rep = oscillate.scan_windows(CoefficientSeries(vals), oscillate.gl2_selfdual(), 1, 19000)
        assert all(w.changes == 0 for w in rep.windows)
        assert all(c == 0 for _, c in rep.cumulative)


@criterion(8, "identical configs give byte-identical CSVs; 1 and 4 threads agree bit for bit")
def test_determinism(tmp_path, monkeypatch):
    args = ["--set", "source=synthetic", "--set", "m=3", "--set", "seed=11", "--set", "N=20000",
            "--set", "tasks=windows,cumulative,moments,rankin-check,divisor-bound-check", "--set", "label=det"]
    outputs = {}
    for name, threads in (("a", "1"), ("b", "1"), ("c", "4")):
        monkeypatch.setenv(cli.THREADS_ENV, threads)
        out = tmp_path / name
        assert cli.main(["run", *args, "--set", f"outputs={out}"]) in (0, 2)
        outputs[name] = {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}
    assert len(outputs["a"]) == 5
    assert outputs["a"] == outputs["b"] == outputs["c"]

    rng = np.random.default_rng(1)
    a, b = CoefficientSeries(rng.normal(size=50000)), CoefficientSeries(rng.normal(size=50000))
    assert (arith.dirichlet_convolve(a, b, workers=1).values.tobytes()
            == arith.dirichlet_convolve(a, b, workers=4).values.tobytes())
