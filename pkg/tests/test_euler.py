import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsign import arith, euler
from lsign.arith import InvalidArgument
from lsign.euler import SatakeData
from oracles import local_factor_bruteforce, local_factor_by_division, multiplicative_from_local, unit


def test_expand_geometric():
    assert euler.expand_local_factor([1], 3) == [1, 1, 1, 1]


def test_expand_unitary_pair_is_chebyshev():
    theta = 1.1
    got = euler.expand_local_factor([unit(theta), unit(-theta)], 8)
    brute = local_factor_bruteforce([unit(theta), unit(-theta)], 8)
    for k in range(9):
        want = math.sin((k + 1) * theta) / math.sin(theta)
        assert abs(brute[k] - want) < 1e-12
        assert abs(got[k] - want) < 1e-12


def test_expand_quadruple_one():
    assert euler.expand_local_factor([1, 1, 1, 1], 1)[1] == 4


angles = st.floats(0, 2 * math.pi)
radii = st.floats(0.2, 1.5)


@given(st.lists(st.tuples(radii, angles), min_size=1, max_size=4), st.integers(0, 10))
def test_expand_matches_long_division(params, K):
    alphas = [r * cmath.exp(1j * t) for r, t in params]
    got = euler.expand_local_factor(alphas, K)
    want = local_factor_by_division(alphas, K)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-9 * max(1.0, abs(w))


def _data(primes, rows, theta=0.0):
    return SatakeData(len(rows[0]), np.array(primes), np.array(rows, dtype=complex), ramanujan_exponent=theta)


def test_assemble_trivial_products():
    primes = arith.build_sieve(50).primes
    zero = _data(primes, [[0j, 0j]] * len(primes))
    a = euler.assemble_series(zero, 50)
    assert a[1] == 1 and not np.any(a.values[1:])
    zeta = _data(primes, [[1 + 0j]] * len(primes))
    assert np.all(euler.assemble_series(zeta, 50).values == 1)


def test_assemble_missing_prime_named():
    data = _data([2, 3, 7], [[1j, -1j]] * 3)
    with pytest.raises(InvalidArgument, match="prime 5"):
        euler.assemble_series(data, 10)


def test_assemble_matches_factorization_oracle():
    data = euler.synth_satake(3, 300, "ramanujan-uniform", seed=4)
    a = euler.assemble_series(data, 300)
    per = data.per_prime
    want = multiplicative_from_local(300, lambda p, k: local_factor_bruteforce(per[p], k)[k])
    np.testing.assert_allclose(a.values, want, atol=1e-10)


def test_assemble_is_multiplicative():
    data = euler.synth_satake(2, 10**4, "sato-tate", seed=1)
    a = euler.assemble_series(data, 10**4)
    assert arith.check_multiplicative(a, tol=1e-9) == []


@pytest.mark.parametrize("m", [2, 3, 4])
def test_prime_coefficients_bounded(m):
    N = 5000
    uni = euler.assemble_series(euler.synth_satake(m, N, "ramanujan-uniform", seed=m), N)
    primes = arith.sieve_for(N).primes
    assert np.all(np.abs(uni.values[primes - 1]) <= m + 1e-9)
    lrs = euler.assemble_series(euler.synth_satake(m, N, "lrs-extremal", seed=m), N)
    bound = m * primes.astype(float) ** (0.5 - 1 / (m * m + 1))
    assert np.all(np.abs(lrs.values[primes - 1]) <= bound * (1 + 1e-9))


def test_rankin_selberg_local_examples():
    assert euler.rankin_selberg_local([2j], [3]) == [6j]
    t = 0.7
    a = [unit(t), unit(-t)]
    got = sorted(euler.rankin_selberg_local(a, [x.conjugate() for x in a]), key=lambda z: (round(z.real, 9), z.imag))
    want = sorted([1, 1, unit(2 * t), unit(-2 * t)], key=lambda z: (round(z.real, 9), z.imag))
    assert np.allclose(got, want)


@pytest.mark.parametrize("seed", range(4))
def test_rankin_selberg_inequality_synthetic(seed):
    N = 10**4
    m = 2 + seed % 2
    data = euler.synth_satake(m, N, "ramanujan-uniform", seed)
    a = euler.assemble_series(data, N).values
    rs = euler.assemble_series(euler.rankin_selberg(data, data.conjugate()), N).values
    tol = 1e-9 * np.maximum(1, np.abs(rs))
    assert np.all(np.abs(rs.imag) <= tol)
    assert np.all(rs.real >= -tol)
    assert np.all(np.abs(a) ** 2 <= rs.real + tol)
    primes = arith.sieve_for(N).primes
    np.testing.assert_allclose(np.abs(a[primes - 1]) ** 2, rs.real[primes - 1], atol=1e-9)


def test_symmetric_power_local():
    t = 0.4
    assert np.allclose(euler.symmetric_power_local([unit(t), unit(-t)], 1), [unit(t), unit(-t)])
    sym2 = euler.symmetric_power_local([unit(t), unit(-t)], 2)
    assert np.allclose(sym2, [unit(2 * t), 1, unit(-2 * t)])
    assert abs(sum(sym2) - (1 + 2 * math.cos(2 * t))) < 1e-12
    assert abs(sum(euler.symmetric_power_local([1j, -1j], 2)) - (-1)) < 1e-12
    with pytest.raises(InvalidArgument):
        euler.symmetric_power_local([2, 2], 2)


def test_synth_determinism_and_models():
    a = euler.synth_satake(3, 500, "ramanujan-uniform", seed=9)
    b = euler.synth_satake(3, 500, "ramanujan-uniform", seed=9)
    assert a.params.tobytes() == b.params.tobytes()
    assert np.allclose(np.abs(a.params), 1)
    lrs = euler.synth_satake(3, 100, "lrs-extremal", seed=0)
    assert np.allclose(np.abs(lrs.at(2)), 2**0.4)
    with pytest.raises(InvalidArgument):
        euler.synth_satake(3, 100, "sato-tate", seed=0)


def test_sato_tate_distribution():
    data = euler.synth_satake(2, 2 * 10**5, "sato-tate", seed=2)
    theta = np.angle(data.params[:, 0])
    # E[cos^2 theta] under (2/pi) sin^2 is 1/4; E[theta] = pi/2
    assert abs(np.mean(np.cos(theta) ** 2) - 0.25) < 0.01
    assert abs(np.mean(theta) - math.pi / 2) < 0.02


def test_satake_validation():
    with pytest.raises(InvalidArgument):
        _data([2], [[2.0 + 0j, 0.5]])
    with pytest.raises(InvalidArgument):
        SatakeData(2, np.array([2, 3]), np.zeros((2, 3), dtype=complex))


def test_satake_file_roundtrip(tmp_path):
    data = euler.synth_satake(3, 200, "lrs-extremal", seed=5)
    path = tmp_path / "sat.txt"
    euler.write_satake(data, path)
    header = path.read_text().splitlines()[0]
    assert header == "degree=3 conductor=1 model=lrs-extremal seed=5"
    back = euler.read_satake(path)
    assert back.degree == 3 and back.seed == 5 and back.model == "lrs-extremal"
    assert back.params.tobytes() == data.params.tobytes()
    assert np.array_equal(back.primes, data.primes)


def test_satake_file_bad_line(tmp_path):
    path = tmp_path / "sat.txt"
    path.write_text("degree=2 conductor=1 model=x seed=1\n2 1 0 1\n")
    with pytest.raises(InvalidArgument, match=":2:"):
        euler.read_satake(path)
