from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsign import arith
from lsign.arith import CoefficientSeries, InvalidArgument
from oracles import (
    dirichlet_convolve_bruteforce,
    factorize,
    is_prime,
    mobius,
    mobius_scaled_bruteforce,
    ordered_factorizations,
)


def exact(values, **kw):
    return CoefficientSeries(np.array(values, dtype=object), exact=True, **kw)


def test_build_sieve_base_case():
    s = arith.build_sieve(1)
    assert list(s.mobius[1:]) == [1]


def test_build_sieve_small():
    s = arith.build_sieve(12)
    assert list(s.mobius[1:7]) == [1, -1, -1, 0, -1, 1]
    assert s.smallest_prime_factor[12] == 2


@pytest.mark.parametrize("bad", [0, -3])
def test_build_sieve_rejects_nonpositive(bad):
    with pytest.raises(InvalidArgument):
        arith.build_sieve(bad)


def test_sieve_against_trial_division():
    N = 3000
    s = arith.build_sieve(N)
    for n in range(1, N + 1):
        assert s.mobius[n] == mobius(n)
    for n in range(2, N + 1):
        p = s.smallest_prime_factor[n]
        assert n % p == 0 and is_prime(int(p)) and p == min(factorize(n))


def test_mobius_sums_to_indicator():
    N = 10**4
    mu = arith.build_sieve(N).mobius.astype(np.int64)
    total = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        total[d::d] += mu[d]
    assert total[1] == 1
    assert not total[2:].any()


def test_factor_split_tables():
    s = arith.build_sieve(500)
    for n in range(2, 501):
        f = factorize(n)
        p = min(f)
        assert s.prime_power_part[n] == p ** f[p]
        assert s.cofactor[n] * s.prime_power_part[n] == n
        assert s.omega[n] == len(f)


def test_divisor_function_examples():
    assert arith.divisor_function(5, 1)[1] == 1
    d5 = arith.divisor_function(5, 30)
    assert all(d5[p] == 5 for p in (2, 3, 5, 7, 11, 13, 29))
    assert arith.divisor_function(4, 6)[6] == 16


def test_divisor_function_against_enumeration():
    N = 200
    for l in range(1, 6):
        d = arith.divisor_function(l, N)
        assert [d[n] for n in range(1, N + 1)] == [ordered_factorizations(n, l) for n in range(1, N + 1)]


def test_divisor_function_prime_powers():
    d = arith.divisor_function(3, 1024)
    for k in range(11):
        assert d[2**k] == comb(k + 2, 2)


def test_divisor_function_is_multiplicative():
    assert arith.check_multiplicative(arith.divisor_function(4, 2000)) == []


def test_convolve_examples():
    ones = exact([1] * 12)
    assert arith.dirichlet_convolve(ones, ones)[6] == 4
    ident = exact([1] + [0] * 11)
    b = exact(list(range(3, 15)))
    assert list(arith.dirichlet_convolve(ident, b).values) == list(b.values)
    mu_one = arith.dirichlet_convolve(arith.mobius_series(12), ones)
    assert list(mu_one.values) == [1] + [0] * 11


def test_convolve_limit_mismatch():
    with pytest.raises(InvalidArgument):
        arith.dirichlet_convolve(exact([1, 2]), exact([1, 2, 3]))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@given(st.lists(rationals, min_size=1, max_size=60).flatmap(
    lambda a: st.tuples(st.just(a), st.lists(rationals, min_size=len(a), max_size=len(a)),
                        st.lists(rationals, min_size=len(a), max_size=len(a)))))
def test_convolve_commutative_associative(abc):
    a, b, c = (exact(v) for v in abc)
    ab = arith.dirichlet_convolve(a, b)
    assert list(ab.values) == list(arith.dirichlet_convolve(b, a).values)
    assert list(ab.values) == dirichlet_convolve_bruteforce(list(a.values), list(b.values))
    left = arith.dirichlet_convolve(ab, c)
    right = arith.dirichlet_convolve(a, arith.dirichlet_convolve(b, c))
    assert list(left.values) == list(right.values)


def test_convolve_commutative_at_1000():
    rng = np.random.default_rng(3)
    a = exact([Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 9, 1000), rng.integers(1, 9, 1000))])
    b = exact([int(x) for x in rng.integers(-9, 9, 1000)])
    assert list(arith.dirichlet_convolve(a, b).values) == list(arith.dirichlet_convolve(b, a).values)


def test_convolve_parallel_bit_identical():
    rng = np.random.default_rng(11)
    a = CoefficientSeries(rng.normal(size=20000))
    b = CoefficientSeries(rng.normal(size=20000))
    seq = arith.dirichlet_convolve(a, b, workers=1).values
    par = arith.dirichlet_convolve(a, b, workers=4).values
    assert seq.tobytes() == par.tobytes()


def test_mobius_scaled_examples():
    aF = exact([Fraction(1), Fraction(3), Fraction(-2), Fraction(7, 3), Fraction(5)])
    lam = arith.mobius_scaled_convolve(aF)
    assert lam[1] == 1
    assert lam[2] == 3 and lam[3] == -2 and lam[5] == 5
    assert lam[4] == Fraction(7, 3) - Fraction(1, 2)


def test_mobius_scaled_against_enumeration():
    rng = np.random.default_rng(5)
    vals = [Fraction(1)] + [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-20, 20, 399), rng.integers(1, 6, 399))]
    lam = arith.mobius_scaled_convolve(exact(vals))
    assert list(lam.values) == mobius_scaled_bruteforce(vals)


def test_mobius_scaled_roundtrip_exact():
    rng = np.random.default_rng(6)
    vals = [Fraction(1)] + [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-20, 20, 2999), rng.integers(1, 9, 2999))]
    aF = exact(vals)
    back = arith.unscale_mobius(arith.mobius_scaled_convolve(aF))
    assert list(back.values) == vals


def test_mobius_scaled_float_matches_exact():
    rng = np.random.default_rng(8)
    vals = rng.normal(size=500)
    f = arith.mobius_scaled_convolve(CoefficientSeries(vals))
    e = arith.mobius_scaled_convolve(CoefficientSeries(vals).to_exact())
    np.testing.assert_allclose(f.values, [float(x) for x in e.values], rtol=1e-13, atol=1e-13)


def test_multiplicative_series_matches_factorization():
    N = 400
    local = np.zeros(N + 1, dtype=object)
    s = arith.build_sieve(N)
    for n in range(2, N + 1):
        f = factorize(n)
        if len(f) == 1:
            (p, k), = f.items()
            local[n] = p + 3 * k
    out = arith.multiplicative_series(N, local, exact=True, tables=s)
    from oracles import multiplicative_from_local

    assert list(out.values) == multiplicative_from_local(N, lambda p, k: p + 3 * k)


def test_check_multiplicative_detects_breakage():
    d = arith.divisor_function(2, 100)
    vals = d.values.copy()
    vals[5] = 99  # a(6)
    broken = d.with_values(vals)
    assert (2, 3) in arith.check_multiplicative(broken)


def test_coefficient_series_indexing_and_views():
    s = CoefficientSeries(np.array([1.0, -2.0, 3.0 + 0j]))
    assert s.limit == 3 and s[2] == -2.0
    with pytest.raises(IndexError):
        s[4]
    assert s.real().values.dtype == float
    with pytest.raises(InvalidArgument):
        CoefficientSeries(np.array([1.0, 1j])).real()
    with pytest.raises(InvalidArgument):
        CoefficientSeries(np.array([1.0]), exact=True)
