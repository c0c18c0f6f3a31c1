"""Brute-force reference computations, independent of the library code paths."""

from __future__ import annotations

import cmath
import itertools
from fractions import Fraction
from math import prod


def factorize(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return (-1) ** len(f)


def ordered_factorizations(n: int, l: int) -> int:
    """Number of ordered l-tuples of positive integers with product n, by recursion over divisors."""
    if l == 1:
        return 1
    return sum(ordered_factorizations(n // d, l - 1) for d in range(1, n + 1) if n % d == 0)


def tau_schoolbook(N: int) -> list[int]:
    """tau(1..N) by multiplying out q * prod_{n<=N} (1 - q^n)^24 term by term."""
    poly = [1] + [0] * (N - 1)
    for n in range(1, N):
        for _ in range(24):
            # multiply by (1 - q^n), truncating at degree N-1
            for i in range(N - 1, n - 1, -1):
                poly[i] -= poly[i - n]
    return poly


def series_product(factors: list[list[complex]], K: int) -> list[complex]:
    """Multiply truncated power series directly."""
    out = [1 + 0j] + [0j] * K
    for f in factors:
        new = [0j] * (K + 1)
        for i in range(K + 1):
            for j in range(K + 1 - i):
                new[i + j] += out[i] * f[j]
        out = new
    return out


def local_factor_bruteforce(alphas, K: int) -> list[complex]:
    """prod (1 - a X)^-1 as a product of geometric series."""
    return series_product([[complex(a) ** k for k in range(K + 1)] for a in alphas], K)


def local_factor_by_division(alphas, K: int) -> list[complex]:
    """Long division of 1 by prod (1 - a X)."""
    den = [1 + 0j]
    for a in alphas:
        den = [x - complex(a) * y for x, y in itertools.zip_longest(den + [0j], [0j] + den, fillvalue=0j)]
    num = [1 + 0j] + [0j] * K
    q = []
    for k in range(K + 1):
        c = num[k] / den[0]
        q.append(c)
        for i, d in enumerate(den):
            if k + i <= K:
                num[k + i] -= c * d
    return q


def dirichlet_convolve_bruteforce(a: list, b: list) -> list:
    N = len(a)
    return [sum(a[d - 1] * b[n // d - 1] for d in range(1, n + 1) if n % d == 0) for n in range(1, N + 1)]


def mobius_scaled_bruteforce(aF: list) -> list:
    """lambda(n) = sum over pairs (d, m) with d^2 m = n of mu(d)/d aF(m), found by enumeration."""
    N = len(aF)
    out = []
    for n in range(1, N + 1):
        total = Fraction(0)
        for d in range(1, n + 1):
            if d * d > n:
                break
            if n % (d * d) == 0:
                total += Fraction(mobius(d), d) * aF[n // (d * d) - 1]
        out.append(total)
    return out


def multiplicative_from_local(N: int, local) -> list:
    """a(n) = prod_p local(p, k_p) by trial-division factorization."""
    return [prod((local(p, k) for p, k in factorize(n).items()), start=1) for n in range(1, N + 1)]


def sign_changes_bruteforce(values, lo: int, hi: int) -> int:
    """Changes between consecutive nonzero entries with indices lo..hi (1-based, inclusive)."""
    last, count = 0, 0
    for n in range(lo, hi + 1):
        v = values[n - 1]
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count


def unit(theta: float) -> complex:
    return cmath.exp(1j * theta)
