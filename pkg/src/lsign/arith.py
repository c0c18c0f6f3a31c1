"""Sieved arithmetic tables and Dirichlet-convolution primitives.

Arrays in :class:`SieveTables` are indexed directly by ``n`` (slot 0 is a
placeholder).  :class:`CoefficientSeries` stores ``a(1..N)`` at positions
``0..N-1`` and is read with 1-based ``series[n]``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, isqrt
from typing import Callable

import numpy as np


class InvalidArgument(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SieveTables:
    """Mobius function and smallest prime factors for 1..limit."""

    limit: int
    mobius: np.ndarray
    smallest_prime_factor: np.ndarray

    @cached_property
    def primes(self) -> np.ndarray:
        n = np.arange(self.limit + 1)
        return n[(self.smallest_prime_factor == n) & (n >= 2)]

    @cached_property
    def _factor_split(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # n = prime_power_part[n] * cofactor[n], prime_power_part = p^k exactly dividing n, p = spf(n)
        n = np.arange(self.limit + 1, dtype=np.int64)
        p = self.smallest_prime_factor.astype(np.int64)
        p_safe = np.where(p > 0, p, 1)
        rest = n // p_safe
        exponent = np.where(n >= 2, 1, 0)
        active = (n >= 2) & (rest % p_safe == 0)
        while active.any():
            idx = np.nonzero(active)[0]
            rest[idx] //= p_safe[idx]
            exponent[idx] += 1
            active[idx] = rest[idx] % p_safe[idx] == 0
        rest[:2] = 1
        return n // np.where(rest > 0, rest, 1), rest, exponent

    @property
    def prime_power_part(self) -> np.ndarray:
        return self._factor_split[0]

    @property
    def cofactor(self) -> np.ndarray:
        return self._factor_split[1]

    @property
    def spf_exponent(self) -> np.ndarray:
        return self._factor_split[2]

    @cached_property
    def omega(self) -> np.ndarray:
        """Number of distinct prime factors."""
        out = np.zeros(self.limit + 1, dtype=np.int64)
        cur = np.arange(self.limit + 1, dtype=np.int64)
        cofactor = self.cofactor
        while True:
            active = cur > 1
            if not active.any():
                return out
            out[active] += 1
            cur = np.where(active, cofactor[cur], cur)


def build_sieve(N: int) -> SieveTables:
    """Smallest-prime-factor and Mobius tables up to ``N``.

    Runs an Eratosthenes-style numpy sieve, O(N log log N).
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidArgument(f"sieve limit must be a positive integer, got {N!r}")
    N = int(N)
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, isqrt(N) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    n = np.arange(N + 1, dtype=np.int64)
    unset = spf == 0
    spf[unset] = n[unset]
    spf[0] = 0
    spf[1] = 1

    mu = np.ones(N + 1, dtype=np.int8)
    mu[0] = 0
    for p in n[(spf == n) & (n >= 2)]:
        mu[p::p] *= -1
        if p * p <= N:
            mu[p * p :: p * p] = 0
    return SieveTables(limit=N, mobius=mu, smallest_prime_factor=spf)


_SIEVE_CACHE: dict[int, SieveTables] = {}


def sieve_for(N: int) -> SieveTables:
    """Shared sieve covering at least ``N`` (cached; tables are immutable)."""
    for limit, tables in _SIEVE_CACHE.items():
        if limit >= N:
            return tables if limit == N else _restrict(tables, N)
    tables = build_sieve(N)
    _SIEVE_CACHE.clear()
    _SIEVE_CACHE[N] = tables
    return tables


def _restrict(tables: SieveTables, N: int) -> SieveTables:
    return SieveTables(
        limit=N,
        mobius=tables.mobius[: N + 1],
        smallest_prime_factor=tables.smallest_prime_factor[: N + 1],
    )


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    """A finite sequence a(1..N).

    ``exact`` series hold Python ints or Fractions in an object array; the
    others hold float64 or complex128.  ``present`` marks which indices carry
    data (``None`` means all of them).
    """

    values: np.ndarray
    exact: bool = False
    label: str = ""
    is_multiplicative: bool = False
    present: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.values.ndim != 1 or len(self.values) == 0:
            raise InvalidArgument("a coefficient series needs at least one entry")
        if self.exact and self.values.dtype != object:
            raise InvalidArgument("exact series must use an object array")
        if self.present is not None and self.present.shape != self.values.shape:
            raise InvalidArgument("presence mask must match the values")

    @property
    def limit(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int):
        if not 1 <= n <= self.limit:
            raise IndexError(f"index {n} outside 1..{self.limit}")
        return self.values[n - 1]

    def __len__(self) -> int:
        return self.limit

    def to_float(self) -> np.ndarray:
        if not self.exact:
            return self.values
        complex_entries = any(isinstance(v, complex) for v in self.values)
        return np.array([complex(v) if complex_entries else float(v) for v in self.values])

    def to_exact(self) -> CoefficientSeries:
        """Exact rational copy; floats convert without rounding."""
        if self.exact:
            return self
        if np.iscomplexobj(self.values):
            if np.any(self.values.imag != 0):
                raise InvalidArgument("cannot convert complex values to exact rationals")
            vals = self.values.real
        else:
            vals = self.values
        return CoefficientSeries(
            np.array([Fraction(float(v)) for v in vals], dtype=object),
            exact=True,
            label=self.label,
            is_multiplicative=self.is_multiplicative,
            present=self.present,
        )

    def real(self, tol: float = 1e-9) -> CoefficientSeries:
        """Real-valued float view; fails if any imaginary part exceeds ``tol``."""
        vals = self.to_float()
        if np.iscomplexobj(vals):
            worst = float(np.max(np.abs(vals.imag))) if len(vals) else 0.0
            if worst > tol * max(1.0, float(np.max(np.abs(vals.real)))):
                raise InvalidArgument(f"series {self.label!r} is not real (max imaginary part {worst:.3g})")
            vals = vals.real.copy()
        return CoefficientSeries(vals, False, self.label, self.is_multiplicative, self.present)

    def with_values(self, values: np.ndarray, label: str | None = None, **kw) -> CoefficientSeries:
        return CoefficientSeries(
            values,
            exact=kw.get("exact", self.exact),
            label=self.label if label is None else label,
            is_multiplicative=kw.get("is_multiplicative", self.is_multiplicative),
            present=kw.get("present", self.present),
        )


def multiplicative_series(
    N: int,
    prime_power_values: np.ndarray,
    *,
    exact: bool = False,
    label: str = "",
    tables: SieveTables | None = None,
) -> CoefficientSeries:
    """Assemble a(n) = prod a(p^k) from values at prime powers.

    ``prime_power_values`` is indexed by n (length N+1); only entries at
    prime powers are read.  Assembly proceeds by number of distinct prime
    factors, so every product is formed in the same order regardless of how
    the input was produced.
    """
    tables = tables or sieve_for(N)
    pp = tables.prime_power_part[: N + 1]
    cof = tables.cofactor[: N + 1]
    omega = tables.omega[: N + 1]
    if exact:
        out = np.zeros(N + 1, dtype=object)
    else:
        out = np.zeros(N + 1, dtype=np.result_type(prime_power_values.dtype, np.float64))
    out[1] = 1
    for w in range(1, int(omega.max(initial=0)) + 1):
        idx = np.nonzero(omega == w)[0]
        out[idx] = prime_power_values[pp[idx]] * out[cof[idx]]
    return CoefficientSeries(out[1:], exact=exact, label=label, is_multiplicative=True)


def prime_power_table(N: int, tables: SieveTables | None = None) -> list[tuple[int, int]]:
    """All (p, K) with p prime <= N and K = largest exponent with p^K <= N."""
    tables = tables or sieve_for(N)
    out = []
    for p in tables.primes[tables.primes <= N]:
        p = int(p)
        k, q = 1, p
        while q * p <= N:
            q *= p
            k += 1
        out.append((p, k))
    return out


def divisor_function(l: int, N: int) -> CoefficientSeries:
    """d_l(n) for n <= N, exact; d_l(p^k) = C(k+l-1, l-1)."""
    if l < 1 or N < 1:
        raise InvalidArgument(f"need l >= 1 and N >= 1, got l={l}, N={N}")
    tables = sieve_for(N)
    local = np.zeros(N + 1, dtype=object)
    pp = tables.prime_power_part[: N + 1]
    k = tables.spf_exponent[: N + 1]
    is_pp = (pp == np.arange(N + 1)) & (np.arange(N + 1) >= 2)
    for n in np.nonzero(is_pp)[0]:
        local[n] = comb(int(k[n]) + l - 1, l - 1)
    return multiplicative_series(N, local, exact=True, label=f"d_{l}", tables=tables)


def mobius_series(N: int) -> CoefficientSeries:
    mu = sieve_for(N).mobius[1 : N + 1]
    return CoefficientSeries(np.array([int(v) for v in mu], dtype=object), True, "mu", True)


def _convolve_range(a: np.ndarray, b: np.ndarray, lo: int, hi: int, out: np.ndarray) -> None:
    # output indices n in [lo, hi), 1-based; accumulate in increasing d for each n
    for d in range(1, hi):
        ad = a[d - 1]
        if ad == 0:
            continue
        e_lo = max(1, -(-lo // d))
        e_hi = (hi - 1) // d
        if e_hi < e_lo:
            continue
        out[d * e_lo - lo : d * e_hi - lo + 1 : d] += ad * b[e_lo - 1 : e_hi]


def dirichlet_convolve(a: CoefficientSeries, b: CoefficientSeries, *, workers: int = 1) -> CoefficientSeries:
    """(a*b)(n) = sum_{d|n} a(d) b(n/d) via the divisor-pair loop.

    With ``workers > 1`` the output range is split into chunks; every output
    still accumulates its terms in increasing ``d``, so the result is
    bit-identical to the sequential run.
    """
    if a.limit != b.limit:
        raise InvalidArgument(f"limit mismatch: {a.limit} != {b.limit}")
    N = a.limit
    exact = a.exact and b.exact
    if exact:
        av, bv = a.values, b.values
        out = np.zeros(N, dtype=object)
        out[:] = [0] * N
    else:
        av, bv = a.to_float(), b.to_float()
        out = np.zeros(N, dtype=np.result_type(av.dtype, bv.dtype))
    if workers <= 1 or N < 4096:
        _convolve_range(av, bv, 1, N + 1, out)
    else:
        bounds = np.linspace(1, N + 1, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_convolve_range, av, bv, int(lo), int(hi), out[lo - 1 : hi - 1])
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futures:
                f.result()
    return CoefficientSeries(
        out,
        exact=exact,
        label=f"({a.label})*({b.label})",
        is_multiplicative=a.is_multiplicative and b.is_multiplicative,
    )


def _square_supported(N: int, weight: Callable[[int], object], exact: bool) -> CoefficientSeries:
    vals = np.zeros(N, dtype=object if exact else np.float64)
    if exact:
        vals[:] = [0] * N
    for d in range(1, isqrt(N) + 1):
        vals[d * d - 1] = weight(d)
    return CoefficientSeries(vals, exact=exact, is_multiplicative=True)


def mobius_square_weights(N: int, exact: bool = True) -> CoefficientSeries:
    """w(n) = mu(d)/d if n = d^2, else 0 (coefficients of 1/zeta(2s+1))."""
    mu = sieve_for(N).mobius
    if exact:
        s = _square_supported(N, lambda d: Fraction(int(mu[d]), d), True)
    else:
        s = _square_supported(N, lambda d: float(mu[d]) / d, False)
    return s.with_values(s.values, label="mu(d)/d on squares")


def zeta_shift_weights(N: int, exact: bool = True) -> CoefficientSeries:
    """e(n) = 1/d if n = d^2, else 0 (coefficients of zeta(2s+1))."""
    s = _square_supported(N, (lambda d: Fraction(1, d)) if exact else (lambda d: 1.0 / d), exact)
    return s.with_values(s.values, label="1/d on squares")


def mobius_scaled_convolve(aF: CoefficientSeries) -> CoefficientSeries:
    """lambda(n) = sum_{d^2 m = n} mu(d)/d * aF(m)."""
    N = aF.limit
    mu = sieve_for(N).mobius
    exact = aF.exact
    if exact:
        out = np.array(list(aF.values), dtype=object)
    else:
        out = aF.to_float().copy()
    src = aF.values if exact else aF.to_float()
    for d in range(2, isqrt(N) + 1):
        if mu[d] == 0:
            continue
        w = Fraction(int(mu[d]), d) if exact else float(mu[d]) / d
        m = N // (d * d)
        out[d * d - 1 :: d * d][:m] += w * src[:m]
    return aF.with_values(out, label=f"lambda[{aF.label}]")


def unscale_mobius(lam: CoefficientSeries) -> CoefficientSeries:
    """Inverse of :func:`mobius_scaled_convolve`: convolve with zeta(2s+1)."""
    # sparse factor first: the divisor loop skips its zero entries
    out = dirichlet_convolve(zeta_shift_weights(lam.limit, exact=lam.exact), lam)
    return out.with_values(out.values, label=f"aF[{lam.label}]", is_multiplicative=lam.is_multiplicative)


def check_multiplicative(series: CoefficientSeries, tol: float = 0.0, limit: int | None = None) -> list[tuple[int, int]]:
    """Coprime pairs (m, n), m*n <= limit, where a(mn) != a(m)a(n).

    Exhaustive scan over m < n; with ``tol > 0`` float entries are compared
    relative to max(1, |a(mn)|).
    """
    N = min(series.limit, limit or series.limit)
    vals = series.values
    bad = []
    for m in range(2, isqrt(N) + 1):
        n = np.arange(m + 1, N // m + 1)
        n = n[np.gcd(n, m) == 1]
        if len(n) == 0:
            continue
        lhs = vals[m * n - 1]
        rhs = vals[m - 1] * vals[n - 1]
        if series.exact:
            mism = np.array([x != y for x, y in zip(lhs, rhs)], dtype=bool)
        else:
            scale = np.maximum(1.0, np.abs(lhs))
            mism = np.abs(lhs - rhs) > tol * scale
        for k in n[mism]:
            bad.append((m, int(k)))
    if vals[0] != 1:
        bad.append((1, 1))
    return bad
