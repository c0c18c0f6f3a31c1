"""Level-1 holomorphic Hecke eigenforms: exact q-expansions and Satake angles."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import qseries
from .arith import CoefficientSeries, InvalidArgument, sieve_for
from .euler import TOL, SatakeData, assemble_series, symmetric_power

# weights with a one-dimensional space of level-1 cusp forms; f = Delta * E_{k-12}
EIGENFORM_WEIGHTS = (12, 16, 18, 20, 22, 26)


class DataCorruption(ValueError):
    """Coefficients violate a bound they are known to satisfy."""


@dataclass(frozen=True, eq=False)
class EigenformSeries:
    weight: int
    exact_coeffs: list[int]
    normalized: np.ndarray
    label: str = ""

    @property
    def limit(self) -> int:
        return len(self.exact_coeffs)

    def a(self, n: int) -> int:
        return self.exact_coeffs[n - 1]

    @property
    def normalization_exponent(self) -> float:
        return (self.weight - 1) / 2

    def series(self) -> CoefficientSeries:
        """Unitarily normalized coefficients as a float series."""
        return CoefficientSeries(self.normalized, exact=False, label=f"{self.label}/n^{self.normalization_exponent}",
                                 is_multiplicative=True)

    def exact_series(self) -> CoefficientSeries:
        return CoefficientSeries(np.array(self.exact_coeffs, dtype=object), exact=True, label=self.label,
                                 is_multiplicative=True)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "exact", "normalized"])
            for n, (a, x) in enumerate(zip(self.exact_coeffs, self.normalized), start=1):
                w.writerow([n, a, f"{x:.17g}"])


def normalize(coeffs: list[int], weight: int) -> np.ndarray:
    n = np.arange(1, len(coeffs) + 1, dtype=float)
    return np.array([float(a) for a in coeffs]) / n ** ((weight - 1) / 2)


def _delta_slots(N: int) -> qseries.Slots:
    # prod (1 - q^n)^24 modulo q^N; tau(n) is its coefficient of q^(n-1)
    eta = qseries.Slots.from_int64(qseries.euler_function(N))
    return qseries.pow_truncated(eta, 24, N)


def delta_q_expansion(N: int) -> EigenformSeries:
    """Exact tau(1..N) from q * prod (1 - q^n)^24."""
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    tau = _delta_slots(N).to_ints()
    return EigenformSeries(12, tau, normalize(tau, 12), label="tau")


def divisor_power_sums(k: int, N: int) -> list[int]:
    """sigma_k(n) for n = 0..N-1 (entry 0 is 0)."""
    sig = np.zeros(N, dtype=object)
    for d in range(1, N):
        sig[d::d] += d**k
    return list(sig)


def eisenstein(k: int, N: int) -> list[int]:
    """Integer-normalized E_k modulo q^N for k in {4, 6}."""
    const = {4: 240, 6: -504}[k]
    sig = divisor_power_sums(k - 1, N)
    return [1] + [const * s for s in sig[1:]]


def eigenform_q_expansion(weight: int, N: int) -> EigenformSeries:
    """The normalized level-1 eigenform of the given weight, exactly.

    Only weights whose cusp space is one-dimensional are supported; the
    form is Delta times the Eisenstein series of weight ``weight - 12``.
    """
    if weight not in EIGENFORM_WEIGHTS:
        raise InvalidArgument(f"weight {weight} not supported; choose from {EIGENFORM_WEIGHTS}")
    if weight == 12:
        return delta_q_expansion(N)
    e4 = qseries.Slots.from_ints(eisenstein(4, N))
    e6 = qseries.Slots.from_ints(eisenstein(6, N))
    factor = {
        4: e4,
        6: e6,
        8: qseries.mul_truncated(e4, e4, N),
        10: qseries.mul_truncated(e4, e6, N),
        14: qseries.mul_truncated(qseries.mul_truncated(e4, e4, N), e6, N),
    }[weight - 12]
    coeffs = qseries.mul_truncated(_delta_slots(N), factor, N).to_ints()
    return EigenformSeries(weight, coeffs, normalize(coeffs, weight), label=f"f{weight}")


def satake_angles(f: EigenformSeries, P: int) -> SatakeData:
    """Degree-2 Satake data {e^(i theta_p), e^(-i theta_p)} with 2 cos theta_p = lambda(p)."""
    P = min(P, f.limit)
    primes = sieve_for(max(P, 2)).primes
    primes = primes[primes <= P]
    lam = f.normalized[primes - 1]
    bad = np.abs(lam) > 2 + TOL
    if bad.any():
        p = int(primes[np.argmax(bad)])
        raise DataCorruption(f"|lambda({p})| = {abs(lam[np.argmax(bad)]):.12g} exceeds the Deligne bound 2")
    theta = np.arccos(np.clip(lam / 2, -1.0, 1.0))
    params = np.stack([np.exp(1j * theta), np.exp(-1j * theta)], axis=1)
    return SatakeData(2, primes, params, ramanujan_exponent=0.0, lrs_compliant=True, model=f.label or "eigenform")


def symmetric_power_series(f: EigenformSeries, j: int, N: int) -> CoefficientSeries:
    """Real coefficients of the Sym^j Euler product of ``f`` up to N."""
    if N > f.limit:
        raise InvalidArgument(f"need eigenvalues up to {N}, have {f.limit}")
    data = symmetric_power(satake_angles(f, N), j)
    return assemble_series(data, N, label=f"sym{j}[{f.label}]").real()
