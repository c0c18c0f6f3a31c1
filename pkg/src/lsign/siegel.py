"""Genus-2 spinor zeta coefficients and normalized Hecke eigenvalues."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith import CoefficientSeries, InvalidArgument, mobius_scaled_convolve, sieve_for
from .euler import TOL, SatakeData, assemble_series


class ParseError(ValueError):
    pass


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class SiegelLocalTriple:
    p: int
    alpha0: complex
    alpha1: complex
    alpha2: complex

    def is_unitary(self, tol: float = TOL) -> bool:
        return all(abs(abs(a) - 1) <= tol for a in (self.alpha0, self.alpha1, self.alpha2))


@dataclass(frozen=True, eq=False)
class SiegelEigenData:
    weight: int
    limit: int
    lambda_F: np.ndarray
    normalized: np.ndarray
    present: np.ndarray
    source: str

    @property
    def gaps(self) -> np.ndarray:
        return np.nonzero(~self.present)[0] + 1

    def series(self) -> CoefficientSeries:
        return CoefficientSeries(self.normalized, label=f"lambda[{self.source}]", present=self.present)


def beta_parameters(t: SiegelLocalTriple) -> list[complex]:
    a0, a1, a2 = complex(t.alpha0), complex(t.alpha1), complex(t.alpha2)
    return [a0, a0 * a1, a0 * a2, a0 * a1 * a2]


def synth_triples(N: int, seed: int, symplectic: bool = False) -> list[SiegelLocalTriple]:
    """Unitary triples for every prime <= N whose beta multiset is conjugation-closed.

    Three families qualify: alpha0^2 alpha1 alpha2 = 1 (betas pair as
    beta1<->beta4, beta2<->beta3), or alpha1 = conj(alpha0)^2 with
    alpha2 = +-1, or the same with alpha1 and alpha2 swapped.  By default
    each prime picks a family at random; ``symplectic`` keeps only the first.
    """
    rng = np.random.default_rng(seed)
    primes = sieve_for(max(N, 2)).primes
    primes = primes[primes <= N]
    n = len(primes)
    a = rng.uniform(0, 2 * np.pi, n)
    b = rng.uniform(0, 2 * np.pi, n)
    family = np.zeros(n, dtype=int) if symplectic else rng.integers(0, 3, n)
    sign = rng.choice([-1.0, 1.0], n)
    out = []
    for i, p in enumerate(primes):
        if family[i] == 0:
            a1, a2 = np.exp(1j * a[i]), np.exp(1j * b[i])
            a0 = np.exp(-0.5j * (a[i] + b[i])) * sign[i]
        else:
            a0 = np.exp(1j * a[i])
            a1, a2 = np.conj(a0) ** 2, sign[i] + 0j
            if family[i] == 2:
                a1, a2 = a2, a1
        out.append(SiegelLocalTriple(int(p), complex(a0), complex(a1), complex(a2)))
    return out


def spinor_satake(triples: list[SiegelLocalTriple]) -> SatakeData:
    triples = sorted(triples, key=lambda t: t.p)
    primes = np.array([t.p for t in triples], dtype=np.int64)
    params = np.array([beta_parameters(t) for t in triples], dtype=complex).reshape(len(triples), 4)
    theta = 0.0
    if len(primes):
        mags = np.abs(params).max(axis=1)
        theta = max(0.0, float(np.max(np.log(np.maximum(mags, 1e-300)) / np.log(primes))))
    return SatakeData(4, primes, params, ramanujan_exponent=theta, model="spinor")


def spinor_series(triples: list[SiegelLocalTriple], N: int) -> CoefficientSeries:
    """a_F(1..N) from the degree-4 Euler product in the beta parameters.

    Returned as real floats; the beta multisets must be closed under
    conjugation (checked to 1e-9).
    """
    series = assemble_series(spinor_satake(triples), N, label="a_F")
    return series.real()


def normalized_eigenvalues(aF: CoefficientSeries) -> CoefficientSeries:
    """lambda(n) = sum_{d^2 m = n} mu(d)/d a_F(m)."""
    lam = mobius_scaled_convolve(aF)
    return lam.with_values(lam.values, label="lambda")


def _parse_value(text: str, path, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        pass
    try:
        z = complex(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: cannot parse value {text!r}") from None
    if z.imag != 0:
        raise DataError(f"{path}:{lineno}: eigenvalue {text!r} is not real")
    return z.real


def ingest_eigenvalues(path: str | Path, weight: int | None = None) -> SiegelEigenData:
    """Read a two-column ``n value`` eigenvalue file.

    The file must carry a ``# weight=k`` comment.  Missing indices are kept
    as NaN and flagged absent.
    """
    path = Path(path)
    header_weight = None
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("weight="):
                try:
                    header_weight = int(body.split("=", 1)[1])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad weight header {line!r}") from None
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'n value', got {line!r}")
        try:
            n = int(fields[0])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: index {fields[0]!r} is not an integer") from None
        if n < 1:
            raise ParseError(f"{path}:{lineno}: index must be positive")
        if n in entries:
            raise ParseError(f"{path}:{lineno}: duplicate index {n}")
        entries[n] = _parse_value(fields[1], path, lineno)
    if header_weight is None:
        raise ParseError(f"{path}: missing '# weight=k' header")
    if weight is not None and weight != header_weight:
        raise DataError(f"{path}: header weight {header_weight} != requested {weight}")
    if not entries:
        raise ParseError(f"{path}: no data lines")
    N = max(entries)
    raw_vals = np.full(N, np.nan)
    idx = np.array(list(entries), dtype=np.int64)
    raw_vals[idx - 1] = list(entries.values())
    present = ~np.isnan(raw_vals)
    n = np.arange(1, N + 1, dtype=float)
    normalized = raw_vals / n ** (header_weight - 1.5)
    if present[0] and not math.isclose(raw_vals[0], 1.0, rel_tol=1e-12):
        raise DataError(f"{path}: lambda_F(1) = {float(raw_vals[0])!r}, expected 1")
    return SiegelEigenData(header_weight, N, raw_vals, normalized, present, f"ingested:{path}")


def eigen_data_from_normalized(lam: CoefficientSeries, weight: int) -> SiegelEigenData:
    """Wrap synthetic normalized eigenvalues, attaching raw values lambda_F(n)."""
    n = np.arange(1, lam.limit + 1, dtype=float)
    vals = lam.to_float().astype(float)
    return SiegelEigenData(weight, lam.limit, vals * n ** (weight - 1.5), vals,
                           np.ones(lam.limit, dtype=bool), "synthetic")
