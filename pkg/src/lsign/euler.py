"""Local Euler factors from Satake parameters and global coefficient assembly.

Coefficients here are double-precision complex.  The library never infers
duality: to build L(s, pi x pi~) the caller passes the contragredient's
parameters explicitly (for unitary data, the complex conjugates).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arith import CoefficientSeries, InvalidArgument, multiplicative_series, prime_power_table, sieve_for

TOL = 1e-9

MODELS = ("ramanujan-uniform", "sato-tate", "lrs-extremal")


def lrs_exponent(m: int) -> float:
    """Luo-Rudnick-Sarnak bound exponent 1/2 - 1/(m^2+1)."""
    return 0.5 - 1.0 / (m * m + 1)


@dataclass(frozen=True, eq=False)
class SatakeData:
    """Per-prime Satake parameters of a degree-m Euler product.

    ``params[i]`` holds the m parameters at ``primes[i]``.
    """

    degree: int
    primes: np.ndarray
    params: np.ndarray
    conductor: int = 1
    ramanujan_exponent: float = 0.0
    lrs_compliant: bool = False
    model: str = "custom"
    seed: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree < 1:
            raise InvalidArgument("degree must be >= 1")
        if self.params.shape != (len(self.primes), self.degree):
            raise InvalidArgument(
                f"expected parameter array of shape ({len(self.primes)}, {self.degree}), got {self.params.shape}"
            )
        if len(self.primes):
            bound = self.primes.astype(float) ** self.ramanujan_exponent
            mags = np.abs(self.params).max(axis=1)
            over = mags > bound + TOL * np.maximum(1.0, bound)
            if over.any():
                p = int(self.primes[np.argmax(over)])
                raise InvalidArgument(f"|alpha(p)| exceeds p^{self.ramanujan_exponent} at p={p}")
        if self.lrs_compliant and self.ramanujan_exponent > lrs_exponent(self.degree) + TOL:
            raise InvalidArgument("declared exponent is above the LRS bound")

    @property
    def per_prime(self) -> dict[int, list[complex]]:
        return {int(p): [complex(a) for a in row] for p, row in zip(self.primes, self.params)}

    def at(self, p: int) -> np.ndarray:
        i = np.searchsorted(self.primes, p)
        if i >= len(self.primes) or self.primes[i] != p:
            raise InvalidArgument(f"no Satake parameters stored for prime {p}")
        return self.params[i]

    def conjugate(self) -> SatakeData:
        """Parameters of the contragredient for unitary data."""
        return SatakeData(
            self.degree, self.primes, np.conj(self.params), self.conductor, self.ramanujan_exponent,
            self.lrs_compliant, self.model, self.seed,
        )


def elementary_symmetric(alphas) -> np.ndarray:
    """e_0..e_m of the parameters (last axis); works on stacked rows."""
    alphas = np.asarray(alphas, dtype=complex)
    m = alphas.shape[-1]
    e = np.zeros(alphas.shape[:-1] + (m + 1,), dtype=complex)
    e[..., 0] = 1
    for i in range(m):
        a = alphas[..., i]
        for j in range(i + 1, 0, -1):
            e[..., j] = e[..., j] + a * e[..., j - 1]
    return e


def expand_local_factor(alphas, K: int) -> list[complex]:
    """Coefficients c_0..c_K of prod_i (1 - alpha_i X)^(-1).

    Uses c_k = sum_{i=1}^{m} (-1)^(i+1) e_i c_{k-i}, the recurrence obtained
    by multiplying through by prod (1 - alpha_i X).
    """
    if K < 0:
        raise InvalidArgument("K must be >= 0")
    e = elementary_symmetric(alphas)
    m = len(e) - 1
    c = [1 + 0j]
    for k in range(1, K + 1):
        acc = 0j
        for i in range(1, min(k, m) + 1):
            term = e[i] * c[k - i]
            acc = acc + term if i % 2 else acc - term
        c.append(acc)
    return c


def _covers(data: SatakeData, N: int) -> None:
    primes = sieve_for(N).primes
    primes = primes[primes <= N]
    have = np.isin(primes, data.primes)
    if not have.all():
        raise InvalidArgument(f"missing Satake parameters for prime {int(primes[~have][0])}")


def assemble_series(data: SatakeData, N: int, label: str | None = None) -> CoefficientSeries:
    """Dirichlet coefficients a(1..N) of the Euler product."""
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    _covers(data, N)
    tables = sieve_for(N)
    local = np.zeros(N + 1, dtype=complex)
    pos = np.searchsorted(data.primes, tables.primes[tables.primes <= N])
    params = data.params[pos]
    primes = data.primes[pos]
    # primes above sqrt(N) only need a(p) = e_1
    big = primes.astype(np.int64) ** 2 > N
    local[primes[big]] = params[big].sum(axis=1)
    for p, K in prime_power_table(N, tables):
        if p * p > N:
            break
        c = expand_local_factor(data.at(p), K)
        q = p
        for k in range(1, K + 1):
            local[q] = c[k]
            q *= p
    return multiplicative_series(N, local, label=label or f"L[{data.model}, m={data.degree}]", tables=tables)


def rankin_selberg_local(a, b) -> list[complex]:
    """The m*m' products a_i * b_j (no conjugation applied)."""
    return [complex(x) * complex(y) for x in a for y in b]


def rankin_selberg(data: SatakeData, other: SatakeData) -> SatakeData:
    """Satake data of the convolution, prime by prime.

    For pi x pi~ pass ``data.conjugate()`` (unitary case) as ``other``.
    """
    common = np.intersect1d(data.primes, other.primes)
    a = data.params[np.searchsorted(data.primes, common)]
    b = other.params[np.searchsorted(other.primes, common)]
    prod = (a[:, :, None] * b[:, None, :]).reshape(len(common), -1)
    theta = data.ramanujan_exponent + other.ramanujan_exponent
    return SatakeData(
        data.degree * other.degree, common, prod, ramanujan_exponent=theta,
        model=f"{data.model}x{other.model}", seed=data.seed,
    )


def symmetric_power_local(alphas, j: int) -> list[complex]:
    """Sym^j parameters alpha^(j-i) beta^i, i = 0..j, of a unitary GL2 pair."""
    if j < 1:
        raise InvalidArgument("j must be >= 1")
    a, b = (complex(x) for x in alphas)
    if abs(a * b - 1) > TOL:
        raise InvalidArgument(f"parameters multiply to {a * b:.6g}, not 1")
    return [a ** (j - i) * b**i for i in range(j + 1)]


def symmetric_power(data: SatakeData, j: int) -> SatakeData:
    if data.degree != 2:
        raise InvalidArgument("symmetric powers need degree-2 data")
    if j < 1:
        raise InvalidArgument("j must be >= 1")
    a, b = data.params[:, 0], data.params[:, 1]
    if np.any(np.abs(a * b - 1) > TOL):
        raise InvalidArgument("parameters do not multiply to 1")
    params = np.stack([a ** (j - i) * b**i for i in range(j + 1)], axis=1)
    return SatakeData(j + 1, data.primes, params, ramanujan_exponent=j * data.ramanujan_exponent,
                      model=f"sym{j}[{data.model}]", seed=data.seed)


def _sato_tate_angles(rng: np.random.Generator, n: int) -> np.ndarray:
    # rejection sampling from (2/pi) sin^2(theta) on [0, pi]
    out = np.empty(0)
    while len(out) < n:
        theta = rng.uniform(0.0, np.pi, size=2 * (n - len(out)) + 16)
        keep = rng.uniform(0.0, 1.0, size=theta.shape) < np.sin(theta) ** 2
        out = np.concatenate([out, theta[keep]])
    return out[:n]


def _conjugate_pairs(m: int, radius: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = len(radius)
    cols = []
    for _ in range(m // 2):
        phase = np.exp(1j * rng.uniform(0.0, np.pi, size=n))
        cols += [radius * phase, radius * np.conj(phase)]
    if m % 2:
        cols.append(radius * rng.choice([-1.0, 1.0], size=n))
    return np.stack(cols, axis=1)


def synth_satake(m: int, N: int, model: str, seed: int) -> SatakeData:
    """Synthetic Satake data for every prime <= N.

    Parameters come in complex-conjugate pairs (plus one real parameter
    when m is odd), so the assembled coefficients are real.
    """
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    if model not in MODELS:
        raise InvalidArgument(f"unknown model {model!r}; choose one of {MODELS}")
    rng = np.random.default_rng(seed)
    primes = sieve_for(max(N, 2)).primes
    primes = primes[primes <= N]
    n = len(primes)
    if model == "sato-tate":
        if m != 2:
            raise InvalidArgument("sato-tate model is only defined for m = 2")
        theta = _sato_tate_angles(rng, n)
        params = np.stack([np.exp(1j * theta), np.exp(-1j * theta)], axis=1)
        exponent = 0.0
    elif model == "ramanujan-uniform":
        params = _conjugate_pairs(m, np.ones(n), rng)
        exponent = 0.0
    else:
        exponent = lrs_exponent(m)
        params = _conjugate_pairs(m, primes.astype(float) ** exponent, rng)
    return SatakeData(
        m, primes, params, ramanujan_exponent=exponent, lrs_compliant=True, model=model, seed=seed,
    )


def write_satake(data: SatakeData, path: str | Path) -> None:
    lines = [f"degree={data.degree} conductor={data.conductor} model={data.model} seed={data.seed}"]
    for p, row in zip(data.primes, data.params):
        parts = [str(int(p))]
        for a in row:
            parts += [repr(float(a.real)), repr(float(a.imag))]
        lines.append(" ".join(parts))
    Path(path).write_text("\n".join(lines) + "\n")


def read_satake(path: str | Path, ramanujan_exponent: float | None = None) -> SatakeData:
    """Load the line format written by :func:`write_satake`.

    Without an explicit ``ramanujan_exponent`` the smallest exponent
    consistent with the stored magnitudes is used.
    """
    text = Path(path).read_text().splitlines()
    if not text:
        raise InvalidArgument(f"{path}: empty Satake file")
    header = dict(tok.split("=", 1) for tok in text[0].split())
    m = int(header["degree"])
    primes, rows = [], []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2 * m + 1:
            raise InvalidArgument(f"{path}:{lineno}: expected {2 * m + 1} fields, got {len(fields)}")
        primes.append(int(fields[0]))
        nums = [float(x) for x in fields[1:]]
        rows.append([complex(nums[2 * i], nums[2 * i + 1]) for i in range(m)])
    seed = header.get("seed")
    primes = np.array(primes, dtype=np.int64)
    params = np.array(rows, dtype=complex).reshape(len(primes), m)
    if ramanujan_exponent is None:
        mags = np.abs(params).max(axis=1) if len(primes) else np.ones(0)
        ratios = np.log(np.maximum(mags, 1e-300)) / np.log(primes)
        ramanujan_exponent = max(0.0, float(ratios.max(initial=0.0)))
    return SatakeData(
        m,
        primes,
        params,
        conductor=int(header.get("conductor", 1)),
        ramanujan_exponent=ramanujan_exponent,
        model=header.get("model", "custom"),
        seed=None if seed in (None, "None") else int(seed),
    )
