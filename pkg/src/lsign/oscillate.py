"""Sign-change criterion engine, window scanning and growth-exponent fits.

A real sequence with a(n) = O(n^alpha), partial sums O(x^beta) and second
moment c x + O(x^gamma), where alpha + beta < 1, changes sign in every
window [x, x + x^r] once max(alpha + beta, gamma) < r < 1.  This module
carries the exponent presets for the families studied here and measures
the corresponding quantities on finite data.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.stats import linregress

from .arith import CoefficientSeries, InvalidArgument

DEFAULT_EPSILON = 0.01
DEFAULT_RATIO = 1.1
FIT_SLACK = 0.05
MIN_FIT_POINTS = 8


class WindowRangeError(IndexError):
    pass


class InsufficientData(ValueError):
    pass


# ---------------------------------------------------------------- exponents


def coefficient_bound_exponent(m: int) -> Fraction:
    """Best known exponent towards Ramanujan for GL_m coefficients."""
    if m < 2:
        raise InvalidArgument("m must be >= 2")
    if m == 2:
        return Fraction(7, 64)
    if m == 3:
        return Fraction(5, 14)
    return Fraction(1, 2) - Fraction(1, m * m + 1)


def rankin_selberg_error_exponent(m: int) -> Fraction:
    return Fraction(m * m - 1, m * m + 1)


def partial_sum_exponent(m: int) -> tuple[Fraction, Fraction]:
    """Exponent of the first-moment bound and the eta that balances it.

    Every term of the estimate is an affine function of eta; eta is chosen
    where the two competing terms meet.  For m = 2 these are
    1/4 + eta/2 and (1 - eta - 1/2) + 7/64; for m >= 3 the first term
    (1 - 1/m)/2 * (1 + m eta) meets the Cauchy-Schwarz term
    1/2 - eta/2 - 1/(2m) + gamma/2 with gamma = (m^2-1)/(m^2+1).
    """
    if m < 2:
        raise InvalidArgument("m must be >= 2")
    base = Fraction(1, 2) - Fraction(1, 2 * m)
    rising = (base, m * base)  # constant, slope in eta
    if m == 2:
        falling = (1 - Fraction(1, m) + coefficient_bound_exponent(2), Fraction(-1))
    else:
        falling = (base + rankin_selberg_error_exponent(m) / 2, Fraction(-1, 2))
    eta = (falling[0] - rising[0]) / (rising[1] - falling[1])
    return rising[0] + rising[1] * eta, eta


@dataclass(frozen=True)
class ExponentProfile:
    """Exponents (alpha, beta, gamma) with a window exponent r.

    alpha, beta, gamma are the exact exponents without the epsilon slack;
    presets put the slack into r = max(alpha + beta, gamma) + epsilon.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    r: float
    epsilon: float = DEFAULT_EPSILON
    preset_name: str = "explicit"
    provenance: str = ""

    @property
    def threshold(self) -> Fraction:
        return max(self.alpha + self.beta, self.gamma)

    @property
    def valid(self) -> bool:
        return self.alpha + self.beta < 1 and self.threshold < self.r < 1

    def validity_message(self) -> str:
        if self.alpha + self.beta >= 1:
            return f"alpha + beta = {self.alpha + self.beta} is not below 1"
        if not self.threshold < self.r < 1:
            return f"r = {self.r} must lie strictly between {self.threshold} (= {float(self.threshold):.6f}) and 1"
        return "ok"

    def with_r(self, r: float) -> ExponentProfile:
        return replace(self, r=float(r))

    def to_json(self) -> dict:
        return {
            "preset": self.preset_name,
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "gamma": str(self.gamma),
            "threshold": str(self.threshold),
            "r": self.r,
            "epsilon": self.epsilon,
            "valid": self.valid,
            "provenance": self.provenance,
        }


def make_profile(alpha, beta, gamma, epsilon: float = DEFAULT_EPSILON, r: float | None = None,
                 name: str = "explicit", provenance: str = "") -> ExponentProfile:
    alpha, beta, gamma = (Fraction(x).limit_denominator(10**6) if isinstance(x, float) else Fraction(x)
                          for x in (alpha, beta, gamma))
    if r is None:
        r = float(max(alpha + beta, gamma)) + epsilon
    return ExponentProfile(alpha, beta, gamma, float(r), float(epsilon), name, provenance)


def gl2_selfdual(epsilon: float = DEFAULT_EPSILON) -> ExponentProfile:
    return make_profile(Fraction(7, 64), Fraction(71, 192), Fraction(3, 5), epsilon, name="gl2-selfdual",
                        provenance="coefficients n^(7/64+eps); partial sums x^(71/192+eps); "
                                   "second moment error x^(3/5+eps); window exponent 3/5 < r < 1")


def glm(m: int, epsilon: float = DEFAULT_EPSILON) -> ExponentProfile:
    """Unconditional GL_m exponents; alpha + beta < 1 fails for m >= 4."""
    if m < 2:
        raise InvalidArgument("m must be >= 2")
    beta = partial_sum_exponent(m)[0]
    return make_profile(coefficient_bound_exponent(m), beta, rankin_selberg_error_exponent(m), epsilon,
                        name=f"glm({m})",
                        provenance=f"coefficients n^({coefficient_bound_exponent(m)}+eps); partial sums x^({beta}+eps); "
                                   f"second moment error x^({rankin_selberg_error_exponent(m)}+eps)")


def glm_ramanujan(m: int, epsilon: float = DEFAULT_EPSILON) -> ExponentProfile:
    if m < 2:
        raise InvalidArgument("m must be >= 2")
    gamma = rankin_selberg_error_exponent(m)
    beta = Fraction(m * m - m, m * m + 1)
    return make_profile(Fraction(0), beta, gamma, epsilon, name=f"glm-ramanujan({m})",
                        provenance=f"Ramanujan bound alpha = eps; window exponent {gamma} < r < 1")


def siegel_spinor(epsilon: float = DEFAULT_EPSILON) -> ExponentProfile:
    return make_profile(Fraction(0), Fraction(3, 5), Fraction(41, 47), epsilon, name="siegel-spinor",
                        provenance="|lambda(n)| <= d_5(n); partial sums x^(3/5+eps); "
                                   "second moment error x^(41/47+eps); window exponent 41/47 < r < 1")


def preset_profiles(epsilon: float = DEFAULT_EPSILON, degrees=range(2, 7)) -> dict[str, ExponentProfile]:
    out = {"gl2-selfdual": gl2_selfdual(epsilon)}
    for m in degrees:
        out[f"glm({m})"] = glm(m, epsilon)
    for m in degrees:
        out[f"glm-ramanujan({m})"] = glm_ramanujan(m, epsilon)
    out["siegel-spinor"] = siegel_spinor(epsilon)
    return out


def get_preset(name: str, epsilon: float = DEFAULT_EPSILON) -> ExponentProfile:
    name = name.strip()
    if name == "gl2-selfdual":
        return gl2_selfdual(epsilon)
    if name == "siegel-spinor":
        return siegel_spinor(epsilon)
    for prefix, build in (("glm-ramanujan(", glm_ramanujan), ("glm(", glm)):
        if name.startswith(prefix) and name.endswith(")"):
            try:
                m = int(name[len(prefix) : -1])
            except ValueError:
                break
            return build(m, epsilon)
    raise InvalidArgument(f"unknown preset {name!r}")


# ------------------------------------------------------------- sign changes


def _usable(seq: CoefficientSeries) -> np.ndarray:
    vals = np.asarray(seq.to_float())
    if np.iscomplexobj(vals):
        vals = seq.real().values
    return np.asarray(vals, dtype=float)


def _signs(vals: np.ndarray, present: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    s = np.sign(np.nan_to_num(vals, nan=0.0))
    keep = s != 0
    if present is not None:
        keep &= present
    return np.nonzero(keep)[0], s[keep]


def window_end(x: int, r: float) -> int:
    return int(math.floor(x + x**r))


def sign_changes_window(seq: CoefficientSeries, x: int, r: float) -> int:
    """Sign changes between consecutive nonzero entries with indices in [x, x + x^r]."""
    return _window_stats(seq, _usable(seq), x, r)[0]


def _window_stats(seq: CoefficientSeries, vals: np.ndarray, x: int, r: float) -> tuple[int, float]:
    if x < 1 or not 0 < r < 1:
        raise InvalidArgument(f"need x >= 1 and 0 < r < 1, got x={x}, r={r}")
    if x + math.ceil(x**r) > seq.limit:
        raise WindowRangeError(f"window [{x}, {x} + {x}^{r}] exceeds series limit {seq.limit}")
    end = window_end(x, r)
    present = None if seq.present is None else seq.present[x - 1 : end]
    _, s = _signs(vals[x - 1 : end], present)
    changes = int(np.count_nonzero(s[1:] != s[:-1]))
    gaps = 0.0 if present is None else 1.0 - float(present.mean())
    return changes, gaps


def cumulative_sign_changes(seq: CoefficientSeries) -> np.ndarray:
    """C[n-1] = number of sign changes among nonzero entries with index <= n."""
    vals = _usable(seq)
    idx, s = _signs(vals, seq.present)
    counts = np.zeros(seq.limit, dtype=np.int64)
    if len(s) > 1:
        flips = idx[1:][s[1:] != s[:-1]]
        np.add.at(counts, flips, 1)
    return np.cumsum(counts)


def geometric_grid(x_min: int, x_max: int, ratio: float = DEFAULT_RATIO) -> list[int]:
    if ratio <= 1:
        raise InvalidArgument("grid ratio must exceed 1")
    if x_min < 1 or x_max < x_min:
        raise InvalidArgument(f"bad grid range [{x_min}, {x_max}]")
    out, j = [], 0
    while True:
        x = int(math.floor(x_min * ratio**j + 1e-9))
        if x > x_max:
            break
        if not out or x > out[-1]:
            out.append(x)
        j += 1
    return out


@dataclass(frozen=True)
class WindowStat:
    x: int
    window_len: float
    changes: int
    gap_fraction: float


@dataclass
class MomentFit:
    """Fit of a summatory function.

    For power-law fits ``c`` is the prefactor and ``s`` the exponent; for
    linear moment fits ``s`` is 1 and ``residual_exponent`` is the log-log
    slope of the sup-envelope of |S(x) - c x|.
    """

    c: float
    s: float
    residual_exponent: float
    sample_points: list[tuple[int, float]]
    stderr: float = float("nan")
    residual_stderr: float = float("nan")
    mode: str = "direct"
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("sample_points")
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


@dataclass
class WindowReport:
    windows: list[WindowStat]
    cumulative: list[tuple[int, int]]
    profile: ExponentProfile
    x0: int | None
    fraction_with_change: float
    cumulative_fit: MomentFit | None
    flags: list[str] = field(default_factory=list)

    @property
    def cumulative_exponent(self) -> float | None:
        return None if self.cumulative_fit is None else self.cumulative_fit.s

    @property
    def cumulative_target(self) -> float:
        return 1.0 - self.profile.r

    @property
    def windows_ok(self) -> bool:
        return self.x0 is not None

    @property
    def cumulative_ok(self) -> bool:
        e = self.cumulative_exponent
        return e is not None and e >= self.cumulative_target - FIT_SLACK


def scan_windows(
    seq: CoefficientSeries,
    profile: ExponentProfile,
    x_min: int,
    x_max: int,
    ratio: float = DEFAULT_RATIO,
    *,
    workers: int = 1,
    require_valid: bool = True,
) -> WindowReport:
    """Count sign changes in [x, x + x^r] on a geometric grid of x.

    The cumulative count is taken from a separate linear scan of the whole
    series (windows may overlap) and sampled on a geometric grid up to the
    series limit.
    """
    if require_valid and not profile.valid:
        raise InvalidArgument(f"profile {profile.preset_name}: {profile.validity_message()}")
    r = profile.r
    if x_max + math.ceil(x_max**r) > seq.limit:
        raise WindowRangeError(f"x_max={x_max} with r={r} needs {x_max + math.ceil(x_max ** r)} > limit {seq.limit}")
    vals = _usable(seq)
    grid = geometric_grid(x_min, x_max, ratio)

    def one(x):
        changes, gaps = _window_stats(seq, vals, x, r)
        return WindowStat(x, float(x**r), changes, gaps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            windows = list(pool.map(one, grid))
        # pool.map preserves order
    else:
        windows = [one(x) for x in grid]

    x0 = None
    for w in reversed(windows):
        if w.changes == 0:
            break
        x0 = w.x
    hits = sum(1 for w in windows if w.changes > 0)
    fraction = hits / len(windows) if windows else 0.0

    cum = cumulative_sign_changes(seq)
    cgrid = geometric_grid(x_min, seq.limit, ratio)
    cumulative = [(x, int(cum[x - 1])) for x in cgrid]
    flags = []
    fit = None
    positive = [(x, float(c)) for x, c in cumulative if c > 0]
    if not positive:
        flags.append("cumulative-slope-undefined: no sign changes")
    else:
        try:
            fit = fit_growth_exponent(positive, mode="direct")
        except InsufficientData as exc:
            flags.append(f"cumulative-slope-undefined: {exc}")
    if x0 is None:
        flags.append("last sampled window has no sign change")
    return WindowReport(windows, cumulative, profile, x0, fraction, fit, flags)


# -------------------------------------------------------------- summations


def _neumaier_prefix(vals: np.ndarray) -> np.ndarray:
    out = np.empty(len(vals))
    s = 0.0
    comp = 0.0
    for i, v in enumerate(vals.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        out[i] = s + comp
    return out


def partial_sums(seq: CoefficientSeries) -> np.ndarray:
    """S(x) for x = 1..N; exact series give exact sums, floats use compensated summation."""
    if seq.exact:
        out = np.empty(seq.limit, dtype=object)
        acc = 0
        for i, v in enumerate(seq.values):
            acc += v
            out[i] = acc
        return out
    vals = np.asarray(seq.values)
    if seq.present is not None:
        vals = np.where(seq.present, vals, 0)
    if np.iscomplexobj(vals):
        return _neumaier_prefix(vals.real) + 1j * _neumaier_prefix(vals.imag)
    return _neumaier_prefix(vals.astype(float))


def fit_growth_exponent(points, mode: str = "sup-envelope") -> MomentFit:
    """Least-squares slope of log|value| against log x.

    ``sup-envelope`` first replaces each value by the running maximum of
    |value| over the earlier sample points, which is what an O-bound
    constrains.  Nonpositive magnitudes are dropped before the fit.
    """
    if mode not in ("sup-envelope", "direct"):
        raise InvalidArgument(f"unknown fit mode {mode!r}")
    pts = [(float(x), float(abs(v))) for x, v in points]
    if len(pts) < MIN_FIT_POINTS:
        raise InsufficientData(f"need at least {MIN_FIT_POINTS} points, got {len(pts)}")
    xs = np.array([p[0] for p in pts])
    if np.any(np.diff(xs) <= 0):
        raise InvalidArgument("x values must be strictly increasing")
    ys = np.array([p[1] for p in pts])
    if mode == "sup-envelope":
        ys = np.maximum.accumulate(ys)
    keep = (ys > 0) & (xs > 0)
    if keep.sum() < MIN_FIT_POINTS:
        raise InsufficientData(f"only {int(keep.sum())} points with positive magnitude")
    res = linregress(np.log(xs[keep]), np.log(ys[keep]))
    return MomentFit(
        c=float(math.exp(res.intercept)),
        s=float(res.slope),
        residual_exponent=float("nan"),
        sample_points=[(int(x) if float(x).is_integer() else x, float(y)) for x, y in zip(xs, ys)],
        stderr=float(res.stderr),
        mode=mode,
    )


def linear_moment_fit(sums: np.ndarray, x_points) -> MomentFit:
    """Fit S(x) ~ c x through the origin on ``x_points``.

    The residual exponent uses the running maximum of |S(n) - c n| over
    every n <= x, not only the sample points.
    """
    xs = np.asarray(sorted(set(int(x) for x in x_points)), dtype=np.int64)
    if len(xs) < MIN_FIT_POINTS:
        raise InsufficientData(f"need at least {MIN_FIT_POINTS} sample points, got {len(xs)}")
    if xs[0] < 1 or xs[-1] > len(sums):
        raise InvalidArgument(f"sample points must lie in [1, {len(sums)}]")
    S = np.asarray(sums[: xs[-1]], dtype=float)
    Sx = S[xs - 1]
    xf = xs.astype(float)
    c = float(np.dot(xf, Sx) / np.dot(xf, xf))
    resid = np.abs(S - c * np.arange(1, len(S) + 1))
    env = np.maximum.accumulate(resid)
    flags = []
    if c <= 0:
        flags.append("fitted slope c <= 0")
    try:
        rfit = fit_growth_exponent([(int(x), env[x - 1]) for x in xs], mode="direct")
        rexp, rerr = rfit.s, rfit.stderr
    except InsufficientData as exc:
        # an exact fit leaves no residual to measure
        rexp, rerr = 0.0, float("nan")
        flags.append(f"residual vanishes: {exc}")
    return MomentFit(c, 1.0, rexp, [(int(x), float(v)) for x, v in zip(xs, Sx)], float("nan"), rerr,
                     mode="linear", flags=flags)


def second_moment_fit(seq: CoefficientSeries, x_points) -> MomentFit:
    """Fit sum_{n<=x} a(n)^2 = c x and measure the error exponent."""
    vals = _usable(seq)
    if seq.present is not None:
        vals = np.where(seq.present, vals, 0.0)
    squares = CoefficientSeries(np.nan_to_num(vals) ** 2)
    return linear_moment_fit(partial_sums(squares), x_points)


def first_moment_fit(seq: CoefficientSeries, x_points) -> MomentFit:
    return linear_moment_fit(partial_sums(seq.real() if not seq.exact else seq), x_points)


def partial_sum_growth(seq: CoefficientSeries, x_points) -> MomentFit:
    """Sup-envelope exponent of S(x) = sum_{n<=x} a(n) over every n <= x."""
    S = partial_sums(seq.real() if not seq.exact else seq)
    env = np.maximum.accumulate(np.abs(np.asarray(S, dtype=float)))
    xs = sorted(set(int(x) for x in x_points))
    fit = fit_growth_exponent([(x, env[x - 1]) for x in xs], mode="direct")
    fit.mode = "sup-envelope"
    return fit


def dyadic_points(x_min: int, x_max: int, per_octave: int = 4) -> list[int]:
    return geometric_grid(x_min, x_max, 2 ** (1 / per_octave))


# ----------------------------------------------------------------- reports


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def fmt(x: float) -> str:
    return f"{x:.17g}"


def windows_csv(report: WindowReport) -> str:
    return _csv(((w.x, fmt(w.window_len), w.changes, fmt(w.gap_fraction)) for w in report.windows),
                ["x", "window_len", "changes", "gap_fraction"])


def cumulative_csv(report: WindowReport) -> str:
    return _csv(report.cumulative, ["x", "cumulative"])


def moments_csv(fit: MomentFit, header=("x", "sum")) -> str:
    return _csv(((x, fmt(v)) for x, v in fit.sample_points), list(header))


def summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
