"""Batch experiment runner: ``lsign run|selfcheck|presets``.

Exit codes: 0 success, 1 validation failure, 2 acceptance-check failure,
3 I/O error.  ``LSIGN_THREADS`` sets the number of worker threads.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import arith, euler, gl2, oscillate, qseries, siegel
from .arith import CoefficientSeries
from .config import ConfigError, ExperimentConfig, load_config
from .oscillate import FIT_SLACK, atomic_write_text

log = logging.getLogger("lsign")

EXIT_OK, EXIT_INVALID, EXIT_CHECK_FAILED, EXIT_IO = 0, 1, 2, 3
THREADS_ENV = "LSIGN_THREADS"
SLACK_TOL = 1e-9


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class Source:
    """Everything a task may need from one configured data source."""

    seq: CoefficientSeries
    satake: euler.SatakeData | None
    degree: int
    # extra series checked by divisor-bound-check: (name, series, l, exponent theta)
    bounded: list[tuple[str, CoefficientSeries, int, float]]
    N: int


def build_source(cfg: ExperimentConfig) -> Source:
    if cfg.source in ("delta", "symk"):
        f = gl2.eigenform_q_expansion(cfg.weight or 12, cfg.N)
        if cfg.source == "delta":
            seq = f.series()
            sat = gl2.satake_angles(f, cfg.N)
        else:
            sat = euler.symmetric_power(gl2.satake_angles(f, cfg.N), cfg.j)
            seq = euler.assemble_series(sat, cfg.N, label=f"sym{cfg.j}[{f.label}]").real()
        deg = sat.degree
        return Source(seq, sat, deg, [("a", seq, deg, 0.0)], cfg.N)
    if cfg.source == "synthetic":
        sat = euler.synth_satake(cfg.m, cfg.N, cfg.model, cfg.seed)
        seq = euler.assemble_series(sat, cfg.N).real()
        return Source(seq, sat, cfg.m, [("a", seq, cfg.m, sat.ramanujan_exponent)], cfg.N)
    if cfg.source == "spinor-synthetic":
        triples = siegel.synth_triples(cfg.N, cfg.seed, symplectic=cfg.symplectic)
        sat = siegel.spinor_satake(triples)
        aF = siegel.spinor_series(triples, cfg.N)
        lam = siegel.normalized_eigenvalues(aF)
        return Source(lam, sat, 4, [("a_F", aF, 4, 0.0), ("lambda", lam, 5, 0.0)], cfg.N)
    data = siegel.ingest_eigenvalues(cfg.path, cfg.weight)
    seq = data.series()
    N = data.limit if cfg.N is None else cfg.N
    if N > data.limit:
        raise ConfigError([f"<config>: N = {N} exceeds ingested data limit {data.limit}"])
    seq = seq.with_values(seq.values[:N], present=seq.present[:N])
    gaps = int((~seq.present).sum())
    if gaps:
        log.warning("%s: %d of %d indices absent (gap fraction %.4f)", cfg.path, gaps, N, gaps / N)
    return Source(seq, None, 4, [("lambda", seq, 5, 0.0)], N)


def _default_x_max(N: int, r: float) -> int:
    lo, hi = 1, N
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid + math.ceil(mid**r) <= N:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _sample_grid(N: int, ratio: float = 2.0) -> list[int]:
    grid = oscillate.geometric_grid(1, N, ratio)
    return grid if grid[-1] == N else grid + [N]


def task_windows(cfg, src, profile, advisory):
    x_max = cfg.x_max or _default_x_max(src.N, profile.r)
    rep = oscillate.scan_windows(src.seq, profile, cfg.x_min, x_max, cfg.ratio, workers=thread_count(),
                                 require_valid=not advisory)
    result = {
        "x_min": cfg.x_min,
        "x_max": x_max,
        "windows": len(rep.windows),
        "fraction_with_change": rep.fraction_with_change,
        "x0": rep.x0,
        "max_gap_fraction": max((w.gap_fraction for w in rep.windows), default=0.0),
        "flags": rep.flags,
        "pass": rep.windows_ok,
    }
    return result, {"windows": oscillate.windows_csv(rep)}, rep


def task_cumulative(cfg, src, profile, advisory, rep=None):
    if rep is None:
        x_max = cfg.x_max or _default_x_max(src.N, profile.r)
        rep = oscillate.scan_windows(src.seq, profile, cfg.x_min, x_max, cfg.ratio, require_valid=not advisory)
    fit = rep.cumulative_fit
    result = {
        "total": rep.cumulative[-1][1] if rep.cumulative else 0,
        "fitted_exponent": rep.cumulative_exponent,
        "stderr": None if fit is None else fit.stderr,
        "target": rep.cumulative_target,
        "required_min": rep.cumulative_target - FIT_SLACK,
        "flags": [f for f in rep.flags if f.startswith("cumulative")],
        "pass": rep.cumulative_ok,
    }
    return result, {"cumulative": oscillate.cumulative_csv(rep)}


def task_moments(cfg, src, profile, advisory):
    xs = oscillate.dyadic_points(min(cfg.fit_x_min, src.N // 8 or 1), src.N)
    if xs[-1] != src.N:
        xs.append(src.N)
    second = oscillate.second_moment_fit(src.seq, xs)
    first = oscillate.partial_sum_growth(src.seq, xs)
    S1 = oscillate.partial_sums(src.seq)
    gamma_cap = float(profile.gamma) + FIT_SLACK
    beta_cap = float(profile.beta) + FIT_SLACK
    result = {
        "x_points": [xs[0], xs[-1], len(xs)],
        "second_moment": second.to_json(),
        "second_moment_residual_cap": gamma_cap,
        "partial_sum_envelope": first.to_json(),
        "partial_sum_cap": beta_cap,
        # advisory: synthetic data need not obey bounds proved for automorphic forms
        "partial_sum_within_cap": first.s <= beta_cap,
        "pass": second.c > 0 and second.residual_exponent <= gamma_cap,
    }
    rows = [(x, oscillate.fmt(float(S1[x - 1])), oscillate.fmt(v)) for x, v in second.sample_points]
    csv_text = oscillate._csv(rows, ["x", "partial_sum", "second_moment"])
    return result, {"moments": csv_text}


def task_rankin(cfg, src, profile, advisory):
    sat = src.satake
    rs = euler.assemble_series(euler.rankin_selberg(sat, sat.conjugate()), src.N, label="pi x pi~")
    a = np.asarray(euler.assemble_series(sat, src.N).values)
    a2 = np.abs(a) ** 2
    b = rs.values
    scale = np.maximum(1.0, np.abs(b))
    imag_ok = np.abs(b.imag) <= SLACK_TOL * scale
    nonneg = b.real >= -SLACK_TOL * scale
    ineq = a2 <= b.real + SLACK_TOL * scale
    primes = arith.sieve_for(src.N).primes
    primes = primes[primes <= src.N]
    prime_dev = np.abs(a2[primes - 1] - b.real[primes - 1])
    eq_ok = prime_dev <= SLACK_TOL * scale[primes - 1]
    ok = imag_ok & nonneg & ineq
    rows = []
    for x in _sample_grid(src.N):
        p_in = primes <= x
        rows.append((x, int((~ok[:x]).sum()), oscillate.fmt(float(prime_dev[p_in].max(initial=0.0)))))
    result = {
        "checked": src.N,
        "violations": int((~ok).sum()),
        "prime_equality_failures": int((~eq_ok).sum()),
        "max_prime_deviation": float(prime_dev.max(initial=0.0)),
        "pass": bool(ok.all() and eq_ok.all()),
    }
    return result, {"rankin-check": oscillate._csv(rows, ["x", "violations", "max_prime_deviation"])}


def task_divisor(cfg, src, profile, advisory):
    result, rows = {"pass": True}, []
    n = np.arange(1, src.N + 1, dtype=float)
    for name, series, l, theta in src.bounded:
        bound = arith.divisor_function(l, src.N).to_float() * n**theta
        vals = np.abs(np.asarray(series.to_float(), dtype=complex))
        present = series.present if series.present is not None else np.ones(src.N, dtype=bool)
        bad = present & (vals > bound * (1 + SLACK_TOL))
        ratio = np.where(present, vals / bound, 0.0)
        result[name] = {"bound": f"d_{l}(n)" + (f" n^{theta:.6g}" if theta else ""),
                        "violations": int(bad.sum()), "max_ratio": float(ratio.max())}
        result["pass"] = result["pass"] and not bad.any()
        for x in _sample_grid(src.N):
            rows.append((name, x, int(bad[:x].sum()), oscillate.fmt(float(ratio[:x].max()))))
    return result, {"divisor-bound-check": oscillate._csv(rows, ["series", "x", "violations", "max_ratio"])}


def run(cfg: ExperimentConfig) -> int:
    """Execute the configured tasks and write reports; returns the exit code."""
    if not cfg.tasks:
        return EXIT_OK
    profile = cfg.profile()
    advisory = not profile.valid
    if advisory:
        log.warning("profile %s fails the criterion (%s); run is advisory-only",
                    profile.preset_name, profile.validity_message())
    src = build_source(cfg)
    label = cfg.resolved_label()
    tasks = list(dict.fromkeys(cfg.tasks))

    results, files = {}, {}
    report = None
    if "windows" in tasks:
        results["windows"], out, report = task_windows(cfg, src, profile, advisory)
        files.update(out)
    jobs = {
        "cumulative": lambda: task_cumulative(cfg, src, profile, advisory, report),
        "moments": lambda: task_moments(cfg, src, profile, advisory),
        "rankin-check": lambda: task_rankin(cfg, src, profile, advisory),
        "divisor-bound-check": lambda: task_divisor(cfg, src, profile, advisory),
    }
    pending = [t for t in tasks if t in jobs]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futures = {t: pool.submit(jobs[t]) for t in pending}
        for t in pending:
            res, out = futures[t].result()
            results[t] = res
            files.update(out)

    checks = {t: bool(results[t]["pass"]) for t in tasks}
    summary = {
        "label": label,
        "config": cfg.as_dict(),
        "seed": cfg.seed,
        "normalization": _normalization(cfg),
        "profile": profile.to_json(),
        "advisory_only": advisory,
        "tasks": results,
        "checks": checks,
        "passed": all(checks.values()),
    }
    outdir = Path(cfg.outputs)
    for task in tasks:
        atomic_write_text(outdir / f"{label}-{task}.csv", files[task])
    atomic_write_text(outdir / f"{label}-summary.json", oscillate.summary_json(summary))
    for t, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {label} {t}")
    return EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED


def _normalization(cfg: ExperimentConfig) -> str:
    if cfg.source in ("delta", "symk"):
        k = cfg.weight or 12
        return f"a(n)/n^{(k - 1) / 2:g} (unitary)"
    if cfg.source.startswith("spinor"):
        return "lambda_F(n)/n^(k-3/2)"
    return "unitary Satake parameters"


# ---------------------------------------------------------------- selfcheck

TAU_GOLDEN = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
MU_GOLDEN = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def selfcheck(tau_table: list[int] | None = None) -> list[tuple[str, bool, str]]:
    """Golden checks; returns (name, ok, detail) per item."""
    items = []

    def check(name, ok, detail):
        items.append((name, bool(ok), detail))

    tau = tau_table if tau_table is not None else gl2.delta_q_expansion(len(TAU_GOLDEN)).exact_coeffs
    for n, want in enumerate(TAU_GOLDEN, start=1):
        got = tau[n - 1] if n <= len(tau) else None
        check(f"tau({n})", got == want, f"expected {want}, got {got}")
    eta = [int(x) for x in qseries.euler_function(len(TAU_GOLDEN))]
    brute = [1] + [0] * (len(TAU_GOLDEN) - 1)
    for _ in range(24):
        brute = qseries.naive_mul_truncated(brute, eta, len(TAU_GOLDEN))
    check("tau vs schoolbook expansion", brute == TAU_GOLDEN, "degree < 10")
    ok = all(tau[p * p - 1] == tau[p - 1] ** 2 - p**11 for p in (2, 3) if p * p <= len(tau))
    check("Hecke recurrence tau(p^2)", ok, "p = 2, 3")

    mu = [int(v) for v in arith.build_sieve(len(MU_GOLDEN)).mobius[1:]]
    check("mobius(1..12)", mu == MU_GOLDEN, f"got {mu}")
    d4 = arith.divisor_function(4, 12)
    check("d_4(6) = 16", d4[6] == 16, f"got {d4[6]}")
    d5 = arith.divisor_function(5, 12)
    check("d_5(p) = 5", all(d5[p] == 5 for p in (2, 3, 5, 7, 11)), "p <= 11")
    check("d_5(4) = 15", d5[4] == 15, f"got {d5[4]}")

    presets = oscillate.preset_profiles()
    expected = {"gl2-selfdual": Fraction(3, 5), "siegel-spinor": Fraction(41, 47),
                "glm-ramanujan(2)": Fraction(3, 5), "glm-ramanujan(3)": Fraction(4, 5)}
    for name, want in expected.items():
        p = presets[name]
        check(f"{name} threshold", p.threshold == want and p.valid, f"threshold {p.threshold}, expected {want}")
    check("first-moment exponent m=2", oscillate.partial_sum_exponent(2) == (Fraction(71, 192), Fraction(23, 96)),
          str(oscillate.partial_sum_exponent(2)))
    return items


# ---------------------------------------------------------------------- main


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config, args.set or [])
    except ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return run(cfg)
    except ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID
    except (siegel.ParseError, siegel.DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _cmd_selfcheck(args) -> int:
    items = selfcheck()
    for name, ok, detail in items:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok else f": {detail}"))
    failed = [n for n, ok, _ in items if not ok]
    if failed:
        print(f"{len(failed)} golden check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_presets(args) -> int:
    presets = oscillate.preset_profiles(args.epsilon, range(2, args.max_degree + 1))
    print(f"{'preset':<18} {'alpha':>8} {'beta':>8} {'gamma':>7} {'threshold':>10} {'r':>8} valid  provenance")
    for name, p in presets.items():
        print(f"{name:<18} {str(p.alpha):>8} {str(p.beta):>8} {str(p.gamma):>7} {str(p.threshold):>10} "
              f"{p.r:>8.5f} {'yes' if p.valid else 'no ':<5}  {p.provenance}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lsign", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", nargs="?", help="key=value config file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p_run.set_defaults(func=_cmd_run)
    p_self = sub.add_parser("selfcheck", help="run the embedded golden checks")
    p_self.set_defaults(func=_cmd_selfcheck)
    p_pre = sub.add_parser("presets", help="print the exponent presets")
    p_pre.add_argument("--epsilon", type=float, default=oscillate.DEFAULT_EPSILON)
    p_pre.add_argument("--max-degree", type=int, default=6)
    p_pre.set_defaults(func=_cmd_presets)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
