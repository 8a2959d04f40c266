"""
Redundancy lower bounds and variational input-encoding fits.

For fixed encoding weights the expectation-value model is linear in its
coefficients, so every fit is bilevel: a derivative-free coordinate search over
the encoding (outer) around an exact least-squares solve (inner).
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arcsine import ScDictionary
from .fourier import UnivariateSpectrum, frequency_set

MAX_FIT_SLOTS = 8
N_POINTS = 512
DEFAULT_FREQ_CAP = 5.0


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class BoundReport:
    rank_used: float
    bound_kind: str
    lower_bound_real: float
    lower_bound_int: int | None
    undefined: bool = False

    def to_dict(self) -> dict:
        return {
            "rank_used": None if math.isinf(self.rank_used) else int(self.rank_used),
            "bound_kind": self.bound_kind,
            "lower_bound_real": None if math.isinf(self.lower_bound_real) else float(f"{self.lower_bound_real:.12g}"),
            "lower_bound_int": self.lower_bound_int,
            "undefined": self.undefined,
        }


def _log3_bound(value: int) -> tuple[float, int]:
    """``(log3(value), smallest n with 3**n >= value)`` with exact integer ceiling."""
    n = 0
    while 3**n < value:
        n += 1
    real = float(n) if 3**n == value else math.log(value) / math.log(3)
    return real, n


def _check_rank(r) -> int | None:
    if r is None or (isinstance(r, float) and math.isinf(r)):
        return None
    if r < 0 or int(r) != r:
        raise ValueError(f"rank must be a nonnegative integer, got {r!r}")
    return int(r)


def bound_linear(r) -> tuple[BoundReport, BoundReport]:
    """``(log3(r + 1), log3(2r + 1))`` lower bounds for linear encoding.

    ``r = None`` or ``inf`` means infinite Fourier rank: no finite redundancy
    suffices, reported as an infinite bound with ``lower_bound_int = None``.
    """
    r = _check_rank(r)
    if r is None:
        return tuple(BoundReport(math.inf, kind, math.inf, None) for kind in ("linear_log", "linear_log_sharp"))
    return (
        BoundReport(r, "linear_log", *_log3_bound(r + 1)),
        BoundReport(r, "linear_log_sharp", *_log3_bound(2 * r + 1)),
    )


def bound_arcsin(r) -> BoundReport:
    """``log3(r)`` lower bound from an sc-rank ``r``; ``r = 0`` is flagged undefined."""
    r = _check_rank(r)
    if r is None:
        return BoundReport(math.inf, "arcsin_log", math.inf, None)
    if r == 0:
        return BoundReport(0, "arcsin_log", 0.0, 0, undefined=True)
    return BoundReport(r, "arcsin_log", *_log3_bound(r))


def bound_degree(d: int) -> BoundReport:
    d = _check_rank(d)
    if d is None:
        return BoundReport(math.inf, "arcsin_degree", math.inf, None)
    return BoundReport(d, "arcsin_degree", float(d), d)


# ---------------------------------------------------------------- inner models


def _grid(target, interval, n_points):
    if isinstance(target, tuple):
        x, y = (np.asarray(t, dtype=float) for t in target)
        return x, y
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    x = np.linspace(lo, hi, n_points)
    y = np.asarray(target(x), dtype=float)
    if y.shape != x.shape:
        y = np.array([float(target(t)) for t in x])
    if not np.all(np.isfinite(y)):
        raise ValueError("target is not finite on the interval")
    return x, y


def _trig_basis(a, x) -> tuple[np.ndarray, np.ndarray]:
    ks = frequency_set(list(np.asarray(a, dtype=float))).values
    pos = ks[ks > 0]
    arg = 2 * np.pi * np.outer(x, pos)
    return np.hstack([np.ones((x.size, 1)), np.cos(arg), np.sin(arg)]), pos


def _lstsq(A, y):
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    coef = np.linalg.lstsq(A / norms, y, rcond=None)[0] / norms
    return coef, y - A @ coef


def _linear_solve(a, x, y):
    A, pos = _trig_basis(a, x)
    coef, r = _lstsq(A, y)
    m = pos.size
    p, q = coef[1 : m + 1], coef[m + 1 :]
    freqs = np.concatenate([-pos[::-1], [0.0], pos])
    alphas = np.concatenate([((p + 1j * q) / 2)[::-1], [coef[0]], (p - 1j * q) / 2])
    return UnivariateSpectrum(freqs, alphas.astype(complex)), r


def _arcsin_ab(params, lo, hi):
    # params = (u, v): encoded values at the interval ends, each in [-1, 1]
    n = params.size // 2
    u, v = params[:n], params[n:]
    a = (v - u) / (hi - lo)
    return a, u - a * lo


def _arcsin_solve(a, b, x, y):
    d = ScDictionary(a, b)
    coef, r = _lstsq(d.matrix(x), y)
    return {(mu.S, mu.C): float(c) for mu, c in zip(d.monomials, coef)}, r


def projection_distance(target, interval, encoding: str, a, b=None, n_points: int = N_POINTS) -> float:
    """Certified lower bound on the best max-abs residual for a fixed encoding.

    The RMS of the least-squares residual on the fit grid never exceeds the
    max-abs residual of any coefficient choice on that grid.
    """
    x, y = _grid(target, interval, n_points)
    if encoding == "linear":
        _, r = _linear_solve(a, x, y)
    elif encoding == "arcsine":
        _, r = _arcsin_solve(a, b, x, y)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    return float(np.sqrt(np.mean(r * r)))


# ---------------------------------------------------------------- outer search


@dataclass
class FitResult:
    encoding: str
    n: int
    a: np.ndarray
    b: np.ndarray
    coeffs: object
    residual: float
    history: list = field(default_factory=list)

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if self.encoding == "linear":
            return self.coeffs(x)
        d = ScDictionary(self.a, self.b) if self.n else None
        if d is None:
            return np.full_like(x, next(iter(self.coeffs.values())))
        return d.matrix(np.atleast_1d(x)) @ np.array(list(self.coeffs.values()))

    def to_dict(self) -> dict:
        r = lambda v: float(f"{v:.12g}")
        out = {
            "encoding": self.encoding,
            "n": self.n,
            "a": [r(v) for v in self.a],
            "b": [r(v) for v in self.b],
            "residual": r(self.residual),
            "history": [r(v) for v in self.history],
        }
        if self.encoding == "linear":
            out["coefficients"] = [
                {"k": r(k), "re": r(c.real), "im": r(c.imag)}
                for k, c in zip(self.coeffs.frequencies, self.coeffs.alphas)
            ]
        else:
            out["coefficients"] = [
                {"S": sum(1 << j for j in S), "C": sum(1 << j for j in C), "value": r(v)}
                for (S, C), v in self.coeffs.items()
            ]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _coordinate_descent(obj, p0, lo, hi, step0, min_step, stop, max_evals):
    p = np.clip(p0, lo, hi)
    fp = obj(p)
    step = np.full(p.size, step0, dtype=float)
    evals = 1
    while fp > stop and evals < max_evals and np.max(step, initial=0.0) > min_step:
        improved = False
        for i in range(p.size):
            for sgn in (1.0, -1.0):
                q = p.copy()
                q[i] = np.clip(p[i] + sgn * step[i], lo[i], hi[i])
                if q[i] == p[i]:
                    continue
                fq = obj(q)
                evals += 1
                if fq < fp:
                    p, fp, improved = q, fq, True
                    break
        if not improved:
            step /= 2
    return p, fp


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QREDUNDANCY_THREADS", "1")))
    except ValueError:
        return 1


def _search(obj, starts, lo, hi, step0, stop, max_evals):
    def run(p0):
        return _coordinate_descent(obj, p0, lo, hi, step0, 1e-13 * step0, stop, max_evals)

    workers = min(_threads(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(p0) for p0 in starts]
    # ties resolve to the lowest restart index
    best = min(range(len(results)), key=lambda i: (results[i][1], i))
    return results[best][0], [float(f) for _, f in results]


def _starts(rng_seed, restarts, lo, hi, seed_point):
    children = np.random.SeedSequence(rng_seed).spawn(restarts)
    starts = [np.random.default_rng(c).uniform(lo, hi) for c in children]
    if seed_point is not None:
        starts.insert(0, np.asarray(seed_point, dtype=float))
    return starts


def fit_linear(target, interval, n: int, restarts: int = 8, seed: int = 0,
               freq_cap: float = DEFAULT_FREQ_CAP, n_points: int = N_POINTS,
               init_a: Sequence[float] | None = None, max_evals: int = 4000) -> FitResult:
    """Fit ``target`` with a linear-encoding expectation function of redundancy ``n``.

    The phases ``b`` do not enter the fit: every Hermitian choice of the
    ``alpha_k`` is reachable from ``b = 0``, so ``b`` is returned as zeros.
    """
    if not 0 <= n <= MAX_FIT_SLOTS:
        raise ValueError(f"redundancy {n} outside 0..{MAX_FIT_SLOTS}")
    x, y = _grid(target, interval, n_points)
    stop = 1e-13 * max(1.0, np.max(np.abs(y)))

    def obj(a):
        return float(np.max(np.abs(_linear_solve(a, x, y)[1])))

    if n == 0:
        a = np.zeros(0)
        history = [obj(a)]
    else:
        lo, hi = np.full(n, -freq_cap), np.full(n, freq_cap)
        starts = _starts(seed, restarts, lo, hi, init_a)
        a, history = _search(obj, starts, lo, hi, freq_cap / 4, stop, max_evals)
    spec, r = _linear_solve(a, x, y)
    return FitResult("linear", n, a, np.zeros(n), spec, float(np.max(np.abs(r))), history)


def fit_arcsin(target, interval, n: int, restarts: int = 8, seed: int = 0,
               n_points: int = N_POINTS, init_ab: tuple | None = None,
               max_evals: int = 4000) -> FitResult:
    """Fit ``target`` with an arcsine-encoding expectation function of redundancy ``n``.

    The search runs over the encoded values at the interval ends, which keeps
    ``|a_j x + b_j| <= 1`` on the whole interval.
    """
    if not 0 <= n <= MAX_FIT_SLOTS:
        raise ValueError(f"redundancy {n} outside 0..{MAX_FIT_SLOTS}")
    x, y = _grid(target, interval, n_points)
    lo_x, hi_x = float(np.min(x)), float(np.max(x))
    if not lo_x < hi_x:
        raise ValueError("infeasible box: interval has zero length")
    stop = 1e-13 * max(1.0, np.max(np.abs(y)))

    def obj(p):
        a, b = _arcsin_ab(p, lo_x, hi_x)
        return float(np.max(np.abs(_arcsin_solve(a, b, x, y)[1])))

    if n == 0:
        p = np.zeros(0)
        history = [obj(p)]
    else:
        seed_point = None
        if init_ab is not None:
            a0, b0 = (np.asarray(t, dtype=float) for t in init_ab)
            seed_point = np.concatenate([a0 * lo_x + b0, a0 * hi_x + b0])
        box = np.ones(2 * n)
        starts = _starts(seed, restarts, -box, box, seed_point)
        p, history = _search(obj, starts, -box, box, 0.25, stop, max_evals)
    a, b = _arcsin_ab(p, lo_x, hi_x)
    coeffs, r = _arcsin_solve(a, b, x, y)
    return FitResult("arcsine", n, a, b, coeffs, float(np.max(np.abs(r))), history)


@dataclass(frozen=True)
class SweepRow:
    n: int
    best_residual: float
    wall_ms: float
    seed: int


def tightness_sweep(target, interval, n_range: Sequence[int], encoding: str = "linear",
                    restarts: int = 8, seed: int = 0, **kwargs) -> tuple[list[SweepRow], list[FitResult]]:
    """Best residual for each redundancy in ``n_range``.

    Level ``n + 1`` is seeded with the level-``n`` solution plus an idle slot
    (``a = b = 0``), so the residual column never increases.
    """
    rows, fits = [], []
    prev: FitResult | None = None
    for n in n_range:
        t0 = time.perf_counter()
        if encoding == "linear":
            init = None
            if prev is not None and prev.n == n - 1:
                init = np.append(prev.a, 0.0)
            fit = fit_linear(target, interval, n, restarts, seed, init_a=init, **kwargs)
        elif encoding == "arcsine":
            init = None
            if prev is not None and prev.n == n - 1:
                init = (np.append(prev.a, 0.0), np.append(prev.b, 0.0))
            fit = fit_arcsin(target, interval, n, restarts, seed, init_ab=init, **kwargs)
        else:
            raise ValueError(f"unknown encoding {encoding!r}")
        wall = (time.perf_counter() - t0) * 1e3
        best = fit.residual if not rows else min(fit.residual, rows[-1].best_residual)
        rows.append(SweepRow(n, best, wall, seed))
        fits.append(fit)
        prev = fit
    return rows, fits


def write_sweep_csv(rows: Sequence[SweepRow], fh, timing: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "best_residual", "wall_ms", "seed"])
    for row in rows:
        w.writerow([row.n, f"{row.best_residual:.12g}", f"{row.wall_ms:.3f}" if timing else "", row.seed])
