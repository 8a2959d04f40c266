"""
Fourier-rank estimation from uniform samples.

Samples ``h(x0 + m*delta)``, ``m = -N..N``, fill an ``(N+1) x (N+1)`` Hankel
matrix whose numerical rank counts the exponentials in the signal.  The
frequencies come from the shift invariance of its dominant left singular
vectors (matrix pencil), the amplitudes from least squares.

A rank below ``N + 1`` only certifies a finite Fourier rank when the recovered
model is a genuine Fourier sum: unit-modulus, well-separated nodes that
reproduce the samples.  Polynomials and real exponentials also give
rank-deficient Hankel matrices and are reported as ``exceeded``.  Weak but
genuine components can fall under the threshold; the model order then grows
past the threshold rank while singular values stay above round-off.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.linalg import hankel

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 24
DEFAULT_RANK_TOL = 1e-8
MODULUS_TOL = 1e-6
# minimum node gap, in units of 1 / (sampling window length)
SEPARATION = 0.02
NYQUIST_MARGIN = 0.02
# singular values below this (relative) are treated as round-off
NOISE_FLOOR = 1e-13


class AliasingError(ValueError):
    """A recovered frequency sits at the Nyquist limit of the sampling step."""


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``values[m] = h(x0 + (m - N) * step)`` for ``m = 0..2N``."""

    x0: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3 or v.size % 2 == 0:
            raise ValueError(f"need an odd number (>= 3) of samples, got {v.size}")
        if not self.step > 0:
            raise ValueError("sample step must be positive")
        object.__setattr__(self, "values", v)

    @property
    def budget(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def points(self) -> np.ndarray:
        n = self.budget
        return self.x0 + (np.arange(2 * n + 1) - n) * self.step

    @classmethod
    def from_function(cls, h: Callable, x0: float, eps: float, N: int) -> "SampleSet":
        step = eps / N
        x = x0 + (np.arange(2 * N + 1) - N) * step
        return cls(x0, step, _sample(h, x))

    @classmethod
    def from_points(cls, x: Sequence[float], y: Sequence[float]) -> "SampleSet":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape or x.size < 3:
            raise ValueError("need matching x, y arrays with at least 3 samples")
        steps = np.diff(x)
        if np.ptp(steps) > 1e-9 * max(1.0, np.max(np.abs(x))):
            raise ValueError("sample points must be equispaced")
        if x.size % 2 == 0:
            x, y = x[:-1], y[:-1]
        return cls(float(x[x.size // 2]), float(steps.mean()), y)


def _sample(h: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(h(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(h(t)) for t in x])


@dataclass
class RankReport:
    hankel_rank: int
    fourier_rank: int | None
    frequencies: np.ndarray
    coefficients: np.ndarray
    residual: float
    exceeded: bool
    singular_values: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        r = lambda v: float(f"{v:.12g}")
        return {
            "hankel_rank": int(self.hankel_rank),
            "fourier_rank": None if self.fourier_rank is None else int(self.fourier_rank),
            "exceeded": bool(self.exceeded),
            "frequencies": [r(k) for k in self.frequencies],
            "coefficients": [[r(c.real), r(c.imag)] for c in self.coefficients],
            "residual": None if np.isnan(self.residual) else r(self.residual),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _pencil_nodes(u: np.ndarray) -> np.ndarray:
    psi = np.linalg.lstsq(u[:-1], u[1:], rcond=None)[0]
    return np.linalg.eigvals(psi)


def fourier_rank(
    h: Union[Callable, SampleSet],
    x0: float = 0.0,
    eps: float = 0.5,
    N: int = DEFAULT_BUDGET,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> RankReport:
    """Estimate the Fourier rank of ``h`` near ``x0`` from ``2N + 1`` samples on ``[x0 - eps, x0 + eps]``."""
    samples = h if isinstance(h, SampleSet) else SampleSet.from_function(h, x0, eps, N)
    N = samples.budget
    if N < 1:
        raise ValueError("budget N must be at least 1")
    v = samples.values
    step = samples.step
    x_first = samples.points[0]
    max_residual = rank_tol * np.max(np.abs(v), initial=0.0)
    H = hankel(v[: N + 1], v[N:])
    u, sv, _ = np.linalg.svd(H)
    if sv[0] == 0.0:
        return RankReport(0, 0, np.zeros(0), np.zeros(0, complex), 0.0, False, sv)
    rank = int(np.count_nonzero(sv > rank_tol * sv[0]))
    if rank == N + 1:
        return RankReport(rank, None, np.zeros(0), np.zeros(0, complex), float("nan"), True, sv)

    floor = max(rank, int(np.count_nonzero(sv > NOISE_FLOOR * sv[0])))
    for order in range(rank, min(floor, N) + 1):
        model = _fit_model(u[:, :order], v, step, x_first, max_residual)
        if model is not None:
            break
    else:
        k, alphas, residual, problems = _fit_model(u[:, :rank], v, step, x_first, max_residual, True)
        log.debug("rank %d model rejected: %s", rank, "; ".join(problems))
        return RankReport(rank, None, k, alphas, residual, True, sv)
    k, alphas, residual = model
    nyquist = 1 / (2 * step)
    if np.max(np.abs(k), initial=0.0) >= (1 - NYQUIST_MARGIN) * nyquist:
        raise AliasingError(
            f"recovered frequency {np.max(np.abs(k)):.4g} within 2% of the Nyquist limit {nyquist:.4g}; "
            "shrink eps or raise N"
        )
    return RankReport(rank, order // 2, k, alphas, residual, False, sv)


def _fit_model(u, v, step, x_first, max_residual, diagnose=False):
    """Pencil nodes plus least-squares amplitudes; ``None`` unless a valid Fourier sum."""
    z = _pencil_nodes(u)
    k = np.angle(z) / (2 * np.pi * step)
    order = np.argsort(k)
    z, k = z[order], k[order]
    m = np.arange(v.size)
    vander = np.exp(2j * np.pi * step * k)[None, :] ** m[:, None]
    c = np.linalg.lstsq(vander, v.astype(complex), rcond=None)[0]
    residual = float(np.max(np.abs(vander @ c - v)))
    alphas = c * np.exp(-2j * np.pi * k * x_first)

    problems = []
    if np.max(np.abs(np.abs(z) - 1)) > MODULUS_TOL:
        problems.append("nodes off the unit circle")
    n_half = (v.size - 1) // 2
    if k.size > 1 and np.min(np.diff(k)) < SEPARATION / (2 * n_half * step):
        problems.append("unresolved (coalescing) frequencies")
    if residual >= max_residual:
        problems.append(f"reconstruction residual {residual:.2e}")
    if diagnose:
        return k, alphas, residual, problems
    return None if problems else (k, alphas, residual)


def chi_conditioning(K: Sequence[float], x0: float = 0.0, eps: float = 0.5, n_samples: int = 101) -> float:
    """Smallest singular value of the column-normalized matrix ``[exp(2 pi i k x_i)]``.

    Points are ``n_samples`` equispaced interior points of ``(x0 - eps, x0 + eps)``.
    """
    K = np.asarray(K, dtype=float)
    if np.unique(K).size != K.size:
        raise ValueError("frequency set contains duplicates")
    if K.size > n_samples:
        raise ValueError(f"{K.size} frequencies need at least as many samples, got {n_samples}")
    x = np.linspace(x0 - eps, x0 + eps, n_samples + 2)[1:-1]
    A = np.exp(2j * np.pi * np.outer(x, K))
    A /= np.linalg.norm(A, axis=0)
    return float(np.linalg.svd(A, compute_uv=False)[-1])
