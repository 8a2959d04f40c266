"""
sc-monomial algebra for arcsine input encoding.

With ``s_j = a_j x + b_j`` and ``c_j = sqrt(1 - s_j**2)`` every arcsine-encoded
expectation value function is a linear combination of the ``3**n`` products
``prod_{j in S} s_j * prod_{j in C} c_j`` over disjoint ``S, C``.  Slot indices
here are 0-based.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

MAX_SLOTS = 8
DEFAULT_TOL = 1e-8


class ScDomainError(ValueError):
    def __init__(self, slot: int, x: float):
        self.slot = slot
        super().__init__(f"sqrt factor of slot {slot} is imaginary at x = {x!r}")


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return not self.lo < self.hi

    def contains(self, lo: float, hi: float | None = None) -> bool:
        """Whether the closed interval ``[lo, hi]`` lies inside this open one."""
        hi = lo if hi is None else hi
        return self.lo < lo and hi < self.hi

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(float(max(self.lo, other.lo)), float(min(self.hi, other.hi)))


REAL_LINE = Interval(-np.inf, np.inf)
EMPTY = Interval(0.0, 0.0)


def _slot_interval(a: float, b: float) -> Interval:
    if a == 0:
        return REAL_LINE if abs(b) < 1 else EMPTY
    lo, hi = (-1 - b) / a, (1 - b) / a
    return Interval(float(min(lo, hi)), float(max(lo, hi)))


@dataclass(frozen=True, eq=False)
class ScMonomial:
    S: frozenset
    C: frozenset
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        S, C = frozenset(self.S), frozenset(self.C)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be vectors of equal length")
        if S & C:
            raise ValueError(f"S and C overlap in {sorted(S & C)}")
        if any(not 0 <= j < a.size for j in S | C):
            raise ValueError(f"slot index outside 0..{a.size - 1}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return len(self.S) + len(self.C)

    @property
    def key(self) -> tuple[int, int]:
        """``(S, C)`` as bitmasks."""
        return sum(1 << j for j in self.S), sum(1 << j for j in self.C)

    def __repr__(self):
        return f"ScMonomial(S={sorted(self.S)}, C={sorted(self.C)})"

    def __call__(self, x):
        return sc_eval(self, x)


def sc_eval(mu: ScMonomial, x):
    """Value of ``prod_S s_j * prod_C sqrt(1 - s_j^2)``; raises on an imaginary root."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for j in mu.S:
        out = out * (mu.a[j] * x + mu.b[j])
    for j in sorted(mu.C):
        s = mu.a[j] * x + mu.b[j]
        bad = np.abs(s) > 1
        if np.any(bad):
            raise ScDomainError(j, float(np.atleast_1d(x)[np.atleast_1d(bad)][0]))
        out = out * np.sqrt(1 - s * s)
    return float(out) if out.ndim == 0 else out


def sc_interval(mu: ScMonomial) -> Interval:
    """Open interval on which every square-root factor of ``mu`` is real and positive."""
    iv = REAL_LINE
    for j in mu.C:
        iv = iv.intersect(_slot_interval(mu.a[j], mu.b[j]))
    return iv


def _pairs(n: int):
    # digit 0: absent, 1: in S, 2: in C
    for digits in itertools.product(range(3), repeat=n):
        yield (frozenset(j for j, d in enumerate(digits) if d == 1),
               frozenset(j for j, d in enumerate(digits) if d == 2))


@dataclass(frozen=True, eq=False)
class ScDictionary:
    """All ``3**n`` sc-monomials for fixed ``a, b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be vectors of equal length")
        if a.size > MAX_SLOTS:
            raise ValueError(f"{a.size} slots exceed the cap of {MAX_SLOTS}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def monomials(self) -> list[ScMonomial]:
        return [ScMonomial(S, C, self.a, self.b) for S, C in _pairs(self.n)]

    @property
    def common_interval(self) -> Interval:
        iv = REAL_LINE
        for aj, bj in zip(self.a, self.b):
            iv = iv.intersect(_slot_interval(aj, bj))
        return iv

    def matrix(self, x) -> np.ndarray:
        """Evaluation matrix ``(len(x), 3**n)``, columns in :attr:`monomials` order."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s = np.outer(x, self.a) + self.b
        if np.any(np.abs(s) > 1):
            j = int(np.argwhere(np.abs(s) > 1)[0, 1])
            raise ScDomainError(j, float(x[np.argwhere(np.abs(s[:, j]) > 1)[0, 0]]))
        c = np.sqrt(1 - s * s)
        cols = np.ones((x.size, 1))
        for j in range(self.n):
            # C-order with slot 0 slowest matches _pairs
            factors = np.stack([np.ones(x.size), s[:, j], c[:, j]], axis=1)
            cols = (cols[:, :, None] * factors[:, None, :]).reshape(x.size, -1)
        return cols

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["S", "C", "lo", "hi"])
        for mu in self.monomials:
            iv = sc_interval(mu)
            w.writerow([*mu.key, f"{iv.lo:.12g}", f"{iv.hi:.12g}"])


def _check_window(d: ScDictionary, x0: float, eps: float) -> None:
    if not d.common_interval.contains(x0 - eps, x0 + eps):
        iv = d.common_interval
        raise ValueError(f"[{x0 - eps:.6g}, {x0 + eps:.6g}] is not inside the common interval ({iv.lo:.6g}, {iv.hi:.6g})")


def _normalized(A: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    return A / norms


def sc_dimension(d: ScDictionary, x0: float, eps: float, n_samples: int | None = None,
                 tol: float = DEFAULT_TOL) -> int:
    """Numerical dimension of the span of the dictionary on ``[x0 - eps, x0 + eps]``."""
    _check_window(d, x0, eps)
    m = 3**d.n
    n_samples = max(4 * m, 64) if n_samples is None else n_samples
    if n_samples < m:
        raise ValueError(f"need at least {m} samples, got {n_samples}")
    x = np.linspace(x0 - eps, x0 + eps, n_samples)
    sv = np.linalg.svd(_normalized(d.matrix(x)), compute_uv=False)
    return int(np.count_nonzero(sv > tol * sv[0]))


@dataclass
class Projection:
    coefficients: dict
    residual: float
    monomials: list

    def to_dict(self) -> dict:
        return {
            "coefficients": [
                {"S": mu.key[0], "C": mu.key[1], "value": float(f"{v:.12g}")}
                for mu, v in zip(self.monomials, self.coefficients.values())
            ],
            "residual": float(f"{self.residual:.12g}"),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _values(h, x):
    y = np.asarray(h(x), dtype=float)
    return y if y.shape == x.shape else np.array([float(h(t)) for t in x])


def sc_project(h: Callable, d: ScDictionary, x0: float, eps: float, n_samples: int | None = None) -> Projection:
    """Least-squares projection of ``h`` onto the dictionary span; residual is max-abs over samples."""
    _check_window(d, x0, eps)
    n_samples = max(4 * 3**d.n, 64) if n_samples is None else n_samples
    x = np.linspace(x0 - eps, x0 + eps, n_samples)
    A = d.matrix(x)
    y = _values(h, x)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    coef = np.linalg.lstsq(A / norms, y, rcond=None)[0] / norms
    residual = float(np.max(np.abs(A @ coef - y)))
    monos = d.monomials
    return Projection({(mu.S, mu.C): float(v) for mu, v in zip(monos, coef)}, residual, monos)


def sc_rank(h: Callable, x0: float, eps: float, n_max: int, candidates: Sequence[tuple],
            tol: float = DEFAULT_TOL, n_samples: int = 200) -> int | None:
    """Smallest number of pooled sc-monomials whose span reproduces ``h``.

    The pool is the union of the dictionaries of every candidate ``(a, b)``
    with at most ``n_max`` slots; monomials that are undefined on the window or
    duplicate another pooled column are dropped.  Returns ``None`` when no
    subset of size ``<= 3**n_max`` fits within ``tol`` (max-abs).  The result
    is an upper bound on the sc-rank relative to this pool only.
    """
    if not candidates:
        raise ValueError("empty candidate pool")
    if n_max > 3:
        raise ValueError("exhaustive search is limited to n_max <= 3")
    x = np.linspace(x0 - eps, x0 + eps, n_samples)
    y = _values(h, x)
    cols = []
    for a, b in candidates:
        d = ScDictionary(a, b)
        if d.n > n_max:
            raise ValueError(f"candidate with {d.n} slots exceeds n_max = {n_max}")
        for mu in d.monomials:
            if not sc_interval(mu).contains(x0 - eps, x0 + eps):
                continue
            v = sc_eval(mu, x)
            v = v / np.linalg.norm(v)
            if all(np.max(np.abs(v - u)) > 1e-12 for u in cols):
                cols.append(v)
    pool = np.stack(cols, axis=1)
    if np.max(np.abs(y)) == 0:
        return 0
    for r in range(1, min(3**n_max, pool.shape[1]) + 1):
        for subset in itertools.combinations(range(pool.shape[1]), r):
            A = pool[:, subset]
            coef = np.linalg.lstsq(A, y, rcond=None)[0]
            if np.max(np.abs(A @ coef - y)) < tol:
                return r
    return None


def degree_bound(p: Sequence[float]) -> int:
    """Degree of the polynomial with ascending coefficients ``p``."""
    p = np.trim_zeros(np.asarray(p, dtype=float), "b")
    if p.size == 0:
        raise ValueError("zero polynomial has no degree")
    return p.size - 1


def polynomial_degree(h: Callable, interval=(-1.0, 1.0), max_degree: int = MAX_SLOTS,
                      tol: float = 1e-9, n_samples: int = 256) -> int | None:
    """Degree of ``h`` if it matches a polynomial of degree ``<= max_degree`` on ``interval``.

    Chebyshev least squares at every degree; the first with relative max-abs
    residual below ``tol`` wins.  ``None`` when none does.
    """
    lo, hi = interval
    x = np.linspace(lo, hi, n_samples)
    y = _values(h, x)
    scale = max(np.max(np.abs(y)), 1e-300)
    for deg in range(max_degree + 1):
        fit = np.polynomial.Chebyshev.fit(x, y, deg)
        if np.max(np.abs(fit(x) - y)) < tol * scale:
            return deg
    return None


def representable_analytic(h: Callable, n: int = MAX_SLOTS, interval=(-1.0, 1.0), tol: float = 1e-9) -> bool:
    """Whether an analytic ``h`` can be an arcsine-encoded expectation function with ``n`` slots.

    Only polynomials of degree at most ``n`` qualify.
    """
    return polynomial_degree(h, interval, max_degree=n, tol=tol) is not None
