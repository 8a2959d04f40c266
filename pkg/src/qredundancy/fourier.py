"""
Finite Fourier structure of expectation-value functions.

A circuit whose input generators have integer eigenvalue differences gives a
1-periodic function of every input angle with a finite spectrum; for
Pauli-over-two generators the spectrum sits in ``{-1, 0, 1}^n``.  Sampling on a
``(2K_j + 1)``-point grid per axis and taking a DFT recovers it exactly.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .pqc import Circuit, CircuitError, evaluate

MAX_GRID_POINTS = 3**8
MAX_ENUMERATION_AXES = 12
ZERO_TOL = 1e-10
GROUP_TOL = 1e-9

TRIG_LABELS = ("1", "cos", "sin")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass(frozen=True, eq=False)
class MultiSpectrum:
    """Fourier coefficients ``fhat(w)`` on the product grid ``D_1 x ... x D_n``.

    ``coeffs[i_1, ..., i_n]`` holds ``fhat(D_1[i_1], ..., D_n[i_n])``.
    """

    axis_sets: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(d, dtype=int) for d in self.axis_sets)
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != tuple(len(d) for d in axes):
            raise ValueError(f"coefficient shape {c.shape} does not match axis sets")
        for d in axes:
            if not np.array_equal(d, -d[::-1]):
                raise ValueError(f"axis set {d.tolist()} is not symmetric and sorted")
        object.__setattr__(self, "axis_sets", axes)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.axis_sets)

    def frequencies(self) -> np.ndarray:
        """All ``w`` in C order, shape ``(prod |D_j|, n)``."""
        if self.n == 0:
            return np.zeros((1, 0), dtype=int)
        grids = np.meshgrid(*self.axis_sets, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def items(self):
        return zip(map(tuple, self.frequencies()), self.coeffs.ravel())

    def numerically_zero(self, tol: float = ZERO_TOL) -> np.ndarray:
        return np.abs(self.coeffs) < tol

    def hermitian_defect(self) -> float:
        """``max |fhat(-w) - conj(fhat(w))|``; zero for a real function."""
        flipped = self.coeffs[(slice(None, None, -1),) * self.n]
        return float(np.max(np.abs(flipped - self.coeffs.conj())))

    def __call__(self, eta) -> float | np.ndarray:
        """Evaluate ``sum_w fhat(w) exp(2 pi i w . eta)`` (real part)."""
        eta = np.asarray(eta, dtype=float)
        single = eta.ndim == 1
        eta = np.atleast_2d(eta)
        if eta.shape[1] != self.n:
            raise ValueError(f"expected {self.n} angles, got {eta.shape[1]}")
        phases = np.exp(2j * np.pi * eta @ self.frequencies().T)
        vals = (phases @ self.coeffs.ravel()).real
        return float(vals[0]) if single else vals

    def to_csv(self, fh, nonzero_only: bool = False) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"w{j + 1}" for j in range(self.n)] + ["re", "im"])
        zero = self.numerically_zero().ravel()
        for (freq, c), z in zip(self.items(), zero):
            if nonzero_only and z:
                continue
            w.writerow([int(v) for v in freq] + [_fmt(c.real), _fmt(c.imag)])


def _sample_grid(func, sizes: Sequence[int]) -> np.ndarray:
    vals = np.empty(tuple(sizes))
    for idx in itertools.product(*(range(g) for g in sizes)):
        vals[idx] = func(np.array([i / g for i, g in zip(idx, sizes)]))
    return vals


def spectrum_from_function(func, bandwidths: Sequence[int]) -> MultiSpectrum:
    """Exact spectrum of a real 1-periodic function band-limited to ``|w_j| <= K_j``."""
    sizes = [2 * k + 1 for k in bandwidths]
    if int(np.prod(sizes)) > MAX_GRID_POINTS:
        raise ValueError(f"sampling grid of {int(np.prod(sizes))} points exceeds {MAX_GRID_POINTS}")
    if not sizes:
        return MultiSpectrum((), np.array(complex(func(np.zeros(0)))))
    vals = _sample_grid(func, sizes)
    # index t of fftn <-> frequency t (t <= K) or t - G (t > K)
    c = np.fft.fftshift(np.fft.fftn(vals)) / vals.size
    return MultiSpectrum(tuple(np.arange(-k, k + 1) for k in bandwidths), c)


def extract_spectrum(c: Circuit, theta: Sequence[float] = ()) -> MultiSpectrum:
    """Fourier spectrum of ``eta -> evaluate(c, eta, theta)``."""
    try:
        bandwidths = [h.integer_bandwidth() for h in c.input_hamiltonians()]
    except CircuitError as exc:
        raise ValueError(str(exc)) from None
    return spectrum_from_function(lambda eta: evaluate(c, eta, theta), bandwidths)


# per-axis map (w = -1, 0, +1) -> (1, cos, sin)
_TO_TRIG = np.array([[0, 1, 0], [1, 0, 1], [-1j, 0, 1j]])
_FROM_TRIG = np.linalg.inv(_TO_TRIG)


def _axis_apply(t: np.ndarray, mat: np.ndarray) -> np.ndarray:
    for ax in range(t.ndim):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [ax])), 0, ax)
    return t


def to_trig_form(s: MultiSpectrum, tol: float = 1e-8) -> dict[tuple[str, ...], float]:
    """Real coefficients of ``f = sum_tau c_tau prod_j tau_j(2 pi eta_j)``.

    Keys are tuples over ``("1", "cos", "sin")``.  Only the ``{-1, 0, 1}`` axis
    set is supported.
    """
    if any(len(d) != 3 for d in s.axis_sets):
        raise ValueError("trigonometric form needs the {-1, 0, 1} axis set on every slot")
    defect = s.hermitian_defect()
    if defect > tol:
        raise ValueError(f"spectrum violates Hermitian symmetry by {defect:.3e}")
    t = _axis_apply(s.coeffs, _TO_TRIG)
    return {
        tuple(TRIG_LABELS[i] for i in idx): float(t[idx].real)
        for idx in itertools.product(range(3), repeat=s.n)
    }


def from_trig_form(coeffs: dict[tuple[str, ...], float]) -> MultiSpectrum:
    n = len(next(iter(coeffs)))
    t = np.zeros((3,) * n, dtype=complex)
    for key, v in coeffs.items():
        t[tuple(TRIG_LABELS.index(lab) for lab in key)] = v
    return MultiSpectrum(tuple(np.arange(-1, 2) for _ in range(n)), _axis_apply(t, _FROM_TRIG))


def eval_trig_form(coeffs: dict[tuple[str, ...], float], eta) -> float:
    eta = np.asarray(eta, dtype=float)
    fn = {"1": lambda t: 1.0, "cos": np.cos, "sin": np.sin}
    return float(sum(v * np.prod([fn[lab](2 * np.pi * e) for lab, e in zip(key, eta)])
                     for key, v in coeffs.items()))


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Distinct values of ``w . a`` over ``w`` in the product of axis sets.

    ``labels[i]`` is the index into ``values`` of the ``i``-th ``w`` (C order).
    """

    values: np.ndarray
    labels: np.ndarray
    ws: np.ndarray
    exact: bool

    @property
    def spread(self) -> int:
        return (len(self.values) - 1) // 2

    @property
    def multiplicities(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.values))

    @property
    def multiplicity_map(self) -> dict[float, list[tuple[int, ...]]]:
        out: dict[float, list] = {float(k): [] for k in self.values}
        for w, lab in zip(self.ws, self.labels):
            out[float(self.values[lab])].append(tuple(int(v) for v in w))
        return out

    def to_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "multiplicity"])
        for k, m in zip(self.values, self.multiplicities):
            w.writerow([_fmt(k), int(m)])


def _default_axes(n: int):
    return tuple(np.arange(-1, 2) for _ in range(n))


def _product_sums(a, axes, zero):
    """All ``w . a`` in C order, built one axis at a time."""
    dots = np.array([zero], dtype=object if isinstance(zero, Fraction) else float)
    for aj, d in zip(a, axes):
        dots = (dots[:, None] + np.array([int(v) * aj for v in d], dtype=dots.dtype)[None, :]).ravel()
    return dots


def frequency_set(a: Sequence, axis_sets=None) -> FrequencySet:
    """Group the dot products ``w . a`` into the frequency set ``K_a``.

    Entries given as ``int``/``Fraction`` are grouped exactly; floats are grouped
    when consecutive sorted values differ by at most 1e-9.
    """
    a = list(a)
    n = len(a)
    if n > MAX_ENUMERATION_AXES:
        raise ValueError(f"enumeration over {n} axes exceeds the cap of {MAX_ENUMERATION_AXES}")
    axes = _default_axes(n) if axis_sets is None else tuple(np.asarray(d, dtype=int) for d in axis_sets)
    if len(axes) != n:
        raise ValueError(f"{len(axes)} axis sets for {n} entries of a")
    exact = all(isinstance(v, Rational) for v in a)
    if n == 0:
        ws = np.zeros((1, 0), dtype=int)
    else:
        ws = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    if exact:
        dots = _product_sums([Fraction(v) for v in a], axes, Fraction(0))
        uniq = sorted(set(dots))
        index = {k: i for i, k in enumerate(uniq)}
        labels = np.array([index[k] for k in dots], dtype=int)
        values = np.array([float(k) for k in uniq])
    else:
        dots = _product_sums([float(v) for v in a], axes, 0.0)
        order = np.argsort(dots, kind="stable")
        srt = dots[order]
        starts = np.concatenate([[True], np.diff(srt) > GROUP_TOL])
        group = np.cumsum(starts) - 1
        labels = np.empty_like(group)
        labels[order] = group
        first = np.flatnonzero(starts)
        values = np.add.reduceat(srt, first) / np.diff(np.append(first, srt.size))
        values[np.abs(values) <= GROUP_TOL] = 0.0
    return FrequencySet(values, labels, ws, exact)


@dataclass(frozen=True, eq=False)
class UnivariateSpectrum:
    """``h(x) = sum_k alpha_k exp(2 pi i k x)`` over sorted frequencies ``k``."""

    frequencies: np.ndarray
    alphas: np.ndarray

    @property
    def terms(self) -> dict[float, complex]:
        return {float(k): complex(v) for k, v in zip(self.frequencies, self.alphas)}

    def support(self, tol: float = ZERO_TOL) -> np.ndarray:
        return self.frequencies[np.abs(self.alphas) >= tol]

    def rank(self, tol: float = ZERO_TOL) -> int:
        """Half the number of numerically nonzero terms at nonzero frequency."""
        sup = self.support(tol)
        return int(np.count_nonzero(sup != 0)) // 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (np.exp(2j * np.pi * np.multiply.outer(x, self.frequencies)) @ self.alphas).real


def project_univariate(s: MultiSpectrum, a: Sequence, b: Sequence[float]) -> UnivariateSpectrum:
    """Restrict a multivariate spectrum to the line ``eta = x a + b``.

    ``alpha_k = sum_{w . a = k} fhat(w) exp(2 pi i w . b)``.
    """
    b = np.asarray(b, dtype=float)
    if len(a) != s.n or b.shape != (s.n,):
        raise ValueError(f"a and b must have length {s.n}")
    fs = frequency_set(a, s.axis_sets)
    weights = s.coeffs.ravel() * np.exp(2j * np.pi * (fs.ws @ b))
    alphas = np.zeros(len(fs.values), dtype=complex)
    np.add.at(alphas, fs.labels, weights)
    return UnivariateSpectrum(fs.values, alphas)
