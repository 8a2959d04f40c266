import io
import json
import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from qredundancy import pqc
from qredundancy.arcsine import (
    Interval,
    ScDictionary,
    ScDomainError,
    ScMonomial,
    degree_bound,
    polynomial_degree,
    representable_analytic,
    sc_dimension,
    sc_eval,
    sc_interval,
    sc_project,
    sc_rank,
)
from qredundancy.fourier import extract_spectrum, to_trig_form
from qredundancy.pqc import Encoding, evaluate_encoded, random_circuit


def mp_rank(a, b, x0, eps, n_points=40, dps=60, tol=mpmath.mpf("1e-30")):
    """High-precision numerical rank of the sc-dictionary matrix."""
    with mpmath.workdps(dps):
        a = [mpmath.mpf(v) for v in a]
        b = [mpmath.mpf(v) for v in b]
        xs = [mpmath.mpf(x0) - eps + 2 * mpmath.mpf(eps) * i / (n_points - 1) for i in range(n_points)]
        d = ScDictionary([float(v) for v in a], [float(v) for v in b])
        rows = []
        for x in xs:
            s = [aj * x + bj for aj, bj in zip(a, b)]
            row = []
            for mu in d.monomials:
                v = mpmath.mpf(1)
                for j in mu.S:
                    v *= s[j]
                for j in mu.C:
                    v *= mpmath.sqrt(1 - s[j] ** 2)
                row.append(v)
            rows.append(row)
        sv = mpmath.svd_r(mpmath.matrix(rows), compute_uv=False)
        sv = sorted((abs(v) for v in sv), reverse=True)
        return sum(1 for v in sv if v > tol * sv[0])


def test_monomial_evaluation():
    mu = ScMonomial({0}, {1}, [1.0, 0.5], [0.0, 0.1])
    x = np.array([-0.4, 0.0, 0.7])
    assert_allclose(sc_eval(mu, x), x * np.sqrt(1 - (0.5 * x + 0.1) ** 2))
    assert mu.degree == 2 and mu.key == (1, 2)


def test_monomial_validation():
    with pytest.raises(ValueError, match="overlap"):
        ScMonomial({0}, {0}, [1.0], [0.0])
    with pytest.raises(ValueError):
        ScMonomial({2}, set(), [1.0], [0.0])


def test_domain_error_outside_unit_disk():
    mu = ScMonomial(set(), {0}, [2.0], [0.0])
    assert sc_eval(mu, 0.5) == pytest.approx(0.0)
    with pytest.raises(ScDomainError):
        sc_eval(mu, 0.6)


def test_validity_interval():
    mu = ScMonomial(set(), {0, 1}, [2.0, -1.0], [0.0, 0.5])
    iv = sc_interval(mu)
    assert iv == Interval(-0.5, 0.5)
    assert sc_interval(ScMonomial({0}, set(), [5.0], [3.0])) == Interval(-math.inf, math.inf)
    assert sc_interval(ScMonomial(set(), {0}, [0.0], [2.0])).empty
    assert iv.contains(-0.4, 0.4) and not iv.contains(-0.5, 0.4)


def test_dictionary_matrix_and_csv():
    d = ScDictionary([1.0, 2.0], [0.0, 0.1])
    assert len(d.monomials) == 9
    A = d.matrix(np.array([0.1, 0.2]))
    assert A.shape == (2, 9)
    assert_allclose(A[:, 0], 1.0)
    buf = io.StringIO()
    d.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "S,C,lo,hi" and len(lines) == 10


def test_dimension_single_slot():
    assert sc_dimension(ScDictionary([1.0], [0.0]), 0.0, 0.5) == 3


def test_dimension_two_slots_matches_high_precision():
    a, b = [1.0, math.sqrt(2)], [0.1, -0.2]
    assert mp_rank(a, b, 0.0, 0.4) == 8
    assert sc_dimension(ScDictionary(a, b), 0.0, 0.4) == 8


@pytest.mark.parametrize("n, expect", [(2, 5), (3, 7)])
def test_dimension_degenerate_equal_slots(n, expect):
    d = ScDictionary(np.ones(n), np.zeros(n))
    assert mp_rank(d.a, d.b, 0.0, 0.5) == expect
    assert sc_dimension(d, 0.0, 0.5) == expect


def test_dimension_rejects_window_outside_interval():
    with pytest.raises(ValueError, match="common interval"):
        sc_dimension(ScDictionary([2.0], [0.0]), 0.0, 0.6)


def test_arcsine_circuit_lies_in_span(rng):
    c = random_circuit(rng, 2, 2)
    a, b = np.array([0.8, -0.6]), np.array([0.1, 0.2])
    e = Encoding("arcsine", a, b)
    h = lambda x: np.array([evaluate_encoded(c, e, [], t) for t in np.atleast_1d(x)])
    proj = sc_project(h, ScDictionary(a, b), 0.0, 0.5)
    assert proj.residual < 1e-10


def test_trig_form_gives_sc_coefficients(rng):
    # with s = sin(2 pi eta), c = cos(2 pi eta), the trig form is the sc expansion
    c = random_circuit(rng, 2, 2)
    trig = to_trig_form(extract_spectrum(c))
    a, b = np.array([0.7, 0.5]), np.array([0.0, -0.1])
    e = Encoding("arcsine", a, b)
    lookup = {"1": None, "sin": "S", "cos": "C"}
    x = 0.3
    total = 0.0
    for key, v in trig.items():
        S = {j for j, k in enumerate(key) if lookup[k] == "S"}
        C = {j for j, k in enumerate(key) if lookup[k] == "C"}
        total += v * sc_eval(ScMonomial(S, C, a, b), x)
    assert total == pytest.approx(evaluate_encoded(c, e, [], x), abs=1e-12)


def test_projection_residuals():
    d = ScDictionary([1.0], [0.0])
    assert sc_project(lambda x: 3 * x - 1, d, 0.0, 0.5).residual < 1e-12
    assert sc_project(lambda x: np.sin(4 * x), d, 0.0, 0.5).residual > 1e-4
    data = json.loads(sc_project(lambda x: x, d, 0.0, 0.5).to_json())
    assert len(data["coefficients"]) == 3


def test_sc_rank_small_cases():
    cands = [([1.0], [0.0]), ([0.5], [0.2])]
    assert sc_rank(lambda x: 2 * x, 0.0, 0.5, 1, cands) == 1
    assert sc_rank(lambda x: np.sqrt(1 - x**2), 0.0, 0.5, 1, cands) == 1
    assert sc_rank(lambda x: x + np.sqrt(1 - x**2), 0.0, 0.5, 1, cands) == 2
    assert sc_rank(lambda x: 0 * x, 0.0, 0.5, 1, cands) == 0
    assert sc_rank(np.exp, 0.0, 0.5, 1, cands) is None


def test_degree_helpers():
    assert degree_bound([1, 0, 2, 0]) == 2
    with pytest.raises(ValueError):
        degree_bound([0, 0])
    assert polynomial_degree(lambda x: x**3 - x) == 3
    assert polynomial_degree(np.sin) is None
    assert representable_analytic(lambda x: 2 * x**2 - 1, n=2)
    assert not representable_analytic(lambda x: 2 * x**2 - 1, n=1)
    assert not representable_analytic(np.exp)


def test_arcsine_single_slot_functions():
    # identity circuit with Y rotation gives sin of the encoded angle
    c = pqc.Circuit(1, (pqc.InputRotation(1, pqc.Hamiltonian.from_pauli("Y")),), pqc.pauli_matrix("X"))
    e = Encoding("arcsine", [1.0], [0.0])
    for x in (-0.9, 0.0, 0.4):
        assert evaluate_encoded(c, e, [], x) == pytest.approx(x, abs=1e-14)
