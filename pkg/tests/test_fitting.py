import io
import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qredundancy import fitting
from qredundancy.fitting import (
    bound_arcsin,
    bound_degree,
    bound_linear,
    fit_arcsin,
    fit_linear,
    projection_distance,
    tightness_sweep,
    write_sweep_csv,
)
from qredundancy.pqc import Circuit, Encoding, Hamiltonian, InputRotation, evaluate_encoded, pauli_matrix

cos = lambda x: np.cos(2 * np.pi * x)
cos2 = lambda x: np.cos(2 * np.pi * x) ** 2


@pytest.mark.parametrize(
    "r, plain, sharp",
    [(0, 0, 0), (1, 1, 1), (2, 1, 2), (4, 2, 2), (8, 2, 3), (13, 3, 3), (40, 4, 4)],
)
def test_bound_linear_integers(r, plain, sharp):
    p, s = bound_linear(r)
    assert (p.lower_bound_int, s.lower_bound_int) == (plain, sharp)
    assert p.lower_bound_real == pytest.approx(math.log(r + 1, 3))
    assert s.lower_bound_real == pytest.approx(math.log(2 * r + 1, 3))


def test_bound_exact_powers_do_not_round_up():
    # math.log(27, 3) is slightly above 3
    assert bound_arcsin(27).lower_bound_int == 3
    assert bound_linear(26)[0].lower_bound_int == 3
    assert bound_linear(13)[1].lower_bound_int == 3


def test_bound_infinite_rank():
    p, s = bound_linear(None)
    assert p.lower_bound_int is None and math.isinf(s.lower_bound_real)
    assert p.to_dict()["lower_bound_real"] is None


def test_bound_arcsin_and_degree():
    zero = bound_arcsin(0)
    assert zero.undefined and zero.lower_bound_int == 0
    assert bound_arcsin(5).lower_bound_int == 2
    assert bound_arcsin(9).lower_bound_real == 2.0
    assert bound_degree(3).lower_bound_int == 3
    with pytest.raises(ValueError):
        bound_linear(-1)
    with pytest.raises(ValueError):
        bound_arcsin(2.5)


def test_bound_report_json():
    d = json.loads(json.dumps(bound_linear(2)[1].to_dict()))
    assert d == {"rank_used": 2, "bound_kind": "linear_log_sharp",
                 "lower_bound_real": pytest.approx(1.46497352072), "lower_bound_int": 2, "undefined": False}


def test_projection_distance_is_a_lower_bound():
    a = [1.3]
    dist = projection_distance(cos2, (-0.5, 0.5), "linear", a)
    x = np.linspace(-0.5, 0.5, 512)
    spec, r = fitting._linear_solve(a, x, cos2(x))
    assert 0 < dist <= np.max(np.abs(r))


def test_projection_distance_cos2_single_slot():
    assert projection_distance(cos2, (-0.5, 0.5), "linear", [1.0]) > 0.1
    assert projection_distance(cos2, (-0.5, 0.5), "linear", [1.0, 1.0]) < 1e-12


def test_fit_linear_cosine():
    fit = fit_linear(cos, (-0.5, 0.5), 1)
    assert fit.residual < 1e-10
    assert abs(fit.a[0]) == pytest.approx(1.0)
    x = np.linspace(-0.4, 0.4, 7)
    assert_allclose(fit.predict(x), cos(x), atol=1e-10)


def test_fit_linear_constant_needs_no_slot():
    fit = fit_linear(lambda x: 0 * x + 0.7, (0, 1), 0)
    assert fit.residual < 1e-12 and fit.a.size == 0


def test_fit_linear_result_is_a_circuit_function():
    # the fitted frequency is realised by a one-slot circuit, <X> = sin(2 pi eta)
    target = lambda x: 0.6 * np.sin(2 * np.pi * 2 * x)
    fit = fit_linear(target, (-0.5, 0.5), 1)
    assert fit.residual < 1e-10
    assert abs(fit.a[0]) == pytest.approx(2.0, abs=1e-9)
    c = Circuit(1, (InputRotation(1, Hamiltonian.from_pauli("Y")),), pauli_matrix("X"))
    e = Encoding("identity", fit.a, fit.b)
    for x in (-0.31, 0.17):
        circuit = 0.6 * np.sign(fit.a[0]) * evaluate_encoded(c, e, [], x)
        assert circuit == pytest.approx(target(x), abs=1e-9)
        assert fit.predict(x) == pytest.approx(target(x), abs=1e-9)


def test_fit_arcsine_identity_and_circle():
    assert fit_arcsin(lambda x: x, (-0.5, 0.5), 1).residual < 1e-10
    fit = fit_arcsin(lambda x: np.sqrt(1 - x**2), (-0.5, 0.5), 1)
    assert fit.residual < 1e-10
    s = fit.a * np.array([-0.5, 0.5])[:, None] + fit.b
    assert np.all(np.abs(s) <= 1 + 1e-12)


def test_fit_arcsine_cubic_needs_more_than_one_slot():
    cubic = lambda x: 32 * x**3 - 6 * x
    assert fit_arcsin(cubic, (-0.5, 0.5), 1).residual > 1e-3
    assert fit_arcsin(cubic, (-0.5, 0.5), 3).residual < 1e-8


def test_fit_from_samples():
    x = np.linspace(-0.5, 0.5, 101)
    fit = fit_linear((x, cos(x)), None, 1)
    assert fit.residual < 1e-10


def test_fit_json_round_trip():
    data = json.loads(fit_linear(cos, (-0.5, 0.5), 1).to_json())
    assert data["encoding"] == "linear" and data["n"] == 1
    assert {"k", "re", "im"} <= set(data["coefficients"][0])


def test_fit_is_deterministic():
    f1 = fit_arcsin(np.cos, (-0.5, 0.5), 1, restarts=3, seed=5)
    f2 = fit_arcsin(np.cos, (-0.5, 0.5), 1, restarts=3, seed=5)
    assert f1.to_json() == f2.to_json()


def test_thread_count_does_not_change_result(monkeypatch):
    serial = fit_linear(cos2, (-0.5, 0.5), 1, restarts=4, seed=2).to_json()
    monkeypatch.setenv("QREDUNDANCY_THREADS", "4")
    assert fit_linear(cos2, (-0.5, 0.5), 1, restarts=4, seed=2).to_json() == serial


def test_sweep_is_monotone_and_csv():
    rows, fits = tightness_sweep(np.sin, (-0.5, 0.5), [1, 2, 3], "linear", restarts=2)
    best = [r.best_residual for r in rows]
    assert best == sorted(best, reverse=True)
    assert len(fits) == 3
    buf = io.StringIO()
    write_sweep_csv(rows, buf, timing=False)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,best_residual,wall_ms,seed"
    assert lines[1].split(",")[2] == ""


def test_sweep_rejects_unknown_encoding():
    with pytest.raises(ValueError):
        tightness_sweep(np.sin, (0, 1), [1], "cubic")


def test_redundancy_range_checked():
    with pytest.raises(ValueError):
        fit_linear(np.sin, (0, 1), 9)
