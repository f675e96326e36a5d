import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lietaylor import extend, fields, groups, laurent
from lietaylor.errors import DomainError, InvalidArgument


def test_characters_have_unit_coefficient(U1):
    for m in range(-3, 4):
        data = laurent.laurent_coefficients(fields.builtin_field(U1, f"char:{m}"), 4, 4, 64)
        for n in range(-4, 5):
            assert abs(data[n] - (1.0 if n == m else 0.0)) <= 1e-12
        assert data.residual <= 1e-12 and not data.aliasing_warning


def test_node_count_and_aliasing(U1):
    f = fields.builtin_field(U1, "trig")
    with pytest.raises(InvalidArgument):
        laurent.laurent_coefficients(f, 4, 4, 16)
    with pytest.warns(laurent.AliasingWarning):
        data = laurent.laurent_coefficients(f, 6, 4, 22)
    assert data.aliasing_warning
    with pytest.raises(InvalidArgument):
        laurent.laurent_coefficients(fields.entry(groups.registry_get("SL2R")), 1, 1, 8)
    with pytest.raises(InvalidArgument):
        data[7]


def test_json_rows(U1):
    data = laurent.laurent_coefficients(fields.builtin_field(U1, "identity"), 2, 2, 16)
    js = data.to_json()
    assert js["n_min"] == -2 and js["n_max"] == 2 and len(js["coefficients"]) == 5
    assert data.rows()[3] == (1, pytest.approx(1.0), pytest.approx(0.0, abs=1e-15))


@pytest.mark.parametrize("name", ["identity", "trig", "char:-2"])
def test_lie_taylor_identity(U1, name):
    f = fields.builtin_field(U1, name)
    data = laurent.laurent_coefficients(f, 8, 8, 64)
    rep = laurent.laurent_lie_taylor_check(f, 6, data)
    assert rep["pass"] and rep["max_relative_deviation"] <= 1e-9
    assert [r["k"] for r in rep["rows"]] == list(range(7))


def test_identity_on_punctured_plane():
    Ct = groups.registry_get("Ctimes")
    f = fields.builtin_field(Ct, "identity")
    data = laurent.laurent_coefficients(f, 3, 3, 32)
    assert abs(data[1] - 1) <= 1e-12
    assert laurent.laurent_lie_taylor_check(f, 3, data)["pass"]


def test_seminorm_bound_examples(U1):
    c = fields.constant(U1, 3.0)
    rep = laurent.laurent_seminorm_bound(c, 1.0, 20, laurent.laurent_coefficients(c, 4, 4, 32))
    assert rep.lhs == pytest.approx(3.0) and rep.rhs == pytest.approx(3.0) and rep.passed
    z = fields.builtin_field(U1, "identity")
    # narrow window: roundoff in far coefficients is amplified by e^{2 pi r |n|}
    rep = laurent.laurent_seminorm_bound(z, 1.0, 80, laurent.laurent_coefficients(z, 1, 1, 32))
    assert rep.passed and abs(rep.rhs - rep.lhs) / rep.rhs <= 1e-12
    trig = fields.builtin_field(U1, "trig")
    rep = laurent.laurent_seminorm_bound(trig, 0.5, 60, laurent.laurent_coefficients(trig, 4, 4, 32))
    assert rep.passed
    with pytest.raises(InvalidArgument):
        laurent.laurent_seminorm_bound(z, -1.0, 10, laurent.laurent_coefficients(z, 1, 1, 8))


def test_exponential_coordinate():
    for z in (2.0, 1.5j, 0.3 - 0.7j, np.array([[1 + 1j]])):
        zeta = laurent.exponential_coordinate(z)
        zz = complex(np.asarray(z).reshape(-1)[0])
        assert abs(np.exp(2j * math.pi * zeta) - zz) <= 1e-13 * abs(zz)
    with pytest.raises(DomainError):
        laurent.exponential_coordinate(0)


def test_laurent_extend_examples(U1):
    z = fields.builtin_field(U1, "identity")
    assert abs(laurent.laurent_extend(z, np.exp(0.7j)) - np.exp(0.7j)) <= 1e-8
    assert abs(laurent.laurent_extend(z, 2.0) - 2.0) <= 1e-8
    trig = fields.builtin_field(U1, "trig")
    w = 1.5j
    exact = sum(c * w ** n for n, c in fields.TRIG_COEFFS.items())
    assert abs(laurent.laurent_extend(trig, w) - exact) <= 1e-8
    with pytest.raises(InvalidArgument):
        laurent.laurent_extend(fields.builtin_field(groups.registry_get("Ctimes"), "identity"), 2.0)


def test_laurent_extend_black_box(U1):
    g = fields.builtin_field(U1, "trig")
    box = fields.BlackBoxField(U1, g.evaluate, "real-analytic", name="trig-box")
    w = 0.8 + 0.9j
    exact = sum(c * w ** n for n, c in fields.TRIG_COEFFS.items())
    assert abs(laurent.laurent_extend(box, w) - exact) <= 1e-8


def test_agrees_with_continuation(U1):
    trig = fields.builtin_field(U1, "trig")
    pair = groups.get_morphism("eta_U1")
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = math.exp(rng.uniform(math.log(0.5), math.log(2.0))) * np.exp(1j * rng.uniform(-3.0, 3.0))
        ev = extend.extend_value(trig, pair, np.array([[w]]))
        assert abs(ev.value - laurent.laurent_extend(trig, w)) <= 1e-7


@given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=5, max_size=5))
def test_recovers_random_trig_polynomials(vals):
    U = groups.registry_get("U1")
    coeffs = {n: complex(a, b) for n, (a, b) in zip(range(-2, 3), vals)}
    data = laurent.laurent_coefficients(fields.trig_polynomial(U, coeffs), 3, 3, 32)
    for n in range(-3, 4):
        assert abs(data[n] - coeffs.get(n, 0)) <= 1e-12 * (1 + sum(map(abs, coeffs.values())))
