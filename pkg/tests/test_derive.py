import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lietaylor import fields, groups
from lietaylor.derive import (EXACT, DerivMethod, enumerate_multiindices, lie_derivative, one_variable_coefficients,
                              radius_estimate, taylor_data, transform_taylor)
from lietaylor.errors import InvalidArgument, Refusal, UnsupportedMethod

from conftest import E, F, H


def test_enumerate_examples():
    assert enumerate_multiindices(2, 0) == [()]
    assert enumerate_multiindices(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert len(enumerate_multiindices(3, 3)) == 27
    assert enumerate_multiindices(0, 0) == [()] and enumerate_multiindices(0, 2) == []


def test_constant_derivatives_vanish(SL2C):
    c = fields.constant(SL2C, 3.0)
    g = groups.exp_group(SL2C, [0.1] * 6)
    assert lie_derivative(c, (1, 4), g) == 0
    assert abs(lie_derivative(c, (2,), g, DerivMethod("cauchy"))) < 1e-14


def test_cauchy_matches_product_oracle(SL2C):
    v = lie_derivative(fields.entry(SL2C), (2, 3), SL2C.identity(), DerivMethod("cauchy"))
    assert abs(v - 1.0) <= 1e-10


def test_finite_difference_on_the_line():
    R1 = groups.registry_get("R1")
    f = fields.builtin_field(R1, "covering-identity")
    v = lie_derivative(f, (1,), R1.identity(), DerivMethod("fd"))
    assert abs(v - 2j * math.pi) <= 1e-6


def test_method_guards(SL2R, SL2C):
    bb = fields.builtin_field(SL2C, "exp-trace")
    with pytest.raises(UnsupportedMethod):
        lie_derivative(bb, (1,), SL2C.identity(), EXACT)
    with pytest.raises(UnsupportedMethod):
        lie_derivative(fields.entry(SL2R), (1,), SL2R.identity(), DerivMethod("cauchy"))
    with pytest.raises(UnsupportedMethod):
        lie_derivative(fields.builtin_field(SL2R, "exp-trace"), (1, 1, 1, 1), SL2R.identity(), DerivMethod("fd"))
    with pytest.raises(Refusal):
        lie_derivative(bb, (1,) * 9, SL2C.identity(), DerivMethod("cauchy"))
    with pytest.raises(InvalidArgument):
        DerivMethod("cauchy", nodes=12)
    with pytest.raises(InvalidArgument):
        lie_derivative(fields.entry(SL2R), (0,), SL2R.identity())


def test_taylor_data_examples(SL2R, U1):
    T = taylor_data(fields.constant(SL2R, 7.0), SL2R.identity(), 3)
    assert T.coeffs[0][0] == 7 and all(np.all(c == 0) for c in T.coeffs[1:])
    T = taylor_data(fields.entry(SL2R), SL2R.identity(), 2)
    B = [H, E, F]
    want = [(B[a] @ B[b])[0, 0] for a in range(3) for b in range(3)]
    assert np.allclose(T.coeffs[2], want, atol=1e-15)
    T = taylor_data(fields.builtin_field(U1, "identity"), U1.identity(), 4)
    for k in range(5):
        assert abs(T.coeffs[k][0] - (2j * math.pi) ** k) <= 1e-12 * (2 * math.pi) ** k


def test_quadrature_agrees_with_exact_to_order_four(SL2C):
    g = groups.exp_group(SL2C, [0.1, -0.2, 0.15, 0.05, 0.1, -0.1])
    D = np.eye(6)[:3]
    for name in ("entry-11", "adjoint"):
        f = fields.builtin_field(SL2C, name)
        Q = taylor_data(f, g, 4, DerivMethod("cauchy", nodes=16), directions=D)
        X = taylor_data(f, g, 4, EXACT, directions=D)
        for q, x in zip(Q.coeffs, X.coeffs):
            assert np.all(np.abs(q - x) <= 1e-8 * (1 + np.abs(x)))


def test_finite_difference_agrees_with_exact(SL2R):
    f = fields.builtin_field(SL2R, "adjoint")
    g = groups.exp_group(SL2R, [0.2, 0.1, -0.1])
    for alpha in [(1,), (2, 3), (3, 1, 2)]:
        a = lie_derivative(f, alpha, g, DerivMethod("fd"))
        b = lie_derivative(f, alpha, g, EXACT)
        assert abs(a - b) <= 1e-6 * (1 + abs(b))


def test_black_box_quadrature(SL2C):
    # exp(tr g) on SL(2,C) is the constant e^{tr}, built from its values only
    f = fields.builtin_field(groups.registry_get("Ctimes"), "exp-trace")
    G = f.group
    g = groups.exp_group(G, [0.03, 0.02])
    w = g[0, 0]
    # L(e_1) e^{w} with e_1 = 2 pi i: derivative of exp(w e^{2 pi i t}) is 2 pi i w e^{w}
    v = lie_derivative(f, (1,), g, DerivMethod("cauchy"))
    assert abs(v - 2j * math.pi * w * np.exp(w)) <= 1e-10


def test_linearity_exact(SL2R):
    g = groups.exp_group(SL2R, [0.1, 0.2, 0.3])
    a, b = fields.entry(SL2R, 1, 1), fields.builtin_field(SL2R, "adjoint")
    s = fields.linear_combination([a, b], [2.0, 3j])
    Ts, Ta, Tb = (taylor_data(f, g, 3) for f in (s, a, b))
    for cs, ca, cb in zip(Ts.coeffs, Ta.coeffs, Tb.coeffs):
        assert np.allclose(cs, 2.0 * ca + 3j * cb, atol=1e-13)


@given(st.lists(st.floats(-0.3, 0.3), min_size=3, max_size=3))
def test_order_reversal_symmetry(z):
    G = groups.registry_get("SL2R")
    T = taylor_data(fields.builtin_field(G, "adjoint"), G.identity(), 4)
    z = np.array(z)
    for n in range(1, 5):
        block = T.coeffs[n].reshape((3,) * n)
        rev = np.transpose(block, tuple(reversed(range(n))))
        mono = z
        for _ in range(n - 1):
            mono = np.multiply.outer(mono, z)
        assert abs(np.sum(block * mono) - np.sum(rev * mono)) <= 1e-12


def test_radius_estimate_examples(U1):
    r = radius_estimate(fields.builtin_field(U1, "identity"), U1.identity(), [1.0], 30)
    assert math.isinf(r.radius) and r.heuristic
    R1 = groups.registry_get("R1")
    r = radius_estimate(fields.builtin_field(R1, "runge"), R1.identity(), [1.0], 30)
    assert r.radius == pytest.approx(1.0, rel=1e-6)
    assert math.isinf(radius_estimate(fields.constant(U1, 2.0), U1.identity(), [1.0], 30).radius)


def test_one_variable_routes(SL2C):
    f = fields.builtin_field(SL2C, "exp-trace")
    a, route = one_variable_coefficients(f, SL2C.identity(), np.eye(6)[0], 6)
    assert route == "cauchy-fft"
    # exp(tr exp(tH)) = exp(2 cosh t) = e^2 (1 + t^2 + ...)
    assert abs(a[0] - math.exp(2)) < 1e-12 and abs(a[1]) < 1e-12 and abs(a[2] - math.exp(2)) < 1e-10


def test_transform_taylor_matches_direct(SL2R):
    f = fields.builtin_field(SL2R, "adjoint")
    g = groups.exp_group(SL2R, [0.1, 0.0, 0.2])
    A = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0]])
    T = transform_taylor(taylor_data(f, g, 3), A)
    D = taylor_data(f, g, 3, directions=A)
    for a, b in zip(T.coeffs, D.coeffs):
        assert np.allclose(a, b, atol=1e-12)
