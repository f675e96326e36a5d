import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lietaylor import fields, groups
from lietaylor.derive import EXACT, taylor_data
from lietaylor.errors import InvalidArgument
from lietaylor.taylor import (MajorantSeries, SupBound, TaylorData, cauchy_tail, combine, entirety_heuristic,
                              majorant_coefficients, majorant_eval, seminorm_q, shift_taylor_data, taylor_eval,
                              taylor_remainder_bound, translation_check)

E2PI = 535.4916555247646  # e^{2 pi}


def test_majorant_coefficient_examples(SL2R, U1):
    c = majorant_coefficients(taylor_data(fields.constant(SL2R, 7.0), SL2R.identity(), 4)).coeffs
    assert c[0] == 7 and np.all(c[1:] == 0)
    c = majorant_coefficients(taylor_data(fields.builtin_field(U1, "identity"), U1.identity(), 10)).coeffs
    for k in range(11):
        assert c[k] == pytest.approx((2 * math.pi) ** k / math.factorial(k), rel=1e-13)
    c = majorant_coefficients(taylor_data(fields.entry(SL2R), SL2R.identity(), 2)).coeffs
    assert c[1] == pytest.approx(1.0) and c[2] == pytest.approx(1.0)


def test_weighted_majorant(U1):
    T = taylor_data(fields.builtin_field(U1, "identity"), U1.identity(), 6)
    c = majorant_coefficients(T, R=1.0).coeffs
    assert c[3] == pytest.approx((2 * math.pi) ** 3)
    with pytest.raises(InvalidArgument):
        majorant_coefficients(T, R=-1.0)


def test_majorant_eval_examples(SL2R, U1):
    M7 = majorant_coefficients(taylor_data(fields.constant(SL2R, 7.0), SL2R.identity(), 4))
    assert majorant_eval(M7, 10.0).value == 7.0
    M = majorant_coefficients(taylor_data(fields.builtin_field(U1, "identity"), U1.identity(), 40))
    mv = majorant_eval(M, 1.0)
    assert mv.value == pytest.approx(E2PI, rel=1e-6) and mv.tail_kind == "certified"
    assert majorant_eval(M, 0.0).value == M.coeffs[0]
    with pytest.raises(InvalidArgument):
        majorant_eval(M, -1.0)


def test_majorant_tail_kinds():
    M = MajorantSeries(np.eye(1), np.array([1.0, 0.5, 0.25, 0.125]), 0.0, 1, None)
    assert majorant_eval(M, 1.0).tail_kind == "heuristic"
    mv = majorant_eval(M, 0.1, SupBound(1.0, 1.0))
    assert mv.tail_kind == "certified" and 0 < mv.tail < 1e-2
    assert majorant_eval(M, 1.0, SupBound(1.0, 1.0)).tail_kind == "unavailable"
    assert math.isinf(cauchy_tail(SupBound(1.0, 1.0), 1, 1.0, 5))


def test_seminorm_examples(U1):
    assert seminorm_q(fields.constant(U1, -3.0), 2.0, 10) == pytest.approx(3.0)
    assert seminorm_q(fields.builtin_field(U1, "identity"), 1.0, 40) == pytest.approx(E2PI, rel=1e-12)
    s = fields.linear_combination([fields.builtin_field(U1, "identity"), fields.constant(U1, 5.0)], [1.0, 1.0])
    assert seminorm_q(s, 1.0, 40) <= 5.0 + E2PI + 1e-9


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(0.0, 1.5))
def test_seminorm_homogeneity(a, r):
    G = groups.registry_get("SL2R")
    f = fields.builtin_field(G, "adjoint")
    af = fields.linear_combination([f], [a])
    assert seminorm_q(af, r, 6) == pytest.approx(abs(a) * seminorm_q(f, r, 6), rel=1e-12, abs=1e-300)


@given(st.floats(0.0, 1.5), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_seminorm_subadditive(r, b):
    G = groups.registry_get("SL2R")
    f, h = fields.builtin_field(G, "adjoint"), fields.entry(G, 1, 2)
    s = fields.linear_combination([f, h], [1.0, b])
    bh = fields.linear_combination([h], [b])
    assert seminorm_q(s, r, 6) <= seminorm_q(f, r, 6) + seminorm_q(bh, r, 6) + 1e-12


def test_taylor_eval_examples(SL2R):
    T = taylor_data(fields.entry(SL2R), SL2R.identity(), 12)
    assert taylor_eval(T, np.zeros(3)) == T.coeffs[0][0]
    assert abs(taylor_eval(T, [0.1, 0, 0]) - math.exp(0.1)) <= 1e-12
    assert abs(taylor_eval(T, [0, 0.2, 0]) - 1.0) <= 1e-12
    with pytest.raises(InvalidArgument):
        taylor_eval(T, [0.1, 0.2])


def test_taylor_residual_within_certified_tail(SL2R):
    f = fields.builtin_field(SL2R, "adjoint")
    g = groups.exp_group(SL2R, [0.2, -0.1, 0.3])
    T = taylor_data(f, g, 6)
    rng = np.random.default_rng(3)
    for _ in range(30):
        xi = rng.uniform(-0.3, 0.3, 3)
        bound, kind = taylor_remainder_bound(T, xi)
        assert kind == "certified"
        direct = fields.eval_field(f, g @ groups.exp_group(SL2R, xi))
        assert abs(taylor_eval(T, xi) - direct) <= bound + 1e-13


def test_shift_examples(SL2R):
    f = fields.entry(SL2R)
    T = taylor_data(f, SL2R.identity(), 13)
    S0 = shift_taylor_data(T, np.zeros(3), 4, 3)
    for a, b in zip(S0.coeffs, T.coeffs[:5]):
        assert np.array_equal(a, b)
    S = shift_taylor_data(T, [0.1, 0, 0], 0, 12)
    assert abs(S.coeffs[0][0] - math.exp(0.1)) <= 1e-12
    S = shift_taylor_data(T, [0.1, 0, 0], 1, 12)
    X = taylor_data(f, groups.exp_group(SL2R, [0.1, 0, 0]), 1, EXACT)
    assert np.max(np.abs(S.coeffs[1] - X.coeffs[1])) <= 1e-10
    with pytest.raises(InvalidArgument, match="14"):
        shift_taylor_data(T, [0.1, 0, 0], 2, 12)


def test_shift_error_bound_is_honest(SL2R):
    f = fields.builtin_field(SL2R, "adjoint")
    T = taylor_data(f, SL2R.identity(), 10)
    xi = np.array([0.15, -0.1, 0.05])
    S = shift_taylor_data(T, xi, 2, 8)
    X = taylor_data(f, groups.exp_group(SL2R, xi), 2, EXACT)
    for n in range(3):
        assert np.max(np.abs(S.coeffs[n] - X.coeffs[n])) <= S.errors[n] + 1e-13


def test_entirety_examples(U1):
    M = majorant_coefficients(taylor_data(fields.builtin_field(U1, "identity"), U1.identity(), 300))
    assert entirety_heuristic(M).verdict == "consistent-with-entire"
    R1 = groups.registry_get("R1")
    M = majorant_coefficients(taylor_data(fields.builtin_field(R1, "runge"), R1.identity(), 30))
    assert entirety_heuristic(M).verdict == "not-entire"
    Z = MajorantSeries(np.eye(1), np.zeros(12))
    v = entirety_heuristic(Z)
    assert v.verdict == "consistent-with-entire" and v.heuristic
    with pytest.raises(InvalidArgument):
        entirety_heuristic(MajorantSeries(np.eye(1), np.zeros(5)))


def test_translation_examples(SL2R, U1):
    rep = translation_check(fields.constant(SL2R, 7.0), SL2R.identity(), np.zeros(3), 0.5)
    assert rep.lhs == pytest.approx(7.0) and rep.slack >= -1e-12
    rep = translation_check(fields.entry(SL2R), SL2R.identity(), [0.2, 0, 0], 0.5, 8, 4)
    assert rep.passed
    rep = translation_check(fields.builtin_field(U1, "identity"), U1.identity(), [0.3], 1.0, 30, 10)
    assert rep.passed and rep.rhs >= math.exp(2 * math.pi * 1.3) * (1 - 1e-9)


def test_combine_and_json(SL2R):
    g = groups.exp_group(SL2R, [0.1, 0.2, 0.0])
    A = taylor_data(fields.entry(SL2R), g, 3)
    B = taylor_data(fields.builtin_field(SL2R, "adjoint"), g, 3)
    C = combine(2.0, A, -1j, B)
    for c, a, b in zip(C.coeffs, A.coeffs, B.coeffs):
        assert np.allclose(c, 2 * a - 1j * b)
    R = TaylorData.from_json(A.to_json())
    assert all(np.array_equal(x, y) for x, y in zip(R.coeffs, A.coeffs))
    assert A.truncate(1).N == 1 and np.allclose(A.scaled(2.0).coeffs[2], 2 * A.coeffs[2])


def test_line_majorant_survives_large_orders(U1):
    from lietaylor.taylor import entirety_heuristic, line_majorant
    M = line_majorant(fields.builtin_field(U1, "trig"), U1.identity(), 300)
    assert np.all(np.isfinite(M.coeffs))
    # only the z^2 term survives at high order: c_n = (4 pi)^n / n!
    n = 250
    expect = math.exp(n * math.log(4 * math.pi) - math.lgamma(n + 1))
    assert M.coeffs[n] == pytest.approx(expect, rel=1e-10)
    z = line_majorant(fields.builtin_field(U1, "identity"), U1.identity(), 300)
    assert entirety_heuristic(z).verdict == "consistent-with-entire"
