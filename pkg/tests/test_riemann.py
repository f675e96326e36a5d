import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lietaylor import groups
from lietaylor.errors import InvalidArgument, ResampleError
from lietaylor.paths import GroupPath
from lietaylor.riemann import MetricModel, ball_membership_upper, curve_length, default_metric, distance_upper_bound


def test_curve_length_examples(U1, SL2R):
    const = GroupPath.from_samples(SL2R, [0, 0.5, 1], [SL2R.identity()] * 3)
    assert curve_length(const) == 0.0
    P = GroupPath.from_segments(U1, [np.array([1.0])], samples_per_segment=64)
    assert curve_length(P, MetricModel(U1, np.eye(1))) == pytest.approx(1.0, abs=1e-6)
    xi = np.array([0.7, 0.0, 0.0])
    assert curve_length(GroupPath.from_segments(SL2R, [xi])) == pytest.approx(0.7, abs=1e-6)


def test_curve_length_resample_error(U1):
    P = GroupPath.from_samples(U1, [0, 1], [U1.identity(), np.array([[-1.0 + 0j]])])
    with pytest.raises(ResampleError):
        curve_length(P)


def test_distance_examples(U1, SL2R):
    m = default_metric(SL2R)
    g = groups.exp_group(SL2R, [0.1, 0.2, 0.3])
    assert distance_upper_bound(g, g, m).value == 0.0
    mu = MetricModel(U1, np.eye(1))
    assert distance_upper_bound(U1.identity(), groups.exp_group(U1, [0.1]), mu).value == pytest.approx(0.1)
    x1, x2 = np.array([0.4, 0.1, -0.2]), np.array([-0.3, 0.5, 0.2])
    h = groups.exp_group(SL2R, x1) @ groups.exp_group(SL2R, x2)
    assert distance_upper_bound(SL2R.identity(), h, m).value <= m.norm(x1) + m.norm(x2) + 1e-12


def test_distance_outside_log_chart(SL2R):
    b = distance_upper_bound(SL2R.identity(), -np.eye(2), default_metric(SL2R))
    assert b.certified and b.segments > 1 and math.isfinite(b.value)


def test_distance_left_invariant(SL2C):
    m = default_metric(SL2C)
    rng = np.random.default_rng(4)
    a, b, c = (groups.exp_group(SL2C, rng.uniform(-0.4, 0.4, 6)) for _ in range(3))
    assert distance_upper_bound(c @ a, c @ b, m).value == pytest.approx(distance_upper_bound(a, b, m).value, rel=1e-9)


@settings(max_examples=12)
@given(st.integers(0, 10_000))
def test_triangle_property_with_refinement(seed):
    G = groups.registry_get("SL2R")
    m = default_metric(G)
    rng = np.random.default_rng(seed)
    a, b, c = (groups.exp_group(G, rng.uniform(-0.6, 0.6, 3)) for _ in range(3))
    ab = distance_upper_bound(a, b, m, refine=True).value
    bc = distance_upper_bound(b, c, m, refine=True).value
    ac = distance_upper_bound(a, c, m, refine=True).value
    assert ac <= ab + bc + 1e-9


def test_ball_membership_examples(U1):
    m = MetricModel(U1, np.eye(1))
    e = U1.identity()
    assert ball_membership_upper(e, e, 0.0, m) == "inside-certified"
    assert ball_membership_upper(groups.exp_group(U1, [0.3]), e, 0.2, m) == "unknown"
    assert ball_membership_upper(groups.exp_group(U1, [0.1]), e, 0.2, m) == "inside-certified"
    with pytest.raises(InvalidArgument):
        ball_membership_upper(e, e, -1.0, m)


def test_metric_validation_and_constants(SL2C):
    with pytest.raises(InvalidArgument):
        MetricModel(SL2C, np.eye(3))
    with pytest.raises(InvalidArgument):
        MetricModel(SL2C, -np.eye(6))
    m = default_metric(SL2C)
    assert m.complex_rotation_constant == 1.0
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.normal(size=6)
        assert groups.op_norm(SL2C.algebra_element(x)) <= m.operator_constant * m.norm(x) * (1 + 1e-12)
    skew = np.diag([1.0, 1, 1, 4, 4, 4])
    assert MetricModel(SL2C, skew).complex_rotation_constant > 1.0
