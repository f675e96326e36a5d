import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lietaylor import cauchy, fields, groups
from lietaylor.errors import InvalidArgument, Refusal
from lietaylor.fields import SupEnvelope
from lietaylor.riemann import MetricModel, default_metric

from conftest import E, F, H

H6 = np.eye(6)[0]


def test_operator_examples(SL2C):
    e = SL2C.identity()
    rep = cauchy.cauchy_check_operator(fields.constant(SL2C, 2.0), e, np.zeros(6), [H6], 1.0)
    assert rep.lhs == 0 and rep.passed
    env = SupEnvelope(lambda B: B, "op norm")
    rep = cauchy.cauchy_check_operator(fields.entry(SL2C), e, np.zeros(6), [H6], 1.0, env)
    assert rep.lhs == pytest.approx(1.0) and rep.rhs == pytest.approx(math.e) and rep.passed
    rep = cauchy.cauchy_check_operator(fields.entry(SL2C), e, np.zeros(6), [H6] * 3, 1.0, env)
    assert rep.passed and rep.rhs == pytest.approx(27 * math.e)


def test_riemannian_examples(SL2C, Ctimes):
    e = SL2C.identity()
    assert cauchy.cauchy_check_riemannian(fields.constant(SL2C, 1.0), e, np.zeros(6), [], 1.0).passed
    m = MetricModel(Ctimes, np.eye(2))
    rep = cauchy.cauchy_check_riemannian(fields.builtin_field(Ctimes, "identity"), Ctimes.identity(), np.zeros(2),
                                         [[1.0, 0.0]], 0.5, m)
    assert rep.passed and rep.lhs == pytest.approx(2 * math.pi)
    dirs = cauchy.normalize_directions(SL2C, [[0.3, 1, 0, 0, 0, 0.2], [0, 0, 1, 0, 0.5, 0]], default_metric(SL2C))
    assert cauchy.cauchy_check_riemannian(fields.entry(SL2C), e, np.zeros(6), dirs, 1.0).passed


def test_guards(SL2C, SL2R):
    e = SL2C.identity()
    with pytest.raises(Refusal):
        cauchy.cauchy_check_operator(fields.builtin_field(SL2C, "re-entry-11").__class__(
            SL2C, lambda g: g[..., 0, 0], "holomorphic", "no-envelope"), e, np.zeros(6), [H6], 1.0)
    with pytest.raises(InvalidArgument):
        cauchy.cauchy_check_operator(fields.entry(SL2C), e, np.full(6, 0.3), [H6], 1.0)
    with pytest.raises(InvalidArgument):
        cauchy.cauchy_check_operator(fields.entry(SL2C), e, np.zeros(6), [2 * H6], 1.0)
    with pytest.raises(InvalidArgument):
        cauchy.cauchy_check_operator(fields.entry(SL2R), SL2R.identity(), np.zeros(3), [np.eye(3)[0]], 1.0)
    with pytest.raises(InvalidArgument):
        cauchy.cauchy_check_riemannian(fields.entry(SL2C), e, np.zeros(6), [3 * H6], 1.0)


def test_exp_norm_examples():
    assert cauchy.exp_norm_check(np.zeros((2, 2))).passed
    rep = cauchy.exp_norm_check(0.3 * H)
    assert rep.passed and abs(rep.slack) <= 1e-14
    assert cauchy.exp_norm_check(0.5 * (E + F)).passed


@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_exp_norm_property(xs):
    X = (np.array(xs[:4]) + 1j * np.array(xs[4:])).reshape(2, 2)
    assert cauchy.exp_norm_check(X).passed


def test_steiner_sums():
    assert cauchy.steiner_partial_sum(0) == 1.0
    assert cauchy.steiner_partial_sum(1) == 2.0
    assert cauchy.steiner_partial_sum(2) == 2.5
    s = [cauchy.steiner_partial_sum(n) for n in range(21)]
    assert all(b > a for a, b in zip(s, s[1:]))
    assert s[20] == pytest.approx(2.87985, abs=1e-4)


def test_restriction_examples(SL2C, Ctimes):
    reps = cauchy.restriction_bound_check(fields.constant(SL2C, 3.0), 0.5)
    assert [r.check for r in reps] == ["restriction-stated", "restriction-cauchy", "restriction-reverse"]
    assert all(r.passed for r in reps)
    reps = cauchy.restriction_bound_check(fields.builtin_field(Ctimes, "identity"), 0.1, N=20)
    assert all(r.passed for r in reps)
    reps = cauchy.restriction_bound_check(fields.builtin_field(SL2C, "adjoint"), 0.2, N=6)
    assert all(r.passed for r in reps)


@pytest.mark.parametrize("gname", ["Ctimes", "C2", "SL2C"])
def test_randomized_configurations(gname):
    G = groups.registry_get(gname)
    rng = np.random.default_rng(8)
    metric = default_metric(G)
    names = [n for n in fields.builtin_names(G) if n != "re-entry-11"]
    for i in range(30):
        f = fields.builtin_field(G, names[i % len(names)])
        g, xi, dirs, r = cauchy.random_configuration(G, rng, 4)
        assert cauchy.cauchy_check_operator(f, g, xi, dirs, r).passed
        md = cauchy.normalize_directions(G, dirs, metric) if len(dirs) else dirs
        assert cauchy.cauchy_check_riemannian(f, g, xi, md, r, metric).passed


def test_envelope_sampling(SL2C):
    for name in ("entry-11", "trace", "adjoint", "exp-trace"):
        f = fields.builtin_field(SL2C, name)
        assert cauchy.sample_envelope_ok(f, f.envelope, 3.0)
    assert not cauchy.sample_envelope_ok(fields.entry(SL2C), SupEnvelope(lambda B: 0.1, "too small"), 3.0)
