import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lietaylor import groups
from lietaylor.errors import DomainError, InvalidArgument, NotFound, OutOfChart

from conftest import E, F, H

coords = st.floats(-0.5, 0.5, allow_nan=False)


def test_exp_of_zero_is_identity():
    for name in groups.REGISTERED_GROUPS:
        G = groups.registry_get(name)
        assert np.array_equal(groups.exp_group(G, np.zeros(G.d)), G.identity())


def test_exp_diagonal(SL2R):
    g = groups.exp_group(SL2R, [0.7, 0, 0])
    assert np.allclose(g, np.diag([math.exp(0.7), math.exp(-0.7)]), atol=1e-15)


def test_exp_circle_quarter_turn(U1):
    assert abs(groups.exp_group(U1, [0.25])[0, 0] - 1j) < 1e-15


def test_exp_rejects_nonfinite(SL2R):
    with pytest.raises(InvalidArgument):
        groups.exp_group(SL2R, [np.nan, 0, 0])


def test_log_identity_and_diagonal(SL2R):
    assert np.allclose(groups.log_group(SL2R, SL2R.identity()), 0)
    xi = groups.log_group(SL2R, np.diag([math.exp(0.3), math.exp(-0.3)]))
    assert np.allclose(xi, [0.3, 0, 0], atol=1e-14)


def test_log_branch_point(U1, SL2R):
    with pytest.raises(OutOfChart):
        groups.log_group(U1, np.array([[-1.0 + 0j]]))
    with pytest.raises(OutOfChart):
        groups.log_group(SL2R, -np.eye(2))


def test_op_norm_examples():
    assert groups.op_norm(np.eye(2)) == pytest.approx(1.0)
    assert groups.op_norm(np.diag([math.exp(0.3), math.exp(-0.3)])) == pytest.approx(math.exp(0.3))
    assert groups.op_norm(H) == pytest.approx(1.0)


def test_registry_shapes(SL2R, U1, SL2C):
    assert SL2R.d == 3 and np.allclose(SL2R.basis, [H, E, F])
    assert U1.d == 1 and abs(U1.basis[0, 0, 0] - 2j * math.pi) < 1e-15
    assert groups.complexification_of(U1).target.name == "Ctimes"
    assert SL2C.d == 6 and SL2C.is_complex
    assert np.allclose(SL2C.basis, [H, E, F, 1j * H, 1j * E, 1j * F])


def test_registry_unknown():
    with pytest.raises(NotFound):
        groups.registry_get("SO3")


def test_registry_aliases():
    assert groups.registry_get("Rd(2)").name == groups.registry_get("R2").name


@pytest.mark.parametrize("name", groups.REGISTERED_GROUPS)
def test_registry_groups_validate(name):
    assert groups.validate_group(groups.registry_get(name)) == []


def test_complexification_dimensions():
    for G in map(groups.registry_get, ("U1", "R1", "R2", "R3", "SL2R", "SU2")):
        pair = groups.complexification_of(G)
        assert pair.target.d == 2 * G.d


@pytest.mark.parametrize("name", groups.REGISTERED_MORPHISMS)
def test_morphism_chart_compatibility(name):
    phi = groups.get_morphism(name)
    rng = np.random.default_rng(5)
    for _ in range(100):
        xi = rng.uniform(-0.5, 0.5, phi.source.d)
        assert groups.morphism_defect(phi, xi) <= 1e-10


def test_membership(SL2R, SL2C):
    assert groups.is_member(SL2R, np.eye(2))
    assert not groups.is_member(SL2R, np.diag([2.0, 2.0]))
    assert not groups.is_member(SL2R, groups.exp_group(SL2C, [0, 0, 0, 0.1, 0, 0]))
    with pytest.raises(DomainError):
        groups.require_member(SL2R, np.diag([2.0, 1.0]))


@pytest.mark.parametrize("name", groups.REGISTERED_GROUPS)
def test_exp_log_round_trip(name):
    G = groups.registry_get(name)
    rng = np.random.default_rng(11)
    for _ in range(100):
        xi = rng.uniform(-0.5, 0.5, G.d)
        assert np.max(np.abs(groups.log_group(G, groups.exp_group(G, xi)) - xi)) <= 1e-10


@given(st.lists(coords, min_size=6, max_size=6))
def test_exp_log_round_trip_property(xs):
    G = groups.registry_get("SL2C")
    xi = np.array(xs)
    assert np.max(np.abs(groups.log_group(G, groups.exp_group(G, xi)) - xi)) <= 1e-10


@given(st.lists(coords, min_size=3, max_size=3), st.lists(coords, min_size=3, max_size=3))
def test_op_norm_submultiplicative(a, b):
    G = groups.registry_get("SL2R")
    x, y = groups.exp_group(G, np.array(a)), groups.exp_group(G, np.array(b))
    assert groups.op_norm(x @ y) <= groups.op_norm(x) * groups.op_norm(y) * (1 + 1e-12)


def test_logm_matches_scipy_on_generic_matrix():
    import scipy.linalg
    rng = np.random.default_rng(2)
    A = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
    assert np.allclose(groups.logm(A), scipy.linalg.logm(A), atol=1e-12)


def test_logm_unipotent_and_near_defective():
    N = np.array([[0, 0.7], [0, 0]], dtype=complex)
    assert np.allclose(groups.logm(np.eye(2) + N), N, atol=1e-15)
    X = np.array([[1e-9, 1.0], [0, -1e-9]], dtype=complex)
    assert np.allclose(groups.logm(groups.expm(X)), X, atol=1e-14)


def test_group_json_round_trip():
    for name in groups.REGISTERED_GROUPS:
        G = groups.registry_get(name)
        obj = groups.group_to_json(G)
        H2 = groups.group_from_json(obj)
        assert H2.name == G.name and np.array_equal(H2.basis, G.basis)
