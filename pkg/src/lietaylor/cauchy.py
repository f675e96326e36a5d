"""Checkers for the Lie-theoretic Cauchy estimates and the restriction inequalities.

Right-hand sides only ever use analytic envelopes ``|phi(h)| <= env(B)``,
valid whenever ``||h||`` and ``||h^-1||`` are at most ``B``.  Sampling is used
solely to sanity-check envelopes.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from . import groups
from .derive import DerivMethod, lie_derivative, taylor_data
from .errors import InvalidArgument, Refusal
from .fields import Field, RepresentativeField, SupEnvelope
from .groups import GroupModel
from .riemann import MetricModel, default_metric
from .taylor import InequalityReport, majorant_coefficients, majorant_eval

K0_RADIUS = 0.25
REL_SLACK = 1e-9
ADAPT_HALVINGS = 5
ADAPT_TOL = 1e-7


def _require_envelope(f: Field, env: Optional[SupEnvelope]) -> SupEnvelope:
    env = env if env is not None else getattr(f, "envelope", None)
    if env is None:
        raise Refusal(f"no analytic sup envelope for field {getattr(f, 'name', '?')}; sampling is not a bound")
    return env


def _power_ratio(n: int, r: float) -> float:
    return 1.0 if n == 0 else (n / r) ** n


def _adaptive_quadrature(f: Field, h: np.ndarray, dirs: np.ndarray, nodes: int) -> complex:
    """Cauchy quadrature with the radius halved until two radii agree.

    Aliasing shrinks like ``rho^M`` while roundoff grows like ``rho^-n``, so a
    few halvings settle fast-growing black boxes such as ``exp(tr h)``.
    """
    alpha = tuple(range(1, dirs.shape[0] + 1))
    rho = 0.5
    # large radii may overflow; a non-finite value simply fails the agreement test
    with np.errstate(over="ignore", invalid="ignore"):
        prev = lie_derivative(f, alpha, h, DerivMethod("cauchy", nodes=nodes, radius=rho), directions=dirs)
        for _ in range(ADAPT_HALVINGS):
            rho /= 2
            cur = lie_derivative(f, alpha, h, DerivMethod("cauchy", nodes=nodes, radius=rho), directions=dirs)
            if abs(cur - prev) <= ADAPT_TOL * max(1.0, abs(cur)):
                return cur
            prev = cur
    return prev


def _lhs(f: Field, g: np.ndarray, dirs: np.ndarray, method: Optional[DerivMethod]) -> complex:
    n = dirs.shape[0]
    if n == 0:
        return complex(f.evaluate(g))
    if method is not None:
        return lie_derivative(f, tuple(range(1, n + 1)), g, method, directions=dirs)
    if isinstance(f, RepresentativeField):
        return lie_derivative(f, tuple(range(1, n + 1)), g, DerivMethod("exact"), directions=dirs)
    return _adaptive_quadrature(f, g, dirs, 16 if n <= 3 else 8)


def _base(G: GroupModel, g, xi) -> np.ndarray:
    g = groups.require_member(G, g)
    xi = np.asarray(xi, dtype=float)
    if xi.size and float(np.max(np.abs(xi))) > K0_RADIUS + 1e-15:
        raise InvalidArgument(f"xi must lie in the coordinate ball K0 of radius {K0_RADIUS}")
    return g @ groups.exp_group(G, xi)


def _inv_norms(h: np.ndarray) -> float:
    return max(groups.op_norm(h), groups.op_norm(np.linalg.inv(h)))


def normalize_directions(G: GroupModel, dirs, metric: Optional[MetricModel] = None) -> np.ndarray:
    """Scale each direction to unit operator norm (or unit metric norm when ``metric`` is given)."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float)) if np.size(dirs) else np.zeros((0, G.d))
    out = []
    for x in dirs:
        nrm = metric.norm(x) if metric is not None else groups.op_norm(G.algebra_element(x))
        if nrm == 0:
            raise InvalidArgument("zero direction")
        out.append(x / nrm)
    return np.array(out).reshape(-1, G.d)


def cauchy_check_operator(f: Field, g, xi, dirs, r: float, env: Optional[SupEnvelope] = None,
                          method: Optional[DerivMethod] = None) -> InequalityReport:
    """``|L(xi_1..xi_n) f(g exp xi)| <= env(B) n^n / r^n`` with operator-norm unit directions."""
    G = f.group
    if not G.is_complex:
        raise InvalidArgument("operator Cauchy estimates need a complex group")
    if not r > 0:
        raise InvalidArgument("radius must be positive")
    env = _require_envelope(f, env)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float)) if np.size(dirs) else np.zeros((0, G.d))
    norms = [groups.op_norm(G.algebra_element(x)) for x in dirs]
    if any(nv > 1 + 1e-12 for nv in norms):
        raise InvalidArgument("directions must have operator norm <= 1")
    h = _base(G, g, xi)
    n = dirs.shape[0]
    lhs = abs(_lhs(f, h, dirs, method))
    # K_r: products of exp(z_j xi_j) with sum |z_j| <= r have norm and inverse norm <= e^r
    B = _inv_norms(h) * math.exp(r)
    rhs = env(B) * _power_ratio(n, r)
    return InequalityReport("cauchy-operator", {"group": G.name, "n": n, "r": float(r), "B": B, "envelope": env.tag},
                            float(lhs), float(rhs), rel_tol=REL_SLACK)


def cauchy_check_riemannian(f: Field, g, xi, dirs, r: float, metric: Optional[MetricModel] = None,
                            env: Optional[SupEnvelope] = None,
                            method: Optional[DerivMethod] = None) -> InequalityReport:
    """Same inequality with metric-unit directions and the closed metric ball of radius ``r``."""
    G = f.group
    if not G.is_complex:
        raise InvalidArgument("Riemannian Cauchy estimates need a complex group")
    if not r > 0:
        raise InvalidArgument("radius must be positive")
    metric = metric or default_metric(G)
    env = _require_envelope(f, env)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float)) if np.size(dirs) else np.zeros((0, G.d))
    if any(metric.norm(x) > 1 + 1e-12 for x in dirs):
        raise InvalidArgument("directions must have metric norm <= 1")
    h = _base(G, g, xi)
    n = dirs.shape[0]
    lhs = abs(_lhs(f, h, dirs, method))
    # the polydisc sum |z_j| <= r maps into the ball: the broken curve through
    # exp(z_1 xi_1)...exp(z_n xi_n) has length <= kappa r; elements of a ball of
    # radius rho obey ||k||, ||k^-1|| <= exp(C rho)
    radius = metric.complex_rotation_constant * r
    B = _inv_norms(h) * math.exp(metric.operator_constant * radius)
    rhs = env(B) * _power_ratio(n, r)
    return InequalityReport("cauchy-riemannian",
                            {"group": G.name, "n": n, "r": float(r), "ball_radius": radius, "B": B,
                             "envelope": env.tag}, float(lhs), float(rhs), rel_tol=REL_SLACK)


def exp_norm_check(X) -> InequalityReport:
    """``||exp X|| <= e^{||X||}``."""
    X = np.asarray(X, dtype=complex)
    nx = groups.op_norm(X)
    lhs = groups.op_norm(groups.expm(X))
    return InequalityReport("exp-norm", {"norm_xi": nx}, lhs, math.exp(nx), rel_tol=1e-12)


def steiner_partial_sum(N: int) -> float:
    """``S_N = sum_{n=0}^N n!/n^n`` with ``0!/0^0 = 1``."""
    return math.fsum(1.0 if n == 0 else math.exp(math.lgamma(n + 1) - n * math.log(n)) for n in range(N + 1))


def restriction_bound_check(f: Field, r: float, N: int = 8, env: Optional[SupEnvelope] = None,
                            metric: Optional[MetricModel] = None, samples: int = 20,
                            seed: int = 0, method: Optional[DerivMethod] = None) -> list[InequalityReport]:
    """Both directions of the restriction inequalities at the identity.

    Returns three reports: the stated form ``q_r <= env(ball r d) S_N``, a variant
    whose constant follows from the Cauchy estimate (``q_r <= 2 env(B)``
    with radius ``2 e d beta r``), and the reverse bound
    ``|f(g exp xi)| <= M(g, 1) + tail`` at sampled ``xi`` in ``K0``.
    """
    G = f.group
    if not G.is_complex:
        raise InvalidArgument("restriction inequalities are checked on complex groups")
    if not r > 0:
        raise InvalidArgument("radius must be positive")
    env = _require_envelope(f, env)
    metric = metric or default_metric(G)
    e = G.identity()
    T = taylor_data(f, e, N, method)
    Mser = majorant_coefficients(T)
    q = majorant_eval(Mser, r).value
    d = G.d
    S = steiner_partial_sum(N)
    B_stated = math.exp(metric.operator_constant * r * d)
    stated = InequalityReport("restriction-stated", {"group": G.name, "r": float(r), "N": N, "S_N": S,
                                                     "ball_radius": r * d},
                              q, env(B_stated) * S, rel_tol=REL_SLACK)
    # c_n r^n <= env(B(R)) (d beta r n / R)^n / n! <= env 2^-n with R = 2 e d beta r
    beta = max(groups.op_norm(x) for x in G.basis)
    R = 2.0 * math.e * d * beta * r
    rigorous = InequalityReport("restriction-cauchy", {"group": G.name, "r": float(r), "N": N, "R": R},
                                q, 2.0 * env(math.exp(R)), rel_tol=REL_SLACK)
    # reverse direction: |f(exp xi)| <= sum c_n |xi|^n <= M(e, 1) for xi in K0
    rng = np.random.default_rng(seed)
    mv = majorant_eval(Mser, 1.0)
    worst = 0.0
    for _ in range(samples):
        xi = rng.uniform(-K0_RADIUS, K0_RADIUS, d)
        worst = max(worst, abs(complex(f.evaluate(groups.exp_group(G, xi)))))
    tail = mv.tail if math.isfinite(mv.tail) else 0.0
    reverse = InequalityReport("restriction-reverse", {"group": G.name, "N": N, "samples": samples},
                               worst, mv.value + tail, {"tail_kind": mv.tail_kind}, rel_tol=REL_SLACK)
    return [stated, rigorous, reverse]


def sample_envelope_ok(f: Field, env: SupEnvelope, B: float, count: int = 200, seed: int = 0) -> bool:
    """Sanity check: ``env(B)`` dominates ``|f|`` at random elements with norms below ``B``."""
    G = f.group
    rng = np.random.default_rng(seed)
    c = max(groups.op_norm(x) for x in G.basis) * G.d
    s = math.log(B) / c if B > 1 else 0.0
    bound = env(B)
    for _ in range(count):
        h = groups.exp_group(G, rng.uniform(-s, s, G.d))
        if _inv_norms(h) <= B and abs(complex(f.evaluate(h))) > bound * (1 + 1e-12):
            return False
    return True


def random_configuration(G: GroupModel, rng: np.random.Generator, n_max: int = 5,
                         metric: Optional[MetricModel] = None):
    """Random (g, xi in K0, unit directions, r) for batch checks."""
    g = groups.exp_group(G, rng.uniform(-0.5, 0.5, G.d))
    xi = rng.uniform(-K0_RADIUS, K0_RADIUS, G.d)
    n = int(rng.integers(0, n_max + 1))
    raw = rng.normal(size=(n, G.d))
    dirs = normalize_directions(G, raw, metric) if n else np.zeros((0, G.d))
    r = float(rng.uniform(0.2, 2.0))
    return g, xi, dirs, r


__all__ = [
    "K0_RADIUS", "cauchy_check_operator", "cauchy_check_riemannian", "exp_norm_check", "steiner_partial_sum",
    "restriction_bound_check", "sample_envelope_ok", "normalize_directions", "random_configuration",
]
