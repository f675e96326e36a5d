"""Left-invariant metrics: curve lengths and certified upper bounds on distance.

Every number returned by :func:`distance_upper_bound` is the length of an
explicit broken exponential curve, hence an upper bound on the Riemannian
distance.  No geodesic solver is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.optimize

from . import groups
from .errors import InvalidArgument, OutOfChart, ResampleError
from .groups import GroupModel
from .paths import GroupPath

SEGMENT_BUDGET = 16


@dataclass(frozen=True, eq=False)
class MetricModel:
    group: GroupModel
    gram: np.ndarray = field(default=None)

    def __post_init__(self):
        gram = np.eye(self.group.d) if self.gram is None else np.asarray(self.gram, dtype=float)
        if gram.shape != (self.group.d, self.group.d):
            raise InvalidArgument(f"gram matrix must be {self.group.d}x{self.group.d}")
        if np.max(np.abs(gram - gram.T)) > 1e-14 * max(1.0, np.max(np.abs(gram))):
            raise InvalidArgument("gram matrix must be symmetric")
        if np.linalg.eigvalsh(gram).min() <= 0:
            raise InvalidArgument("gram matrix must be positive definite")
        object.__setattr__(self, "gram", gram)

    def norm(self, xi) -> float:
        xi = np.asarray(xi, dtype=float)
        return float(math.sqrt(max(float(xi @ self.gram @ xi), 0.0)))

    @cached_property
    def _whiten(self) -> np.ndarray:
        w, V = np.linalg.eigh(self.gram)
        return V @ np.diag(w ** -0.5) @ V.T

    @cached_property
    def operator_constant(self) -> float:
        """``C`` with ``||X||_op <= C ||X||_g`` for every algebra element."""
        f = np.tensordot(self._whiten.T, self.group.basis, axes=(1, 0))
        return float(math.sqrt(sum(groups.op_norm(fk) ** 2 for fk in f)))

    @cached_property
    def complex_rotation_constant(self) -> float:
        """``kappa`` with ``||z X||_g <= kappa |z| ||X||_g`` for complex scalars (complex groups)."""
        G = self.group
        if not G.is_complex:
            return 1.0
        n = G.n_holo
        J = np.zeros((G.d, G.d))
        J[n:, :n] = np.eye(n)
        J[:n, n:] = -np.eye(n)
        if np.allclose(J.T @ self.gram @ J, self.gram, atol=1e-14):
            return 1.0
        W = np.linalg.inv(self._whiten)
        Jn = np.linalg.norm(W @ J @ self._whiten, 2)
        return float(math.sqrt(1.0 + Jn ** 2))

    def to_json(self) -> dict:
        return {"group": self.group.name, "gram": self.gram.tolist()}


def default_metric(G: GroupModel) -> MetricModel:
    return MetricModel(G)


def curve_length(path: GroupPath, metric: Optional[MetricModel] = None) -> float:
    """Sum of ``||log(g_i^-1 g_{i+1})||_g`` (composite midpoint rule on the pulled-back velocity)."""
    metric = metric or default_metric(path.group)
    G = path.group
    parts = []
    for a, b in zip(path.points[:-1], path.points[1:]):
        try:
            xi = groups.log_group(G, np.linalg.solve(a, b))
        except OutOfChart as exc:
            raise ResampleError(f"consecutive samples leave the log chart: {exc}") from exc
        parts.append(metric.norm(xi))
    return math.fsum(parts)


@dataclass(frozen=True)
class DistanceBound:
    value: float  # +inf when unbounded
    segments: int
    certified: bool

    @property
    def unbounded(self) -> bool:
        return not math.isfinite(self.value)


def _log_len(G, metric, x) -> float:
    try:
        return metric.norm(groups.log_group(G, x))
    except OutOfChart:
        return math.inf


def _direction_split(G, metric, x, budget) -> tuple[float, int]:
    """Peel off one-parameter factors along basis directions until the log chart applies.

    Breadth-first over at most ``min(budget - 1, 3)`` peeled factors.
    """
    ts = (0.25, 0.5, 1.0, 1.5, 2.0, math.pi / 2, math.pi)
    steps = []
    for k in range(G.d):
        for t in ts:
            for sgn in (1.0, -1.0):
                xi = np.zeros(G.d)
                xi[k] = sgn * t
                steps.append((metric.norm(xi), np.linalg.inv(groups.exp_group(G, xi))))
    frontier = [(0.0, x)]
    for depth in range(1, min(budget - 1, 3) + 1):
        best = math.inf
        nxt = []
        for used, rest in frontier:
            for length, inv in steps:
                r = inv @ rest
                tail = _log_len(G, metric, r)
                if math.isfinite(tail):
                    best = min(best, used + length + tail)
                nxt.append((used + length, r))
        if math.isfinite(best):
            return best, depth + 1
        frontier = nxt
    return math.inf, 0


def _refine(G, metric, x, start_len, segments: int) -> float:
    """Optimize interior knots of a broken exponential curve with ``segments`` pieces."""
    try:
        X = groups.log_group(G, x)
    except OutOfChart:
        return math.inf
    k = segments - 1
    y0 = np.tile(X / segments, k)

    def length(y):
        ys = y.reshape(k, G.d)
        total = sum(metric.norm(v) for v in ys)
        h = x
        for v in ys:
            h = np.linalg.solve(groups.exp_group(G, v), h)
        return total + _log_len(G, metric, h)

    res = scipy.optimize.minimize(length, y0, method="BFGS", options={"gtol": 1e-9, "maxiter": 200})
    # re-evaluate at the returned knots: the bound is the length of that explicit curve
    return min(start_len, float(length(res.x)))


def distance_upper_bound(g, h, metric: Optional[MetricModel] = None, refine: bool = False,
                         budget: int = SEGMENT_BUDGET) -> DistanceBound:
    """Length of the best candidate broken exponential curve from ``g`` to ``h``."""
    g = np.asarray(g, dtype=complex)
    h = np.asarray(h, dtype=complex)
    G = metric.group if metric is not None else None
    if G is None:
        raise InvalidArgument("a metric (which fixes the group) is required")
    x = np.linalg.solve(g, h)
    base = _log_len(G, metric, x)
    if base == 0.0:
        return DistanceBound(0.0, 1, True)
    if math.isfinite(base):
        best, segs = base, 1
        if refine:
            for s in (2, 3):
                if s > budget:
                    break
                cand = _refine(G, metric, x, best, s)
                if cand < best:
                    best, segs = cand, s
        return DistanceBound(best, segs, True)
    best, segs = _direction_split(G, metric, x, budget)
    return DistanceBound(best, segs, math.isfinite(best))


def ball_membership_upper(g, center, r: float, metric: MetricModel, refine: bool = False) -> str:
    """``inside-certified`` when a curve of length ``<= r`` is exhibited, else ``unknown``."""
    if r < 0:
        raise InvalidArgument("radius must be nonnegative")
    b = distance_upper_bound(center, g, metric, refine=refine)
    return "inside-certified" if b.value <= r else "unknown"


__all__ = [
    "MetricModel", "default_metric", "curve_length", "DistanceBound", "distance_upper_bound",
    "ball_membership_upper", "SEGMENT_BUDGET",
]
