"""Sampled paths in a matrix group."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import groups
from .errors import InvalidArgument
from .groups import GroupModel, complex_pairs

SAMPLES_PER_SEGMENT = 64


def real_coordinates(G: GroupModel, xi) -> np.ndarray:
    """Accept real coordinates (length d) or holomorphic-frame coordinates (length n, complex groups)."""
    xi = np.asarray(xi)
    if G.is_complex and xi.shape == (G.n_holo,):
        xi = xi.astype(complex)
        return np.concatenate([xi.real, xi.imag])
    if xi.shape != (G.d,):
        raise InvalidArgument(f"{G.name}: expected {G.d} real or {G.n_holo} frame coordinates")
    if np.iscomplexobj(xi):
        if np.max(np.abs(xi.imag)) > 0:
            raise InvalidArgument("real coordinates must not carry imaginary parts")
        xi = xi.real
    return xi.astype(float)


def frame_coordinates(G: GroupModel, xi_real) -> np.ndarray:
    """Complex frame coordinates ``a + i b`` of real coordinates ``(a, b)`` (complex groups)."""
    xi_real = np.asarray(xi_real, dtype=float)
    if not G.is_complex:
        return xi_real.astype(complex)
    n = G.n_holo
    return xi_real[:n] + 1j * xi_real[n:]


@dataclass(frozen=True, eq=False)
class GroupPath:
    group: GroupModel
    times: np.ndarray  # strictly increasing, 0 .. 1
    points: np.ndarray  # (S, m, m)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2 or t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise InvalidArgument("path times must increase strictly from 0 to 1")
        if self.points.shape != (len(t), self.group.m, self.group.m):
            raise InvalidArgument("one sample matrix per time is required")

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @classmethod
    def from_segments(cls, G: GroupModel, segments: Sequence, start=None,
                      samples_per_segment: int = SAMPLES_PER_SEGMENT) -> "GroupPath":
        """Broken exponential path ``start exp(s_1 xi_1) exp(s_2 xi_2) ...``.

        ``segments`` holds ``xi`` vectors or ``(xi, duration)`` pairs; durations are
        normalized so the whole path is parametrized by [0, 1].
        """
        if not segments:
            raise InvalidArgument("a path needs at least one segment")
        items = []
        for seg in segments:
            if isinstance(seg, tuple) and len(seg) == 2 and np.ndim(seg[1]) == 0:
                xi, dur = seg
            else:
                xi, dur = seg, 1.0
            if not dur > 0:
                raise InvalidArgument("segment durations must be positive")
            items.append((G.algebra_element(real_coordinates(G, xi)), float(dur)))
        total = sum(d for _, d in items)
        g = G.identity() if start is None else np.asarray(start, dtype=complex)
        times, points, t0 = [0.0], [g], 0.0
        for X, dur in items:
            s = np.arange(1, samples_per_segment + 1) / samples_per_segment
            pts = g[None] @ groups.expm(s[:, None, None] * X[None])
            times.extend((t0 + s * dur / total).tolist())
            points.extend(pts)
            t0 += dur / total
            g = pts[-1]
        times[-1] = 1.0
        return cls(G, np.array(times), np.array(points))

    @classmethod
    def to_target(cls, G: GroupModel, target, start=None, samples: int = SAMPLES_PER_SEGMENT) -> "GroupPath":
        """One-parameter segment ``start exp(t log(start^-1 target))``."""
        g0 = G.identity() if start is None else np.asarray(start, dtype=complex)
        xi = groups.log_group(G, np.linalg.solve(g0, np.asarray(target, dtype=complex)))
        return cls.from_segments(G, [xi], g0, samples)

    @classmethod
    def from_samples(cls, G: GroupModel, times, points) -> "GroupPath":
        return cls(G, np.asarray(times, dtype=float), np.asarray(points, dtype=complex))

    def to_json(self) -> dict:
        return {"group": self.group.name, "times": [float(t) for t in self.times],
                "points": complex_pairs(self.points)}


__all__ = ["GroupPath", "real_coordinates", "frame_coordinates", "SAMPLES_PER_SEGMENT"]
