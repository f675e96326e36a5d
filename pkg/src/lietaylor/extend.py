"""Holomorphic extension from a real group to its complexification.

Continuation works in the holomorphic frame ``f_1..f_n`` of the complex
group, with complex frame coordinates.  A field ``phi`` on ``G`` is
transported through the tangent map ``T`` of ``eta: G -> G_C``: with
``Tc = T[:n] + i T[n:]`` (complex frame coordinates of ``eta_* e_k``), the
C-linear extension acts on ``f_j`` as ``sum_k (Tc^-1)[k, j] L(e_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import groups
from .derive import DENSE_LIMIT, EXACT, DerivMethod, lie_derivative, taylor_data, transform_taylor
from .errors import ContinuationDiverged, InvalidArgument, OutOfChart, Refusal, ResampleError
from .fields import BlackBoxField, Field, RepresentativeField, linear_combination, primitive_field, pullback_field
from .groups import GroupModel, GroupMorphism, complex_pairs
from .paths import GroupPath, frame_coordinates
from .riemann import MetricModel, default_metric, distance_upper_bound
from .taylor import (TailModel, TaylorData, shift_taylor_data, taylor_eval,
                     taylor_remainder_bound)

MARGIN_TOL = 1e-12
# morphism -> (its complexification, complexification pair of its target)
COMPLEXIFIED_MORPHISMS = {"p": ("p_C", "eta_U1")}
DEFAULT_STEP_RADIUS = 0.2
DEFAULT_BUDGET = 1e-6


# ---------------------------------------------------------------- pairs and C-linear data


def complex_tangent(pair: GroupMorphism) -> np.ndarray:
    """``Tc`` (n x d complex): frame coordinates of the pushed-forward source basis."""
    T = np.asarray(pair.tangent_map, dtype=float)
    H = pair.target
    if not H.is_complex:
        raise InvalidArgument("the target of a complexification pair must be a complex group")
    n = H.n_holo
    Tc = T[:n] + 1j * T[n:]
    if Tc.shape[0] != Tc.shape[1]:
        raise InvalidArgument("pair is not a real form (dimension mismatch)")
    return Tc


def frame_in_source(pair: GroupMorphism) -> np.ndarray:
    """Rows: complex source coordinates of the frame elements ``f_j`` (i.e. ``Tc^-1`` transposed)."""
    return np.linalg.inv(complex_tangent(pair)).T


def complex_drho(f: RepresentativeField, pair: GroupMorphism) -> np.ndarray:
    """Generators of the C-linear extension on the holomorphic frame, shape (n, N, N)."""
    A = frame_in_source(pair)
    return np.tensordot(A, f.drho, axes=(1, 0))


def counterpart(f: RepresentativeField, pair: GroupMorphism) -> RepresentativeField:
    """Closed-form holomorphic counterpart of ``f`` on ``pair.target`` (same recipe, complex group)."""
    if f.group is not pair.source:
        raise InvalidArgument("field does not live on the source of the pair")
    H = pair.target
    recipe = f.recipe
    kind = recipe["rho"]
    if kind == "sum":
        parts, coeffs = _sum_parts(f, pair)
        return linear_combination(parts, coeffs)
    if kind == "product":
        raise InvalidArgument("counterparts of tensor products are built from their factors")
    if kind == "pullback":
        # Phi* psi extends to Phi_C* (counterpart of psi)
        if recipe["morphism"] not in COMPLEXIFIED_MORPHISMS:
            raise InvalidArgument(f"no complexified morphism registered for {recipe['morphism']}")
        mor_c, inner_pair = COMPLEXIFIED_MORPHISMS[recipe["morphism"]]
        from .fields import _from_recipe

        inner_pair = groups.get_morphism(inner_pair)
        inner = counterpart(_from_recipe(inner_pair.source, recipe["field"]), inner_pair)
        out = pullback_field(groups.get_morphism(mor_c), inner)
        if out.group is not H:
            raise InvalidArgument("complexified pullback lands on the wrong group")
        return out
    if kind == "adjoint":
        # rho_G(g) = Tc^-1 Ad_C(g) Tc in frame coordinates of the respective groups
        Tc = complex_tangent(pair)
        return primitive_field(H, "adjoint", Tc @ f.v, f.phi @ np.linalg.inv(Tc), name=f.name)
    return primitive_field(H, kind, f.v, f.phi, recipe.get("params"), name=f.name)


def _sum_parts(f: RepresentativeField, pair: GroupMorphism):
    from .fields import _from_recipe

    parts, coeffs = [], []
    for term in f.recipe["terms"]:
        sub = _from_recipe(f.group, term["field"])
        parts.append(counterpart(sub, pair))
        coeffs.append(complex(*term["coeff"]))
    return parts, coeffs


# ---------------------------------------------------------------- CR residual and shadow


def cauchy_riemann_residual(f: Field, g, method: Optional[DerivMethod] = None) -> float:
    """``max_k |L(i e_k) f(g) - i L(e_k) f(g)|`` on a complex group."""
    G = f.group
    if not G.is_complex:
        raise InvalidArgument("Cauchy-Riemann residuals need a complex group")
    g = groups.require_member(G, g)
    n = G.n_holo
    if method is None:
        method = EXACT if isinstance(f, RepresentativeField) else DerivMethod("fd")
    worst = 0.0
    for k in range(1, n + 1):
        a = lie_derivative(f, (k,), g, method)
        b = lie_derivative(f, (k + n,), g, method)
        worst = max(worst, abs(b - 1j * a))
    return float(worst)


@dataclass(frozen=True)
class ShadowValue:
    value: complex
    tail: float
    tail_kind: str
    warning: Optional[str] = None


def default_shadow_order(d: int) -> int:
    """Order 20 in one variable, otherwise the largest order with at most 10^5 top coefficients."""
    return 20 if d == 1 else int(math.log(1e5) / math.log(d))


def holomorphic_shadow(f: Field, pair: GroupMorphism, zeta, N: Optional[int] = None, probe_radius: float = 1.0,
                       T: Optional[TaylorData] = None) -> ShadowValue:
    """Lie-Taylor series at the identity evaluated at ``(T_e eta)^-1 zeta``."""
    if f.group is not pair.source:
        raise InvalidArgument("field does not live on the source of the pair")
    H = pair.target
    zeta = np.asarray(zeta)
    if zeta.shape == (H.d,) and not np.iscomplexobj(zeta):
        z = frame_coordinates(H, zeta)
    elif zeta.shape == (H.n_holo,):
        z = zeta.astype(complex)
    else:
        raise InvalidArgument(f"expected {H.d} real or {H.n_holo} frame coordinates")
    c = np.linalg.solve(complex_tangent(pair), z)
    if T is None:
        T = taylor_data(f, f.group.identity(), default_shadow_order(f.group.d) if N is None else N)
    val = taylor_eval(T, c)
    tail, kind = taylor_remainder_bound(T, c)
    s = float(np.max(np.abs(c))) if c.size else 0.0
    warning = None if s <= probe_radius else f"coordinates {s:.3g} outside probe radius {probe_radius}"
    return ShadowValue(val, tail, kind, warning)


# ---------------------------------------------------------------- Steiner chains


@dataclass(frozen=True, eq=False)
class SteinerChain:
    path: GroupPath
    indices: tuple  # sample indices of the centers
    r: float

    @property
    def times(self) -> np.ndarray:
        return self.path.times[list(self.indices)]

    @property
    def centers(self) -> np.ndarray:
        return self.path.points[list(self.indices)]

    @property
    def k(self) -> int:
        return len(self.indices) - 1

    def to_json(self) -> dict:
        return {"group": self.path.group.name, "r": self.r, "times": [float(t) for t in self.times],
                "centers": complex_pairs(self.centers)}


def steiner_chain(path: GroupPath, r: float, metric: Optional[MetricModel] = None,
                  margin: float = 0.0) -> SteinerChain:
    """Greedy subdivision: advance while the distance bound from the last center stays <= r (1 - margin)."""
    if not r > 0:
        raise InvalidArgument("chain radius must be positive")
    metric = metric or default_metric(path.group)
    limit = r * (1.0 - margin) + MARGIN_TOL
    pts = path.points
    S = len(pts)
    centers = [0]
    j = 0
    while j < S - 1:
        c = centers[-1]
        if distance_upper_bound(pts[c], pts[j + 1], metric).value > limit:
            if j == c:
                raise ResampleError(f"samples {c} and {c + 1} are farther apart than r = {r}")
            centers.append(j)
            continue
        j += 1
    if centers[-1] != S - 1:
        centers.append(S - 1)
    return SteinerChain(path, tuple(centers), float(r))


def verify_chain(chain: SteinerChain, metric: Optional[MetricModel] = None) -> dict:
    """Certify successive-center distances and sample coverage against the chain radius."""
    metric = metric or default_metric(chain.path.group)
    C = chain.centers
    step = [distance_upper_bound(a, b, metric).value for a, b in zip(C[:-1], C[1:])]
    limit = chain.r + MARGIN_TOL
    covered = True
    idx = list(chain.indices)
    for s, p in enumerate(chain.path.points):
        # each sample belongs to the segment of the latest center at or before it
        c = max(i for i in idx if i <= s)
        if distance_upper_bound(chain.path.points[c], p, metric).value > limit:
            ok = any(distance_upper_bound(chain.path.points[i], p, metric).value <= limit for i in idx)
            covered = covered and ok
    successive = all(v <= limit for v in step)
    return {"successive": successive, "covered": covered, "max_step": max(step) if step else 0.0,
            "k": chain.k, "pass": successive and covered}


# ---------------------------------------------------------------- continuation


@dataclass
class StepRecord:
    index: int
    xi: np.ndarray  # complex frame coordinates of the step
    xi_inf: float
    value: complex
    error_estimate: float
    shift_deviation: Optional[float] = None
    oracle_deviation: Optional[float] = None


@dataclass
class ContinuationState:
    group: GroupModel
    centers: list = field(default_factory=list)
    data: list = field(default_factory=list)  # TaylorData per center (frame directions)
    steps: list = field(default_factory=list)
    cumulative_error: float = 0.0
    mode: str = "exact-recompute"

    @property
    def value(self) -> complex:
        return complex(self.data[-1].coeffs[0][0])

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "mode": self.mode,
            "centers": complex_pairs(np.array(self.centers)),
            "steps": [{"l": s.index, "xi": complex_pairs(s.xi), "xi_norm": s.xi_inf,
                       "value": [s.value.real, s.value.imag], "error_estimate": s.error_estimate,
                       "shift_deviation": s.shift_deviation, "oracle_deviation": s.oracle_deviation}
                      for s in self.steps],
            "cumulative_error": self.cumulative_error,
        }


def _frame_step(H: GroupModel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        xi = groups.log_group(H, np.linalg.solve(a, b))
    except OutOfChart as exc:
        raise ResampleError(f"consecutive centers leave the log chart: {exc}") from exc
    return frame_coordinates(H, xi)


def _frame_taylor(row: np.ndarray, v: np.ndarray, Dc: np.ndarray, N: int, H: GroupModel, center) -> TaylorData:
    V = v.astype(complex)[None]
    coeffs = [V @ row]
    for _ in range(N):
        V = np.einsum("aij,bj->abi", Dc, V).reshape(-1, V.shape[1])
        coeffs.append(V @ row)
    tail = TailModel(float(np.linalg.norm(row) * np.linalg.norm(v)), float(sum(np.linalg.norm(M, 2) for M in Dc)))
    eps = np.finfo(float).eps
    errs = [float(4 * (j + 1) * eps * np.max(np.abs(c))) for j, c in enumerate(coeffs)]
    return TaylorData(H, center, N, coeffs, _frame_directions(H), "exact-frame", errs, None, tail)


def _frame_directions(H: GroupModel) -> np.ndarray:
    n = H.n_holo
    D = np.zeros((n, H.d), dtype=complex)
    D[:, :n] = np.eye(n)
    return D


def _shift_prediction(T: TaylorData, xi: np.ndarray, N: int, K: int):
    n_out = max(0, N - K)
    K_eff = min(K, T.N - n_out)
    S = shift_taylor_data(T, xi, n_out, K_eff)
    return S


def continue_along_path(f: Field, pair: GroupMorphism, path: GroupPath, r: float = DEFAULT_STEP_RADIUS,
                        N: int = 8, K: Optional[int] = None, metric: Optional[MetricModel] = None,
                        budget: float = DEFAULT_BUDGET, mode: Optional[str] = None,
                        initial: Optional[TaylorData] = None) -> ContinuationState:
    """Continue ``f`` from the identity of ``pair.target`` along ``path``.

    ``mode='exact-recompute'`` (default for representative fields) rebuilds exact
    frame data at every center from ``R_l = R_{l-1} expm(drho_C(xi_l))`` and
    records the shift-based prediction and the closed-form counterpart for
    comparison.  ``mode='shift'`` compounds re-expansions of the identity data.
    """
    H = pair.target
    if f.group is not pair.source:
        raise InvalidArgument("field does not live on the source of the pair")
    if path.group is not H:
        raise InvalidArgument(f"path must live in {H.name}")
    if np.max(np.abs(path.start - H.identity())) > 1e-12:
        raise InvalidArgument("continuation paths start at the identity")
    K = N if K is None else K
    if mode is None:
        mode = "exact-recompute" if isinstance(f, RepresentativeField) else "shift"
    chain = steiner_chain(path, r, metric)
    centers = chain.centers
    state = ContinuationState(H, mode=mode)
    if mode == "exact-recompute":
        if not isinstance(f, RepresentativeField):
            raise InvalidArgument("exact recompute needs a representative field")
        Dc = complex_drho(f, pair)
        try:
            oracle = counterpart(f, pair)
        except InvalidArgument:
            oracle = None
        R = f.rho(f.group.identity())
        T = _frame_taylor(f.phi @ R, f.v, Dc, N, H, centers[0])
        state.centers.append(centers[0])
        state.data.append(T)
        for ell in range(1, len(centers)):
            xi = _frame_step(H, centers[ell - 1], centers[ell])
            R = R @ groups.expm(np.tensordot(xi, Dc, axes=(0, 0)))
            T_new = _frame_taylor(f.phi @ R, f.v, Dc, N, H, centers[ell])
            pred = _shift_prediction(T, xi, N, K)
            shift_dev = max(float(np.max(np.abs(pred.coeffs[n] - T_new.coeffs[n]))) for n in range(pred.N + 1))
            oracle_dev = None
            if oracle is not None:
                O = taylor_data(oracle, centers[ell], N, EXACT, directions=_frame_directions(H))
                oracle_dev = max(float(np.max(np.abs(O.coeffs[n] - T_new.coeffs[n]))) for n in range(N + 1))
            err = max(T_new.errors)
            state.cumulative_error += err
            state.steps.append(StepRecord(ell, xi, float(np.max(np.abs(xi))), complex(T_new.coeffs[0][0]),
                                          pred.errors[0], shift_dev, oracle_dev))
            state.centers.append(centers[ell])
            state.data.append(T_new)
            T = T_new
        return state
    if mode != "shift":
        raise InvalidArgument(f"unknown continuation mode {mode!r}")
    steps = len(centers) - 1
    N_in = N + K * steps
    if initial is None:
        initial = frame_identity_data(f, pair, N_in)
    if initial.N < N_in:
        raise InvalidArgument(f"shift continuation needs identity data of order {N_in}")
    T = initial
    state.centers.append(centers[0])
    state.data.append(T)
    for ell in range(1, len(centers)):
        xi = _frame_step(H, centers[ell - 1], centers[ell])
        T = shift_taylor_data(T, xi, T.N - K, K)
        err = T.errors[0]
        state.cumulative_error += err
        state.steps.append(StepRecord(ell, xi, float(np.max(np.abs(xi))), complex(T.coeffs[0][0]), err))
        state.centers.append(centers[ell])
        state.data.append(T)
        if not state.cumulative_error <= budget:
            raise ContinuationDiverged(
                f"truncation estimate {state.cumulative_error:.3g} exceeds budget {budget:.3g} at step {ell}", state)
    return state


def frame_identity_data(f: Field, pair: GroupMorphism, N: int) -> TaylorData:
    """Identity Taylor data of ``f`` re-expressed on the holomorphic frame of ``pair.target``."""
    k = pair.target.n_holo
    if k > 1 and k ** N > DENSE_LIMIT:
        raise Refusal(f"dense data of order {N} over {k} directions is too large ({k ** N:.3g} entries)")
    if isinstance(f, RepresentativeField):
        T = taylor_data(f, f.group.identity(), N, EXACT, directions=frame_in_source(pair))
    elif isinstance(f, BlackBoxField) and f.series is not None and f.group.d == 1:
        a = np.asarray(f.series(f.group.identity(), np.ones(1), N), dtype=complex)
        coeffs = [np.array([a[n] * math.factorial(n)]) for n in range(N + 1)]
        T0 = TaylorData(f.group, f.group.identity(), N, coeffs, None, "series", [0.0] * (N + 1), f)
        T = transform_taylor(T0, frame_in_source(pair))
    else:
        T = transform_taylor(taylor_data(f, f.group.identity(), N), frame_in_source(pair))
    H = pair.target
    return TaylorData(H, H.identity(), T.N, T.coeffs, _frame_directions(H), T.method, T.errors, None, T.tail)


@dataclass(frozen=True)
class ExtensionValue:
    value: complex
    error_estimate: float
    steps: int
    residual_norm: float

    def to_json(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "error_estimate": self.error_estimate,
                "steps": self.steps, "residual_norm": self.residual_norm}


def default_path(H: GroupModel, target) -> GroupPath:
    return GroupPath.to_target(H, target)


def extend_value(f: Field, pair: GroupMorphism, target, path: Optional[GroupPath] = None,
                 r: float = DEFAULT_STEP_RADIUS, N: int = 8, K: Optional[int] = None,
                 metric: Optional[MetricModel] = None, mode: Optional[str] = None) -> ExtensionValue:
    """Value of the holomorphic extension of ``f`` at ``target`` in ``pair.target``."""
    H = pair.target
    target = np.asarray(target, dtype=complex)
    if not groups.is_member(H, target):
        raise InvalidArgument(f"target is not an element of {H.name}")
    if np.max(np.abs(target - H.identity())) == 0.0:
        return ExtensionValue(complex(f.evaluate(f.group.identity())), 0.0, 0, 0.0)
    path = path or default_path(H, target)
    state = continue_along_path(f, pair, path, r, N, K, metric, mode=mode)
    T = state.data[-1]
    off = _frame_step(H, state.centers[-1], target)
    val = taylor_eval(T, off) if T.N > 0 or not np.any(off) else complex(T.coeffs[0][0])
    tail, _ = taylor_remainder_bound(T, off)
    return ExtensionValue(val, state.cumulative_error + tail, len(state.steps), float(np.max(np.abs(off))))


def verify_extension(f: RepresentativeField, pair: GroupMorphism, points: Sequence, N_cmp: int = 3,
                     targets: Sequence = (), r: float = DEFAULT_STEP_RADIUS, N: int = 8) -> dict:
    """Compare C-linearly extended Taylor data of ``f`` at ``g`` with the counterpart's at ``eta(g)``.

    Directions run over the full real basis of the complex group.  Optionally
    compares continuation values with the counterpart at ``targets``.
    """
    Pi = counterpart(f, pair)
    A = frame_in_source(pair)  # rows: f_j in source coordinates
    dirs = np.concatenate([A, 1j * A])  # basis (f_1..f_n, i f_1..i f_n)
    coeff_dev = 0.0
    for g in points:
        Tf = taylor_data(f, g, N_cmp, EXACT, directions=dirs)
        TP = taylor_data(Pi, pair(g), N_cmp, EXACT)
        for a, b in zip(Tf.coeffs, TP.coeffs):
            coeff_dev = max(coeff_dev, float(np.max(np.abs(a - b))))
    value_dev = 0.0
    for tgt in targets:
        ev = extend_value(f, pair, tgt, r=r, N=N)
        value_dev = max(value_dev, abs(ev.value - complex(Pi.evaluate(np.asarray(tgt, dtype=complex)))))
    return {"coefficient_deviation": coeff_dev, "value_deviation": value_dev,
            "points": len(points), "targets": len(targets), "N_cmp": N_cmp}


def path_independence_check(f: Field, pair: GroupMorphism, target, path_a: GroupPath, path_b: GroupPath,
                            r: float = DEFAULT_STEP_RADIUS, N: int = 8, tol: float = 1e-6) -> dict:
    a = extend_value(f, pair, target, path_a, r, N)
    b = extend_value(f, pair, target, path_b, r, N)
    diff = abs(a.value - b.value)
    allowed = max(tol, a.error_estimate + b.error_estimate)
    return {"value_a": [a.value.real, a.value.imag], "value_b": [b.value.real, b.value.imag],
            "difference": diff, "allowed": allowed, "pass": diff <= allowed}


def periodicity_check(f: Field, z: complex, shift: int = 1, r: float = DEFAULT_STEP_RADIUS, N: int = 8,
                      tol: float = 1e-8) -> dict:
    """Continue the pullback of ``f`` (on U(1)) along R -> U(1) to ``z`` and ``z + shift`` in C."""
    cover = groups.get_morphism("p")
    if f.group is not cover.target:
        raise InvalidArgument("periodicity checks take a field on U1")
    psi = pullback_field(cover, f)
    pair = groups.complexification_of(cover.source)
    H = pair.target
    vals = []
    for w in (complex(z), complex(z) + shift):
        target = H.identity().copy()
        target[0, 1] = w
        ev = extend_value(psi, pair, target, GroupPath.from_segments(H, [np.array([w])]), r, N)
        vals.append(ev)
    diff = abs(vals[0].value - vals[1].value)
    allowed = max(tol, vals[0].error_estimate + vals[1].error_estimate)
    return {"z": [complex(z).real, complex(z).imag], "shift": shift,
            "value_z": [vals[0].value.real, vals[0].value.imag],
            "value_shifted": [vals[1].value.real, vals[1].value.imag],
            "difference": diff, "allowed": allowed, "pass": diff <= allowed}


__all__ = [
    "complex_tangent", "frame_in_source", "complex_drho", "counterpart", "cauchy_riemann_residual",
    "ShadowValue", "holomorphic_shadow", "SteinerChain", "steiner_chain", "verify_chain", "StepRecord",
    "ContinuationState", "continue_along_path", "frame_identity_data", "ExtensionValue", "default_path",
    "extend_value", "verify_extension", "path_independence_check", "periodicity_check",
]
