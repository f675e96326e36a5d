"""Matrix Lie groups, exponential charts, morphisms and the curated registry.

Every group is realized inside ``GL(m, C)``.  A Lie algebra element is stored
as a real coordinate vector with respect to the fixed basis ``G.basis``; for
complex groups the basis has the shape ``(e_1..e_n, i e_1..i e_n)``, so the
first ``n`` basis elements form the holomorphic frame.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import DomainError, InvalidArgument, NotFound, OutOfChart

TWO_PI = 2.0 * math.pi
DEFAULT_MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GroupModel:
    name: str
    basis: np.ndarray  # (d, m, m) complex
    membership: str  # predicate kind, see ``MEMBERSHIP``
    is_complex: bool = False
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL
    complexification: Optional[str] = None  # name of the registered morphism G -> G_C

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def m(self) -> int:
        return self.basis.shape[1]

    @property
    def n_holo(self) -> int:
        """Complex dimension (size of the holomorphic frame) for complex groups."""
        return self.d // 2 if self.is_complex else self.d

    @cached_property
    def _design(self) -> np.ndarray:
        flat = self.basis.reshape(self.d, -1)
        return np.concatenate([flat.real, flat.imag], axis=1).T  # (2 m^2, d)

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self._design)

    @cached_property
    def frame(self) -> np.ndarray:
        """Complex frame used for representations: holomorphic half or full basis."""
        return self.basis[: self.n_holo]

    @cached_property
    def _frame_pinv(self) -> np.ndarray:
        return np.linalg.pinv(self.frame.reshape(self.n_holo, -1).T)

    def algebra_element(self, coeffs) -> np.ndarray:
        """``sum_k coeffs[k] e_k``; complex coefficients give the C-linear extension."""
        coeffs = np.asarray(coeffs)
        if coeffs.shape[-1] != self.d:
            raise InvalidArgument(f"{self.name}: expected {self.d} coordinates, got {coeffs.shape[-1]}")
        return np.tensordot(coeffs, self.basis, axes=(-1, 0))

    def coordinates(self, X: np.ndarray) -> tuple[np.ndarray, float]:
        """Real coordinates of an algebra matrix and the projection residual."""
        X = np.asarray(X, dtype=complex)
        flat = X.reshape(X.shape[:-2] + (-1,))
        rhs = np.concatenate([flat.real, flat.imag], axis=-1)
        coords = rhs @ self._pinv.T
        resid = rhs - coords @ self._design.T
        return coords, float(np.max(np.abs(resid))) if resid.size else 0.0

    def frame_coordinates(self, X: np.ndarray) -> np.ndarray:
        """Complex coordinates in the representation frame (C-linear projection)."""
        X = np.asarray(X, dtype=complex)
        flat = X.reshape(X.shape[:-2] + (-1,))
        return flat @ self._frame_pinv.T

    def identity(self) -> np.ndarray:
        return np.eye(self.m, dtype=complex)


@dataclass(frozen=True, eq=False)
class GroupMorphism:
    name: str
    source: GroupModel
    target: GroupModel
    element_map: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    tangent_map: np.ndarray = field(repr=False)  # (target.d, source.d) real

    def __call__(self, g):
        return self.element_map(np.asarray(g, dtype=complex))

    def push(self, xi) -> np.ndarray:
        return np.asarray(self.tangent_map) @ np.asarray(xi)


# ---------------------------------------------------------------- membership


def _scale(g: np.ndarray) -> float:
    # condition-style scale so that long products keep passing
    try:
        return max(1.0, op_norm(g) * op_norm(np.linalg.inv(g)))
    except np.linalg.LinAlgError:
        return math.inf


def _det_one(g, tol):
    return abs(np.linalg.det(g) - 1.0) <= tol


def _unitary(g, tol):
    return np.max(np.abs(g @ g.conj().T - np.eye(g.shape[0]))) <= tol


def _unipotent_translation(g, tol):
    m = g.shape[0]
    off = g.copy()
    off[:, m - 1] = 0.0
    return np.max(np.abs(off - np.diag(np.r_[np.ones(m - 1), 0.0]))) <= tol and abs(g[m - 1, m - 1] - 1) <= tol


MEMBERSHIP: dict[str, Callable[[np.ndarray, float], bool]] = {
    "SL": _det_one,
    "SL-real": lambda g, tol: _det_one(g, tol) and np.max(np.abs(g.imag)) <= tol,
    "SU": lambda g, tol: _det_one(g, tol) and _unitary(g, tol),
    "U1": lambda g, tol: abs(g[0, 0] * np.conj(g[0, 0]) - 1.0) <= tol,
    "Ctimes": lambda g, tol: abs(g[0, 0]) > 0.0,
    "vector-real": lambda g, tol: _unipotent_translation(g, tol) and np.max(np.abs(g.imag)) <= tol,
    "vector": _unipotent_translation,
}


def is_member(G: GroupModel, g, tol: Optional[float] = None) -> bool:
    g = np.asarray(g, dtype=complex)
    if g.shape != (G.m, G.m) or not np.all(np.isfinite(g)):
        return False
    scale = _scale(g)
    if not math.isfinite(scale):
        return False
    return bool(MEMBERSHIP[G.membership](g, (tol or G.membership_tol) * scale))


def require_member(G: GroupModel, g) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if not is_member(G, g):
        raise DomainError(f"element is not in {G.name}")
    return g


# ---------------------------------------------------------------- charts


def op_norm(M) -> float:
    """Spectral operator norm; a scalar is treated as a 1x1 matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return float(np.linalg.norm(M, 2))


def expm(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape[-1] == 1:
        return np.exp(X)
    return scipy.linalg.expm(X)


def exp_group(G: GroupModel, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (G.d,):
        raise InvalidArgument(f"{G.name}: coordinate vector must have length {G.d}")
    if not np.all(np.isfinite(xi)):
        raise InvalidArgument("non-finite Lie algebra coordinates")
    return expm(G.algebra_element(xi))


def check_log_domain(g: np.ndarray, tol: float = 1e-12) -> None:
    """Raise ``OutOfChart`` when the spectrum touches the closed negative axis."""
    for lam in np.linalg.eigvals(g):
        if lam.real <= 0.0 and abs(lam.imag) <= tol * max(1.0, abs(lam)):
            raise OutOfChart(f"eigenvalue {lam:.6g} lies on the branch cut (-inf, 0]")


def _logm2(g: np.ndarray) -> np.ndarray:
    """Closed form ``log g = log(l1) I + f[l1, l2] (g - l1 I)`` (Newton divided difference)."""
    a = 0.5 * (g[0, 0] + g[1, 1])
    disc = np.sqrt(a * a - (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]))
    l1, l2 = a + disc, a - disc
    for lam in (l1, l2):
        if lam.real <= 0.0 and abs(lam.imag) <= 1e-12 * max(1.0, abs(lam)):
            raise OutOfChart(f"eigenvalue {lam:.6g} lies on the branch cut (-inf, 0]")
    diff = l1 - l2
    if abs(diff) > 1e-3 * abs(a):
        dd = (np.log(l1) - np.log(l2)) / diff
    else:
        # log(1+u)/u series with u = diff / l2, |u| < ~1e-3
        u = diff / l2
        dd = (1 - u / 2 + u ** 2 / 3 - u ** 3 / 4 + u ** 4 / 5 - u ** 5 / 6 + u ** 6 / 7) / l2
    return np.log(l1) * np.eye(2) + dd * (g - l1 * np.eye(2))


def logm(g: np.ndarray) -> np.ndarray:
    """Principal logarithm.

    Well-conditioned diagonalizable inputs go through the eigendecomposition;
    everything else through scipy's inverse scaling-and-squaring.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape == (1, 1):
        check_log_domain(g)
        return np.log(g)
    if g.shape == (2, 2):
        return _logm2(g)
    N = g - np.eye(g.shape[0])
    if np.max(np.abs(N @ N)) <= 1e-15 * max(1.0, float(np.max(np.abs(N)))) ** 2:
        return N  # unipotent of step two: log(I + N) = N
    w, V = np.linalg.eig(g)
    for lam in w:
        if lam.real <= 0.0 and abs(lam.imag) <= 1e-12 * max(1.0, abs(lam)):
            raise OutOfChart(f"eigenvalue {lam:.6g} lies on the branch cut (-inf, 0]")
    if np.linalg.cond(V) < 1e3:
        return (V * np.log(w)) @ np.linalg.inv(V)
    return np.asarray(scipy.linalg.logm(g), dtype=complex)


def log_group(G: GroupModel, g, tol: float = 1e-8) -> np.ndarray:
    """Real coordinates of the principal logarithm of ``g``."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (G.m, G.m):
        raise InvalidArgument(f"{G.name}: expected a {G.m}x{G.m} matrix")
    X = logm(g)
    coords, resid = G.coordinates(X)
    if resid > tol * max(1.0, float(np.max(np.abs(X)))):
        raise OutOfChart(f"principal logarithm leaves the Lie algebra of {G.name} (residual {resid:.3g})")
    return coords


# ---------------------------------------------------------------- validation


def validate_group(G: GroupModel, tol: float = 1e-9) -> list[str]:
    """Return a list of violated structural invariants (empty when valid)."""
    problems = []
    A = G._design
    gram = A.T @ A
    if np.linalg.cond(gram) > 1.0 / tol:
        problems.append("basis is not linearly independent over R")
    for i in range(G.d):
        for j in range(i + 1, G.d):
            br = G.basis[i] @ G.basis[j] - G.basis[j] @ G.basis[i]
            _, resid = G.coordinates(br)
            if resid > G.membership_tol:
                problems.append(f"[e_{i + 1}, e_{j + 1}] leaves the span")
    for k in range(G.d):
        for t in (-0.5, -0.1, 0.1, 0.5):
            xi = np.zeros(G.d)
            xi[k] = t
            if not is_member(G, exp_group(G, xi)):
                problems.append(f"exp({t} e_{k + 1}) fails membership")
    if G.is_complex:
        n = G.d // 2
        if G.d % 2 or not np.allclose(G.basis[n:], 1j * G.basis[:n], atol=tol):
            problems.append("complex basis is not of the form (e, i e)")
    return problems


def morphism_defect(phi: GroupMorphism, xis: np.ndarray) -> float:
    """max over samples of |Phi(exp xi) - exp(T Phi xi)|, plus |Phi(E) - E|."""
    worst = float(np.max(np.abs(phi(phi.source.identity()) - phi.target.identity())))
    for xi in np.atleast_2d(xis):
        lhs = phi(exp_group(phi.source, xi))
        rhs = exp_group(phi.target, phi.push(xi))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------- registry

_H = np.array([[1, 0], [0, -1]], dtype=complex)
_E = np.array([[0, 1], [0, 0]], dtype=complex)
_F = np.array([[0, 0], [1, 0]], dtype=complex)


def _sl2_basis():
    return np.stack([_H, _E, _F])


def _vector_basis(n: int) -> np.ndarray:
    basis = np.zeros((n, n + 1, n + 1), dtype=complex)
    for k in range(n):
        basis[k, k, n] = 1.0
    return basis


def _complexify_basis(basis: np.ndarray) -> np.ndarray:
    return np.concatenate([basis, 1j * basis])


def _inclusion(g):
    return np.asarray(g, dtype=complex)


def _covering(g):
    g = np.asarray(g, dtype=complex)
    return np.exp(TWO_PI * 1j * g[..., 0:1, 1:2])


_NAME_RE = re.compile(r"^(?:(R|C)d\((\d+)\)|(R|C)(\d+))$")


def canonical_name(name: str) -> str:
    m = _NAME_RE.match(name)
    if m:
        letter = m.group(1) or m.group(3)
        n = int(m.group(2) or m.group(4))
        if n < 1:
            raise NotFound(f"unknown group {name!r}")
        return f"{letter}{n}"
    if name in {"U1", "Ctimes", "SL2R", "SL2C", "SU2"}:
        return name
    raise NotFound(f"unknown group {name!r}")


@lru_cache(maxsize=None)
def _build(name: str) -> GroupModel:
    m = _NAME_RE.match(name)
    if name == "U1":
        G = GroupModel("U1", np.array([[[TWO_PI * 1j]]]), "U1", complexification="eta_U1")
    elif name == "Ctimes":
        G = GroupModel("Ctimes", _complexify_basis(np.array([[[TWO_PI * 1j]]])), "Ctimes", is_complex=True)
    elif name == "SL2R":
        G = GroupModel("SL2R", _sl2_basis(), "SL-real", complexification="iota_SL2R")
    elif name == "SL2C":
        G = GroupModel("SL2C", _complexify_basis(_sl2_basis()), "SL", is_complex=True)
    elif name == "SU2":
        su2 = np.stack([1j * _H, _E - _F, 1j * (_E + _F)])
        G = GroupModel("SU2", su2, "SU", complexification="iota_SU2")
    elif m and (m.group(1) or m.group(3)) == "R":
        n = int(m.group(2) or m.group(4))
        G = GroupModel(name, _vector_basis(n), "vector-real", complexification=f"eta_R{n}")
    elif m:
        n = int(m.group(2) or m.group(4))
        G = GroupModel(name, _complexify_basis(_vector_basis(n)), "vector", is_complex=True)
    else:  # pragma: no cover - guarded by canonical_name
        raise NotFound(name)
    problems = validate_group(G)
    if problems:
        raise AssertionError(f"registry group {name} invalid: {problems}")
    return G


def registry_get(name: str) -> GroupModel:
    """Validated registry group by name (``U1, Ctimes, Rd(n), Cd(n), SL2R, SL2C, SU2``)."""
    return _build(canonical_name(name))


def _inclusion_morphism(mname: str, src: str, tgt: str) -> GroupMorphism:
    S, T = registry_get(src), registry_get(tgt)
    tangent = np.stack([T.coordinates(X)[0] for X in S.basis], axis=1)
    return GroupMorphism(mname, S, T, _inclusion, tangent)


@lru_cache(maxsize=None)
def get_morphism(name: str) -> GroupMorphism:
    """Registered morphisms: complexification links and the coverings R1 -> U1, C1 -> Ctimes."""
    if name == "eta_U1":
        return _inclusion_morphism(name, "U1", "Ctimes")
    if name == "iota_SL2R":
        return _inclusion_morphism(name, "SL2R", "SL2C")
    if name == "iota_SU2":
        return _inclusion_morphism(name, "SU2", "SL2C")
    if name == "p":
        return GroupMorphism(name, registry_get("R1"), registry_get("U1"), _covering, np.eye(1))
    if name == "p_C":
        return GroupMorphism(name, registry_get("C1"), registry_get("Ctimes"), _covering, np.eye(2))
    m = re.match(r"^eta_R(\d+)$", name)
    if m:
        n = int(m.group(1))
        return _inclusion_morphism(name, f"R{n}", f"C{n}")
    raise NotFound(f"unknown morphism {name!r}")


REGISTERED_GROUPS = ("U1", "Ctimes", "R1", "R2", "R3", "C1", "C2", "C3", "SL2R", "SL2C", "SU2")
REGISTERED_MORPHISMS = ("eta_U1", "iota_SL2R", "iota_SU2", "p", "p_C", "eta_R1", "eta_R2", "eta_R3")


def complexification_of(G: GroupModel) -> GroupMorphism:
    if G.complexification is None:
        raise NotFound(f"{G.name} has no registered complexification")
    return get_morphism(G.complexification)


def morphisms_from(name: str) -> list[GroupMorphism]:
    G = registry_get(name)
    names = list(REGISTERED_MORPHISMS)
    if G.complexification and G.complexification not in names:
        names.append(G.complexification)
    return [get_morphism(k) for k in names if get_morphism(k).source.name == G.name]


# ---------------------------------------------------------------- JSON


def _complex_pairs(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_complex_pairs(x) for x in a]


def _from_pairs(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def group_to_json(G: GroupModel) -> dict:
    return {
        "name": G.name,
        "d": G.d,
        "m": G.m,
        "is_complex": G.is_complex,
        "membership": G.membership,
        "membership_tol": G.membership_tol,
        "basis": _complex_pairs(G.basis),
        "complexification": None if G.complexification is None else complexification_of(G).target.name,
        "morphisms": [
            {"name": p.name, "source": p.source.name, "target": p.target.name,
             "tangent_map": np.asarray(p.tangent_map, dtype=float).tolist()}
            for p in morphisms_from(G.name)
        ],
    }


def group_from_json(obj: dict) -> GroupModel:
    basis = _from_pairs(obj["basis"])
    if basis.shape != (obj["d"], obj["m"], obj["m"]):
        raise InvalidArgument("basis shape does not match d and m")
    link = None
    for p in obj.get("morphisms", []):
        if obj.get("complexification") and p["target"] == obj["complexification"]:
            link = p["name"]
    return GroupModel(obj["name"], basis, obj["membership"], bool(obj["is_complex"]),
                      float(obj.get("membership_tol", DEFAULT_MEMBERSHIP_TOL)), link)


complex_pairs = _complex_pairs
from_pairs = _from_pairs
