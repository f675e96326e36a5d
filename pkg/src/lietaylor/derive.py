"""Iterated left-invariant derivatives and assembly of Lie-Taylor data.

Three methods are offered:

* ``exact``: products of ``drho`` matrices (representative fields only);
* ``cauchy``: nested trapezoid Cauchy integrals on circles in each complex
  variable ``z_j`` of ``g exp(z_1 X_1) ... exp(z_n X_n)`` (holomorphic fields
  on complex groups);
* ``fd``: nested central differences with Richardson extrapolation, n <= 3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import groups
from .errors import InvalidArgument, Refusal, UnsupportedMethod
from .fields import BlackBoxField, Field, RepresentativeField
from .taylor import TaylorData, TailModel

EPS = np.finfo(float).eps
_CHUNK = 1 << 16
DENSE_LIMIT = 4_000_000  # largest order-N block k**N built densely


@dataclass(frozen=True)
class DerivMethod:
    kind: str = "exact"  # exact | cauchy | fd
    nodes: int = 32
    radius: float = 0.5
    step: float = 1e-2
    levels: int = 3
    n_max: int = 8

    def __post_init__(self):
        if self.kind not in ("exact", "cauchy", "fd"):
            raise InvalidArgument(f"unknown derivative method {self.kind!r}")
        if self.nodes < 8 or self.nodes & (self.nodes - 1):
            raise InvalidArgument("quadrature node count must be a power of two >= 8")
        if not self.radius > 0 or not self.step > 0:
            raise InvalidArgument("quadrature radius and step must be positive")
        if self.levels < 1:
            raise InvalidArgument("Richardson levels must be >= 1")

    @property
    def label(self) -> str:
        if self.kind == "cauchy":
            return f"cauchy(M={self.nodes},rho={self.radius!r})"
        if self.kind == "fd":
            return f"fd(h={self.step!r},levels={self.levels})"
        return "exact"


EXACT = DerivMethod("exact")


def default_method(f: Field) -> DerivMethod:
    if isinstance(f, RepresentativeField):
        return EXACT
    if f.regularity == "holomorphic" and f.group.is_complex:
        return DerivMethod("cauchy")
    return DerivMethod("fd")


def enumerate_multiindices(d: int, n: int) -> list[tuple[int, ...]]:
    """All words of length ``n`` over ``1..d`` in lexicographic order."""
    if n < 0:
        raise InvalidArgument("order must be nonnegative")
    if d <= 0:
        return [()] if n == 0 else []
    return list(itertools.product(range(1, d + 1), repeat=n))


def _direction_matrix(G: groups.GroupModel, directions) -> np.ndarray:
    if directions is None:
        return np.eye(G.d, dtype=complex)
    D = np.atleast_2d(np.asarray(directions, dtype=complex))
    if D.shape[1] != G.d:
        raise InvalidArgument(f"directions must have {G.d} coordinates")
    return D


def _check_alpha(alpha: Sequence[int], k: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    for a in alpha:
        if not 1 <= a <= k:
            raise InvalidArgument(f"multi-index entry {a} outside 1..{k}")
    return alpha


def _check_method(f: Field, method: DerivMethod, n: int):
    if n > method.n_max:
        evals = method.nodes ** n if method.kind == "cauchy" else (2 * method.levels) ** n
        raise Refusal(f"order {n} exceeds N_max={method.n_max} (cost estimate ~{evals:.3g} field evaluations)")
    if method.kind == "exact" and not isinstance(f, RepresentativeField):
        raise UnsupportedMethod("exact derivatives need a representative field")
    if method.kind == "cauchy" and not (f.regularity == "holomorphic" and f.group.is_complex):
        raise UnsupportedMethod("Cauchy quadrature needs a holomorphic field on a complex group")
    if method.kind == "fd" and n > 3:
        raise UnsupportedMethod("finite differences are limited to order 3")


def lie_derivative(f: Field, alpha: Sequence[int], g, method: DerivMethod = EXACT, directions=None) -> complex:
    """``L(X_{alpha_1}) ... L(X_{alpha_n}) f (g)`` with the last factor applied first.

    ``X_j`` is the basis element ``e_j`` or, when ``directions`` is given,
    the algebra element with (possibly complex) coordinates ``directions[j-1]``.
    """
    G = f.group
    g = groups.require_member(G, g)
    D = _direction_matrix(G, directions)
    alpha = _check_alpha(alpha, D.shape[0])
    _check_method(f, method, len(alpha))
    X = [G.algebra_element(D[a - 1]) for a in alpha]
    if method.kind == "exact":
        vec = f.v.astype(complex)
        for a in reversed(alpha):
            vec = f.drho_of(D[a - 1]) @ vec
        return complex(f.phi @ f.rho(g) @ vec)
    if not alpha:
        return complex(f.evaluate(g))
    if method.kind == "cauchy":
        return _cauchy(f, g, X, method)[0]
    if np.max(np.abs(D.imag)) > 0 and not G.is_complex:
        raise UnsupportedMethod("finite differences need real directions on a real group")
    return _finite_difference(f, g, X, method)


def _cauchy(f: Field, g: np.ndarray, X: list[np.ndarray], method: DerivMethod) -> tuple[complex, float]:
    """Nested trapezoid rule; returns value and a roundoff-based error estimate."""
    M = method.nodes
    n = len(X)
    omega = np.exp(2j * math.pi * np.arange(M) / M)
    # the radius is measured in operator norm of z X so that scaled bases (2 pi i) stay well resolved
    rhos = [method.radius / max(1.0, groups.op_norm(Xj)) for Xj in X]
    zs = [r * omega for r in rhos]
    ws = [1.0 / (M * z) for z in zs]
    # factors exp(z_k X_j), shape (M, m, m)
    facs = [groups.expm(z[:, None, None] * Xj[None]) for z, Xj in zip(zs, X)]
    # prefix products over the first n-1 variables are built chunk by chunk
    P = g[None]
    for F in facs[:-1]:
        P = (P[:, None] @ F[None]).reshape(-1, g.shape[0], g.shape[1])
    last = facs[-1]
    W_prefix = np.ones(1, dtype=complex)
    for w in ws[:-1]:
        W_prefix = np.multiply.outer(W_prefix, w).ravel()
    w = ws[-1]
    total_re, total_im, fmax = [], [], 0.0
    step = max(1, _CHUNK // M)
    for s in range(0, P.shape[0], step):
        block = (P[s:s + step, None] @ last[None])  # (b, M, m, m)
        vals = f.evaluate(block)  # (b, M)
        fmax = max(fmax, float(np.max(np.abs(vals))))
        contrib = (vals @ w) * W_prefix[s:s + step]
        total_re.append(contrib.real)
        total_im.append(contrib.imag)
    val = complex(math.fsum(np.concatenate(total_re)), math.fsum(np.concatenate(total_im)))
    err = 10.0 * EPS * fmax * math.prod(1.0 / r for r in rhos) * n
    return val, err


def _finite_difference(f: Field, g: np.ndarray, X: list[np.ndarray], method: DerivMethod) -> complex:
    h0, levels = method.step, method.levels

    def value(ts):
        h = g
        for t, Xj in zip(ts, X):
            h = h @ groups.expm(t * Xj)
        return complex(f.evaluate(h))

    def deriv(prefix: tuple[float, ...]) -> complex:
        j = len(prefix)
        if j == len(X):
            return value(prefix)
        # Richardson table on central differences with steps h0 / 2^l
        table = []
        for lvl in range(levels):
            h = h0 / 2 ** lvl
            table.append((deriv(prefix + (h,)) - deriv(prefix + (-h,))) / (2 * h))
        for col in range(1, levels):
            fac = 4.0 ** col
            table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
        return table[0]

    return deriv(())


def taylor_data(f: Field, g, N: int, method: Optional[DerivMethod] = None, directions=None) -> TaylorData:
    """All derivatives of order <= N at ``g`` in lexicographic per-order layout."""
    G = f.group
    g = groups.require_member(G, g)
    D = _direction_matrix(G, directions)
    k = D.shape[0]
    if N < 0:
        raise InvalidArgument("truncation order must be nonnegative")
    if k > 1 and k ** N > DENSE_LIMIT:
        raise Refusal(f"dense data of order {N} over {k} directions is too large ({k ** N:.3g} entries)")
    if method is None and k == 1 and isinstance(f, BlackBoxField) and f.series is not None:
        # closed-form one-variable series: L_xi^n f(g) = n! a_n
        a = np.asarray(f.series(g, D[0], N), dtype=complex)
        coeffs = [np.array([a[n] * math.factorial(n)]) for n in range(N + 1)]
        return TaylorData(G, g, N, coeffs, None if directions is None else D, "series", [0.0] * (N + 1), f)
    method = method or default_method(f)
    if method.kind == "exact":
        _check_method(f, method, 0)
        return _exact_taylor(f, g, N, D, directions)
    coeffs, errors = [np.array([complex(f.evaluate(g))])], [0.0]
    for n in range(1, N + 1):
        _check_method(f, method, n)
        block = np.empty(k ** n, dtype=complex)
        err = 0.0
        for i, alpha in enumerate(enumerate_multiindices(k, n)):
            X = [G.algebra_element(D[a - 1]) for a in alpha]
            if method.kind == "cauchy":
                block[i], e = _cauchy(f, g, X, method)
                err = max(err, e)
            else:
                block[i] = _finite_difference(f, g, X, method)
        if method.kind == "fd":
            scale = float(np.max(np.abs(block))) if block.size else 0.0
            err = max(1e-6, 1e3 * EPS / method.step ** n) * max(1.0, scale)
        coeffs.append(block)
        errors.append(err)
    return TaylorData(G, g, N, coeffs, None if directions is None else D, method.label, errors, f)


def _exact_taylor(f: RepresentativeField, g, N, D, directions) -> TaylorData:
    G = f.group
    Dr = np.tensordot(D, f.drho, axes=(1, 0))  # (k, Nrep, Nrep)
    row = f.phi @ f.rho(g)  # covector phi . rho(g)
    V = f.v.astype(complex)[None]  # (k^n, Nrep)
    coeffs = [V @ row]
    errors = [0.0]
    vnorm = float(np.linalg.norm(f.v))
    for n in range(1, N + 1):
        V = np.einsum("aij,bj->abi", Dr, V).reshape(-1, V.shape[1])
        block = V @ row
        coeffs.append(block)
        errors.append(float(4 * n * EPS * np.max(np.abs(block))) if block.size else 0.0)
    tail = TailModel(float(np.linalg.norm(row)) * vnorm, float(sum(np.linalg.norm(M, 2) for M in Dr)))
    return TaylorData(G, g, N, coeffs, None if directions is None else D, "exact", errors, f, tail)


def one_variable_coefficients(f: Field, g, xi, K: int) -> tuple[np.ndarray, str]:
    """``a_k = L_xi^k f(g) / k!`` for ``k <= K`` and the route used."""
    G = f.group
    g = groups.require_member(G, g)
    xi = np.asarray(xi, dtype=complex)
    if isinstance(f, RepresentativeField):
        Dx = f.drho_of(xi)
        row = f.phi @ f.rho(g)
        vec = f.v.astype(complex)
        out = np.empty(K + 1, dtype=complex)
        for k in range(K + 1):
            out[k] = row @ vec  # vec = Dx^k v / k!, scaled as we go so large k cannot overflow
            vec = Dx @ vec / (k + 1)
        return out, "exact"
    if isinstance(f, BlackBoxField) and f.series is not None:
        return np.asarray(f.series(g, xi, K), dtype=complex), "series"
    # one complex variable t -> f(g exp(t X)); FFT of samples on a circle
    X = G.algebra_element(xi)
    M = max(64, 2 * (K + 1))
    M = 1 << (M - 1).bit_length()
    rho = 0.5
    t = rho * np.exp(2j * math.pi * np.arange(M) / M)
    vals = f.evaluate(g[None] @ groups.expm(t[:, None, None] * X[None]))
    a = np.fft.fft(vals) / M
    return a[: K + 1] / rho ** np.arange(K + 1), "cauchy-fft"


@dataclass(frozen=True)
class RadiusEstimate:
    radius: float
    root: float
    route: str
    heuristic: bool = True


def radius_estimate(f: Field, g, xi, K: int = 30) -> RadiusEstimate:
    """Cauchy-Hadamard probe on ``a_k`` over the window ``k <= K`` (heuristic)."""
    if K < 3:
        raise InvalidArgument("probe order must be at least 3")
    a, route = one_variable_coefficients(f, g, xi, K)
    mags = np.abs(a)
    scale = max(float(np.max(mags)), 1e-300)
    roots = np.zeros(K + 1)
    for k in range(1, K + 1):
        if mags[k] > 1e-15 * scale:
            roots[k] = mags[k] ** (1.0 / k)
    late = roots[max(1, (2 * K) // 3):].max()
    mid = roots[max(1, K // 3):max(2, (2 * K) // 3)].max()
    if late < 1e-12 or (mid > 0 and late / mid < 0.75):
        return RadiusEstimate(math.inf, float(late), route)
    return RadiusEstimate(1.0 / late, float(late), route)


def transform_taylor(T: TaylorData, A) -> TaylorData:
    """Re-express Taylor data in new directions ``Y_j = sum_i A[j, i] X_i`` (multilinear)."""
    A = np.asarray(A, dtype=complex)
    k_old = T.k
    if A.shape[1] != k_old:
        raise InvalidArgument("direction transform has the wrong width")
    new = []
    for n, block in enumerate(T.coeffs):
        t = block.reshape((k_old,) * n) if n else block.reshape(())
        for _ in range(n):
            # contract the leading old axis and append the new axis at the end
            t = np.tensordot(t, A, axes=([0], [1]))
        new.append(np.asarray(t).reshape(-1))
    D_old = T.direction_matrix
    return TaylorData(T.group, T.base, T.N, new, A @ D_old, T.method, list(T.errors), T.field, None)


__all__ = [
    "DerivMethod", "EXACT", "default_method", "enumerate_multiindices", "lie_derivative", "taylor_data",
    "one_variable_coefficients", "RadiusEstimate", "radius_estimate", "transform_taylor",
]
