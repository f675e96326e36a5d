"""Lie-Taylor data, majorant series, seminorms and re-expansion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import groups
from .errors import InvalidArgument
from .groups import GroupModel, complex_pairs, from_pairs


@dataclass(frozen=True)
class TailModel:
    """Certified coefficient bound ``sum_{|alpha|=n} |T(alpha)| <= A delta^n``."""

    A: float
    delta: float

    def majorant_tail(self, r: float, N: int) -> float:
        """``sum_{n>N} A (delta r)^n / n!``."""
        return self.A * _exp_tail(self.delta * r, N)


def _exp_tail(x: float, N: int) -> float:
    """``sum_{n>N} x^n/n!`` for ``x >= 0`` without cancellation."""
    if x <= 0.0:
        return 0.0
    if x > N / 2 + 5:
        # tail dominated by the bulk; exp minus head, both moderate here
        head = math.fsum(x ** n / math.factorial(n) for n in range(N + 1))
        return max(math.exp(x) - head, 0.0) if x < 700 else math.inf
    term = x ** (N + 1) / math.factorial(N + 1)
    total, n = 0.0, N + 1
    while term > 1e-300 and term > 1e-18 * total:
        total += term
        n += 1
        term *= x / n
    return total


@dataclass(frozen=True, eq=False)
class TaylorData:
    group: GroupModel
    base: np.ndarray
    N: int
    coeffs: list  # order n -> array of k^n complex values, lexicographic
    directions: Optional[np.ndarray] = None  # (k, d) complex; None means the basis
    method: str = "exact"
    errors: list = field(default_factory=list)
    field: object = field(default=None, repr=False)
    tail: Optional[TailModel] = None

    def __post_init__(self):
        k = self.k
        for n, block in enumerate(self.coeffs):
            if np.asarray(block).shape != (k ** n,):
                raise InvalidArgument(f"order-{n} block must hold {k ** n} entries")
        if len(self.coeffs) != self.N + 1:
            raise InvalidArgument("coefficient list length must be N + 1")

    @property
    def k(self) -> int:
        return self.group.d if self.directions is None else self.directions.shape[0]

    @property
    def direction_matrix(self) -> np.ndarray:
        return np.eye(self.group.d, dtype=complex) if self.directions is None else self.directions

    def __getitem__(self, alpha) -> complex:
        alpha = tuple(alpha)
        idx = 0
        for a in alpha:
            if not 1 <= a <= self.k:
                raise InvalidArgument(f"multi-index entry {a} outside 1..{self.k}")
            idx = idx * self.k + (a - 1)
        return complex(self.coeffs[len(alpha)][idx])

    def truncate(self, N: int) -> "TaylorData":
        if N > self.N:
            raise InvalidArgument(f"cannot truncate order {self.N} data to {N}")
        return TaylorData(self.group, self.base, N, self.coeffs[:N + 1], self.directions, self.method,
                          list(self.errors[:N + 1]), self.field, self.tail)

    def scaled(self, a: complex) -> "TaylorData":
        tail = None if self.tail is None else TailModel(abs(a) * self.tail.A, self.tail.delta)
        return TaylorData(self.group, self.base, self.N, [a * c for c in self.coeffs], self.directions,
                          self.method, [abs(a) * e for e in self.errors], None, tail)

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "g": complex_pairs(self.base),
            "N": self.N,
            "method": self.method,
            "directions": None if self.directions is None else complex_pairs(self.directions),
            "coefficients": [complex_pairs(c) for c in self.coeffs],
            "errors": [float(e) for e in self.errors],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TaylorData":
        G = groups.registry_get(obj["group"])
        dirs = obj.get("directions")
        return cls(G, from_pairs(obj["g"]), int(obj["N"]), [from_pairs(c).reshape(-1) for c in obj["coefficients"]],
                   None if dirs is None else from_pairs(dirs), obj.get("method", "exact"),
                   list(obj.get("errors", [])))


def combine(a: complex, T: TaylorData, b: complex, S: TaylorData) -> TaylorData:
    """Entrywise ``a T + b S`` of data at the same point and order."""
    if T.N != S.N or T.k != S.k:
        raise InvalidArgument("Taylor data of different shapes")
    tail = None
    if T.tail is not None and S.tail is not None:
        delta = max(T.tail.delta, S.tail.delta)
        tail = TailModel(abs(a) * T.tail.A + abs(b) * S.tail.A, delta)
    return TaylorData(T.group, T.base, T.N, [a * x + b * y for x, y in zip(T.coeffs, S.coeffs)], T.directions,
                      T.method, [abs(a) * x + abs(b) * y for x, y in zip(T.errors, S.errors)], None, tail)


# ---------------------------------------------------------------- majorants


@dataclass(frozen=True, eq=False)
class MajorantSeries:
    base: np.ndarray
    coeffs: np.ndarray  # c_0..c_N >= 0
    R: float = 0.0
    d: int = 1
    tail: Optional[TailModel] = None  # certified bound on the unweighted coefficients

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> dict:
        return {"g": complex_pairs(self.base), "N": self.N, "R": self.R, "d": self.d,
                "coefficients": [float(c) for c in self.coeffs]}


def _fsum_abs(block: np.ndarray) -> float:
    return math.fsum(np.abs(block).tolist())


def _weighted(total: float, n: int, R: float) -> float:
    """``total n!^(R-1)``; exact factorials while they fit, log space beyond."""
    if total == 0.0:
        return 0.0
    if n <= 170:
        f = float(math.factorial(n))
        val = total / f * (f ** R if R else 1.0)
        if val != 0.0 and math.isfinite(val):
            return val
    return math.exp(math.log(total) + (R - 1.0) * math.lgamma(n + 1))


def majorant_coefficients(T: TaylorData, R: float = 0.0) -> MajorantSeries:
    """``c_n = (n!^R / n!) sum_{|alpha|=n} |T(alpha)|``."""
    if R < 0:
        raise InvalidArgument("weight exponent must be nonnegative")
    c = np.array([_weighted(_fsum_abs(b), n, R) for n, b in enumerate(T.coeffs)])
    return MajorantSeries(T.base, c, float(R), T.k, T.tail if R == 0 else None)


def line_majorant(f, g, N: int) -> MajorantSeries:
    """``c_n = |L^n f(g)| / n!`` on a one-dimensional group, without forming raw derivatives.

    Raw derivatives of characters grow like ``(2 pi m)^n`` and overflow long
    before ``n!`` catches up; the one-variable coefficients are scaled as they
    are generated.
    """
    from .derive import one_variable_coefficients

    if f.group.d != 1:
        raise InvalidArgument("line majorants need a one-dimensional group")
    a, _ = one_variable_coefficients(f, g, np.ones(1), N)
    return MajorantSeries(np.asarray(g), np.abs(a), 0.0, 1, None)


@dataclass(frozen=True)
class SupBound:
    """``|phi| <= value`` on the coordinate ball of radius ``rho`` around the base point."""

    value: float
    rho: float


@dataclass(frozen=True)
class MajorantValue:
    value: float
    tail: float
    tail_kind: str  # certified | heuristic | unavailable

    def to_json(self) -> dict:
        return {"value": self.value, "tail": self.tail, "tail_kind": self.tail_kind}


def cauchy_tail(sup: SupBound, d: int, r: float, N: int) -> float:
    """``sup * sum_{n>N} (d r n / rho)^n / n!``; infinite unless ``d r e < rho``."""
    x = d * r / sup.rho
    if x * math.e >= 1.0:
        return math.inf
    if x == 0.0:
        return 0.0
    total, n = 0.0, N + 1
    while n < 100000:
        log_term = n * math.log(x * n) - math.lgamma(n + 1)
        term = math.exp(log_term)
        total += term
        if term < 1e-18 * max(total, 1e-300) and n > N + 5:
            break
        n += 1
    return sup.value * total


def _heuristic_tail(c: np.ndarray, r: float) -> float:
    N = len(c) - 1
    if r == 0.0 or N < 3:
        return 0.0
    terms = c * r ** np.arange(N + 1)
    last = terms[-3:]
    if not np.any(last > 0):
        return 0.0
    ratios = [last[i + 1] / last[i] for i in range(2) if last[i] > 0]
    q = max(ratios) if ratios else 1.0
    if q >= 1.0:
        return math.inf
    return float(last[-1] * q / (1.0 - q))


def majorant_eval(Mser: MajorantSeries, r: float, sup: Optional[SupBound] = None) -> MajorantValue:
    """Truncated ``sum c_n r^n`` plus a certified or heuristic tail."""
    if r < 0:
        raise InvalidArgument("radius must be nonnegative")
    c = Mser.coeffs
    value = math.fsum((c * float(r) ** np.arange(len(c))).tolist())
    if Mser.R == 0.0 and Mser.tail is not None:
        return MajorantValue(value, Mser.tail.majorant_tail(r, Mser.N), "certified")
    if Mser.R == 0.0 and sup is not None:
        t = cauchy_tail(sup, Mser.d, r, Mser.N)
        return MajorantValue(value, t, "certified" if math.isfinite(t) else "unavailable")
    return MajorantValue(value, _heuristic_tail(c, r), "heuristic")


def seminorm_q(f, r: float, N: int, method=None) -> float:
    """``q_r(f)``: truncated majorant at the identity."""
    from .derive import taylor_data

    T = taylor_data(f, f.group.identity(), N, method)
    return majorant_eval(majorant_coefficients(T), r).value


def taylor_eval(T: TaylorData, xi) -> complex:
    """``sum_n 1/n! sum_alpha T(alpha) xi^alpha`` with compensated summation."""
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (T.k,):
        raise InvalidArgument(f"expected {T.k} coordinates")
    re, im = [], []
    p = np.ones(1, dtype=complex)
    for n, block in enumerate(T.coeffs):
        if n:
            p = np.kron(p, xi)
        prod = block * p / math.factorial(n)
        re.extend(prod.real.tolist())
        im.extend(prod.imag.tolist())
    return complex(math.fsum(re), math.fsum(im))


def taylor_remainder_bound(T: TaylorData, xi) -> tuple[float, str]:
    """Bound on ``|f(g exp xi) - taylor_eval(T, xi)|`` from the attached tail model."""
    s = float(np.max(np.abs(xi))) if np.size(xi) else 0.0
    if T.tail is not None:
        return T.tail.majorant_tail(s, T.N), "certified"
    return _heuristic_tail(majorant_coefficients(T).coeffs, s), "heuristic"


def shift_taylor_data(T: TaylorData, xi, N_out: int, K: int) -> TaylorData:
    """Re-expand ``T`` at ``g exp(xi)`` keeping shift words of length ``<= K``.

    Output order-``n`` coefficient of ``chi`` is
    ``sum_{k<=K} 1/k! sum_m T(m chi) xi^m`` with the prefix word ``m`` of length ``k``.
    """
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (T.k,):
        raise InvalidArgument(f"expected {T.k} coordinates")
    if N_out < 0 or K < 0:
        raise InvalidArgument("orders must be nonnegative")
    if T.N < N_out + K:
        raise InvalidArgument(f"shift needs input order N_in >= {N_out + K}, got {T.N}")
    k = T.k
    powers = [np.ones(1, dtype=complex)]
    for _ in range(K):
        powers.append(np.kron(powers[-1], xi))
    s = float(np.max(np.abs(xi))) if xi.size else 0.0
    out, errs = [], []
    for n in range(N_out + 1):
        acc = np.zeros((K + 1, k ** n), dtype=complex)
        for j in range(K + 1):
            block = T.coeffs[j + n].reshape(k ** j, k ** n)
            acc[j] = (powers[j] @ block) / math.factorial(j)
        # column-wise compensated sums in fixed order of j
        col = np.array([complex(math.fsum(acc[:, c].real.tolist()), math.fsum(acc[:, c].imag.tolist()))
                        for c in range(acc.shape[1])])
        out.append(col)
        errs.append(_shift_error(T, n, K, s))
    base = T.base @ groups.expm(T.group.algebra_element(xi @ T.direction_matrix))
    tail = None
    if T.tail is not None:
        tail = TailModel(T.tail.A * math.exp(T.tail.delta * s), T.tail.delta)
    return TaylorData(T.group, base, N_out, out, T.directions, f"shift[{T.method}]", errs, None, tail)


def _shift_error(T: TaylorData, n: int, K: int, s: float) -> float:
    """Bound (certified with a tail model) on sum over order-n outputs of the dropped k > K terms."""
    if s == 0.0:
        return float(T.errors[n]) if n < len(T.errors) else 0.0
    prop = math.fsum(float(T.errors[j + n]) * s ** j / math.factorial(j) * T.k ** j
                     for j in range(K + 1) if j + n < len(T.errors))
    if T.tail is not None:
        A, delta = T.tail.A, T.tail.delta
        # sum_{j>K} s^j/j! A delta^{n+j}
        return A * delta ** n * _exp_tail(delta * s, K) + prop
    # heuristic: geometric extrapolation of the last included majorant-like terms
    terms = [_fsum_abs(T.coeffs[j + n]) * s ** j / math.factorial(j) for j in range(K + 1)]
    return _heuristic_series_tail(terms) + prop


def _heuristic_series_tail(terms) -> float:
    last = [t for t in terms[-3:]]
    if len(last) < 2 or last[-1] == 0.0:
        return 0.0
    ratios = [last[i + 1] / last[i] for i in range(len(last) - 1) if last[i] > 0]
    q = max(ratios) if ratios else 1.0
    return math.inf if q >= 1.0 else last[-1] * q / (1.0 - q)


# ---------------------------------------------------------------- heuristics and checks


@dataclass(frozen=True)
class EntiretyVerdict:
    verdict: str  # consistent-with-entire | not-entire | inconclusive
    root: float
    window: tuple
    heuristic: bool = True

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "root_estimate": self.root, "window": list(self.window),
                "heuristic": True}


def entirety_heuristic(Mser: MajorantSeries, low: float = 0.1, high: float = 0.9) -> EntiretyVerdict:
    """Max of ``c_n^(1/n)`` over the last third of orders, compared with thresholds."""
    N = Mser.N
    if N < 10:
        raise InvalidArgument("entirety heuristic needs N >= 10")
    lo = max(1, N - N // 3)
    c = Mser.coeffs
    roots = [c[n] ** (1.0 / n) if c[n] > 0 else 0.0 for n in range(lo, N + 1)]
    root = float(max(roots))
    verdict = "consistent-with-entire" if root < low else "not-entire" if root > high else "inconclusive"
    return EntiretyVerdict(verdict, root, (lo, N))


@dataclass(frozen=True)
class InequalityReport:
    check: str
    params: dict
    lhs: float
    rhs: float
    extra: dict = field(default_factory=dict)
    rel_tol: float = 0.0
    abs_tol: float = 0.0

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + self.rel_tol) + self.abs_tol

    def to_json(self) -> dict:
        out = {"check": self.check, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
               "slack": self.slack, "pass": self.passed}
        out.update(self.extra)
        return out


def translation_check(f, g, xi, r: float, N: int = 8, K: int = 4, method=None) -> InequalityReport:
    """Truncated ``M(g exp xi, r) <= M(g, r + |xi|_inf)`` plus tail."""
    from .derive import taylor_data

    G = f.group
    g = groups.require_member(G, g)
    xi = np.asarray(xi, dtype=float)
    s = float(np.max(np.abs(xi))) if xi.size else 0.0
    g2 = g @ groups.exp_group(G, xi)
    left = majorant_coefficients(taylor_data(f, g2, N, method))
    right = majorant_coefficients(taylor_data(f, g, N + K, method))
    lhs = majorant_eval(left, r).value
    rv = majorant_eval(right, r + s)
    rhs = rv.value + (rv.tail if math.isfinite(rv.tail) else 0.0)
    return InequalityReport(
        "translation", {"group": G.name, "r": float(r), "N": N, "K": K, "xi_inf": s},
        lhs, rhs, {"tail": rv.tail, "tail_kind": rv.tail_kind}, abs_tol=1e-12)


__all__ = [
    "TailModel", "TaylorData", "combine", "MajorantSeries", "majorant_coefficients", "line_majorant", "SupBound", "MajorantValue",
    "cauchy_tail", "majorant_eval", "seminorm_q", "taylor_eval", "taylor_remainder_bound", "shift_taylor_data",
    "EntiretyVerdict", "entirety_heuristic", "InequalityReport", "translation_check",
]
