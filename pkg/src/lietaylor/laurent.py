"""Laurent analysis on the circle group and the punctured plane.

With the basis ``2 pi i`` of the Lie algebra of U(1), ``exp(t) = e^{2 pi i t}``
and ``L(1)^k z^n = (2 pi i n)^k z^n``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .derive import DerivMethod, lie_derivative, taylor_data
from .errors import DomainError, InvalidArgument, UnsupportedMethod
from .fields import Field, RepresentativeField
from .taylor import InequalityReport, majorant_coefficients, majorant_eval

TWO_PI = 2.0 * math.pi


class AliasingWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class LaurentData:
    n_min: int
    coeffs: np.ndarray  # a_n for n = n_min .. n_min + len - 1
    M: int
    residual: float  # largest quadrature coefficient outside the requested window
    aliasing_warning: bool = False

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.coeffs) - 1

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def __getitem__(self, n: int) -> complex:
        if not self.n_min <= n <= self.n_max:
            raise InvalidArgument(f"coefficient {n} outside [{self.n_min}, {self.n_max}]")
        return complex(self.coeffs[n - self.n_min])

    def to_json(self) -> dict:
        return {"n_min": self.n_min, "n_max": self.n_max, "M": self.M, "residual": self.residual,
                "aliasing_warning": self.aliasing_warning,
                "coefficients": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    def rows(self):
        """``(n, Re a_n, Im a_n)`` triples."""
        return [(int(n), float(c.real), float(c.imag)) for n, c in zip(self.orders, self.coeffs)]


def _check_circle_group(f: Field):
    if f.group.name not in ("U1", "Ctimes"):
        raise InvalidArgument("Laurent analysis needs a field on U1 or Ctimes")


def laurent_coefficients(f: Field, N_neg: int, N_pos: int, M: int = 64) -> LaurentData:
    """Trapezoid rule on the unit circle (realized by an FFT of the node values)."""
    _check_circle_group(f)
    if N_neg < 0 or N_pos < 0:
        raise InvalidArgument("window bounds must be nonnegative")
    if M < 2 * (N_neg + N_pos + 1):
        raise InvalidArgument(f"need M >= {2 * (N_neg + N_pos + 1)} nodes")
    nodes = np.exp(2j * math.pi * np.arange(M) / M)
    vals = np.asarray(f.evaluate(nodes[:, None, None]), dtype=complex)
    spectrum = np.fft.fft(vals) / M
    window = np.arange(-N_neg, N_pos + 1)
    coeffs = spectrum[window % M]
    mask = np.ones(M, dtype=bool)
    mask[window % M] = False
    residual = float(np.max(np.abs(spectrum[mask]))) if mask.any() else 0.0
    alias = max(N_neg, N_pos) > M // 4
    if alias:
        warnings.warn(f"requested order {max(N_neg, N_pos)} exceeds M/4 = {M // 4}; aliasing possible",
                      AliasingWarning, stacklevel=2)
    return LaurentData(-N_neg, coeffs, M, residual, alias)


def _derivative_at_one(f: Field, k: int) -> complex:
    e = f.group.identity()
    if isinstance(f, RepresentativeField):
        return lie_derivative(f, (1,) * k, e, DerivMethod("exact", n_max=max(8, k)))
    if f.group.is_complex and f.regularity == "holomorphic":
        return lie_derivative(f, (1,) * k, e, DerivMethod("cauchy", nodes=32, n_max=max(8, k)))
    if k <= 3:
        return lie_derivative(f, (1,) * k, e, DerivMethod("fd"))
    raise UnsupportedMethod("derivatives of order > 3 of a non-holomorphic black box")


def laurent_lie_taylor_check(f: Field, K: int, data: LaurentData, tol: float = 1e-9) -> dict:
    """Compare ``L(1)^k f(1)`` with ``(2 pi i)^k sum_n n^k a_n`` for ``k <= K``."""
    _check_circle_group(f)
    rows = []
    worst_abs = worst_rel = 0.0
    n = data.orders.astype(float)
    for k in range(K + 1):
        lhs = _derivative_at_one(f, k)
        terms = (n ** k) * data.coeffs
        s = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
        rhs = (TWO_PI * 1j) ** k * s
        dev = abs(lhs - rhs)
        rel = dev / max(1.0, abs(rhs))
        worst_abs, worst_rel = max(worst_abs, dev), max(worst_rel, rel)
        rows.append({"k": k, "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag], "deviation": dev})
    return {"rows": rows, "max_deviation": worst_abs, "max_relative_deviation": worst_rel,
            "pass": worst_rel <= tol}


def laurent_seminorm_bound(f: Field, r: float, N: int, data: LaurentData) -> InequalityReport:
    """Truncated ``q_r(f) <= sum_n |a_n| e^{2 pi r |n|}``."""
    _check_circle_group(f)
    if r < 0:
        raise InvalidArgument("radius must be nonnegative")
    if f.group.name != "U1":
        raise InvalidArgument("the seminorm bound is stated for fields on U1")
    T = taylor_data(f, f.group.identity(), N)
    q = majorant_eval(majorant_coefficients(T), r).value
    rhs = math.fsum((np.abs(data.coeffs) * np.exp(TWO_PI * r * np.abs(data.orders))).tolist())
    return InequalityReport("laurent-seminorm", {"r": float(r), "N": N, "window": [data.n_min, data.n_max]},
                            q, rhs, rel_tol=1e-12)


def exponential_coordinate(target) -> complex:
    """``zeta = t - i log|z| / (2 pi)`` with ``z = exp(2 pi i zeta)`` and ``t = arg(z)/(2 pi)``."""
    z = complex(np.asarray(target).reshape(-1)[0]) if np.ndim(target) else complex(target)
    if z == 0:
        raise DomainError("0 is not an element of C^x")
    return complex(math.atan2(z.imag, z.real) / TWO_PI, -math.log(abs(z)) / TWO_PI)


def laurent_extend(f: Field, target, N: int = 60, data: Optional[LaurentData] = None) -> complex:
    """Entire extension ``F`` of ``t -> f(e^{2 pi i t})`` evaluated at the exponential coordinate of ``target``."""
    if f.group.name != "U1":
        raise InvalidArgument("laurent_extend takes a field on U1")
    zeta = exponential_coordinate(target)
    if isinstance(f, RepresentativeField):
        T = taylor_data(f, f.group.identity(), N)
        coeffs = [complex(c[0]) for c in T.coeffs]
    else:
        if data is None:
            data = laurent_coefficients(f, 32, 32, 256)
        n = data.orders.astype(float)
        coeffs = []
        for k in range(N + 1):
            terms = (n ** k) * data.coeffs
            coeffs.append((TWO_PI * 1j) ** k * complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist())))
    re, im = [], []
    p = 1.0 + 0j
    for k, c in enumerate(coeffs):
        term = c * p / math.factorial(k)
        re.append(term.real)
        im.append(term.imag)
        p *= zeta
    return complex(math.fsum(re), math.fsum(im))


__all__ = [
    "AliasingWarning", "LaurentData", "laurent_coefficients", "laurent_lie_taylor_check", "laurent_seminorm_bound",
    "exponential_coordinate", "laurent_extend",
]
