"""Scalar fields on matrix groups.

A :class:`RepresentativeField` is a matrix coefficient ``g -> phi . rho(g) v``
of a finite-dimensional representation; its Lie derivatives are exact
products of the infinitesimal generators ``drho``.  A :class:`BlackBoxField`
only offers (batched) evaluation.

Derivative convention: ``L(alpha) = L_{alpha_1} o ... o L_{alpha_n}`` with
``L_{alpha_n}`` applied first, so the oracle is
``phi . rho(g) drho[alpha_1] ... drho[alpha_n] v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import groups
from .errors import DomainError, InvalidArgument, NotFound
from .groups import GroupModel, GroupMorphism, complex_pairs, from_pairs

REGULARITIES = ("holomorphic", "real-analytic", "smooth-only")


@dataclass(frozen=True, eq=False)
class SupEnvelope:
    """Analytic bound ``|phi(h)| <= bound(B)`` whenever ``||h||, ||h^-1|| <= B``."""

    bound: Callable[[float], float]
    tag: str

    def __call__(self, B: float) -> float:
        try:
            return float(self.bound(B))
        except OverflowError:
            return math.inf


@dataclass(frozen=True, eq=False)
class RepresentativeField:
    group: GroupModel
    rho: Callable[[np.ndarray], np.ndarray] = field(repr=False)  # batched (..., m, m) -> (..., N, N)
    drho: np.ndarray = field(repr=False)  # (d, N, N)
    v: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    recipe: dict = field(repr=False)
    rho_bound: Callable[[float], float] = field(repr=False, default=lambda B: math.inf)
    name: str = "representative"

    @property
    def N(self) -> int:
        return self.v.shape[0]

    @property
    def regularity(self) -> str:
        return "holomorphic" if self.group.is_complex else "real-analytic"

    @property
    def envelope(self) -> Optional[SupEnvelope]:
        scale = float(np.linalg.norm(self.phi) * np.linalg.norm(self.v))
        rb = self.rho_bound
        if not math.isfinite(rb(1.0)):
            return None
        return SupEnvelope(lambda B: scale * rb(B), f"|phi||v| rho-bound ({self.recipe.get('rho')})")

    def evaluate(self, g: np.ndarray) -> np.ndarray:
        """Batched evaluation without membership checks."""
        R = self.rho(np.asarray(g, dtype=complex))
        return np.einsum("i,...ij,j->...", self.phi, R, self.v)

    def drho_of(self, coeffs) -> np.ndarray:
        """Infinitesimal generator for a (possibly complex) coefficient vector."""
        return np.tensordot(np.asarray(coeffs), self.drho, axes=(-1, 0))


@dataclass(frozen=True, eq=False)
class BlackBoxField:
    group: GroupModel
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)  # batched
    regularity: str = "real-analytic"
    name: str = "black-box"
    envelope: Optional[SupEnvelope] = field(default=None, repr=False)
    # optional closed-form one-variable stream: (g, xi_coords, K) -> a_0..a_K
    series: Optional[Callable[[np.ndarray, np.ndarray, int], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.regularity not in REGULARITIES:
            raise InvalidArgument(f"unknown regularity {self.regularity!r}")

    def evaluate(self, g: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(g, dtype=complex)), dtype=complex)


Field = RepresentativeField | BlackBoxField


def eval_field(f: Field, g) -> complex:
    g = groups.require_member(f.group, g)
    return complex(f.evaluate(g))


def exact_lie_derivative(f: RepresentativeField, alpha: Sequence[int], g) -> complex:
    if not isinstance(f, RepresentativeField):
        raise InvalidArgument("exact derivatives need a representative field")
    d = f.group.d
    vec = f.v.astype(complex)
    for a in reversed(tuple(alpha)):
        if not 1 <= a <= d:
            raise InvalidArgument(f"multi-index entry {a} outside 1..{d}")
        vec = f.drho[a - 1] @ vec
    R = f.rho(np.asarray(g, dtype=complex))
    return complex(f.phi @ R @ vec)


# ---------------------------------------------------------------- representations


def _standard(G: GroupModel):
    return (lambda g: g), G.basis.copy(), (lambda B: B)


def _frame_norms(G: GroupModel) -> float:
    # ||coords -> matrix||_{2->F} * ||matrix -> coords||_{F->2}
    S = G.frame.reshape(G.n_holo, -1).T
    return float(np.linalg.norm(S, 2) * np.linalg.norm(G._frame_pinv, 2))


def _adjoint(G: GroupModel):
    frame = G.frame

    def rho(g):
        ginv = np.linalg.inv(g)
        conj = g[..., None, :, :] @ frame @ ginv[..., None, :, :]  # (..., n, m, m)
        cols = G.frame_coordinates(conj)  # (..., n_cols, n_rows)
        return np.swapaxes(cols, -1, -2)

    drho = np.stack([
        G.frame_coordinates(np.stack([X @ F - F @ X for F in frame])).T for X in G.basis
    ])
    kappa = _frame_norms(G)
    return rho, drho, (lambda B: kappa * B * B)


def _det_power(G: GroupModel, k: int):
    traces = np.trace(G.basis, axis1=1, axis2=2)
    drho = (k * traces).reshape(G.d, 1, 1).astype(complex)
    m = G.m

    def rho(g):
        return (np.linalg.det(g) ** k)[..., None, None]

    return rho, drho, (lambda B: B ** (m * abs(k)))


def _exp_linear(G: GroupModel, lam: np.ndarray):
    if G.membership not in ("vector", "vector-real"):
        raise InvalidArgument("exp-linear fields live on vector groups")
    lam = np.asarray(lam, dtype=complex)
    drho = np.array([lam @ G.frame_coordinates(X) for X in G.basis]).reshape(G.d, 1, 1)
    eye = G.identity()
    norm = float(np.linalg.norm(lam))

    def rho(g):
        x = G.frame_coordinates(g - eye)
        return np.exp(x @ lam)[..., None, None]

    return rho, drho, (lambda B: math.exp(norm * B))


def _trivial(G: GroupModel):
    return (lambda g: np.ones(g.shape[:-2] + (1, 1), dtype=complex)), np.zeros((G.d, 1, 1), complex), (lambda B: 1.0)


def primitive_field(G: GroupModel, rho: str, v, phi, params=None, name=None) -> RepresentativeField:
    params = dict(params or {})
    if rho == "standard":
        r, drho, rb = _standard(G)
    elif rho == "adjoint":
        r, drho, rb = _adjoint(G)
    elif rho == "det-power":
        r, drho, rb = _det_power(G, int(params["k"]))
    elif rho == "exp-linear":
        r, drho, rb = _exp_linear(G, from_pairs(params["lambda"]) if "lambda" in params else params["lam"])
        params = {"lambda": complex_pairs(from_pairs(params["lambda"]) if "lambda" in params else params["lam"])}
    elif rho == "trivial":
        r, drho, rb = _trivial(G)
    else:
        raise InvalidArgument(f"unknown representation kind {rho!r}")
    v = np.asarray(v, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if v.shape != (drho.shape[1],) or phi.shape != (drho.shape[1],):
        raise InvalidArgument(f"v and phi must have length {drho.shape[1]} for rho={rho}")
    recipe = {"rho": rho, "params": params, "v": complex_pairs(v), "phi": complex_pairs(phi)}
    return RepresentativeField(G, r, drho, v, phi, recipe, rb, name or rho)


def constant(G: GroupModel, c: complex) -> RepresentativeField:
    return primitive_field(G, "trivial", [1.0], [c], name=f"constant {c}")


def entry(G: GroupModel, i: int = 1, j: int = 1) -> RepresentativeField:
    v = np.zeros(G.m, complex)
    phi = np.zeros(G.m, complex)
    v[j - 1] = 1.0
    phi[i - 1] = 1.0
    return primitive_field(G, "standard", v, phi, name=f"entry-{i}{j}")


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    lead = mats[0].shape[:-2]
    n = sum(M.shape[-1] for M in mats)
    out = np.zeros(lead + (n, n), dtype=complex)
    k = 0
    for M in mats:
        s = M.shape[-1]
        out[..., k:k + s, k:k + s] = M
        k += s
    return out


def linear_combination(fields: Sequence[Field], coeffs: Sequence[complex]) -> Field:
    """``sum_i coeffs[i] fields[i]``; representative inputs give a direct-sum field."""
    if not fields or len(fields) != len(coeffs):
        raise InvalidArgument("need matching non-empty fields and coefficients")
    G = fields[0].group
    if any(f.group is not G for f in fields):
        raise InvalidArgument("fields live on different groups")
    coeffs = [complex(c) for c in coeffs]
    if all(isinstance(f, RepresentativeField) for f in fields):
        rhos = [f.rho for f in fields]
        drho = np.stack([_block_diag([f.drho[k] for f in fields]) for k in range(G.d)])
        v = np.concatenate([f.v for f in fields])
        phi = np.concatenate([c * f.phi for f, c in zip(fields, coeffs)])
        bounds = [f.rho_bound for f in fields]
        recipe = {"rho": "sum", "terms": [{"coeff": [c.real, c.imag], "field": f.recipe} for f, c in zip(fields, coeffs)]}
        return RepresentativeField(
            G, lambda g: _block_diag([r(g) for r in rhos]), drho, v, phi, recipe,
            lambda B: max(b(B) for b in bounds), "+".join(f.name for f in fields))
    evals = [f.evaluate for f in fields]
    envs = [f.envelope for f in fields]
    env = None
    if all(e is not None for e in envs):
        env = SupEnvelope(lambda B: sum(abs(c) * e(B) for c, e in zip(coeffs, envs)), "triangle inequality")
    return BlackBoxField(G, lambda g: sum(c * e(g) for c, e in zip(coeffs, evals)),
                         _weakest([f.regularity for f in fields]), "+".join(f.name for f in fields), env)


def product(f1: Field, f2: Field) -> Field:
    """Pointwise product; representative inputs give the tensor-product field."""
    if f1.group is not f2.group:
        raise InvalidArgument("fields live on different groups")
    G = f1.group
    if isinstance(f1, RepresentativeField) and isinstance(f2, RepresentativeField):
        I1, I2 = np.eye(f1.N), np.eye(f2.N)
        drho = np.stack([np.kron(f1.drho[k], I2) + np.kron(I1, f2.drho[k]) for k in range(G.d)])
        r1, r2 = f1.rho, f2.rho

        def rho(g):
            A, B = r1(g), r2(g)
            out = A[..., :, None, :, None] * B[..., None, :, None, :]
            s = A.shape[-1] * B.shape[-1]
            return out.reshape(A.shape[:-2] + (s, s))

        b1, b2 = f1.rho_bound, f2.rho_bound
        recipe = {"rho": "product", "factors": [f1.recipe, f2.recipe]}
        return RepresentativeField(G, rho, drho, np.kron(f1.v, f2.v), np.kron(f1.phi, f2.phi), recipe,
                                   lambda B: b1(B) * b2(B), f"({f1.name})*({f2.name})")
    e1, e2 = f1.evaluate, f2.evaluate
    env = None
    if f1.envelope is not None and f2.envelope is not None:
        env = SupEnvelope(lambda B: f1.envelope(B) * f2.envelope(B), "product of envelopes")
    return BlackBoxField(G, lambda g: e1(g) * e2(g), _weakest([f1.regularity, f2.regularity]),
                         f"({f1.name})*({f2.name})", env)


def _weakest(regs):
    return max(regs, key=REGULARITIES.index)


def pullback_field(phi_map: GroupMorphism, f: Field) -> Field:
    """Field ``g -> f(Phi(g))`` on the source of ``Phi``."""
    if f.group is not phi_map.target:
        raise InvalidArgument(f"field lives on {f.group.name}, morphism targets {phi_map.target.name}")
    S = phi_map.source
    emap = phi_map.element_map
    if isinstance(f, RepresentativeField):
        T = np.asarray(phi_map.tangent_map, dtype=complex)
        drho = np.einsum("jk,jab->kab", T, f.drho)
        r = f.rho
        recipe = {"rho": "pullback", "morphism": phi_map.name, "field": f.recipe}
        # pulled-back bounds would need ||Phi(h)|| in terms of ||h||; not provided
        return RepresentativeField(S, lambda g: r(emap(g)), drho, f.v, f.phi, recipe,
                                   name=f"{phi_map.name}*({f.name})")
    ev = f.evaluate
    reg = "real-analytic" if f.regularity == "holomorphic" and not S.is_complex else f.regularity
    return BlackBoxField(S, lambda g: ev(emap(g)), reg, f"{phi_map.name}*({f.name})")


# ---------------------------------------------------------------- catalog

ADJOINT_V = (1.0, 0.5, -0.5)
ADJOINT_PHI = (0.5, 1.0, 1.0)
TRIG_COEFFS = {-1: 2.0, 0: 3.0, 2: 1.0}


def trig_polynomial(G: GroupModel, coeffs: dict) -> RepresentativeField:
    """``z -> sum_n a_n z^n`` on U(1) or C^x as a sum of characters."""
    terms = [primitive_field(G, "det-power", [1.0], [1.0], {"k": int(n)}, name=f"z^{n}") for n in sorted(coeffs)]
    f = linear_combination(terms, [coeffs[n] for n in sorted(coeffs)])
    return replace(f, name="trig")


def _runge_series(g, xi, K):
    x = complex(np.asarray(g)[0, 1])
    s = complex(np.asarray(xi)[0])
    k = np.arange(K + 1)
    return ((-s) ** k * ((x - 1j) ** (-k - 1.0) - (x + 1j) ** (-k - 1.0)) / 2j).astype(complex)


def builtin_field(G: GroupModel, name: str) -> Field:
    """Catalog of named fields; raises ``NotFound`` for unknown names."""
    if name.startswith("constant"):
        c = complex(name.split(":", 1)[1]) if ":" in name else 7.0
        return constant(G, c)
    if name.startswith("entry-") and len(name) == 8:
        return entry(G, int(name[6]), int(name[7]))
    if name == "identity" and G.m == 1:
        return replace(entry(G), name="identity")
    if name == "trace":
        f = linear_combination([entry(G, i, i) for i in range(1, G.m + 1)], [1.0] * G.m)
        return replace(f, name="trace")
    if name == "adjoint" and G.n_holo == 3:
        return primitive_field(G, "adjoint", ADJOINT_V, ADJOINT_PHI, name="adjoint")
    if name.startswith("char:") and G.m == 1:
        return primitive_field(G, "det-power", [1.0], [1.0], {"k": int(name[5:])}, name=name)
    if name == "trig" and G.m == 1:
        return trig_polynomial(G, TRIG_COEFFS)
    if name == "exp-linear" and G.membership in ("vector", "vector-real"):
        lam = np.full(G.n_holo, 0.5 + 0.25j)
        return primitive_field(G, "exp-linear", [1.0], [1.0], {"lam": lam}, name="exp-linear")
    if name == "exp-trace":
        m = G.m
        return BlackBoxField(G, lambda g: np.exp(np.trace(g, axis1=-2, axis2=-1)),
                             "holomorphic" if G.is_complex else "real-analytic", "exp-trace",
                             SupEnvelope(lambda B: math.exp(m * B), "|e^tr h| <= e^(m||h||)"))
    if name == "re-entry-11":
        return BlackBoxField(G, lambda g: g[..., 0, 0].real.astype(complex), "real-analytic", "re-entry-11",
                             SupEnvelope(lambda B: B, "|Re h11| <= ||h||"))
    if name == "covering-identity" and G.name == "R1":
        return replace(pullback_field(groups.get_morphism("p"), builtin_field(groups.registry_get("U1"), "identity")),
                       name="covering-identity")
    if name == "runge" and G.name == "R1":
        return BlackBoxField(G, lambda g: 1.0 / (1.0 + g[..., 0, 1] ** 2), "real-analytic", "runge",
                             series=_runge_series)
    raise NotFound(f"no built-in field {name!r} on {G.name}")


def builtin_names(G: GroupModel) -> list[str]:
    names = ["constant", "entry-11", "trace", "exp-trace", "re-entry-11"]
    if G.m == 1:
        names += ["identity", "char:1", "char:-1", "trig"]
    if G.n_holo == 3:
        names.append("adjoint")
    if G.membership in ("vector", "vector-real"):
        names.append("exp-linear")
    if G.name == "R1":
        names += ["covering-identity", "runge"]
    return names


# ---------------------------------------------------------------- JSON


def field_to_json(f: Field) -> dict:
    if isinstance(f, BlackBoxField):
        return {"group": f.group.name, "builtin": f.name}
    out = {"group": f.group.name, "name": f.name, "recipe": f.recipe}
    if f.recipe["rho"] in ("standard", "adjoint", "det-power", "exp-linear", "trivial"):
        out.update({"rho": f.recipe["rho"], "drho": complex_pairs(f.drho),
                    "v": complex_pairs(f.v), "phi": complex_pairs(f.phi)})
    return out


def _from_recipe(G: GroupModel, recipe: dict, v=None, phi=None) -> RepresentativeField:
    kind = recipe["rho"]
    if kind == "sum":
        terms = [_from_recipe(G, t["field"]) for t in recipe["terms"]]
        return linear_combination(terms, [complex(*t["coeff"]) for t in recipe["terms"]])
    if kind == "product":
        a, b = (_from_recipe(G, r) for r in recipe["factors"])
        return product(a, b)
    if kind == "pullback":
        mor = groups.get_morphism(recipe["morphism"])
        return pullback_field(mor, _from_recipe(mor.target, recipe["field"]))
    if v is None:
        v, phi = from_pairs(recipe["v"]), from_pairs(recipe["phi"])
    return primitive_field(G, kind, v, phi, recipe.get("params"))


def field_from_json(obj: dict) -> Field:
    G = groups.registry_get(obj["group"])
    if "builtin" in obj:
        return builtin_field(G, obj["builtin"])
    if "recipe" in obj and obj["recipe"]["rho"] in ("sum", "product", "pullback"):
        f = _from_recipe(G, obj["recipe"])
    else:
        kind = obj.get("rho") or obj["recipe"]["rho"]
        if kind not in ("standard", "adjoint", "det-power", "exp-linear", "trivial"):
            raise InvalidArgument(f"unknown representation kind {kind!r}")
        params = obj.get("recipe", {}).get("params") or obj.get("params")
        f = primitive_field(G, kind, from_pairs(obj["v"]), from_pairs(obj["phi"]), params)
        if "drho" in obj and not np.allclose(from_pairs(obj["drho"]), f.drho, atol=1e-12):
            raise InvalidArgument("drho matrices do not match the declared representation")
    if "name" in obj:
        f = replace(f, name=obj["name"])
    return f


def check_homomorphism(f: RepresentativeField, ts=(-0.3, 0.2), tol: float = 1e-10) -> float:
    """max |rho(exp(t e_k)) - expm(t drho_k)| over sampled t, k."""
    worst = 0.0
    for k in range(f.group.d):
        for t in ts:
            xi = np.zeros(f.group.d)
            xi[k] = t
            lhs = f.rho(groups.exp_group(f.group, xi))
            rhs = groups.expm(t * f.drho[k])
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


__all__ = [
    "SupEnvelope", "RepresentativeField", "BlackBoxField", "Field", "eval_field", "exact_lie_derivative",
    "primitive_field", "constant", "entry", "linear_combination", "product", "pullback_field",
    "trig_polynomial", "builtin_field", "builtin_names", "field_to_json", "field_from_json",
    "check_homomorphism", "DomainError",
]
