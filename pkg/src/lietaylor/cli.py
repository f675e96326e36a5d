"""Command-line front end.

Every subcommand writes JSON lines (default) or CSV.  Exit codes: 0 success,
1 a check failed, 2 bad configuration, 3 the computation was refused.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import cauchy, extend, groups, laurent, riemann, suite
from .derive import DerivMethod, default_method, enumerate_multiindices, lie_derivative, taylor_data
from .errors import InvalidArgument, LieTaylorError, NotFound
from .fields import builtin_field, field_from_json
from .paths import GroupPath
from .taylor import entirety_heuristic, line_majorant, majorant_coefficients, majorant_eval

SCHEMA_VERSION = "1"
SUBCOMMANDS = ("derive", "taylor", "majorant", "seminorm", "entire-check", "riemann", "cauchy-check", "steiner",
               "continue", "extend", "verify-extension", "laurent", "suite")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_REFUSED = 0, 1, 2, 3


def schema_path(command: str) -> Path:
    """Location of the JSON schema shipped for a subcommand's records."""
    if command not in SUBCOMMANDS:
        raise NotFound(f"unknown subcommand {command!r}")
    return Path(__file__).parent / "schemas" / f"{command}.schema.json"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    group: Optional[str] = None
    field: Optional[str] = None
    method: Optional[str] = None
    order: Optional[int] = None
    shift_order: Optional[int] = None
    radius: Optional[float] = None
    target: Optional[Any] = None
    path: Optional[Any] = None
    point: Optional[Any] = None
    alpha: Optional[str] = None
    count: Optional[int] = None
    seed: int = 0
    format: str = "json"
    out: Optional[str] = None
    jobs: int = 1


_TYPES = {"order": int, "shift_order": int, "count": int, "seed": int, "jobs": int, "radius": float}


def load_config(path: str) -> dict:
    """Parse a JSON config file; errors carry the file location."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be an object")
    known = {f.name for f in dc_fields(RunConfig)}
    for key, value in obj.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"{path}: unknown key '{key}'")
        kind = _TYPES.get(name)
        if kind is not None and value is not None:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or (kind is int and value != int(value)):
                raise ConfigError(f"{path}: key '{key}' must be {'an integer' if kind is int else 'a number'}")
    return {k.replace("-", "_"): v for k, v in obj.items()}


# ---------------------------------------------------------------- argument decoding


def _json_arg(value):
    """Inline JSON, a path to a JSON file, or the raw string."""
    if not isinstance(value, str):
        return value
    p = Path(value)
    if value.endswith(".json") and p.is_file():
        try:
            return json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{value}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def parse_element(G: groups.GroupModel, value, what: str = "target") -> np.ndarray:
    """A group element from a complex scalar (1x1 groups), real coordinates or a matrix.

    Matrices are nested lists of reals or of ``[re, im]`` pairs.
    """
    value = _json_arg(value)
    try:
        if isinstance(value, str):
            z = complex(value.replace(" ", ""))
            if G.m != 1:
                raise ConfigError(f"{what}: a scalar only describes elements of 1x1 groups")
            g = np.array([[z]])
        elif isinstance(value, (int, float)):
            if G.m != 1:
                raise ConfigError(f"{what}: a scalar only describes elements of 1x1 groups")
            g = np.array([[complex(value)]])
        elif isinstance(value, dict) and "coordinates" in value:
            g = groups.exp_group(G, np.asarray(value["coordinates"], dtype=float))
        else:
            arr = np.asarray(value, dtype=float)
            if arr.ndim == 1:
                if G.m == 1 and arr.shape == (2,) and G.d != 2:
                    g = np.array([[complex(arr[0], arr[1])]])
                else:
                    g = groups.exp_group(G, arr)
            elif arr.ndim == 3 and arr.shape[-1] == 2:
                g = groups.from_pairs(value)
            else:
                g = arr.astype(complex)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{what}: cannot parse element ({exc})") from exc
    if not groups.is_member(G, g):
        raise ConfigError(f"{what}: not an element of {G.name}")
    return g


def parse_method(spec: Optional[str]) -> Optional[DerivMethod]:
    """``exact``, ``cauchy[:nodes[:radius]]`` or ``fd[:step[:levels]]``."""
    if spec is None:
        return None
    parts = spec.split(":")
    try:
        if parts[0] == "exact":
            return DerivMethod("exact")
        if parts[0] == "cauchy":
            kw = {}
            if len(parts) > 1:
                kw["nodes"] = int(parts[1])
            if len(parts) > 2:
                kw["radius"] = float(parts[2])
            return DerivMethod("cauchy", **kw)
        if parts[0] == "fd":
            kw = {}
            if len(parts) > 1:
                kw["step"] = float(parts[1])
            if len(parts) > 2:
                kw["levels"] = int(parts[2])
            return DerivMethod("fd", **kw)
    except ValueError as exc:
        raise ConfigError(f"method: {exc}") from exc
    except InvalidArgument as exc:
        raise ConfigError(f"method: {exc}") from exc
    raise ConfigError(f"method: unknown kind {parts[0]!r}")


def _group(cfg: RunConfig, default: str) -> groups.GroupModel:
    try:
        return groups.registry_get(cfg.group or default)
    except NotFound as exc:
        raise ConfigError(f"group: {exc}") from exc


def _field(cfg: RunConfig, G: groups.GroupModel, default: str):
    spec = cfg.field or default
    obj = _json_arg(spec)
    try:
        if isinstance(obj, dict):
            f = field_from_json(obj)
            if f.group is not G and cfg.group is not None:
                raise ConfigError(f"field: lives on {f.group.name}, not {G.name}")
            return f
        return builtin_field(G, str(obj))
    except NotFound as exc:
        raise ConfigError(f"field: {exc}") from exc
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"field: malformed field description ({exc})") from exc


def _point(cfg: RunConfig, G) -> np.ndarray:
    return G.identity() if cfg.point is None else parse_element(G, cfg.point, "point")


def _path(cfg: RunConfig, H, target) -> GroupPath:
    if cfg.path is None:
        return GroupPath.to_target(H, target) if target is not None else None
    obj = _json_arg(cfg.path)
    segs = obj.get("segments") if isinstance(obj, dict) else obj
    if not isinstance(segs, list) or not segs:
        raise ConfigError("path: expected a list of segments or {\"segments\": [...]}")
    items = []
    for s in segs:
        if isinstance(s, dict):
            items.append((np.asarray(s["xi"], dtype=float), float(s.get("duration", 1.0))))
        else:
            items.append(np.asarray(s, dtype=float))
    try:
        return GroupPath.from_segments(H, items)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"path: {exc}") from exc


def _pair(f):
    try:
        return groups.complexification_of(f.group)
    except NotFound as exc:
        raise ConfigError(f"field: {exc}") from exc


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _word(alpha) -> str:
    return ".".join(str(a) for a in alpha)


# ---------------------------------------------------------------- subcommands
# each returns (records, csv table or None, check status)


def cmd_derive(cfg: RunConfig):
    G = _group(cfg, "SL2R")
    f = _field(cfg, G, "entry-11")
    G = f.group
    g = _point(cfg, G)
    method = parse_method(cfg.method) or default_method(f)
    if cfg.alpha:
        try:
            words = [tuple(int(a) for a in cfg.alpha.split(","))]
        except ValueError as exc:
            raise ConfigError(f"alpha: {exc}") from exc
    else:
        words = enumerate_multiindices(G.d, cfg.order if cfg.order is not None else 1)
    recs, rows = [], []
    for a in words:
        val = lie_derivative(f, a, g, method)
        recs.append({"alpha": list(a), "value": _cx(val), "method": method.label})
        rows.append([len(a), _word(a), val.real, val.imag])
    return recs, (["order", "alpha", "re", "im"], rows), True


def cmd_taylor(cfg: RunConfig):
    G = _group(cfg, "SL2R")
    f = _field(cfg, G, "entry-11")
    T = taylor_data(f, _point(cfg, f.group), cfg.order if cfg.order is not None else 4, parse_method(cfg.method))
    rows = []
    for n, block in enumerate(T.coeffs):
        for a, c in zip(enumerate_multiindices(T.k, n), block):
            rows.append([n, _word(a), c.real, c.imag])
    return [T.to_json()], (["order", "alpha", "re", "im"], rows), True


def _majorant(cfg: RunConfig, default_group: str, default_field: str, identity: bool = False):
    G = _group(cfg, default_group)
    f = _field(cfg, G, default_field)
    g = f.group.identity() if identity else _point(cfg, f.group)
    N = cfg.order if cfg.order is not None else 20
    return f, majorant_coefficients(taylor_data(f, g, N, parse_method(cfg.method)))


def cmd_majorant(cfg: RunConfig):
    f, M = _majorant(cfg, "U1", "identity")
    r = cfg.radius if cfg.radius is not None else 1.0
    mv = majorant_eval(M, r)
    rec = {"field": f.name, "coefficients": [float(c) for c in M.coeffs], "r": r, **mv.to_json()}
    return [rec], (["n", "c_n"], [[n, float(c)] for n, c in enumerate(M.coeffs)]), True


def cmd_seminorm(cfg: RunConfig):
    cfg.order = cfg.order if cfg.order is not None else 40
    f, M = _majorant(cfg, "U1", "identity", identity=True)
    r = cfg.radius if cfg.radius is not None else 1.0
    mv = majorant_eval(M, r)
    rec = {"field": f.name, "r": r, "N": M.N, **mv.to_json()}
    return [rec], None, True


def cmd_entire_check(cfg: RunConfig):
    f = _field(cfg, _group(cfg, "U1"), "identity")
    if f.group.d == 1:
        # factorial decay of c_n^(1/n) is slow: one-dimensional groups get a long window
        M = line_majorant(f, f.group.identity(), cfg.order if cfg.order is not None else 300)
    else:
        T = taylor_data(f, f.group.identity(), cfg.order if cfg.order is not None else 12, parse_method(cfg.method))
        M = majorant_coefficients(T)
    v = entirety_heuristic(M)
    return [{"field": f.name, "N": M.N, **v.to_json()}], None, True


def cmd_riemann(cfg: RunConfig):
    G = _group(cfg, "SL2R")
    if cfg.target is None:
        raise ConfigError("target: required for riemann")
    h = parse_element(G, cfg.target)
    g = _point(cfg, G)
    metric = riemann.default_metric(G)
    b = riemann.distance_upper_bound(g, h, metric, refine=True)
    rec = {"group": G.name, "upper_bound": b.value, "segments": b.segments, "certified": b.certified}
    if cfg.radius is not None:
        rec["ball"] = "inside-certified" if b.value <= cfg.radius else "unknown"
        rec["r"] = cfg.radius
    if cfg.path is not None:
        rec["curve_length"] = riemann.curve_length(_path(cfg, G, None), metric)
    return [rec], None, True


def cmd_cauchy_check(cfg: RunConfig):
    G = _group(cfg, "SL2C")
    f = _field(cfg, G, "entry-11")
    G = f.group
    rng = np.random.default_rng(cfg.seed)
    metric = riemann.default_metric(G)
    count = cfg.count if cfg.count is not None else 20
    recs, ok = [], True
    for i in range(count):
        g, xi, dirs, r = cauchy.random_configuration(G, rng, cfg.order if cfg.order is not None else 5)
        if cfg.radius is not None:
            r = cfg.radius
        mdirs = cauchy.normalize_directions(G, dirs, metric) if len(dirs) else dirs
        for rep in (cauchy.cauchy_check_operator(f, g, xi, dirs, r, method=parse_method(cfg.method)),
                    cauchy.cauchy_check_riemannian(f, g, xi, mdirs, r, metric, method=parse_method(cfg.method))):
            ok = ok and rep.passed
            recs.append({"sample": i, **rep.to_json()})
    return recs, None, ok


def cmd_steiner(cfg: RunConfig):
    G = _group(cfg, "SL2C")
    target = None if cfg.target is None else parse_element(G, cfg.target)
    path = _path(cfg, G, target)
    if path is None:
        raise ConfigError("target or path: one is required for steiner")
    chain = extend.steiner_chain(path, cfg.radius if cfg.radius is not None else extend.DEFAULT_STEP_RADIUS)
    rep = extend.verify_chain(chain)
    return [{**chain.to_json(), "verification": rep}], None, rep["pass"]


def _continuation_inputs(cfg: RunConfig):
    G = _group(cfg, "SL2R")
    f = _field(cfg, G, "entry-11")
    pair = _pair(f)
    H = pair.target
    target = None if cfg.target is None else parse_element(H, cfg.target)
    return f, pair, H, target


def cmd_continue(cfg: RunConfig):
    f, pair, H, target = _continuation_inputs(cfg)
    path = _path(cfg, H, target)
    if path is None:
        raise ConfigError("target or path: one is required for continue")
    state = extend.continue_along_path(f, pair, path, cfg.radius or extend.DEFAULT_STEP_RADIUS,
                                       cfg.order if cfg.order is not None else 8, cfg.shift_order)
    return [{**state.to_json(), "value": _cx(state.value)}], None, True


def cmd_extend(cfg: RunConfig):
    f, pair, H, target = _continuation_inputs(cfg)
    if target is None:
        raise ConfigError("target: required for extend")
    path = _path(cfg, H, target) if cfg.path is not None else None
    ev = extend.extend_value(f, pair, target, path, cfg.radius or extend.DEFAULT_STEP_RADIUS,
                             cfg.order if cfg.order is not None else 8, cfg.shift_order)
    rec = {"field": f.name, "source": pair.source.name, "target_group": H.name, **ev.to_json()}
    if f.group.name == "U1" and path is None:
        rec["laurent_value"] = _cx(laurent.laurent_extend(f, target))
    return [rec], None, True


def cmd_verify_extension(cfg: RunConfig):
    f, pair, H, target = _continuation_inputs(cfg)
    rng = np.random.default_rng(cfg.seed)
    S = f.group
    count = cfg.count if cfg.count is not None else 20
    points = [groups.exp_group(S, rng.uniform(-0.5, 0.5, S.d)) for _ in range(count)]
    targets = [] if target is None else [target]
    rep = extend.verify_extension(f, pair, points, cfg.order if cfg.order is not None else 3, targets)
    ok = rep["coefficient_deviation"] <= 1e-10 and rep["value_deviation"] <= 1e-6
    return [{"field": f.name, "pair": pair.name, **rep, "pass": ok}], None, ok


def cmd_laurent(cfg: RunConfig):
    G = _group(cfg, "U1")
    f = _field(cfg, G, "trig")
    K = cfg.order if cfg.order is not None else 4
    M = cfg.count if cfg.count is not None else 64
    data = laurent.laurent_coefficients(f, K, K, M)
    rec = {"field": f.name, **data.to_json()}
    if cfg.shift_order is not None:
        rec["identity_check"] = laurent.laurent_lie_taylor_check(f, cfg.shift_order, data)
    ok = rec.get("identity_check", {}).get("pass", True)
    return [rec], (["n", "re", "im"], [list(r) for r in data.rows()]), ok


def cmd_suite(cfg: RunConfig):
    recs = suite.run_suite(cfg.seed, cfg.jobs)
    ok = all(r["pass"] for r in recs)
    recs.append({"summary": True, "passed": sum(r["pass"] for r in recs), "total": len(recs), "pass": ok})
    return recs, None, ok


COMMANDS = {
    "derive": cmd_derive, "taylor": cmd_taylor, "majorant": cmd_majorant, "seminorm": cmd_seminorm,
    "entire-check": cmd_entire_check, "riemann": cmd_riemann, "cauchy-check": cmd_cauchy_check,
    "steiner": cmd_steiner, "continue": cmd_continue, "extend": cmd_extend,
    "verify-extension": cmd_verify_extension, "laurent": cmd_laurent, "suite": cmd_suite,
}


# ---------------------------------------------------------------- output


def _clean(obj):
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def render_json(command: str, records: list[dict]) -> str:
    lines = []
    for rec in records:
        rec = {"command": command, "schema_version": SCHEMA_VERSION, **_clean(rec)}
        lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _flatten(obj, prefix: str = "") -> dict:
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list):
        out[prefix] = json.dumps(obj, separators=(",", ":"))
    else:
        out[prefix] = obj
    return out


def render_csv(records: list[dict], table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if table is not None:
        header, rows = table
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
        return buf.getvalue()
    flat = [_flatten(_clean(r)) for r in records]
    header = []
    for r in flat:
        header.extend(k for k in r if k not in header)
    w.writerow(header)
    for r in flat:
        w.writerow([repr(r[k]) if isinstance(r.get(k), float) else r.get(k, "") for k in header])
    return buf.getvalue()


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lietaylor", description="Lie-Taylor analysis of functions on matrix groups.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    p.add_argument("--group")
    p.add_argument("--field", help="built-in field name or JSON description (inline or *.json path)")
    p.add_argument("--method", help="exact | cauchy[:nodes[:radius]] | fd[:step[:levels]]")
    p.add_argument("--order", type=int, help="truncation order N (window size for laurent)")
    p.add_argument("--shift-order", type=int, dest="shift_order", help="shift order K")
    p.add_argument("--radius", type=float)
    p.add_argument("--target", help="group element: complex scalar, coordinates or matrix (JSON)")
    p.add_argument("--path", help="segments as JSON list or *.json path")
    p.add_argument("--point", help="base point, same syntax as --target")
    p.add_argument("--alpha", help="comma-separated multi-index for derive")
    p.add_argument("--count", type=int, help="sample count (node count for laurent)")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out")
    p.add_argument("--jobs", type=int)
    return p


def make_config(args: argparse.Namespace) -> RunConfig:
    base = load_config(args.config) if args.config else {}
    for f in dc_fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            base[f.name] = v
    cfg = RunConfig(**base)
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"format: expected json or csv, got {cfg.format!r}")
    if cfg.jobs < 1:
        raise ConfigError("jobs: must be >= 1")
    return cfg


def run(argv: Optional[list[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        records, table, ok = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"lietaylor: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidArgument, NotFound) as exc:
        print(f"lietaylor: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LieTaylorError as exc:
        print(f"lietaylor: refused: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    text = render_csv(records, table) if cfg.format == "csv" else render_json(args.command, records)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
