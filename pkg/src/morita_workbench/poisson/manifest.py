"""User-defined coordinate groupoids and actions from a JSON manifest.

Maps are lists of arithmetic expressions, one per output coordinate, over
indexed variables such as ``x[0]`` or ``m[1]``.  Expressions are parsed with
``ast`` and only numbers, the named vectors, + - * / **, unary minus, exp and
log are accepted, so a manifest cannot run code.

    {
      "name": "aff(1)",
      "base_dim": 0, "arrow_dim": 2,
      "source": [], "target": [],
      "compose": ["x[0]*y[0]", "x[0]*y[1] + x[1]"],
      "inverse": ["1/x[0]", "-x[1]/x[0]"],
      "unit": ["1", "0"],
      "arrow_from_source": ["exp(r[0])", "r[1]"],
      "free_box": [[-0.7, 0.7], [-1, 1]],
      "base_box": [],
      "left_action": {"dim": 1, "base_map": [], "act": ["x[0]*m[0] + x[1]"], "box": [[-1, 1]]}
    }

``arrow_from_source`` builds an arrow with source ``q`` from free parameters
``r`` drawn uniformly from ``free_box``.  A ``right_action`` may name a
different ``right_groupoid`` (a nested manifest) and uses variables m, h.
"""
from __future__ import annotations

import ast
import json
import math
import operator
from pathlib import Path

import numpy as np

from ..errors import AxiomError, DomainError, ParseError
from .charts import AXIOM_TOL, CoordinateGroupoid, SmoothAction, SmoothBibundle

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"exp": math.exp, "log": math.log}
VARIABLES = frozenset("xyqmhr")


def _compile(node, names):
    if isinstance(node, ast.Expression):
        return _compile(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda env: v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        a, b = _compile(node.left, names), _compile(node.right, names)
        return lambda env: op(a(env), b(env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        a = _compile(node.operand, names)
        return (lambda env: -a(env)) if isinstance(node.op, ast.USub) else a
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if len(node.args) != 1 or node.keywords:
            raise ParseError(f"{node.func.id} takes exactly one argument")
        f, a = _FUNCS[node.func.id], _compile(node.args[0], names)
        return lambda env: f(a(env))
    if (isinstance(node, ast.Subscript) and isinstance(node.value, ast.Name)
            and isinstance(node.slice, ast.Constant) and isinstance(node.slice.value, int)):
        var, idx = node.value.id, node.slice.value
        if var not in names:
            raise ParseError(f"variable {var!r} not available here (allowed: {', '.join(sorted(names))})")
        return lambda env: env[var][idx]
    raise ParseError(f"unsupported expression element: {ast.dump(node)[:60]}")


def compile_map(exprs, names, out_dim=None):
    """Compile a list of expressions into a function of the named vectors returning an array."""
    if not isinstance(exprs, list) or not all(isinstance(e, str) for e in exprs):
        raise ParseError("a map must be a list of expression strings")
    if out_dim is not None and len(exprs) != out_dim:
        raise ParseError(f"expected {out_dim} expressions, got {len(exprs)}")
    try:
        fns = [_compile(ast.parse(e, mode="eval"), set(names)) for e in exprs]
    except SyntaxError as exc:
        raise ParseError(f"cannot parse expression: {exc}") from exc

    def run(*args):
        # plain Python floats, so that x/0 and overflow raise instead of producing inf
        env = {name: [float(v) for v in np.atleast_1d(a)] for name, a in zip(names, args)}
        try:
            out = np.array([f(env) for f in fns], dtype=float)
        except IndexError as exc:
            raise ParseError(f"expression indexes past its input: {exc}") from exc
        except (TypeError, ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"expression undefined at this point: {exc}") from exc
        if not np.all(np.isfinite(out)):
            raise DomainError("expression is not finite at this point")
        return out

    return run


def _need(raw, key, kind=None):
    if key not in raw:
        raise ParseError(f"manifest is missing {key!r}")
    val = raw[key]
    if kind is not None and not isinstance(val, kind):
        raise ParseError(f"manifest field {key!r} has the wrong type")
    return val


def _box(raw, dim, key):
    box = np.asarray(raw.get(key, [[-1.0, 1.0]] * dim), dtype=float)
    if box.size == 0 and dim == 0:
        return np.zeros((0, 2))
    if box.shape != (dim, 2):
        raise ParseError(f"{key} must be a list of {dim} [low, high] pairs")
    return box


def groupoid_from_manifest(raw: dict) -> CoordinateGroupoid:
    if not isinstance(raw, dict):
        raise ParseError("manifest must be a JSON object")
    n0 = _need(raw, "base_dim", int)
    n1 = _need(raw, "arrow_dim", int)
    if n0 < 0 or n1 < n0:
        raise ParseError("need 0 <= base_dim <= arrow_dim")
    source = compile_map(_need(raw, "source"), ["x"], n0)
    target = compile_map(_need(raw, "target"), ["x"], n0)
    compose = compile_map(_need(raw, "compose"), ["x", "y"], n1)
    inverse = compile_map(_need(raw, "inverse"), ["x"], n1)
    unit = compile_map(_need(raw, "unit"), ["q"], n1)
    free_box = _box(raw, n1 - n0, "free_box")
    build = compile_map(_need(raw, "arrow_from_source"), ["q", "r"], n1)

    def arrow_with_source(q, rng):
        r = free_box[:, 0] + (free_box[:, 1] - free_box[:, 0]) * rng.random(n1 - n0)
        return build(q, r)

    return CoordinateGroupoid(
        name=str(raw.get("name", "manifest groupoid")), base_dim=n0, arrow_dim=n1,
        source=source, target=target, compose=compose, inverse=inverse, unit=unit,
        arrow_with_source=arrow_with_source, base_box=_box(raw, n0, "base_box"),
    )


def action_from_manifest(G: CoordinateGroupoid, raw: dict, side: str) -> SmoothAction:
    dim = _need(raw, "dim", int)
    names = ["x", "m"] if side == "left" else ["m", "h"]
    act = compile_map(_need(raw, "act"), names, dim)
    base_map = compile_map(_need(raw, "base_map"), ["m"], G.base_dim)
    return SmoothAction(G, dim, base_map, act, side, name=str(raw.get("name", f"{side} action")),
                        box=_box(raw, dim, "box"))


def load_manifest(source) -> dict:
    """Parse a manifest (dict, JSON text or path) into groupoid, actions and bibundle."""
    if isinstance(source, dict):
        raw = source
    else:
        text = source
        if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ParseError(f"cannot read manifest: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"manifest is not valid JSON: {exc}") from exc
    G = groupoid_from_manifest(raw)
    out = {"groupoid": G, "left": None, "right": None, "bibundle": None, "name": G.name}
    if "left_action" in raw:
        out["left"] = action_from_manifest(G, raw["left_action"], "left")
    if "right_action" in raw:
        H = groupoid_from_manifest(raw["right_groupoid"]) if "right_groupoid" in raw else G
        out["right"] = action_from_manifest(H, raw["right_action"], "right")
    if out["left"] is not None and out["right"] is not None:
        out["bibundle"] = SmoothBibundle(out["left"], out["right"], name=G.name)
    return out


def validate_manifest(loaded: dict, seed: int = 0, samples: int = 20) -> dict:
    """Sample the structure identities; raise AxiomError naming the worst one."""
    rng = np.random.default_rng(seed)
    found = {"groupoid": loaded["groupoid"].identity_residuals(rng, samples)}
    for side in ("left", "right"):
        if loaded[side] is not None:
            found[f"{side}_action"] = loaded[side].identity_residuals(rng, samples)
    if loaded["bibundle"] is not None:
        found["bibundle"] = loaded["bibundle"].commutation_residuals(rng, samples)
    for part, res in found.items():
        for name, val in res.items():
            if not val <= AXIOM_TOL:
                raise AxiomError(f"{part}:{name}", (), f"{part} violates {name} by {val:.3g}")
    return found
