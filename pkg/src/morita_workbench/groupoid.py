"""Finite groupoids: representation, exhaustive validation, builtins, orbits.

Arrows and objects are dense integer ids.  ``compose[x, y]`` is the arrow
"x after y" and is defined (``>= 0``) exactly when ``src[x] == tgt[y]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AxiomError, InvalidParameter, ParseError

UNDEFINED = -1


def _frozen(a):
    a = np.asarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    n_objects: int
    src: np.ndarray
    tgt: np.ndarray
    compose: np.ndarray
    inverse: np.ndarray
    unit: np.ndarray
    name: str = ""

    def __post_init__(self):
        for attr in ("src", "tgt", "compose", "inverse", "unit"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    def mul(self, x: int, y: int) -> int:
        xy = int(self.compose[x, y])
        if xy == UNDEFINED:
            raise AxiomError("composability", (x, y), f"{x}*{y} is not composable")
        return xy

    def same_as(self, other: "FiniteGroupoid") -> bool:
        if self is other:
            return True
        return (
            self.n_objects == other.n_objects
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.tgt, other.tgt)
            and np.array_equal(self.compose, other.compose)
            and np.array_equal(self.inverse, other.inverse)
            and np.array_equal(self.unit, other.unit)
        )

    @cached_property
    def composable_pairs(self):
        """Arrays ``(x, y, xy)`` over every composable pair."""
        x, y = np.nonzero(self.compose >= 0)
        return x, y, self.compose[x, y]

    def is_unit(self, x: int) -> bool:
        return bool(self.unit[self.src[x]] == x)

    def __repr__(self):
        label = self.name or "FiniteGroupoid"
        return f"<{label}: {self.n_objects} objects, {self.n_arrows} arrows>"


def check_axioms(G: FiniteGroupoid) -> None:
    """Exhaustively check every groupoid axiom; raise AxiomError on the first failure."""
    k, n = G.n_arrows, G.n_objects
    src, tgt, C, inv, unit = G.src, G.tgt, G.compose, G.inverse, G.unit
    if k and (src.min() < 0 or src.max() >= n or tgt.min() < 0 or tgt.max() >= n):
        raise AxiomError("source/target in object range")
    if C.shape != (k, k) or inv.shape != (k,) or unit.shape != (n,):
        raise AxiomError("table shapes")

    composable = src[:, None] == tgt[None, :]
    bad = np.argwhere((C >= 0) & ~composable)
    if len(bad):
        x, y = bad[0]
        raise AxiomError("composability", (int(x), int(y)),
                         f"compose({x},{y}) given but src({x}) != tgt({y})")
    bad = np.argwhere((C < 0) & composable)
    if len(bad):
        x, y = bad[0]
        raise AxiomError("composition total on composable pairs", (int(x), int(y)))
    x, y, xy = G.composable_pairs
    if len(xy) and (xy.max() >= k):
        raise AxiomError("composition lands in arrows")
    bad = np.nonzero((tgt[xy] != tgt[x]) | (src[xy] != src[y]))[0]
    if len(bad):
        i = bad[0]
        raise AxiomError("t(xy)=t(x), s(xy)=s(y)", (int(x[i]), int(y[i]), int(xy[i])))

    if n and (unit.min() < 0 or unit.max() >= k):
        raise AxiomError("unit is an arrow")
    bad = np.nonzero((src[unit] != np.arange(n)) | (tgt[unit] != np.arange(n)))[0]
    if len(bad):
        raise AxiomError("unit(q) is a loop at q", (int(bad[0]), int(unit[bad[0]])))
    ar = np.arange(k)
    bad = np.nonzero(C[unit[tgt], ar] != ar)[0]
    if len(bad):
        raise AxiomError("left unit law", (int(bad[0]),))
    bad = np.nonzero(C[ar, unit[src]] != ar)[0]
    if len(bad):
        raise AxiomError("right unit law", (int(bad[0]),))

    if k and (inv.min() < 0 or inv.max() >= k):
        raise AxiomError("inverse is an arrow")
    bad = np.nonzero((src[inv] != tgt) | (tgt[inv] != src))[0]
    if len(bad):
        raise AxiomError("inverse swaps source and target", (int(bad[0]), int(inv[bad[0]])))
    bad = np.nonzero(C[inv, ar] != unit[src])[0]
    if len(bad):
        raise AxiomError("inverse(x)*x = unit(s(x))", (int(bad[0]),))
    bad = np.nonzero(C[ar, inv] != unit[tgt])[0]
    if len(bad):
        raise AxiomError("x*inverse(x) = unit(t(x))", (int(bad[0]),))

    # associativity over all composable triples, vectorised over the last arrow
    for a, b, ab in zip(x, y, xy):
        zs = np.nonzero(tgt == src[b])[0]
        lhs = C[ab, zs]
        rhs = C[a, C[b, zs]]
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            raise AxiomError("associativity", (int(a), int(b), int(zs[bad[0]])))


def _ids(entries, name):
    try:
        return [int(v) for v in entries]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: expected integers, got {entries!r}") from exc


def validate_groupoid(raw) -> FiniteGroupoid:
    """Parse a groupoid description (dict, JSON text or path) and verify all axioms.

    Every composable pair needs a ``compose`` entry and every arrow an
    ``inverse`` entry; missing entries are errors, never defaults.
    """
    data = _load_json(raw)
    if not isinstance(data, dict):
        raise ParseError("groupoid description must be a JSON object")
    missing = [f for f in ("objects", "arrows", "compose", "inverse", "units") if f not in data]
    if missing:
        raise ParseError(f"groupoid description lacks fields {missing}")
    try:
        n = int(data["objects"])
        arrows = list(data["arrows"])
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    if n < 0:
        raise ParseError("objects must be non-negative")
    k = len(arrows)
    src = np.full(k, UNDEFINED, dtype=np.int64)
    tgt = np.full(k, UNDEFINED, dtype=np.int64)
    for entry in arrows:
        if not isinstance(entry, dict) or not {"id", "src", "tgt"} <= entry.keys():
            raise ParseError(f"arrow entry {entry!r} needs id, src, tgt")
        a, s, t = _ids((entry["id"], entry["src"], entry["tgt"]), "arrow")
        if not 0 <= a < k:
            raise ParseError(f"arrow ids must be dense 0..{k - 1}, got {a}")
        if src[a] != UNDEFINED:
            raise ParseError(f"duplicate arrow id {a}")
        if not (0 <= s < n and 0 <= t < n):
            raise ParseError(f"arrow {a}: src/tgt outside 0..{n - 1}")
        src[a], tgt[a] = s, t

    C = np.full((k, k), UNDEFINED, dtype=np.int64)
    for entry in data["compose"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ParseError(f"compose entry {entry!r} must be [x, y, xy]")
        a, b, ab = _ids(entry, "compose")
        if not all(0 <= v < k for v in (a, b, ab)):
            raise ParseError(f"compose entry {entry!r} references unknown arrows")
        if C[a, b] != UNDEFINED and C[a, b] != ab:
            raise ParseError(f"conflicting compose entries for ({a}, {b})")
        C[a, b] = ab

    inv = np.full(k, UNDEFINED, dtype=np.int64)
    for entry in data["inverse"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ParseError(f"inverse entry {entry!r} must be [x, xinv]")
        a, b = _ids(entry, "inverse")
        if not (0 <= a < k and 0 <= b < k):
            raise ParseError(f"inverse entry {entry!r} references unknown arrows")
        inv[a] = b
    missing_inv = np.nonzero(inv == UNDEFINED)[0]
    if len(missing_inv):
        raise AxiomError("inverse defined on every arrow", (int(missing_inv[0]),))

    unit = np.full(n, UNDEFINED, dtype=np.int64)
    for entry in data["units"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ParseError(f"units entry {entry!r} must be [object, arrow]")
        q, a = _ids(entry, "units")
        if not (0 <= q < n and 0 <= a < k):
            raise ParseError(f"units entry {entry!r} out of range")
        unit[q] = a
    missing_unit = np.nonzero(unit == UNDEFINED)[0]
    if len(missing_unit):
        raise AxiomError("unit defined on every object", (int(missing_unit[0]),))

    G = FiniteGroupoid(n, src, tgt, C, inv, unit, name=str(data.get("name", "")))
    check_axioms(G)
    return G


def _load_json(raw):
    if isinstance(raw, dict):
        return raw
    if isinstance(raw, Path) or (isinstance(raw, str) and not raw.lstrip().startswith("{")):
        try:
            raw = Path(raw).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {raw}: {exc}") from exc
    try:
        return json.loads(raw)
    except (TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def groupoid_to_dict(G: FiniteGroupoid) -> dict:
    x, y, xy = G.composable_pairs
    out = {
        "objects": G.n_objects,
        "arrows": [{"id": a, "src": int(G.src[a]), "tgt": int(G.tgt[a])} for a in range(G.n_arrows)],
        "compose": [[int(a), int(b), int(c)] for a, b, c in zip(x, y, xy)],
        "inverse": [[a, int(G.inverse[a])] for a in range(G.n_arrows)],
        "units": [[q, int(G.unit[q])] for q in range(G.n_objects)],
    }
    if G.name:
        out["name"] = G.name
    return out


# -- builtins -----------------------------------------------------------------

def unit_groupoid(n: int) -> FiniteGroupoid:
    if n < 1:
        raise InvalidParameter("unit groupoid needs n >= 1")
    ids = np.arange(n)
    C = np.full((n, n), UNDEFINED)
    C[ids, ids] = ids
    return FiniteGroupoid(n, ids, ids, C, ids, ids, name=f"unit:{n}")


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Pair groupoid on ``n`` points; arrow ``i*n + j`` goes from j to i."""
    if n < 1:
        raise InvalidParameter("pair groupoid needs n >= 1")
    i, j = np.divmod(np.arange(n * n), n)
    tgt, src = i, j
    C = np.full((n * n, n * n), UNDEFINED)
    for a in range(n * n):
        for c in range(n):
            # (i<-j)(j<-c) = (i<-c)
            C[a, j[a] * n + c] = i[a] * n + c
    inv = j * n + i
    unit = np.arange(n) * (n + 1)
    return FiniteGroupoid(n, src, tgt, C, inv, unit, name=f"pair:{n}")


def _check_group_table(table) -> np.ndarray:
    T = np.asarray(table)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 1:
        raise InvalidParameter("group table must be a non-empty square array")
    g = T.shape[0]
    if T.min() < 0 or T.max() >= g:
        raise InvalidParameter("group table entries out of range")
    ids = np.arange(g)
    if not any(np.array_equal(T[e], ids) and np.array_equal(T[:, e], ids) for e in range(g)):
        raise InvalidParameter("group table has no identity")
    if any(sorted(row) != list(ids) for row in T.tolist()) or any(
        sorted(col) != list(ids) for col in T.T.tolist()
    ):
        raise InvalidParameter("group table is not a Latin square (missing inverses)")
    # (ab)c == a(bc) for all triples
    if not np.array_equal(T[T[:, :, None], ids[None, None, :]], T[ids[:, None, None], T[None, :, :]]):
        raise InvalidParameter("group table is not associative")
    return T


def cyclic_table(n: int) -> np.ndarray:
    if n < 1:
        raise InvalidParameter("cyclic group needs n >= 1")
    ids = np.arange(n)
    return (ids[:, None] + ids[None, :]) % n


def symmetric3_table() -> np.ndarray:
    from itertools import permutations

    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(k) = p(q(k))
    return np.array([[index[tuple(p[q[k]] for k in range(3))] for q in perms] for p in perms])


def group_groupoid(table, name: str = "group") -> FiniteGroupoid:
    T = _check_group_table(table)
    g = T.shape[0]
    ids = np.arange(g)
    e = next(e for e in ids if np.array_equal(T[e], ids))
    inv = np.array([int(np.nonzero(T[a] == e)[0][0]) for a in ids])
    zeros = np.zeros(g, dtype=np.int64)
    return FiniteGroupoid(1, zeros, zeros, T, inv, np.array([e]), name=name)


def action_groupoid(table, action, name: str = "action") -> FiniteGroupoid:
    """Action groupoid of a group (Cayley table) acting on a finite set.

    ``action[g][p]`` is g.p.  Arrow ``g*|X| + p`` goes from p to g.p; the
    product (h, g.p)(g, p) is (hg, p).
    """
    T = _check_group_table(table)
    A = np.asarray(action)
    g = T.shape[0]
    if A.ndim != 2 or A.shape[0] != g or A.shape[1] < 1:
        raise InvalidParameter("action table must have one row per group element")
    npts = A.shape[1]
    if A.min() < 0 or A.max() >= npts:
        raise InvalidParameter("action table entries out of range")
    ids = np.arange(g)
    e = next(e for e in ids if np.array_equal(T[e], ids))
    if not np.array_equal(A[e], np.arange(npts)):
        raise InvalidParameter("identity does not act trivially")
    for h in range(g):
        for k in range(g):
            if not np.array_equal(A[h][A[k]], A[T[h, k]]):
                raise InvalidParameter(f"action not compatible with product at ({h}, {k})")
    k_arrows = g * npts
    gs, ps = np.divmod(np.arange(k_arrows), npts)
    src = ps
    tgt = A[gs, ps]
    C = np.full((k_arrows, k_arrows), UNDEFINED)
    for a in range(k_arrows):
        for b in range(k_arrows):
            if src[a] == tgt[b]:
                C[a, b] = T[gs[a], gs[b]] * npts + ps[b]
    g_inv = np.array([int(np.nonzero(T[a] == e)[0][0]) for a in ids])
    inv = g_inv[gs] * npts + tgt
    unit = e * npts + np.arange(npts)
    return FiniteGroupoid(npts, src, tgt, C, inv, unit, name=name)


def disjoint_union(*groupoids: FiniteGroupoid) -> FiniteGroupoid:
    src, tgt, inv, unit, blocks = [], [], [], [], []
    n_off = a_off = 0
    for G in groupoids:
        src.append(G.src + n_off)
        tgt.append(G.tgt + n_off)
        inv.append(G.inverse + a_off)
        unit.append(G.unit + a_off)
        blocks.append((a_off, G))
        n_off += G.n_objects
        a_off += G.n_arrows
    C = np.full((a_off, a_off), UNDEFINED)
    for off, G in blocks:
        k = G.n_arrows
        sub = G.compose.copy()
        sub[sub >= 0] += off
        C[off:off + k, off:off + k] = sub
    name = "+".join(G.name or "?" for G in groupoids)
    return FiniteGroupoid(n_off, np.concatenate(src), np.concatenate(tgt), C,
                          np.concatenate(inv), np.concatenate(unit), name=name)


def make_builtin(kind: str, n: int | None = None, table=None, action=None) -> FiniteGroupoid:
    """Construct a named groupoid.

    ``kind`` is one of ``unit``, ``pair``, ``cyclic``, ``s3``, ``group``
    (needs ``table``) and ``action`` (needs ``table`` and ``action``).  The
    short forms ``"pair:3"``, ``"unit:2"``, ``"cyclic:3"`` are accepted.
    """
    if ":" in kind:
        kind, arg = kind.split(":", 1)
        try:
            n = int(arg)
        except ValueError as exc:
            raise InvalidParameter(f"bad size in {kind}:{arg}") from exc
    if kind in ("unit", "pair", "cyclic") and (n is None or n < 1):
        raise InvalidParameter(f"{kind} needs n >= 1")
    if kind == "unit":
        G = unit_groupoid(n)
    elif kind == "pair":
        G = pair_groupoid(n)
    elif kind == "cyclic":
        G = group_groupoid(cyclic_table(n), name=f"cyclic:{n}")
    elif kind == "s3":
        G = group_groupoid(symmetric3_table(), name="s3")
    elif kind == "group":
        if table is None:
            raise InvalidParameter("group needs a table")
        G = group_groupoid(table)
    elif kind == "action":
        if table is None or action is None:
            raise InvalidParameter("action needs a group table and an action table")
        G = action_groupoid(table, action)
    else:
        raise InvalidParameter(f"unknown builtin kind {kind!r}")
    check_axioms(G)
    return G


# -- orbits -------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitDecomposition:
    orbits: list
    basepoints: list
    isotropy: list = field(default_factory=list)

    @property
    def isotropy_sizes(self) -> list:
        return [len(iso) for iso in self.isotropy]


def orbit_decomposition(G: FiniteGroupoid) -> OrbitDecomposition:
    """Orbits (objects connected by an arrow) and the isotropy group at the
    smallest object of each orbit."""
    n = G.n_objects
    graph = coo_matrix((np.ones(G.n_arrows), (G.src, G.tgt)), shape=(n, n))
    n_comp, labels = connected_components(graph, directed=True, connection="weak")
    orbits = [sorted(np.nonzero(labels == c)[0].tolist()) for c in range(n_comp)]
    orbits.sort()
    basepoints = [orb[0] for orb in orbits]
    isotropy = [np.nonzero((G.src == b) & (G.tgt == b))[0].tolist() for b in basepoints]
    return OrbitDecomposition(orbits, basepoints, isotropy)
