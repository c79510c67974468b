"""Finite G-H bibundles, principality and the equivalence-bibundle conditions."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AxiomError, ParseError
from .groupoid import UNDEFINED, FiniteGroupoid, _ids, _load_json


def _frozen(a):
    a = np.asarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Bibundle:
    """Points 0..n-1 with base maps and action tables.

    ``left[x, m]`` is x.m (defined iff s(x) = tau(m)); ``right[m, h]`` is
    m.h (defined iff sigma(m) = t(h)); undefined entries are -1.
    """

    G: FiniteGroupoid
    H: FiniteGroupoid
    tau: np.ndarray
    sigma: np.ndarray
    left: np.ndarray
    right: np.ndarray
    name: str = ""

    def __post_init__(self):
        for attr in ("tau", "sigma", "left", "right"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))

    @property
    def n_points(self) -> int:
        return len(self.tau)

    def __repr__(self):
        return f"<Bibundle {self.name or ''} {self.G!r} -> {self.n_points} points <- {self.H!r}>"


def check_bibundle_axioms(B: Bibundle) -> None:
    G, H = B.G, B.H
    tau, sigma, L, R = B.tau, B.sigma, B.left, B.right
    npts = B.n_points
    if npts and (tau.min() < 0 or tau.max() >= G.n_objects):
        raise AxiomError("tau lands in G_0")
    if npts and (sigma.min() < 0 or sigma.max() >= H.n_objects):
        raise AxiomError("sigma lands in H_0")
    if L.shape != (G.n_arrows, npts) or R.shape != (npts, H.n_arrows):
        raise AxiomError("action table shapes")

    defined = G.src[:, None] == tau[None, :]
    bad = np.argwhere((L >= 0) != defined)
    if len(bad):
        x, m = bad[0]
        raise AxiomError("left action defined exactly when s(x) = tau(m)", (int(x), int(m)))
    xs, ms = np.nonzero(defined)
    xm = L[xs, ms]
    if len(xm) and xm.max() >= npts:
        raise AxiomError("left action lands in M")
    bad = np.nonzero(tau[xm] != G.tgt[xs])[0]
    if len(bad):
        i = bad[0]
        raise AxiomError("tau(x.m) = t(x)", (int(xs[i]), int(ms[i])))
    pts = np.arange(npts)
    bad = np.nonzero(L[G.unit[tau], pts] != pts)[0]
    if len(bad):
        raise AxiomError("units act trivially on the left", (int(bad[0]),))
    gx, gy, gxy = G.composable_pairs
    for x, y, xy in zip(gx, gy, gxy):
        ms_y = np.nonzero(tau == G.src[y])[0]
        bad = np.nonzero(L[x, L[y, ms_y]] != L[xy, ms_y])[0]
        if len(bad):
            raise AxiomError("x.(y.m) = (xy).m", (int(x), int(y), int(ms_y[bad[0]])))

    defined = sigma[:, None] == H.tgt[None, :]
    bad = np.argwhere((R >= 0) != defined)
    if len(bad):
        m, h = bad[0]
        raise AxiomError("right action defined exactly when sigma(m) = t(h)", (int(m), int(h)))
    ms, hs = np.nonzero(defined)
    mh = R[ms, hs]
    if len(mh) and mh.max() >= npts:
        raise AxiomError("right action lands in M")
    bad = np.nonzero(sigma[mh] != H.src[hs])[0]
    if len(bad):
        i = bad[0]
        raise AxiomError("sigma(m.h) = s(h)", (int(ms[i]), int(hs[i])))
    bad = np.nonzero(R[pts, H.unit[sigma]] != pts)[0]
    if len(bad):
        raise AxiomError("units act trivially on the right", (int(bad[0]),))
    hx, hy, hxy = H.composable_pairs
    for h, k, hk in zip(hx, hy, hxy):
        ms_h = np.nonzero(sigma == H.tgt[h])[0]
        bad = np.nonzero(R[R[ms_h, h], k] != R[ms_h, hk])[0]
        if len(bad):
            raise AxiomError("(m.h).k = m.(hk)", (int(ms_h[bad[0]]), int(h), int(k)))

    # commutation
    bad = np.nonzero(tau[mh] != tau[ms])[0]
    if len(bad):
        i = bad[0]
        raise AxiomError("commutation: tau(m.h) = tau(m)", (int(ms[i]), int(hs[i])))
    xs, ms_l = np.nonzero(L >= 0)
    bad = np.nonzero(sigma[L[xs, ms_l]] != sigma[ms_l])[0]
    if len(bad):
        i = bad[0]
        raise AxiomError("commutation: sigma(x.m) = sigma(m)", (int(xs[i]), int(ms_l[i])))
    for x, m in zip(xs, ms_l):
        hs_m = np.nonzero(H.tgt == sigma[m])[0]
        lhs = R[L[x, m], hs_m]
        rhs = L[x, R[m, hs_m]]
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            raise AxiomError("commutation: (x.m).h = x.(m.h)", (int(x), int(m), int(hs_m[bad[0]])))


def validate_bibundle(G: FiniteGroupoid, H: FiniteGroupoid, raw) -> Bibundle:
    """Parse a bibundle description and check every action and commutation identity."""
    data = _load_json(raw)
    if not isinstance(data, dict):
        raise ParseError("bibundle description must be a JSON object")
    missing = [f for f in ("points", "tau", "sigma", "left_act", "right_act") if f not in data]
    if missing:
        raise ParseError(f"bibundle description lacks fields {missing}")
    try:
        npts = int(data["points"])
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    tau = np.array(_ids(data["tau"], "tau"), dtype=np.int64)
    sigma = np.array(_ids(data["sigma"], "sigma"), dtype=np.int64)
    if len(tau) != npts or len(sigma) != npts:
        raise ParseError("tau and sigma need one entry per point")
    L = np.full((G.n_arrows, npts), UNDEFINED, dtype=np.int64)
    for entry in data["left_act"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ParseError(f"left_act entry {entry!r} must be [arrow, point, point]")
        x, m, xm = _ids(entry, "left_act")
        if not (0 <= x < G.n_arrows and 0 <= m < npts and 0 <= xm < npts):
            raise ParseError(f"left_act entry {entry!r} out of range")
        L[x, m] = xm
    R = np.full((npts, H.n_arrows), UNDEFINED, dtype=np.int64)
    for entry in data["right_act"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise ParseError(f"right_act entry {entry!r} must be [point, arrow, point]")
        m, h, mh = _ids(entry, "right_act")
        if not (0 <= h < H.n_arrows and 0 <= m < npts and 0 <= mh < npts):
            raise ParseError(f"right_act entry {entry!r} out of range")
        R[m, h] = mh
    B = Bibundle(G, H, tau, sigma, L, R, name=str(data.get("name", "")))
    check_bibundle_axioms(B)
    return B


def bibundle_to_dict(B: Bibundle) -> dict:
    xs, ms = np.nonzero(B.left >= 0)
    ms_r, hs = np.nonzero(B.right >= 0)
    out = {
        "points": B.n_points,
        "tau": B.tau.tolist(),
        "sigma": B.sigma.tolist(),
        "left_act": [[int(x), int(m), int(B.left[x, m])] for x, m in zip(xs, ms)],
        "right_act": [[int(m), int(h), int(B.right[m, h])] for m, h in zip(ms_r, hs)],
    }
    if B.name:
        out["name"] = B.name
    return out


# -- constructions ------------------------------------------------------------

def rectangle_bibundle(G: FiniteGroupoid, H: FiniteGroupoid) -> Bibundle:
    """Pair(n)-Pair(k) bibundle on the n x k rectangle; point ``i*k + a`` is (i, a).

    (i<-j).(j, a) = (i, a) and (i, a).(a<-b) = (i, b).
    """
    n, k = G.n_objects, H.n_objects
    if G.n_arrows != n * n or H.n_arrows != k * k:
        raise ValueError("rectangle bibundle needs two pair groupoids")
    pts = np.arange(n * k)
    row, col = np.divmod(pts, k)
    L = np.full((n * n, n * k), UNDEFINED)
    for x in range(n * n):
        i, j = divmod(x, n)
        for a in range(k):
            L[x, j * k + a] = i * k + a
    R = np.full((n * k, k * k), UNDEFINED)
    for h in range(k * k):
        a, b = divmod(h, k)
        for i in range(n):
            R[i * k + a, h] = i * k + b
    return Bibundle(G, H, row, col, L, R, name=f"rect:{n}x{k}")


def translation_bibundle(G: FiniteGroupoid) -> Bibundle:
    """G as a G-G bibundle by left and right translation (tau = t, sigma = s)."""
    k = G.n_arrows
    L = np.full((k, k), UNDEFINED)
    R = np.full((k, k), UNDEFINED)
    x, y, xy = G.composable_pairs
    L[x, y] = xy
    R[x, y] = xy
    return Bibundle(G, G, G.tgt, G.src, L, R, name=f"self:{G.name}")


def left_translation_bibundle(G: FiniteGroupoid, units: FiniteGroupoid) -> Bibundle:
    """G acting on itself on the left, with the unit groupoid on G_0 acting trivially on the right."""
    k = G.n_arrows
    if units.n_objects != G.n_objects or units.n_arrows != G.n_objects:
        raise ValueError("right groupoid must be the unit groupoid on G_0")
    L = np.full((k, k), UNDEFINED)
    x, y, xy = G.composable_pairs
    L[x, y] = xy
    R = np.full((k, G.n_objects), UNDEFINED)
    R[np.arange(k), G.src] = np.arange(k)
    return Bibundle(G, units, G.tgt, G.src, L, R, name=f"left:{G.name}")


def swap_bibundle(B: Bibundle) -> Bibundle:
    """The H-G bibundle with h.m = m.h^-1 and m.x = x^-1.m."""
    G, H = B.G, B.H
    npts = B.n_points
    L = np.full((H.n_arrows, npts), UNDEFINED)
    R = np.full((npts, G.n_arrows), UNDEFINED)
    for h in range(H.n_arrows):
        hinv = H.inverse[h]
        ms = np.nonzero(B.sigma == H.src[h])[0]
        L[h, ms] = B.right[ms, hinv]
    for x in range(G.n_arrows):
        xinv = G.inverse[x]
        ms = np.nonzero(B.tau == G.tgt[x])[0]
        R[ms, x] = B.left[xinv, ms]
    return Bibundle(H, G, B.sigma, B.tau, L, R, name=f"swap:{B.name}")


# -- principality and equivalence ---------------------------------------------

@dataclass
class PrincipalityReport:
    side: str
    surjective_base: bool
    free: bool
    proper: bool = True  # maps between finite discrete sets are always proper
    witnesses: dict = field(default_factory=dict)

    @property
    def principal(self) -> bool:
        return self.surjective_base and self.free


def check_principality(B: Bibundle, side: str) -> PrincipalityReport:
    if side == "left":
        K, base, table = B.G, B.tau, B.left
        xs, ms = np.nonzero(table >= 0)
        fixed = table[xs, ms] == ms
        non_unit = K.unit[K.src[xs]] != xs
    elif side == "right":
        K, base, table = B.H, B.sigma, B.right
        ms, xs = np.nonzero(table >= 0)
        fixed = table[ms, xs] == ms
        non_unit = K.unit[K.src[xs]] != xs
    else:
        raise ValueError("side must be 'left' or 'right'")
    missing = sorted(set(range(K.n_objects)) - set(base.tolist()))
    offenders = np.nonzero(fixed & non_unit)[0]
    witnesses = {}
    if missing:
        witnesses["objects_not_hit"] = missing
    if len(offenders):
        i = offenders[0]
        witnesses["fixed_point"] = {"arrow": int(xs[i]), "point": int(ms[i])}
    return PrincipalityReport(side, not missing, not len(offenders), True, witnesses)


def _orbits(npts, a, b):
    graph = coo_matrix((np.ones(len(a)), (a, b)), shape=(npts, npts))
    return connected_components(graph, directed=True, connection="weak")


def quotient_by_right(B: Bibundle):
    """Labels of the H-orbits of M (M/H)."""
    ms, hs = np.nonzero(B.right >= 0)
    return _orbits(B.n_points, ms, B.right[ms, hs])


def quotient_by_left(B: Bibundle):
    """Labels of the G-orbits of M (G\\M)."""
    xs, ms = np.nonzero(B.left >= 0)
    return _orbits(B.n_points, ms, B.left[xs, ms])


@dataclass
class Condition:
    name: str
    passed: bool
    witnesses: dict = field(default_factory=dict)


@dataclass
class EquivalenceReport:
    conditions: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failing(self) -> list:
        return [c for c in self.conditions if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": [
                {"name": c.name, "pass": c.passed, "witnesses": c.witnesses} for c in self.conditions
            ],
        }


def _induced_bijection(labels, n_classes, base, n_base):
    """Does ``base`` (constant on classes) induce a bijection classes -> 0..n_base-1?"""
    image = {}
    witnesses = {}
    for p, c in enumerate(labels):
        image.setdefault(int(c), set()).add(int(base[p]))
    not_constant = [c for c, v in image.items() if len(v) > 1]
    if not_constant:
        witnesses["class_not_constant"] = not_constant[0]
    values = [min(v) for _, v in sorted(image.items())]
    if len(set(values)) != len(values):
        seen = {}
        for c, v in enumerate(values):
            if v in seen:
                witnesses["classes_with_same_image"] = [seen[v], c]
                break
            seen[v] = c
    missing = sorted(set(range(n_base)) - set(values))
    if missing:
        witnesses["objects_not_hit"] = missing
    witnesses["n_classes"] = int(n_classes)
    witnesses["n_objects"] = int(n_base)
    ok = not not_constant and len(set(values)) == len(values) and not missing
    return ok, witnesses


def check_equivalence(B: Bibundle) -> EquivalenceReport:
    """Both actions principal; tau: M/H -> G_0 and sigma: G\\M -> H_0 bijective."""
    conds = []
    for side in ("left", "right"):
        rep = check_principality(B, side)
        conds.append(Condition(f"{side}-principal", rep.principal, rep.witnesses))
    n_cls, labels = quotient_by_right(B)
    ok, wit = _induced_bijection(labels, n_cls, B.tau, B.G.n_objects)
    conds.append(Condition("M/H = G_0 via tau", ok, wit))
    n_cls, labels = quotient_by_left(B)
    ok, wit = _induced_bijection(labels, n_cls, B.sigma, B.H.n_objects)
    conds.append(Condition("G\\M = H_0 via sigma", ok, wit))
    return EquivalenceReport(conds)


def fibers_are_free_orbits(B: Bibundle) -> bool:
    """Each sigma-fiber is one free G-orbit and each tau-fiber one free H-orbit."""
    _, left_labels = quotient_by_left(B)
    _, right_labels = quotient_by_right(B)
    for base, labels in ((B.sigma, left_labels), (B.tau, right_labels)):
        for v in np.unique(base):
            if len(np.unique(labels[base == v])) != 1:
                return False
    return check_principality(B, "left").free and check_principality(B, "right").free


def find_equivalence_bibundle(G: FiniteGroupoid, H: FiniteGroupoid, max_points: int):
    """Exhaustive search for an equivalence bibundle with at most ``max_points`` points.

    Returns the first one found or None.  Exponential; meant for tiny groupoids.
    """
    for npts in range(1, max_points + 1):
        # points sorted by (tau, sigma) to quotient out relabelling
        labels = [(a, b) for a in range(G.n_objects) for b in range(H.n_objects)]
        for combo in _multisets(len(labels), npts):
            tau = np.array([labels[c][0] for c in combo])
            sigma = np.array([labels[c][1] for c in combo])
            if set(tau.tolist()) != set(range(G.n_objects)) or set(sigma.tolist()) != set(range(H.n_objects)):
                continue
            for L in _action_tables(G, tau, sigma, side="left"):
                for R in _action_tables(H, sigma, tau, side="right"):
                    B = Bibundle(G, H, tau, sigma, L, R)
                    try:
                        check_bibundle_axioms(B)
                    except AxiomError:
                        continue
                    if check_equivalence(B).passed:
                        return B
    return None


def _multisets(n_labels, size):
    def rec(start, remaining):
        if remaining == 0:
            yield ()
            return
        for c in range(start, n_labels):
            for rest in rec(c, remaining - 1):
                yield (c,) + rest
    yield from rec(0, size)


def _action_tables(K: FiniteGroupoid, base, other, side):
    """Candidate action tables: units act trivially, non-units respect both base maps."""
    npts = len(base)
    slots, choices = [], []
    for x in range(K.n_arrows):
        for m in range(npts):
            if base[m] != (K.src[x] if side == "left" else K.tgt[x]):
                continue
            if K.is_unit(x):
                continue
            target_base = K.tgt[x] if side == "left" else K.src[x]
            cands = [p for p in range(npts) if base[p] == target_base and other[p] == other[m]]
            if not cands:
                return
            slots.append((x, m))
            choices.append(cands)
    for pick in product(*choices):
        if side == "left":
            T = np.full((K.n_arrows, npts), UNDEFINED)
            for m in range(npts):
                T[K.unit[base[m]], m] = m
            for (x, m), p in zip(slots, pick):
                T[x, m] = p
        else:
            T = np.full((npts, K.n_arrows), UNDEFINED)
            for m in range(npts):
                T[m, K.unit[base[m]]] = m
            for (x, m), p in zip(slots, pick):
                T[m, x] = p
        yield T
