"""Lie groupoids, actions and dual-bundle data presented in a single global chart."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import DomainError, InvalidParameter
from .fd import as_vec

Vec = np.ndarray
AXIOM_TOL = 1e-9


def _box(box, dim):
    b = np.asarray(box if box is not None else [[-1.0, 1.0]] * dim, dtype=float).reshape(dim, 2)
    if np.any(b[:, 0] > b[:, 1]):
        raise InvalidParameter("sampling box has lower bound above upper bound")
    return b


@dataclass(frozen=True, eq=False)
class CoordinateGroupoid:
    """A Lie groupoid with arrows in R^arrow_dim and objects in R^base_dim.

    ``arrow_with_source(q, rng)`` draws an arrow whose source is ``q``; it is
    how samples of composable data are produced.
    """

    name: str
    base_dim: int
    arrow_dim: int
    source: Callable[[Vec], Vec]
    target: Callable[[Vec], Vec]
    compose: Callable[[Vec, Vec], Vec]
    inverse: Callable[[Vec], Vec]
    unit: Callable[[Vec], Vec]
    arrow_with_source: Callable[[Vec, np.random.Generator], Vec]
    base_box: np.ndarray = None
    arrow_domain: Callable[[Vec], bool] | None = None
    base_domain: Callable[[Vec], bool] | None = None

    def __post_init__(self):
        if self.arrow_dim < self.base_dim or self.base_dim < 0:
            raise InvalidParameter("need 0 <= base_dim <= arrow_dim")
        object.__setattr__(self, "base_box", _box(self.base_box, self.base_dim))

    @property
    def fiber_dim(self) -> int:
        return self.arrow_dim - self.base_dim

    def sample_base(self, rng) -> Vec:
        lo, hi = self.base_box[:, 0], self.base_box[:, 1]
        return lo + (hi - lo) * rng.random(self.base_dim)

    def sample_arrow(self, rng, source=None) -> Vec:
        q = self.sample_base(rng) if source is None else as_vec(source)
        return as_vec(self.arrow_with_source(q, rng))

    def sample_arrow_with_target(self, rng, target) -> Vec:
        return as_vec(self.inverse(self.sample_arrow(rng, target)))

    def require_arrow(self, x):
        if self.arrow_domain is not None and not self.arrow_domain(x):
            raise DomainError(f"{self.name}: arrow {np.round(x, 6).tolist()} outside the chart")

    def require_base(self, q):
        if self.base_domain is not None and not self.base_domain(q):
            raise DomainError(f"{self.name}: object {np.round(q, 6).tolist()} outside the chart")

    def identity_residuals(self, rng, samples: int = 10) -> dict:
        """Largest violation of each structure identity over random samples."""
        out = dict.fromkeys(["unit", "inverse", "source-target", "associativity"], 0.0)
        for _ in range(samples):
            q = self.sample_base(rng)
            u = self.unit(q)
            out["unit"] = max(out["unit"], _dev(self.source(u), q), _dev(self.target(u), q))
            z = self.sample_arrow(rng)
            y = self.sample_arrow(rng, self.target(z))
            x = self.sample_arrow(rng, self.target(y))
            out["inverse"] = max(out["inverse"], _dev(self.compose(x, self.inverse(x)), self.unit(self.target(x))))
            xy = self.compose(x, y)
            out["source-target"] = max(
                out["source-target"], _dev(self.target(xy), self.target(x)), _dev(self.source(xy), self.source(y))
            )
            out["associativity"] = max(
                out["associativity"], _dev(self.compose(xy, z), self.compose(x, self.compose(y, z)))
            )
        return out


def _dev(a, b) -> float:
    a, b = as_vec(a), as_vec(b)
    return float(np.max(np.abs(a - b), initial=0.0))


@dataclass(frozen=True, eq=False)
class SmoothAction:
    """A left or right action of a coordinate groupoid on R^dim.

    ``act`` takes its arguments in the natural order: ``act(x, m)`` for a left
    action and ``act(m, h)`` for a right one.  ``base_map`` is tau (left) or
    sigma (right).
    """

    groupoid: CoordinateGroupoid
    dim: int
    base_map: Callable[[Vec], Vec]
    act: Callable[[Vec, Vec], Vec]
    side: str
    name: str = ""
    box: np.ndarray = None
    sampler: Callable[[np.random.Generator], Vec] | None = None

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise InvalidParameter("side must be 'left' or 'right'")
        object.__setattr__(self, "box", _box(self.box, self.dim))

    def sample_point(self, rng) -> Vec:
        if self.sampler is not None:
            return as_vec(self.sampler(rng))
        lo, hi = self.box[:, 0], self.box[:, 1]
        return lo + (hi - lo) * rng.random(self.dim)

    def sample_acting_arrow(self, rng, m) -> Vec:
        """An arrow that can act on m."""
        G, q = self.groupoid, self.base_map(m)
        return G.sample_arrow(rng, q) if self.side == "left" else G.sample_arrow_with_target(rng, q)

    def apply(self, arrow, m) -> Vec:
        return as_vec(self.act(arrow, m) if self.side == "left" else self.act(m, arrow))

    def identity_residuals(self, rng, samples: int = 10) -> dict:
        G = self.groupoid
        out = dict.fromkeys(["unit", "base-equivariance", "compatibility"], 0.0)
        for _ in range(samples):
            m = self.sample_point(rng)
            q = self.base_map(m)
            out["unit"] = max(out["unit"], _dev(self.apply(G.unit(q), m), m))
            x = self.sample_acting_arrow(rng, m)
            xm = self.apply(x, m)
            if self.side == "left":
                out["base-equivariance"] = max(out["base-equivariance"], _dev(self.base_map(xm), G.target(x)))
                y = G.sample_arrow(rng, G.target(x))
                out["compatibility"] = max(
                    out["compatibility"], _dev(self.apply(G.compose(y, x), m), self.apply(y, xm))
                )
            else:
                out["base-equivariance"] = max(out["base-equivariance"], _dev(self.base_map(xm), G.source(x)))
                y = G.sample_arrow_with_target(rng, G.source(x))
                out["compatibility"] = max(
                    out["compatibility"], _dev(self.apply(G.compose(x, y), m), self.apply(y, xm))
                )
        return out


@dataclass(frozen=True, eq=False)
class SmoothBibundle:
    left: SmoothAction
    right: SmoothAction
    name: str = ""

    def __post_init__(self):
        if self.left.side != "left" or self.right.side != "right":
            raise InvalidParameter("bibundle needs a left and a right action")
        if self.left.dim != self.right.dim:
            raise InvalidParameter("left and right actions live on different spaces")

    @property
    def dim(self) -> int:
        return self.left.dim

    def commutation_residuals(self, rng, samples: int = 10) -> dict:
        """tau(m.h) = tau(m), sigma(x.m) = sigma(m), (x.m).h = x.(m.h)."""
        L, R = self.left, self.right
        out = dict.fromkeys(["tau-invariance", "sigma-invariance", "commutation"], 0.0)
        for _ in range(samples):
            m = L.sample_point(rng)
            x = L.sample_acting_arrow(rng, m)
            h = R.sample_acting_arrow(rng, m)
            mh = R.apply(h, m)
            xm = L.apply(x, m)
            out["tau-invariance"] = max(out["tau-invariance"], _dev(L.base_map(mh), L.base_map(m)))
            out["sigma-invariance"] = max(out["sigma-invariance"], _dev(R.base_map(xm), R.base_map(m)))
            out["commutation"] = max(out["commutation"], _dev(R.apply(h, xm), L.apply(x, mh)))
        return out


@dataclass(frozen=True, eq=False)
class LieAlgebroidChart:
    """Anchor a(q) (base_dim x fiber_dim) and structure functions c[i, j, k] = c^k_ij(q)."""

    base_dim: int
    fiber_dim: int
    anchor: Callable[[Vec], np.ndarray]
    structure: Callable[[Vec], np.ndarray]
    name: str = ""
    domain: Callable[[Vec], bool] | None = None
    base_box: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "base_box", _box(self.base_box, self.base_dim))

    @property
    def dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def split(self, point):
        point = as_vec(point)
        if point.size != self.dim:
            raise InvalidParameter(f"point on {self.name or 'dual bundle'} must have {self.dim} coordinates")
        return point[: self.base_dim], point[self.base_dim:]

    def require(self, q):
        if self.domain is not None and not self.domain(q):
            raise DomainError(f"base point {np.round(q, 6).tolist()} outside the chart")

    def sample_point(self, rng) -> Vec:
        lo, hi = self.base_box[:, 0], self.base_box[:, 1]
        q = lo + (hi - lo) * rng.random(self.base_dim)
        return np.concatenate([q, rng.standard_normal(self.fiber_dim)])


def constant_chart(anchor, structure, name="") -> LieAlgebroidChart:
    """Chart with constant anchor and constant structure functions (antisymmetrised)."""
    a = np.atleast_2d(np.asarray(anchor, dtype=float))
    c = np.asarray(structure, dtype=float)
    r = c.shape[0]
    if a.size == 0:
        a = np.zeros((0, r))
    c = 0.5 * (c - np.swapaxes(c, 0, 1))
    return LieAlgebroidChart(a.shape[0], r, lambda q: a, lambda q: c, name=name)


def lie_algebra_chart(structure, name="") -> LieAlgebroidChart:
    c = np.asarray(structure, dtype=float)
    return constant_chart(np.zeros((0, c.shape[0])), c, name=name)


def tangent_chart(n: int, box=None) -> LieAlgebroidChart:
    """The tangent bundle of R^n: identity anchor, zero bracket; its dual is T*R^n."""
    return LieAlgebroidChart(
        n, n, lambda q: np.eye(n), lambda q: np.zeros((n, n, n)), name=f"T R^{n}", base_box=box
    )


@dataclass(frozen=True)
class Covector:
    """Components of a covector at ``base``.

    ``chart`` names the space: "T*M", "T*G" for covectors on arrows, "A*G" for
    algebroid-frame components over an object.
    """

    chart: str
    base: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", as_vec(self.base).copy())
        object.__setattr__(self, "components", as_vec(self.components).copy())

    @property
    def point(self) -> np.ndarray:
        return np.concatenate([self.base, self.components])

    def to_dict(self) -> dict:
        return {"chart": self.chart, "base": self.base.tolist(), "components": self.components.tolist()}


KINDS = ("basic", "linear", "symbol", "generic")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A function on a dual bundle or cotangent bundle, with an optional structural tag.

    ``basic``: fn(q, mu) = f(q), payload f.
    ``linear``/``symbol``: fn(q, mu) = <mu, s(q)>, payload s (a section / vector field).
    """

    fn: Callable[[Vec], float]
    kind: str = "generic"
    payload: Callable | None = None
    base_dim: int | None = None
    name: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown field kind {self.kind!r}")

    def __call__(self, point) -> float:
        return float(self.fn(as_vec(point)))


def basic_field(f, base_dim: int, name="") -> ScalarField:
    return ScalarField(lambda z: f(z[:base_dim]), "basic", f, base_dim, name)


def linear_field(section, base_dim: int, name="") -> ScalarField:
    def fn(z):
        return float(np.dot(z[base_dim:], section(z[:base_dim])))

    return ScalarField(fn, "linear", section, base_dim, name)


def symbol_field(xi, dim: int, name="") -> ScalarField:
    """sym(xi)(m, theta) = <theta, xi(m)> on T*R^dim."""
    def fn(z):
        return float(np.dot(z[dim:], xi(z[:dim])))

    return ScalarField(fn, "symbol", xi, dim, name)


def generic_field(fn, name="") -> ScalarField:
    return ScalarField(fn, "generic", None, None, name)


def coordinate_field(i: int, name="") -> ScalarField:
    return generic_field(lambda z: z[i], name or f"z{i}")
