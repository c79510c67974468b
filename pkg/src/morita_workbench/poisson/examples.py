"""Built-in coordinate groupoids, actions and bibundles, addressed by name."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameter
from .charts import CoordinateGroupoid, SmoothAction, SmoothBibundle

_EMPTY = np.zeros(0)


def pair_groupoid(n: int, box=None) -> CoordinateGroupoid:
    """Pair(R^n): arrow (t, s) in R^{2n} goes from s to t."""
    if n < 1:
        raise InvalidParameter("pair groupoid needs n >= 1")
    box = np.asarray(box if box is not None else [[-1.0, 1.0]] * n, dtype=float)
    return CoordinateGroupoid(
        name=f"Pair(R^{n})",
        base_dim=n,
        arrow_dim=2 * n,
        source=lambda x: x[n:],
        target=lambda x: x[:n],
        compose=lambda x, y: np.concatenate([x[:n], y[n:]]),
        inverse=lambda x: np.concatenate([x[n:], x[:n]]),
        unit=lambda q: np.concatenate([q, q]),
        arrow_with_source=lambda q, rng: np.concatenate([box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random(n), q]),
        base_box=box,
    )


def unit_groupoid(n: int) -> CoordinateGroupoid:
    """R^n with identity arrows only."""
    if n < 1:
        raise InvalidParameter("unit groupoid needs n >= 1")
    return CoordinateGroupoid(
        name=f"Unit(R^{n})",
        base_dim=n,
        arrow_dim=n,
        source=lambda x: x,
        target=lambda x: x,
        compose=lambda x, y: x,
        inverse=lambda x: x,
        unit=lambda q: q,
        arrow_with_source=lambda q, rng: q,
    )


def aff1_group() -> CoordinateGroupoid:
    """Orientation-preserving affine maps m -> a m + b of the line, a > 0.

    (a, b)(a', b') = (a a', a b' + b).  With e1 = d/da, e2 = d/db at the
    identity, left-invariant fields satisfy [e1, e2] = e2.
    """
    return CoordinateGroupoid(
        name="aff(1)",
        base_dim=0,
        arrow_dim=2,
        source=lambda x: _EMPTY,
        target=lambda x: _EMPTY,
        compose=lambda x, y: np.array([x[0] * y[0], x[0] * y[1] + x[1]]),
        inverse=lambda x: np.array([1.0 / x[0], -x[1] / x[0]]),
        unit=lambda q: np.array([1.0, 0.0]),
        arrow_with_source=lambda q, rng: np.array([0.5 + 1.5 * rng.random(), -1.0 + 2.0 * rng.random()]),
        arrow_domain=lambda x: x[0] > 0,
    )


def translation_group(n: int = 1) -> CoordinateGroupoid:
    return CoordinateGroupoid(
        name=f"R^{n}",
        base_dim=0,
        arrow_dim=n,
        source=lambda x: _EMPTY,
        target=lambda x: _EMPTY,
        compose=lambda x, y: x + y,
        inverse=lambda x: -x,
        unit=lambda q: np.zeros(n),
        arrow_with_source=lambda q, rng: -1.0 + 2.0 * rng.random(n),
    )


def pair_left_action(n: int) -> SmoothAction:
    """Pair(R^n) acting on R^n by (t, s).m = t, tau = id."""
    G = pair_groupoid(n)
    return SmoothAction(G, n, lambda m: m, lambda x, m: x[:n], "left", name=f"Pair(R^{n}) on R^{n}")


def affine_line_action() -> SmoothAction:
    return SmoothAction(
        aff1_group(), 1, lambda m: _EMPTY, lambda x, m: x[0] * m + x[1], "left", name="aff(1) on R"
    )


def translation_line_action() -> SmoothAction:
    return SmoothAction(translation_group(1), 1, lambda m: _EMPTY, lambda x, m: x + m, "left", name="R on R")


def _aff1_sampler(rng):
    return np.array([0.5 + 1.5 * rng.random(), -1.0 + 2.0 * rng.random()])


def self_translations(G: CoordinateGroupoid):
    """G acting on its own arrows by left and right multiplication."""
    left = SmoothAction(G, G.arrow_dim, G.target, G.compose, "left", name=f"{G.name} left translation",
                        sampler=G.sample_arrow)
    right = SmoothAction(G, G.arrow_dim, G.source, G.compose, "right", name=f"{G.name} right translation",
                         sampler=G.sample_arrow)
    return left, right


def rectangle_bibundle(n: int, k: int) -> SmoothBibundle:
    """Pair(R^n) - Pair(R^k) equivalence on M = R^n x R^k.

    (a, b).(x, y) = (a, y) and (x, y).(c, d) = (x, d).
    """
    G, H = pair_groupoid(n), pair_groupoid(k)
    left = SmoothAction(
        G, n + k, lambda m: m[:n], lambda g, m: np.concatenate([g[:n], m[n:]]), "left", name=f"Pair(R^{n}) on R^{n + k}"
    )
    right = SmoothAction(
        H, n + k, lambda m: m[n:], lambda m, h: np.concatenate([m[:n], h[k:]]), "right", name=f"R^{n + k} under Pair(R^{k})"
    )
    return SmoothBibundle(left, right, name=f"rect:{n}x{k}")


def unit_bibundle(n: int) -> SmoothBibundle:
    G = unit_groupoid(n)
    left = SmoothAction(G, n, lambda m: m, lambda x, m: m, "left", name=f"Unit(R^{n}) on R^{n}")
    right = SmoothAction(G, n, lambda m: m, lambda m, h: m, "right", name=f"R^{n} under Unit(R^{n})")
    return SmoothBibundle(left, right, name=f"unit:{n}")


def aff1_bibundle() -> SmoothBibundle:
    G = aff1_group()
    left, right = self_translations(G)
    return SmoothBibundle(left, right, name="aff1")


def perturbed_action(act: SmoothAction, eps: float = 0.1) -> SmoothAction:
    """act followed by n -> n + eps n^2: still smooth, no longer equivariant (negative control)."""
    def bent(*args):
        n = np.asarray(act.act(*args), dtype=float)
        return n + eps * n * n

    return SmoothAction(act.groupoid, act.dim, act.base_map, bent, act.side, name=f"{act.name} (perturbed)",
                        box=act.box, sampler=act.sampler)


def skewed_rectangle_momentum(n: int, k: int):
    """(y, theta_y + theta_x[0] e_0) on T*(R^n x R^k): not invariant under the left action (negative control)."""
    d = n + k

    def coords(z):
        m, th = z[:d], z[d:]
        mu = th[n:].copy()
        mu[0] += th[0]
        return np.concatenate([m[n:], mu])

    return coords


@dataclass(frozen=True, eq=False)
class PoissonExample:
    name: str
    groupoid: CoordinateGroupoid
    left: SmoothAction | None = None
    right: SmoothAction | None = None
    description: str = ""
    expected: dict = field(default_factory=dict)

    @property
    def bibundle(self) -> SmoothBibundle | None:
        if self.left is not None and self.right is not None:
            return SmoothBibundle(self.left, self.right, name=self.name)
        return None

    @property
    def actions(self):
        return [a for a in (self.left, self.right) if a is not None]


def _pair_example(n):
    act = pair_left_action(n)
    return PoissonExample(
        f"pair:{n}", act.groupoid, left=act,
        description=f"Pair(R^{n}) acting on R^{n} through the target",
        expected={"anchor": np.eye(n), "structure": np.zeros((n, n, n))},
    )


def _aff1_example():
    b = aff1_bibundle()
    c = np.zeros((2, 2, 2))
    c[0, 1, 1], c[1, 0, 1] = 1.0, -1.0
    return PoissonExample(
        "aff1", b.left.groupoid, left=b.left, right=b.right,
        description="aff(1) acting on itself by left and right translation",
        expected={"anchor": np.zeros((0, 2)), "structure": c},
    )


def _aff1_line_example():
    act = affine_line_action()
    c = np.zeros((2, 2, 2))
    c[0, 1, 1], c[1, 0, 1] = 1.0, -1.0
    return PoissonExample(
        "aff1-on-line", act.groupoid, left=act,
        description="aff(1) acting on R by m -> a m + b",
        expected={"anchor": np.zeros((0, 2)), "structure": c},
    )


def _rect_example(n, k):
    b = rectangle_bibundle(n, k)
    return PoissonExample(
        f"rect:{n}x{k}", b.left.groupoid, left=b.left, right=b.right,
        description=f"Pair(R^{n}) - Pair(R^{k}) equivalence on R^{n} x R^{k}",
        expected={"anchor": np.eye(n), "structure": np.zeros((n, n, n))},
    )


def _unit_example(n):
    b = unit_bibundle(n)
    return PoissonExample(
        f"unit:{n}", b.left.groupoid, left=b.left, right=b.right,
        description=f"unit groupoid of R^{n} acting trivially on both sides",
        expected={"anchor": np.zeros((n, 0)), "structure": np.zeros((0, 0, 0))},
    )


def _translation_example():
    act = translation_line_action()
    return PoissonExample(
        "translation-on-line", act.groupoid, left=act,
        description="R acting on R by translation",
        expected={"anchor": np.zeros((0, 1)), "structure": np.zeros((1, 1, 1))},
    )


_PATTERNS = [
    (re.compile(r"pair:(\d+)$"), lambda g: _pair_example(int(g[0]))),
    (re.compile(r"rect:(\d+)x(\d+)$"), lambda g: _rect_example(int(g[0]), int(g[1]))),
    (re.compile(r"unit:(\d+)$"), lambda g: _unit_example(int(g[0]))),
    (re.compile(r"aff1$"), lambda g: _aff1_example()),
    (re.compile(r"aff1-on-line$"), lambda g: _aff1_line_example()),
    (re.compile(r"translation-on-line$"), lambda g: _translation_example()),
]

EXAMPLE_NAMES = ("pair:<n>", "aff1", "aff1-on-line", "rect:<n>x<m>", "unit:<n>", "translation-on-line")


def get_example(name: str) -> PoissonExample:
    for pattern, build in _PATTERNS:
        hit = pattern.match(name.strip())
        if hit:
            if any(int(v) < 1 for v in hit.groups()):
                raise InvalidParameter(f"dimensions in {name!r} must be >= 1")
            return build(hit.groups())
    raise InvalidParameter(f"unknown example {name!r}; known: {', '.join(EXAMPLE_NAMES)}")
