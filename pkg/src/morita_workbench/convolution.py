"""Convolution *-algebra of a finite groupoid with counting-measure Haar system.

    (f*g)(x) = sum_{t(y)=t(x)} f(y) g(y^-1 x),    f*(x) = conj(f(x^-1))

The left regular representation on l^2(arrows) is faithful, so its operator
norm is the C*-norm (finite groupoids are amenable: full = reduced).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GroupoidMismatch, ParseError
from .groupoid import FiniteGroupoid

ATOL = 1e-12
RTOL = 1e-9
RANK_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    groupoid: FiniteGroupoid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.groupoid.n_arrows,):
            raise ValueError(f"expected {self.groupoid.n_arrows} values, got shape {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def _same(self, other):
        if not self.groupoid.same_as(other.groupoid):
            raise GroupoidMismatch("elements live over different groupoids")

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(self.groupoid, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(self.groupoid, self.values - other.values)

    def __neg__(self):
        return AlgebraElement(self.groupoid, -self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.groupoid, scalar * self.values)

    __rmul__ = __mul__

    def star(self):
        return involute(self)

    def to_json(self) -> str:
        return json.dumps([[float(z.real), float(z.imag)] for z in self.values])


def element(G: FiniteGroupoid, values) -> AlgebraElement:
    return AlgebraElement(G, values)


def delta(G: FiniteGroupoid, x: int, coeff=1.0) -> AlgebraElement:
    v = np.zeros(G.n_arrows, dtype=np.complex128)
    v[x] = coeff
    return AlgebraElement(G, v)


def zero(G: FiniteGroupoid) -> AlgebraElement:
    return AlgebraElement(G, np.zeros(G.n_arrows))


def random_element(G: FiniteGroupoid, rng: np.random.Generator) -> AlgebraElement:
    k = G.n_arrows
    return AlgebraElement(G, rng.standard_normal(k) + 1j * rng.standard_normal(k))


def element_from_json(G: FiniteGroupoid, text) -> AlgebraElement:
    try:
        pairs = json.loads(text) if isinstance(text, str) else text
        vals = [complex(float(re), float(im)) for re, im in pairs]
    except (TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"algebra element must be a list of [re, im] pairs: {exc}") from exc
    return AlgebraElement(G, vals)


def convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    f._same(g)
    G = f.groupoid
    # sum over y with t(y) = t(x) of f(y) g(y^-1 x) == sum over composable (y, z), yz = x
    y, z, yz = G.composable_pairs
    out = np.zeros(G.n_arrows, dtype=np.complex128)
    np.add.at(out, yz, f.values[y] * g.values[z])
    return AlgebraElement(G, out)


def involute(f: AlgebraElement) -> AlgebraElement:
    G = f.groupoid
    return AlgebraElement(G, np.conj(f.values[G.inverse]))


@dataclass(frozen=True, eq=False)
class RegularRepresentation:
    """Left multiplication operators on l^2(arrows): matrix(f)[x, z] = f(x z^-1) when s(x) = s(z)."""

    groupoid: FiniteGroupoid
    rows: np.ndarray
    cols: np.ndarray
    index: np.ndarray

    @property
    def dimension(self) -> int:
        return self.groupoid.n_arrows

    def matrix(self, f: AlgebraElement) -> np.ndarray:
        if not f.groupoid.same_as(self.groupoid):
            raise GroupoidMismatch("element and representation over different groupoids")
        k = self.dimension
        M = np.zeros((k, k), dtype=np.complex128)
        M[self.rows, self.cols] = f.values[self.index]
        return M


def regular_representation(G: FiniteGroupoid) -> RegularRepresentation:
    return _regular_representation(G)


@lru_cache(maxsize=64)
def _regular_representation(G):
    x, z = np.nonzero(G.src[:, None] == G.src[None, :])
    idx = G.compose[x, G.inverse[z]]
    return RegularRepresentation(G, x, z, idx)


def cstar_norm(f: AlgebraElement) -> float:
    M = regular_representation(f.groupoid).matrix(f)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def _left_mult_matrix(G, y):
    """Matrix of z -> delta_y * z."""
    return regular_representation(G).matrix(delta(G, y))


def _right_mult_matrix(G, y):
    """Matrix of z -> z * delta_y: (z*delta_y)(x) = z(x y^-1) when s(x) = s(y)."""
    k = G.n_arrows
    M = np.zeros((k, k))
    xs = np.nonzero(G.src == G.src[y])[0]
    M[xs, G.compose[xs, G.inverse[y]]] = 1.0
    return M


def center_dimension(G: FiniteGroupoid, rank_rtol: float = RANK_RTOL) -> int:
    """Dimension of {z : z*f = f*z for every basis element f}, by SVD rank."""
    k = G.n_arrows
    if k == 0:
        return 0
    system = np.vstack([_right_mult_matrix(G, y) - _left_mult_matrix(G, y) for y in range(k)])
    sv = np.linalg.svd(system, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return k
    rank = int(np.sum(sv > rank_rtol * sv[0]))
    return k - rank


def block_count(G: FiniteGroupoid) -> int:
    """Number of simple matrix blocks of the algebra (= dimension of its center)."""
    return center_dimension(G)


def morita_oracle(G: FiniteGroupoid, H: FiniteGroupoid) -> bool:
    """Finite-dimensional C*-algebras are Morita equivalent iff they have
    equally many simple summands."""
    return block_count(G) == block_count(H)


def pair_matrix(f: AlgebraElement) -> np.ndarray:
    """F[i, j] = f(arrow j -> i) for a pair groupoid built by ``pair_groupoid``."""
    n = f.groupoid.n_objects
    return f.values.reshape(n, n)


def relative_residual(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) / scale
