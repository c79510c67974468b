"""Central finite differences and SVD-based linear algebra helpers."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# one-sided weights w_k of f'(x) ~ sum_k w_k (f(x + k h) - f(x - k h)) / h
_WEIGHTS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}

RANK_RTOL = 1e-8


@dataclass(frozen=True)
class FDConfig:
    """Step sizes for central differences.

    ``step`` is used for plain first derivatives.  Any quantity that is itself
    differentiated again (brackets of pulled-back functions, commutators,
    Jacobians of momentum maps) is evaluated with ``nested_step`` at every
    level, since rounding noise in the inner derivative is amplified by
    1/step in the outer one.
    """

    step: float = 1e-5
    nested_step: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if self.order not in _WEIGHTS:
            raise ValueError(f"stencil order must be one of {sorted(_WEIGHTS)}")
        if self.step <= 0 or self.nested_step <= 0:
            raise ValueError("finite-difference steps must be positive")

    def nested(self) -> "FDConfig":
        return replace(self, step=self.nested_step)


DEFAULT_FD = FDConfig()


def as_vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def directional(f, x, v, fd: FDConfig = DEFAULT_FD):
    """Derivative of ``f`` at ``x`` along ``v``; ``f`` may be scalar- or vector-valued."""
    x, v = as_vec(x), as_vec(v)
    h = fd.step
    acc = 0.0
    for k, w in _WEIGHTS[fd.order]:
        acc = acc + w * (np.asarray(f(x + k * h * v)) - np.asarray(f(x - k * h * v)))
    return acc / h


def jacobian(f, x, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """Jacobian with shape (output dim, input dim)."""
    x = as_vec(x)
    out = as_vec(f(x))
    J = np.zeros((out.size, x.size))
    eye = np.eye(x.size)
    for j in range(x.size):
        J[:, j] = as_vec(directional(f, x, eye[j], fd))
    return J


def gradient(F, x, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    return jacobian(lambda z: np.atleast_1d(F(z)), x, fd)[0]


def stencil_offsets(dim: int, fd: FDConfig):
    """Stencil points as (direction, k, weight) triples for composite gradients."""
    return [(j, k, w) for j in range(dim) for k, w in _WEIGHTS[fd.order]]


def composite_gradients(inner, x, outers, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """Finite-difference gradients of ``F o inner`` for every ``F`` in ``outers``.

    ``inner`` is evaluated once per stencil point and shared, which gives
    exactly the same numbers as differencing each composite separately.
    """
    x = as_vec(x)
    h = fd.step
    grads = np.zeros((len(outers), x.size))
    eye = np.eye(x.size)
    for j, k, w in stencil_offsets(x.size, fd):
        plus = inner(x + k * h * eye[j])
        minus = inner(x - k * h * eye[j])
        for i, F in enumerate(outers):
            grads[i, j] += w * (F(plus) - F(minus)) / h
    return grads


def kernel(A, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return np.eye(n)
    _, sv, Vt = np.linalg.svd(A)
    if sv.size == 0 or sv[0] == 0:
        return np.eye(n)
    rank = int(np.sum(sv > rtol * sv[0]))
    return Vt[rank:].T.copy()


def rank(A, rtol: float = RANK_RTOL) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def symplectic_matrix(d: int) -> np.ndarray:
    """omega((dm, dth), (dm', dth')) = dth.dm' - dm.dth' on T*R^d with coordinates (m, theta)."""
    W = np.zeros((2 * d, 2 * d))
    W[d:, :d] = np.eye(d)
    W[:d, d:] = -np.eye(d)
    return W
