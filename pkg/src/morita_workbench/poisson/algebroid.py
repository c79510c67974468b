"""Lie algebroid of a coordinate groupoid by finite differences.

The fiber at q is ker Dt at the unit over q.  The numerical kernel basis is
normalised so that a fixed set of pivot coordinates reads as the identity,
which makes the frame a smooth function of q and keeps fd of frame-dependent
quantities meaningful.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg

from ..errors import DegenerateKernel
from .charts import CoordinateGroupoid, Covector, LieAlgebroidChart
from .fd import DEFAULT_FD, FDConfig, as_vec, directional, jacobian, kernel


def _raw_kernel(G: CoordinateGroupoid, q, fd: FDConfig) -> np.ndarray:
    if G.base_dim == 0:
        return np.eye(G.arrow_dim)
    Dt = jacobian(G.target, G.unit(q), fd)
    K = kernel(Dt)
    if K.shape[1] != G.fiber_dim:
        raise DegenerateKernel(
            f"{G.name}: ker Dt has dimension {K.shape[1]} at q={np.round(q, 6).tolist()}, expected {G.fiber_dim}"
        )
    return K


@lru_cache(maxsize=128)
def frame_pivots(G: CoordinateGroupoid) -> tuple:
    """Arrow coordinates used to normalise the kernel frame (column-pivoted QR at the box centre).

    Chosen once per groupoid with the default step, so that every step size
    (and hence every nesting level) works in the same frame even when the
    QR pivoting faces a tie.
    """
    if G.fiber_dim == 0:
        return ()
    q0 = G.base_box.mean(axis=1)
    K = _raw_kernel(G, q0, DEFAULT_FD)
    _, _, piv = scipy.linalg.qr(K.T, pivoting=True)
    return tuple(sorted(int(p) for p in piv[: G.fiber_dim]))


def algebroid_frame(G: CoordinateGroupoid, q, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """Basis e_1..e_r of A_q(G) = ker Dt at iota(q), as columns in arrow coordinates."""
    q = as_vec(q) if G.base_dim else np.zeros(0)
    G.require_base(q)
    if G.fiber_dim == 0:
        _raw_kernel(G, q, fd)
        return np.zeros((G.arrow_dim, 0))
    K = _raw_kernel(G, q, fd)
    piv = list(frame_pivots(G))
    block = K[piv]
    if np.linalg.cond(block) > 1e8:
        raise DegenerateKernel(f"{G.name}: frame pivots degenerate at q={np.round(q, 6).tolist()}")
    return K @ np.linalg.inv(block)


def anchor_matrix(G: CoordinateGroupoid, q, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    q = as_vec(q) if G.base_dim else np.zeros(0)
    K = algebroid_frame(G, q, fd)
    if G.base_dim == 0:
        return np.zeros((0, K.shape[1]))
    return jacobian(G.source, G.unit(q), fd) @ K


def left_invariant_field(G: CoordinateGroupoid, j: int, fd: FDConfig):
    """X_j(x) = d/dlam m(x, iota(s(x)) + lam e_j(s(x)))."""
    def X(x):
        q = G.source(x)
        e = algebroid_frame(G, q, fd)[:, j]
        return directional(lambda y: G.compose(x, y), G.unit(q), e, fd)

    return X


def structure_functions(G: CoordinateGroupoid, q, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """c[i, j, k] with [e_i, e_j] = sum_k c[i, j, k] e_k, from commutators of left-invariant fields.

    Both the fields and their derivatives use the nested step.  Only i < j is
    computed and the rest filled by antisymmetry, so c is exactly antisymmetric.
    """
    q = as_vec(q) if G.base_dim else np.zeros(0)
    nfd = fd.nested()
    r = G.fiber_dim
    c = np.zeros((r, r, r))
    if r < 2:
        return c
    x0 = G.unit(q)
    fields = [left_invariant_field(G, j, nfd) for j in range(r)]
    at_unit = [fields[j](x0) for j in range(r)]
    K = algebroid_frame(G, q, nfd)
    Diota = jacobian(G.unit, q, nfd) if G.base_dim else np.zeros((G.arrow_dim, 0))
    basis = np.hstack([K, Diota])
    for i in range(r):
        for j in range(i + 1, r):
            bracket = directional(fields[j], x0, at_unit[i], nfd) - directional(fields[i], x0, at_unit[j], nfd)
            coeffs, *_ = np.linalg.lstsq(basis, bracket, rcond=None)
            c[i, j] = coeffs[:r]
            c[j, i] = -coeffs[:r]
    return c


def algebroid_from_groupoid(G: CoordinateGroupoid, fd: FDConfig = DEFAULT_FD) -> LieAlgebroidChart:
    return _algebroid(G, fd)


@lru_cache(maxsize=64)
def _algebroid(G, fd):
    anchor_cache: dict = {}
    structure_cache: dict = {}

    def anchor(q):
        key = as_vec(q).tobytes() if G.base_dim else b""
        if key not in anchor_cache:
            anchor_cache[key] = anchor_matrix(G, q, fd)
        return anchor_cache[key]

    def structure(q):
        key = as_vec(q).tobytes() if G.base_dim else b""
        if key not in structure_cache:
            structure_cache[key] = structure_functions(G, q, fd)
        return structure_cache[key]

    return LieAlgebroidChart(
        G.base_dim, G.fiber_dim, anchor, structure,
        name=f"A({G.name})", domain=G.base_domain, base_box=G.base_box,
    )


def to_annihilator(G: CoordinateGroupoid, q, mu, fd: FDConfig = DEFAULT_FD) -> Covector:
    """Covector on arrows at iota(q) that reads mu on the frame and vanishes on T G_0."""
    q = as_vec(q) if G.base_dim else np.zeros(0)
    mu = as_vec(mu) if G.fiber_dim else np.zeros(0)
    K = algebroid_frame(G, q, fd)
    Diota = jacobian(G.unit, q, fd) if G.base_dim else np.zeros((G.arrow_dim, 0))
    B = np.hstack([K, Diota])
    alpha = np.linalg.solve(B.T, np.concatenate([mu, np.zeros(G.base_dim)]))
    return Covector("T*G", G.unit(q), alpha)


def from_annihilator(G: CoordinateGroupoid, alpha: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    q = G.source(alpha.base)
    K = algebroid_frame(G, q, fd)
    return Covector("A*G", q, alpha.components @ K)


def bracket_of_sections(chart: LieAlgebroidChart, s1, s2, q, fd: FDConfig = DEFAULT_FD) -> np.ndarray:
    """[s1, s2]^k = s1^i s2^j c^k_ij + (a s1).grad s2^k - (a s2).grad s1^k."""
    q = as_vec(q) if chart.base_dim else np.zeros(0)
    a, c = chart.anchor(q), chart.structure(q)
    v1, v2 = as_vec(s1(q)), as_vec(s2(q))
    out = np.einsum("i,j,ijk->k", v1, v2, c)
    if chart.base_dim:
        out = out + jacobian(s2, q, fd) @ (a @ v1) - jacobian(s1, q, fd) @ (a @ v2)
    return out


def algebroid_identity_residuals(chart: LieAlgebroidChart, q, fd: FDConfig = DEFAULT_FD) -> dict:
    """Jacobi identity of the frame bracket and the anchor morphism property at q.

    With [e_i, e_j] = c^l_ij e_l:
      [[e_i, e_j], e_k] = c^l_ij c^p_lk e_p - (a e_k)(c^l_ij) e_l
      a[e_i, e_j] = [a e_i, a e_j] as vector fields on the base.
    """
    q = as_vec(q) if chart.base_dim else np.zeros(0)
    r, n0 = chart.fiber_dim, chart.base_dim
    c = chart.structure(q)
    a = chart.anchor(q)
    asym = float(np.max(np.abs(c + np.swapaxes(c, 0, 1)), initial=0.0))
    dc = np.zeros((n0, r, r, r))
    da = np.zeros((n0, n0, r))
    if n0:
        nfd = fd.nested()
        dc = np.stack([directional(chart.structure, q, e, nfd) for e in np.eye(n0)])
        da = np.stack([directional(chart.anchor, q, e, nfd) for e in np.eye(n0)])
    # derivative of c^l_ij along a e_k: sum_b a[b, k] dc[b, i, j, l]
    dc_along = np.einsum("bk,bijl->kijl", a, dc)

    def double(i, j, k):
        return c[i, j] @ c[:, k] - dc_along[k, i, j]

    jac = 0.0
    for i in range(r):
        for j in range(r):
            for k in range(r):
                jac = max(jac, float(np.max(np.abs(double(i, j, k) + double(j, k, i) + double(k, i, j)))))
    morph = 0.0
    for i in range(r):
        for j in range(r):
            lhs = a @ c[i, j]
            # [a_i, a_j] = D(a_j) a_i - D(a_i) a_j on the base
            rhs = np.einsum("bd,b->d", da[:, :, j], a[:, i]) - np.einsum("bd,b->d", da[:, :, i], a[:, j]) if n0 else lhs * 0
            morph = max(morph, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    return {"antisymmetry": asym, "jacobi": jac, "anchor-morphism": morph}
