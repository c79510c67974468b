"""The cotangent groupoid T*G and its action on T*M.

Source and target of T*G are the momentum maps of G acting on itself by
right and left translation.  Products and the action are obtained by solving
small linear systems assembled from finite-difference derivatives.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import LiftError, MatchError, RankError
from .algebroid import to_annihilator
from .charts import CoordinateGroupoid, Covector, SmoothAction
from .examples import self_translations
from .fd import DEFAULT_FD, FDConfig, as_vec, directional, jacobian, kernel, rank
from .momentum import MomentumMap

MATCH_TOL = 1e-6


@lru_cache(maxsize=64)
def translation_maps(G: CoordinateGroupoid, fd: FDConfig = DEFAULT_FD):
    """(t~, s~): momentum maps of left and right translation of G on itself."""
    left, right = self_translations(G)
    return MomentumMap(left, fd), MomentumMap(right, fd)


def cotangent_source(G: CoordinateGroupoid, alpha: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    return translation_maps(G, fd)[1](alpha)


def cotangent_target(G: CoordinateGroupoid, alpha: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    return translation_maps(G, fd)[0](alpha)


def _gap(a: Covector, b: Covector) -> float:
    return max(
        float(np.max(np.abs(a.base - b.base), initial=0.0)),
        float(np.max(np.abs(a.components - b.components), initial=0.0)),
    )


def cotangent_compose(G: CoordinateGroupoid, alpha: Covector, beta: Covector,
                      tol: float = MATCH_TOL, fd: FDConfig = DEFAULT_FD) -> Covector:
    """gamma at xy with gamma(Dm(X, Y)) = alpha(X) + beta(Y) on T(x, y) G_2."""
    x, y = alpha.base, beta.base
    G.require_arrow(x)
    G.require_arrow(y)
    if G.base_dim and np.max(np.abs(G.source(x) - G.target(y))) > tol:
        raise MatchError("arrows are not composable: s(x) != t(y)")
    gap = _gap(cotangent_source(G, alpha, fd), cotangent_target(G, beta, fd))
    if gap > tol:
        raise MatchError(f"covectors do not match: |s~(alpha) - t~(beta)| = {gap:.3g}")
    n1 = G.arrow_dim
    if G.base_dim:
        C = np.hstack([jacobian(G.source, x, fd), -jacobian(G.target, y, fd)])
        T = kernel(C)
    else:
        T = np.eye(2 * n1)
    xy = np.concatenate([x, y])

    def mult(p):
        return G.compose(p[:n1], p[n1:])

    W = np.array([directional(mult, xy, T[:, b], fd) for b in range(T.shape[1])])
    rhs = T.T @ np.concatenate([alpha.components, beta.components])
    if rank(W) < n1:
        raise RankError("multiplication is not a submersion at this composable pair")
    gamma, *_ = np.linalg.lstsq(W, rhs, rcond=None)
    resid = float(np.max(np.abs(W @ gamma - rhs)))
    if resid > tol * max(1.0, float(np.max(np.abs(rhs)))):
        raise MatchError(f"no covector solves the product system (residual {resid:.3g})")
    return Covector("T*G", mult(xy), gamma)


def cotangent_inverse(G: CoordinateGroupoid, alpha: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    """Pullback of alpha under inversion: (alpha^-1)(v) = -alpha(DI v)."""
    x = alpha.base
    y = G.inverse(x)
    DI = jacobian(G.inverse, y, fd)
    return Covector("T*G", y, -DI.T @ alpha.components)


def cotangent_unit(G: CoordinateGroupoid, q, mu, fd: FDConfig = DEFAULT_FD) -> Covector:
    return to_annihilator(G, q, mu, fd)


def _lifts(G, act, x, n, fd):
    Dt = jacobian(G.target, x, fd) if G.base_dim else np.zeros((0, G.arrow_dim))
    if G.base_dim and rank(Dt) < G.base_dim:
        raise LiftError("t is not a submersion at this arrow")
    Dtau = jacobian(act.base_map, n, fd) if G.base_dim else np.zeros((0, act.dim))
    if G.base_dim == 0:
        return np.zeros((G.arrow_dim, act.dim)), np.eye(G.arrow_dim)
    return np.linalg.pinv(Dt) @ Dtau, kernel(Dt)


def cotangent_act_raw(G: CoordinateGroupoid, act: SmoothAction, x, alpha, m, theta,
                      fd: FDConfig = DEFAULT_FD, lift_shift=None) -> np.ndarray:
    """(n, alpha.theta) without matching checks, for differentiating the action map.

    For each coordinate direction xi of T_n M, pick eta with Dt eta = Dtau xi; then
    <alpha.theta, xi> = <theta, d/dlam phi(I(x + lam eta), n + lam xi)> + <alpha, eta>.
    ``lift_shift`` adds a ker Dt component to every eta.
    """
    x, alpha, m, theta = map(as_vec, (x, alpha, m, theta))
    n = as_vec(act.act(x, m))
    Eta, Kt = _lifts(G, act, x, n, fd)
    if lift_shift is not None:
        Eta = Eta + Kt @ np.asarray(lift_shift).reshape(Kt.shape[1], act.dim)
    d = act.dim
    out = np.zeros(d)
    for j in range(d):
        eta = Eta[:, j]
        xi = np.zeros(d)
        xi[j] = 1.0

        def curve(lam, eta=eta, xi=xi):
            return act.act(G.inverse(x + lam[0] * eta), n + lam[0] * xi)

        out[j] = theta @ directional(curve, np.zeros(1), np.ones(1), fd) + alpha @ eta
    return np.concatenate([n, out])


def cotangent_act(G: CoordinateGroupoid, act: SmoothAction, alpha: Covector, theta: Covector,
                  tol: float = MATCH_TOL, fd: FDConfig = DEFAULT_FD, check: bool = True,
                  lift_shift=None) -> Covector:
    x, m = alpha.base, theta.base
    G.require_arrow(x)
    if G.base_dim and np.max(np.abs(G.source(x) - act.base_map(m))) > tol:
        raise MatchError("s(x) != tau(m)")
    if check:
        gap = _gap(cotangent_source(G, alpha, fd), MomentumMap(act, fd)(theta))
        if gap > tol:
            raise MatchError(f"s~(alpha) != J_L(theta): gap {gap:.3g}")
    out = cotangent_act_raw(G, act, x, alpha.components, m, theta.components, fd, lift_shift)
    return Covector("T*M", out[: act.dim], out[act.dim:])


def lift_kernel_dim(G: CoordinateGroupoid, x, fd: FDConfig = DEFAULT_FD) -> int:
    if G.base_dim == 0:
        return G.arrow_dim
    return kernel(jacobian(G.target, x, fd)).shape[1]


def matched_arrow_covector(G: CoordinateGroupoid, x, mu, rng, fd: FDConfig = DEFAULT_FD) -> Covector:
    """A random alpha at x with s~(alpha) = mu (least squares plus a random kernel part)."""
    S = translation_maps(G, fd)[1].generators(x)  # s~(alpha) = S^T alpha
    mu = as_vec(mu) if G.fiber_dim else np.zeros(0)
    if G.fiber_dim == 0:
        alpha = rng.standard_normal(G.arrow_dim)
        return Covector("T*G", x, alpha)
    alpha, *_ = np.linalg.lstsq(S.T, mu, rcond=None)
    free = kernel(S.T)
    alpha = alpha + free @ rng.standard_normal(free.shape[1])
    if np.max(np.abs(S.T @ alpha - mu)) > 1e-8 * max(1.0, float(np.max(np.abs(mu)))):
        raise RankError("right translation momentum map is not surjective at this arrow")
    return Covector("T*G", x, alpha)


def pullback_by_inverse(act: SmoothAction, x, theta: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    """Group case closed form: alpha.theta = (phi_{x^-1})^* theta at x.m."""
    G = act.groupoid
    n = act.act(x, theta.base)
    xinv = G.inverse(x)
    D = jacobian(lambda p: act.act(xinv, p), n, fd)
    return Covector("T*M", n, D.T @ theta.components)
