"""Momentum maps T*M -> A*(G) of left and right groupoid actions.

Left:  <J_L(theta_m), e_i> = -<theta, d/dlam (iota(q) + lam e_i)^-1 . m>,  q = tau(m)
Right: <J_R(theta_m), e_i> = +<theta, d/dlam m . (iota(q) + lam e_i)>,    q = sigma(m)

The straight line iota(q) + lam e_i leaves the t-fibre only to second order,
which does not affect the first derivative, so the formula extensions of the
action may be differenced along it.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter
from .algebroid import algebroid_frame
from .charts import Covector, SmoothAction
from .fd import DEFAULT_FD, FDConfig, as_vec, directional


class MomentumMap:
    def __init__(self, action: SmoothAction, fd: FDConfig = DEFAULT_FD, sign: float = 1.0):
        self.action = action
        self.fd = fd
        self.sign = float(sign)

    @property
    def groupoid(self):
        return self.action.groupoid

    @property
    def side(self) -> str:
        return self.action.side

    @property
    def dim(self) -> int:
        return self.action.dim

    @property
    def base_dim(self) -> int:
        return self.groupoid.base_dim

    @property
    def fiber_dim(self) -> int:
        return self.groupoid.fiber_dim

    @property
    def target_dim(self) -> int:
        return self.base_dim + self.fiber_dim

    def flipped(self) -> "MomentumMap":
        """The same map with its algebroid components negated (a sign-error control)."""
        return MomentumMap(self.action, self.fd, -self.sign)

    def with_fd(self, fd: FDConfig) -> "MomentumMap":
        return MomentumMap(self.action, fd, self.sign)

    def generators(self, m, fd: FDConfig | None = None) -> np.ndarray:
        """Infinitesimal generators xi_i(m) of the frame e_i, as columns (dim x fiber_dim)."""
        fd = fd or self.fd
        m = as_vec(m)
        G, act = self.groupoid, self.action
        q = act.base_map(m)
        K = algebroid_frame(G, q, fd)
        u = G.unit(q)
        cols = []
        for i in range(K.shape[1]):
            if self.side == "left":
                cols.append(-directional(lambda x: act.act(G.inverse(x), m), u, K[:, i], fd))
            else:
                cols.append(directional(lambda h: act.act(m, h), u, K[:, i], fd))
        if not cols:
            return np.zeros((m.size, 0))
        return np.column_stack(cols)

    def coords(self, z, fd: FDConfig | None = None) -> np.ndarray:
        """(q, mu) coordinates of J(m, theta) for z = (m, theta)."""
        z = as_vec(z)
        d = self.dim
        m, theta = z[:d], z[d:]
        q = as_vec(self.action.base_map(m)) if self.base_dim else np.zeros(0)
        mu = self.sign * (self.generators(m, fd).T @ theta)
        return np.concatenate([q, mu])

    def __call__(self, theta: Covector) -> Covector:
        if theta.base.size != self.dim or theta.components.size != self.dim:
            raise InvalidParameter(f"covector must live on T*R^{self.dim}")
        c = self.coords(theta.point)
        return Covector("A*G", c[: self.base_dim], c[self.base_dim:])


def momentum_left(act: SmoothAction, theta: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    if act.side != "left":
        raise InvalidParameter("momentum_left needs a left action")
    return MomentumMap(act, fd)(theta)


def momentum_right(act: SmoothAction, theta: Covector, fd: FDConfig = DEFAULT_FD) -> Covector:
    if act.side != "right":
        raise InvalidParameter("momentum_right needs a right action")
    return MomentumMap(act, fd)(theta)
