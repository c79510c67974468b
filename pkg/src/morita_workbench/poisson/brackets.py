"""Linear Poisson bracket on a dual algebroid and the canonical bracket on T*R^d.

On A*(G) with coordinates (q, mu):

    {F, G} = sum a_ai (dF/dmu_i dG/dq_a - dF/dq_a dG/dmu_i) + sum c^k_ij mu_k dF/dmu_i dG/dmu_j

This is the unique bracket with {f, g} = 0 for basic functions,
{sigma, f} = (a sigma) f and {sigma1, sigma2} = [sigma1, sigma2] on linear ones.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameter
from .algebroid import bracket_of_sections
from .charts import LieAlgebroidChart, ScalarField, generic_field, tangent_chart
from .fd import DEFAULT_FD, FDConfig, as_vec, gradient

ROUTES = ("auto", "tagged", "bivector")


def poisson_bivector(chart: LieAlgebroidChart, point) -> np.ndarray:
    """Matrix P with {F, G} = grad F . P . grad G in (q, mu) coordinates."""
    q, mu = chart.split(point)
    chart.require(q)
    n0, r = chart.base_dim, chart.fiber_dim
    a = np.asarray(chart.anchor(q), dtype=float).reshape(n0, r)
    c = np.asarray(chart.structure(q), dtype=float).reshape(r, r, r)
    P = np.zeros((n0 + r, n0 + r))
    P[:n0, n0:] = -a
    P[n0:, :n0] = a.T
    P[n0:, n0:] = c @ mu
    return P


def _tagged(chart, F, G, q, mu, fd):
    kinds = (F.kind, G.kind)
    if kinds == ("basic", "basic"):
        return 0.0
    a = chart.anchor(q)
    if kinds == ("linear", "basic"):
        return float(gradient(G.payload, q, fd) @ (a @ as_vec(F.payload(q)))) if chart.base_dim else 0.0
    if kinds == ("basic", "linear"):
        return -_tagged(chart, G, F, q, mu, fd)
    return float(mu @ bracket_of_sections(chart, F.payload, G.payload, q, fd))


def _is_tagged(F: ScalarField) -> bool:
    return F.kind in ("basic", "linear") and F.payload is not None


def lie_poisson_bracket(chart: LieAlgebroidChart, F, G, point, fd: FDConfig = DEFAULT_FD, route: str = "auto") -> float:
    if route not in ROUTES:
        raise InvalidParameter(f"route must be one of {ROUTES}")
    F, G = _field(F), _field(G)
    q, mu = chart.split(point)
    chart.require(q)
    if route != "bivector" and _is_tagged(F) and _is_tagged(G):
        return _tagged(chart, F, G, q, mu, fd)
    if route == "tagged":
        raise InvalidParameter("tagged route needs basic or linear fields on both sides")
    z = as_vec(point)
    return float(gradient(F, z, fd) @ poisson_bivector(chart, z) @ gradient(G, z, fd))


def canonical_bracket(F, G, point, fd: FDConfig = DEFAULT_FD) -> float:
    """sum_i dF/dtheta_i dG/dm_i - dF/dm_i dG/dtheta_i at point (m, theta)."""
    F, G = _field(F), _field(G)
    z = as_vec(point)
    if z.size % 2:
        raise InvalidParameter("a point of T*R^d has an even number of coordinates")
    d = z.size // 2
    gF, gG = gradient(F, z, fd), gradient(G, z, fd)
    return float(gF[d:] @ gG[:d] - gF[:d] @ gG[d:])


def canonical_bivector(d: int) -> np.ndarray:
    return poisson_bivector(tangent_chart(d), np.zeros(2 * d))


def bracket_field(bracket, F, G, fd: FDConfig = DEFAULT_FD) -> ScalarField:
    """z -> bracket(F, G, z) as a generic field, so it can be bracketed again."""
    return generic_field(lambda z: bracket(F, G, z, fd))


def jacobiator(bracket, F, G, K, point, fd: FDConfig = DEFAULT_FD) -> float:
    """{F,{G,K}} + {G,{K,F}} + {K,{F,G}}, every level at the nested step."""
    nfd = fd.nested()
    total = 0.0
    for A, B, C in ((F, G, K), (G, K, F), (K, F, G)):
        total += bracket(_field(A), bracket_field(bracket, _field(B), _field(C), nfd), point, nfd)
    return total


def lie_poisson(chart: LieAlgebroidChart, route: str = "bivector"):
    """The bracket of ``chart`` as a function (F, G, point, fd) -> float."""
    return lambda F, G, z, fd=DEFAULT_FD: lie_poisson_bracket(chart, F, G, z, fd, route)


def _field(F) -> ScalarField:
    return F if isinstance(F, ScalarField) else generic_field(F)
