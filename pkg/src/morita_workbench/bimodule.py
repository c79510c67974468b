"""Pre-equivalence bimodule C(M) between C*(G) and C*(H) built from a bibundle.

Counting-measure formulas (tau: M -> G_0, sigma: M -> H_0):

    (A.psi)(m)        = sum_{t(x)=tau(m)}   A(x) psi(x^-1 . m)
    (psi.B)(m)        = sum_{t(h)=sigma(m)} psi(m . h) B(h^-1)
    <psi, phi>_B(h)   = sum_{t(x)=tau(m)}   conj(psi(x^-1 . m)) phi(x^-1 . m . h),  m in sigma^-1(t(h))
    _A<psi, phi>(x)   = sum_{t(h)=sigma(m)} psi(x . m . h) conj(phi(m . h)),       m in tau^-1(s(x))

Positivity uses eigenvalues in the regular representation; the reason it
must hold is Green's decomposition argument, which is not re-derived here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bibundle import Bibundle, check_equivalence
from .convolution import (
    AlgebraElement,
    convolve,
    cstar_norm,
    involute,
    morita_oracle,
    random_element,
    regular_representation,
    relative_residual,
)
from .errors import EmptyFiber, GroupoidMismatch, PreconditionFailed


@dataclass(frozen=True, eq=False)
class BimoduleElement:
    bibundle: Bibundle
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.bibundle.n_points,):
            raise ValueError(f"expected {self.bibundle.n_points} values, got shape {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return BimoduleElement(self.bibundle, self.values + other.values)

    def __sub__(self, other):
        return BimoduleElement(self.bibundle, self.values - other.values)

    def __mul__(self, scalar):
        return BimoduleElement(self.bibundle, scalar * self.values)

    __rmul__ = __mul__


def point_delta(B: Bibundle, m: int) -> BimoduleElement:
    v = np.zeros(B.n_points, dtype=np.complex128)
    v[m] = 1.0
    return BimoduleElement(B, v)


def random_module_element(B: Bibundle, rng: np.random.Generator) -> BimoduleElement:
    n = B.n_points
    return BimoduleElement(B, rng.standard_normal(n) + 1j * rng.standard_normal(n))


# -- index structures ---------------------------------------------------------

@lru_cache(maxsize=32)
def _left_index(B):
    """Triples (m, x, x^-1.m) over t(x) = tau(m)."""
    G = B.G
    xs, ms = np.nonzero(G.tgt[:, None] == B.tau[None, :])
    return ms, xs, B.left[G.inverse[xs], ms]


@lru_cache(maxsize=32)
def _right_index(B):
    """Triples (m, h, m.h) over t(h) = sigma(m)."""
    H = B.H
    ms, hs = np.nonzero(B.sigma[:, None] == H.tgt[None, :])
    return ms, hs, B.right[ms, hs]


def _right_inner_index(B, basepoint):
    """(h, p, p') with <psi,phi>_B(h) = sum conj(psi[p]) phi[p'] for basepoint choice m_h."""
    G, H = B.G, B.H
    hs, ps, pps = [], [], []
    for h in range(H.n_arrows):
        m = basepoint(h)
        xs = np.nonzero(G.tgt == B.tau[m])[0]
        p = B.left[G.inverse[xs], m]
        hs.append(np.full(len(xs), h))
        ps.append(p)
        pps.append(B.right[p, h])
    return np.concatenate(hs), np.concatenate(ps), np.concatenate(pps)


def _left_inner_index(B, basepoint):
    """(x, p, p') with _A<psi,phi>(x) = sum psi[p] conj(phi[p']) for basepoint choice m_x."""
    G, H = B.G, B.H
    xs, ps, pps = [], [], []
    for x in range(G.n_arrows):
        m = basepoint(x)
        hs = np.nonzero(H.tgt == B.sigma[m])[0]
        pp = B.right[m, hs]
        xs.append(np.full(len(hs), x))
        ps.append(B.left[x, pp])
        pps.append(pp)
    return np.concatenate(xs), np.concatenate(ps), np.concatenate(pps)


def _sigma_fiber(B, h):
    fiber = np.nonzero(B.sigma == B.H.tgt[h])[0]
    if not len(fiber):
        raise EmptyFiber(f"sigma-fiber over t(h) = {int(B.H.tgt[h])} is empty")
    return fiber


def _tau_fiber(B, x):
    fiber = np.nonzero(B.tau == B.G.src[x])[0]
    if not len(fiber):
        raise EmptyFiber(f"tau-fiber over s(x) = {int(B.G.src[x])} is empty")
    return fiber


@lru_cache(maxsize=32)
def _default_right_inner(B):
    return _right_inner_index(B, lambda h: _sigma_fiber(B, h)[0])


@lru_cache(maxsize=32)
def _default_left_inner(B):
    return _left_inner_index(B, lambda x: _tau_fiber(B, x)[0])


def _check_left(A, psi):
    if not A.groupoid.same_as(psi.bibundle.G):
        raise GroupoidMismatch("left coefficient must live over G")


def _check_right(psi, Bel):
    if not Bel.groupoid.same_as(psi.bibundle.H):
        raise GroupoidMismatch("right coefficient must live over H")


# -- operations ---------------------------------------------------------------

def left_act(A: AlgebraElement, psi: BimoduleElement) -> BimoduleElement:
    _check_left(A, psi)
    B = psi.bibundle
    ms, xs, ps = _left_index(B)
    out = np.zeros(B.n_points, dtype=np.complex128)
    np.add.at(out, ms, A.values[xs] * psi.values[ps])
    return BimoduleElement(B, out)


def right_act(psi: BimoduleElement, Bel: AlgebraElement) -> BimoduleElement:
    _check_right(psi, Bel)
    B = psi.bibundle
    ms, hs, ps = _right_index(B)
    out = np.zeros(B.n_points, dtype=np.complex128)
    np.add.at(out, ms, psi.values[ps] * Bel.values[B.H.inverse[hs]])
    return BimoduleElement(B, out)


def inner_right(psi: BimoduleElement, phi: BimoduleElement, basepoints=None) -> AlgebraElement:
    """H-valued inner product.  ``basepoints`` optionally maps h to the point m_h used."""
    B = psi.bibundle
    if basepoints is None:
        hs, ps, pps = _default_right_inner(B)
    else:
        hs, ps, pps = _right_inner_index(B, basepoints)
    out = np.zeros(B.H.n_arrows, dtype=np.complex128)
    np.add.at(out, hs, np.conj(psi.values[ps]) * phi.values[pps])
    return AlgebraElement(B.H, out)


def inner_left(psi: BimoduleElement, phi: BimoduleElement, basepoints=None) -> AlgebraElement:
    """G-valued inner product.  ``basepoints`` optionally maps x to the point m_x used."""
    B = psi.bibundle
    if basepoints is None:
        xs, ps, pps = _default_left_inner(B)
    else:
        xs, ps, pps = _left_inner_index(B, basepoints)
    out = np.zeros(B.G.n_arrows, dtype=np.complex128)
    np.add.at(out, xs, psi.values[ps] * np.conj(phi.values[pps]))
    return AlgebraElement(B.G, out)


def basepoint_deviation(psi: BimoduleElement, phi: BimoduleElement) -> float:
    """Max change of either inner product over every admissible basepoint choice."""
    B = psi.bibundle
    ref_r = inner_right(psi, phi).values
    ref_l = inner_left(psi, phi).values
    worst = 0.0
    for h in range(B.H.n_arrows):
        for m in _sigma_fiber(B, h):
            def bp(k, h=h, m=m):
                return m if k == h else _sigma_fiber(B, k)[0]
            val = inner_right(psi, phi, basepoints=bp).values[h]
            worst = max(worst, abs(val - ref_r[h]))
    for x in range(B.G.n_arrows):
        for m in _tau_fiber(B, x):
            def bp(k, x=x, m=m):
                return m if k == x else _tau_fiber(B, k)[0]
            val = inner_left(psi, phi, basepoints=bp).values[x]
            worst = max(worst, abs(val - ref_l[x]))
    return worst


# -- verification report ------------------------------------------------------

@dataclass
class AxiomResult:
    name: str
    passed: bool
    residual: float
    tol: float
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "residual": self.residual,
            "tol": self.tol,
            "witnesses": self.witnesses,
        }


@dataclass
class BimoduleReport:
    results: list
    oracle: bool | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "morita_oracle": self.oracle,
            "axioms": [r.to_dict() for r in self.results],
        }


def _min_eig(M):
    H = 0.5 * (M + M.conj().T)
    return float(np.linalg.eigvalsh(H)[0]) if H.size else 0.0


def _rank(vectors, rtol=1e-8):
    if not len(vectors):
        return 0
    sv = np.linalg.svd(np.asarray(vectors), compute_uv=False)
    return int(np.sum(sv > rtol * sv[0])) if sv[0] > 0 else 0


def verify_pre_equivalence(G, H, B: Bibundle, tol: float = 1e-9, trials: int = 100,
                           seed: int = 0, basis_tol: float = 1e-12,
                           psd_tol: float = 1e-10) -> BimoduleReport:
    """Check every pre-equivalence bimodule axiom on C(M).

    Equalities are checked as relative residuals (``tol`` on random inputs,
    ``basis_tol`` on basis triples); positivity and the completion bounds as
    PSD-ness in the regular representation with min eigenvalue >= -``psd_tol``.
    """
    if not (B.G.same_as(G) and B.H.same_as(H)):
        raise GroupoidMismatch("bibundle is not over the given groupoids")
    eq = check_equivalence(B)
    if not eq.passed:
        names = [c.name for c in eq.failing()]
        raise PreconditionFailed(f"not an equivalence bibundle: {names}")

    rng = np.random.default_rng(seed)
    regG, regH = regular_representation(G), regular_representation(H)
    results = []

    def record(name, residual, limit, witnesses=None):
        results.append(AxiomResult(name, bool(residual <= limit), float(residual), limit, witnesses or {}))

    worst = dict.fromkeys(
        ["left-module", "right-module", "bimodule-commutation", "right-inner-linearity",
         "left-inner-linearity", "inner-hermitian", "left-adjointable", "right-adjointable",
         "compatibility-random"], 0.0)
    min_pos_r = min_pos_l = np.inf
    min_bound_a = min_bound_b = np.inf
    for _ in range(trials):
        A1, A2 = random_element(G, rng), random_element(G, rng)
        B1, B2 = random_element(H, rng), random_element(H, rng)
        psi, phi, zeta = (random_module_element(B, rng) for _ in range(3))

        worst["left-module"] = max(worst["left-module"], relative_residual(
            left_act(convolve(A1, A2), psi).values, left_act(A1, left_act(A2, psi)).values))
        worst["right-module"] = max(worst["right-module"], relative_residual(
            right_act(right_act(psi, B1), B2).values, right_act(psi, convolve(B1, B2)).values))
        worst["bimodule-commutation"] = max(worst["bimodule-commutation"], relative_residual(
            right_act(left_act(A1, psi), B1).values, left_act(A1, right_act(psi, B1)).values))
        worst["right-inner-linearity"] = max(worst["right-inner-linearity"], relative_residual(
            inner_right(psi, right_act(phi, B1)).values, convolve(inner_right(psi, phi), B1).values))
        worst["left-inner-linearity"] = max(worst["left-inner-linearity"], relative_residual(
            inner_left(left_act(A1, psi), phi).values, convolve(A1, inner_left(psi, phi)).values))
        worst["inner-hermitian"] = max(
            worst["inner-hermitian"],
            relative_residual(involute(inner_right(psi, phi)).values, inner_right(phi, psi).values),
            relative_residual(involute(inner_left(psi, phi)).values, inner_left(phi, psi).values))
        worst["left-adjointable"] = max(worst["left-adjointable"], relative_residual(
            inner_right(left_act(A1, psi), phi).values, inner_right(psi, left_act(involute(A1), phi)).values))
        worst["right-adjointable"] = max(worst["right-adjointable"], relative_residual(
            inner_left(right_act(psi, B1), phi).values, inner_left(psi, right_act(phi, involute(B1))).values))
        worst["compatibility-random"] = max(worst["compatibility-random"], relative_residual(
            left_act(inner_left(psi, phi), zeta).values, right_act(psi, inner_right(phi, zeta)).values))

        min_pos_r = min(min_pos_r, _min_eig(regH.matrix(inner_right(psi, psi))))
        min_pos_l = min(min_pos_l, _min_eig(regG.matrix(inner_left(psi, psi))))

        # completion bounds: <A psi, A psi>_B <= |A|^2 <psi, psi>_B and mirror
        Apsi = left_act(A1, psi)
        diff = cstar_norm(A1) ** 2 * regH.matrix(inner_right(psi, psi)) - regH.matrix(inner_right(Apsi, Apsi))
        min_bound_a = min(min_bound_a, _min_eig(diff))
        psiB = right_act(psi, B1)
        diff = cstar_norm(B1) ** 2 * regG.matrix(inner_left(psi, psi)) - regG.matrix(inner_left(psiB, psiB))
        min_bound_b = min(min_bound_b, _min_eig(diff))

    for name in ["left-module", "right-module", "bimodule-commutation", "right-inner-linearity",
                 "left-inner-linearity", "inner-hermitian", "left-adjointable", "right-adjointable"]:
        record(name, worst[name], tol)

    deltas = [point_delta(B, m) for m in range(B.n_points)]
    worst_basis, witness = 0.0, {}
    for i, psi in enumerate(deltas):
        for j, phi in enumerate(deltas):
            lhs_ip = inner_left(psi, phi)
            for k, zeta in enumerate(deltas):
                r = relative_residual(left_act(lhs_ip, zeta).values,
                                      right_act(psi, inner_right(phi, zeta)).values)
                if r > worst_basis:
                    worst_basis, witness = r, {"triple": [i, j, k]}
    record("compatibility-basis", worst_basis, basis_tol, witness)
    record("compatibility-random", worst["compatibility-random"], tol)

    dev = max(basepoint_deviation(random_module_element(B, rng), random_module_element(B, rng))
              for _ in range(3))
    record("basepoint-independence", dev, tol)

    for psi in deltas:
        min_pos_r = min(min_pos_r, _min_eig(regH.matrix(inner_right(psi, psi))))
        min_pos_l = min(min_pos_l, _min_eig(regG.matrix(inner_left(psi, psi))))
    record("positivity-right", max(0.0, -min_pos_r), psd_tol, {"min_eigenvalue": min_pos_r})
    record("positivity-left", max(0.0, -min_pos_l), psd_tol, {"min_eigenvalue": min_pos_l})

    span_r = [inner_right(p, q).values for p in deltas for q in deltas]
    span_l = [inner_left(p, q).values for p in deltas for q in deltas]
    rank_r, rank_l = _rank(span_r), _rank(span_l)
    results.append(AxiomResult("fullness-right", rank_r == H.n_arrows, float(H.n_arrows - rank_r), 0.0,
                               {"rank": rank_r, "dimension": H.n_arrows}))
    results.append(AxiomResult("fullness-left", rank_l == G.n_arrows, float(G.n_arrows - rank_l), 0.0,
                               {"rank": rank_l, "dimension": G.n_arrows}))

    record("bound-left-action", max(0.0, -min_bound_a), psd_tol, {"min_eigenvalue": min_bound_a})
    record("bound-right-action", max(0.0, -min_bound_b), psd_tol, {"min_eigenvalue": min_bound_b})

    return BimoduleReport(results, oracle=morita_oracle(G, H))
