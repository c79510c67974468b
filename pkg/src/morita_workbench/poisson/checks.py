"""Sampled verification checks for the smooth layer.

Every check draws seeded samples, computes residuals by finite differences and
returns a CheckReport.  Numerical breakdowns at a sample (degenerate kernels,
failed matching) are recorded as failures rather than raised.
"""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import WorkbenchError
from ..parallel import ordered_map, sample_rngs
from ..report import CheckReport
from .algebroid import algebroid_from_groupoid, algebroid_identity_residuals
from .brackets import canonical_bracket, jacobiator, lie_poisson, lie_poisson_bracket
from .charts import (
    AXIOM_TOL, Covector, LieAlgebroidChart, SmoothAction, SmoothBibundle, basic_field, generic_field, linear_field,
)
from .cotangent import (
    cotangent_act, cotangent_act_raw, cotangent_compose, cotangent_unit, lift_kernel_dim, matched_arrow_covector,
    translation_maps,
)
from .fd import DEFAULT_FD, FDConfig, composite_gradients, directional, jacobian, kernel, rank, symplectic_matrix
from .momentum import MomentumMap

ASSUMED_LEVEL_SETS = "connected and simply connected level sets of J_L, J_R: assumed, not sampled"
COMPLETENESS = "completeness of J_L: implied by the existence of the cotangent action, not tested dynamically"


def test_family(chart: LieAlgebroidChart) -> list:
    """Basic coordinate polynomials of degree <= 2 and linear functions of constant sections."""
    n0, r = chart.base_dim, chart.fiber_dim
    fam = []
    for a in range(n0):
        fam.append(basic_field(lambda q, a=a: q[a], n0, f"q{a}"))
    for a, b in itertools.combinations_with_replacement(range(n0), 2):
        fam.append(basic_field(lambda q, a=a, b=b: q[a] * q[b], n0, f"q{a}*q{b}"))
    for i in range(r):
        e = np.eye(r)[i]
        fam.append(linear_field(lambda q, e=e: e, n0, f"mu{i}"))
    return fam


def _finish(name, per_sample, tol, samples, keys, details=None, notes=(), extra_fail=None):
    residuals = {k: 0.0 for k in keys}
    failures = []
    for i, res in enumerate(per_sample):
        if isinstance(res, str):
            failures.append(f"sample {i}: {res}")
            continue
        if "error" in res:
            failures.append(f"sample {i}: {res['error']}")
        for k in keys:
            residuals[k] = max(residuals[k], float(res.get(k, 0.0)))
    worst = max(residuals.values(), default=0.0)
    if failures:
        worst = float("inf")
    passed = not failures and worst <= tol and not extra_fail
    notes = list(notes) + failures[:5]
    if extra_fail:
        notes.append(extra_fail)
    return CheckReport(name, passed, worst, tol, samples, residuals, details or {}, notes)


def _guard(fn):
    def run(rng):
        try:
            return fn(rng)
        except WorkbenchError as exc:
            return f"{type(exc).__name__}: {exc}"
    return run


def _poisson_residuals(J: MomentumMap, fam, chart, sign, rng, fd):
    act = J.action
    d = act.dim
    m = act.sample_point(rng)
    z = np.concatenate([m, rng.standard_normal(d)])
    nfd = fd.nested()
    Jn = J.with_fd(nfd)
    Jz = Jn.coords(z)
    grads = composite_gradients(Jn.coords, z, fam, nfd)
    worst = scale = 0.0
    for i, j in itertools.combinations(range(len(fam)), 2):
        lhs = grads[i][d:] @ grads[j][:d] - grads[i][:d] @ grads[j][d:]
        rhs = lie_poisson_bracket(chart, fam[i], fam[j], Jz, fd)
        worst = max(worst, abs(lhs + sign * rhs))
        scale = max(scale, abs(rhs))
    return {"bracket": worst, "scale": scale}


def check_poisson_property(J: MomentumMap, samples: int = 50, tol: float = 1e-5, seed: int = 0,
                           fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """Left momentum maps are anti-Poisson into A*(G), right ones are Poisson into A*(H)."""
    chart = algebroid_from_groupoid(J.groupoid, fd)
    fam = test_family(chart)
    sign = 1.0 if J.side == "left" else -1.0
    per = ordered_map(_guard(lambda rng: _poisson_residuals(J, fam, chart, sign, rng, fd)), sample_rngs(seed, samples))
    rep = _finish("anti-poisson" if J.side == "left" else "poisson", per, tol, samples, ["bracket"],
                  details={"action": J.action.name, "side": J.side, "family": [f.name for f in fam],
                           "sign": J.sign})
    scale = max((p["scale"] for p in per if isinstance(p, dict)), default=0.0)
    rep.details["max_abs_target_bracket"] = scale
    return rep


def check_anti_poisson(J: MomentumMap, samples: int = 50, tol: float = 1e-5, seed: int = 0,
                       fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """{J*F, J*G} + J*{F, G} = 0 for the momentum map of a left action."""
    if J.side != "left":
        raise ValueError("check_anti_poisson expects the momentum map of a left action")
    return check_poisson_property(J, samples, tol, seed, fd)


def check_commuting_pullbacks(left: SmoothAction, right: SmoothAction, samples: int = 50, tol: float = 1e-6,
                              seed: int = 0, fd: FDConfig = DEFAULT_FD) -> CheckReport:
    bib = SmoothBibundle(left, right)
    axioms = bib.commutation_residuals(np.random.default_rng(seed), samples=max(10, samples))
    bad = {k: v for k, v in axioms.items() if v > AXIOM_TOL}
    if bad:
        return CheckReport("commuting", False, float("inf"), tol, samples, {}, {"bibundle_axioms": axioms},
                           [f"bibundle axioms fail before any bracket is taken: {sorted(bad)}"])
    nfd = fd.nested()
    JL, JR = MomentumMap(left, nfd), MomentumMap(right, nfd)
    famL = test_family(algebroid_from_groupoid(left.groupoid, fd))
    famR = test_family(algebroid_from_groupoid(right.groupoid, fd))
    d = bib.dim

    def one(rng):
        z = np.concatenate([left.sample_point(rng), rng.standard_normal(d)])
        gL = composite_gradients(JL.coords, z, famL, nfd)
        gR = composite_gradients(JR.coords, z, famR, nfd)
        out = {}
        for i, f in enumerate(famL):
            for j, g in enumerate(famR):
                key = f"{f.kind}/{g.kind}"
                val = abs(gL[i][d:] @ gR[j][:d] - gL[i][:d] @ gR[j][d:])
                out[key] = max(out.get(key, 0.0), val)
        return out

    keys = ["basic/basic", "basic/linear", "linear/basic", "linear/linear"]
    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    return _finish("commuting", per, tol, samples, keys, details={"bibundle_axioms": axioms})


def check_jacobi(chart: LieAlgebroidChart, samples: int = 100, tol: float = 1e-5, seed: int = 0,
                 fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """Jacobiator of random quadratic-plus-exponential functions on the dual bundle."""
    D = chart.dim
    gen = np.random.default_rng(np.random.SeedSequence(seed).spawn(samples + 1)[-1])
    funcs = []
    for _ in range(3):
        Q = gen.standard_normal((D, D))
        Q = 0.5 * (Q + Q.T)
        w = 0.5 * gen.standard_normal(D)
        funcs.append(generic_field(lambda z, Q=Q, w=w: 0.5 * z @ Q @ z + np.exp(w @ z)))
    bracket = lie_poisson(chart, "bivector")

    def one(rng):
        z = chart.sample_point(rng)
        return {"jacobi": abs(jacobiator(bracket, *funcs, z, fd))}

    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    return _finish("jacobi", per, tol, samples, ["jacobi"], details={"chart": chart.name})


def check_bracket_match(chart: LieAlgebroidChart, samples: int = 100, tol: float = 1e-5, seed: int = 0,
                        fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """Dual-bundle bracket against the canonical bracket of T*R^n (for charts with A = TR^n)."""
    D = chart.dim
    gen = np.random.default_rng(np.random.SeedSequence(seed).spawn(samples + 1)[-1])
    funcs = []
    for _ in range(3):
        Q = gen.standard_normal((D, D))
        w = 0.5 * gen.standard_normal(D)
        funcs.append(generic_field(lambda z, Q=Q, w=w: 0.5 * z @ Q @ z + np.sin(w @ z)))

    def one(rng):
        z = chart.sample_point(rng)
        worst = 0.0
        for F, G in itertools.combinations(funcs, 2):
            worst = max(worst, abs(lie_poisson_bracket(chart, F, G, z, fd, "bivector") - canonical_bracket(F, G, z, fd)))
        return {"bracket-match": worst}

    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    return _finish("bracket-match", per, tol, samples, ["bracket-match"], details={"chart": chart.name})


def check_algebroid(G, samples: int = 10, tol: float = 1e-3, seed: int = 0, fd: FDConfig = DEFAULT_FD,
                    expected: dict | None = None, anchor_tol: float = 1e-6) -> CheckReport:
    """Anchor and structure functions by fd; compared with closed forms when given.

    Structure functions come from nested differences, so they get the loose
    ``tol``; the anchor is a single derivative and is held to ``anchor_tol``.
    """
    chart = algebroid_from_groupoid(G, fd)
    expected = expected or {}

    def one(rng):
        q = G.sample_base(rng)
        a, c = chart.anchor(q), chart.structure(q)
        res = algebroid_identity_residuals(chart, q, fd)
        if "anchor" in expected:
            res["anchor-vs-expected"] = float(np.max(np.abs(a - expected["anchor"]), initial=0.0))
        if "structure" in expected:
            res["structure-vs-expected"] = float(np.max(np.abs(c - expected["structure"]), initial=0.0))
        return res

    keys = ["antisymmetry", "jacobi", "anchor-morphism", "structure-vs-expected"]
    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    rep = _finish("algebroid", per, tol, samples, keys,
                  details={"groupoid": G.name, "fiber_dim": G.fiber_dim, "base_dim": G.base_dim,
                           "anchor_tol": anchor_tol})
    anchor_dev = max((p.get("anchor-vs-expected", 0.0) for p in per if isinstance(p, dict)), default=0.0)
    rep.residuals["anchor-vs-expected"] = anchor_dev
    if anchor_dev > anchor_tol:
        rep.passed = False
        rep.notes.append(f"anchor differs from the closed form by {anchor_dev:.3g} > {anchor_tol:g}")
    if rep.residuals.get("antisymmetry", 0.0) != 0.0:
        rep.passed = False
        rep.notes.append("structure functions are not exactly antisymmetric")
    q0 = G.base_box.mean(axis=1)
    rep.details["anchor_at_center"] = chart.anchor(q0)
    rep.details["structure_at_center"] = chart.structure(q0)
    return rep


def _gap(a: Covector, b: Covector) -> float:
    return max(float(np.max(np.abs(a.base - b.base), initial=0.0)),
               float(np.max(np.abs(a.components - b.components), initial=0.0)))


def check_action_axioms(G, act: SmoothAction, samples: int = 30, tol: float = 1e-5, seed: int = 0,
                        fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """Moment compatibility, associativity with the cotangent product, unit triviality, lift independence."""
    t_map, _ = translation_maps(G, fd)
    JL = MomentumMap(act, fd)

    def rest(out, rng, m, theta, mu, y, beta, bt):
        x = G.sample_arrow(rng, G.target(y))
        alpha = matched_arrow_covector(G, x, t_map(beta).components, rng, fd)
        lhs = cotangent_act(G, act, alpha, bt, fd=fd)
        rhs = cotangent_act(G, act, cotangent_compose(G, alpha, beta, fd=fd), theta, fd=fd)
        out["abth"] = _gap(lhs, rhs)
        unit = cotangent_unit(G, act.base_map(m), mu.components, fd)
        out["unit"] = _gap(cotangent_act(G, act, unit, theta, fd=fd), theta)
        k = lift_kernel_dim(G, y, fd)
        if k:
            shifted = cotangent_act(G, act, beta, theta, fd=fd, lift_shift=rng.standard_normal(k * act.dim))
            out["lift"] = _gap(shifted, bt)

    def one(rng):
        m = act.sample_point(rng)
        theta = Covector("T*M", m, rng.standard_normal(act.dim))
        mu = JL(theta)
        y = G.sample_arrow(rng, act.base_map(m))
        beta = matched_arrow_covector(G, y, mu.components, rng, fd)
        bt = cotangent_act(G, act, beta, theta, fd=fd)
        out = {"tcon": _gap(JL(bt), t_map(beta))}
        try:
            rest(out, rng, m, theta, mu, y, beta, bt)
        except WorkbenchError as exc:
            out["error"] = f"{type(exc).__name__}: {exc}"
        return out

    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    return _finish("action-axioms", per, tol, samples, ["tcon", "abth", "unit", "lift"],
                   details={"groupoid": G.name, "action": act.name}, notes=[COMPLETENESS])


def check_cotangent_groupoid(G, samples: int = 20, tol: float = 1e-6, seed: int = 0,
                             fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """Associativity of the cotangent product on matched triples and the two unit laws."""
    t_map, s_map = translation_maps(G, fd)

    def one(rng):
        z = G.sample_arrow(rng)
        c = Covector("T*G", z, rng.standard_normal(G.arrow_dim))
        y = G.sample_arrow(rng, G.target(z))
        b = matched_arrow_covector(G, y, t_map(c).components, rng, fd)
        x = G.sample_arrow(rng, G.target(y))
        a = matched_arrow_covector(G, x, t_map(b).components, rng, fd)
        left = cotangent_compose(G, cotangent_compose(G, a, b, fd=fd), c, fd=fd)
        right = cotangent_compose(G, a, cotangent_compose(G, b, c, fd=fd), fd=fd)
        u_t = cotangent_unit(G, G.target(x), t_map(a).components, fd)
        u_s = cotangent_unit(G, G.source(x), s_map(a).components, fd)
        return {
            "associativity": _gap(left, right),
            "left-unit": _gap(cotangent_compose(G, u_t, a, fd=fd), a),
            "right-unit": _gap(cotangent_compose(G, a, u_s, fd=fd), a),
        }

    per = ordered_map(_guard(one), sample_rngs(seed, samples))
    return _finish("compose", per, tol, samples, ["associativity", "left-unit", "right-unit"],
                   details={"groupoid": G.name})


def check_lagrangian_graph(G, act: SmoothAction, samples: int = 10, tol: float = 1e-5, seed: int = 0,
                           fd: FDConfig = DEFAULT_FD) -> CheckReport:
    """The graph {(alpha, theta, alpha.theta)} inside T*G x T*M x T*M with form (-w_G) + (-w_M) + w_M."""
    nfd = fd.nested()
    n0, n1, d = G.base_dim, G.arrow_dim, act.dim
    _, s_map = translation_maps(G, nfd)
    JL = MomentumMap(act, nfd)
    ambient = 2 * n1 + 4 * d
    expected_dim = n1 + 2 * d
    Omega = np.zeros((ambient, ambient))
    Omega[: 2 * n1, : 2 * n1] = -symplectic_matrix(n1)
    Omega[2 * n1: 2 * n1 + 2 * d, 2 * n1: 2 * n1 + 2 * d] = -symplectic_matrix(d)
    Omega[2 * n1 + 2 * d:, 2 * n1 + 2 * d:] = symplectic_matrix(d)

    def split(p):
        return p[:n1], p[n1: 2 * n1], p[2 * n1: 2 * n1 + d], p[2 * n1 + d:]

    def constraint(p):
        x, alpha, m, theta = split(p)
        gap_base = G.source(x) - act.base_map(m)
        gap_mom = s_map.coords(np.concatenate([x, alpha]))[n0:] - JL.coords(np.concatenate([m, theta]))[n0:]
        return np.concatenate([gap_base, gap_mom])

    def graph(p):
        x, alpha, m, theta = split(p)
        return np.concatenate([p, cotangent_act_raw(G, act, x, alpha, m, theta, nfd)])

    dims = []

    def one(rng):
        m = act.sample_point(rng)
        theta = rng.standard_normal(d)
        x = G.sample_arrow(rng, act.base_map(m))
        alpha = matched_arrow_covector(G, x, JL(Covector("T*M", m, theta)).components, rng, fd)
        p = np.concatenate([x, alpha.components, m, theta])
        V = kernel(jacobian(constraint, p, nfd))
        W = np.column_stack([directional(graph, p, V[:, b], nfd) for b in range(V.shape[1])])
        Q, _ = np.linalg.qr(W)
        dims.append((V.shape[1], rank(W)))
        out = {"form": float(np.max(np.abs(Q.T @ Omega @ Q), initial=0.0))}
        out["dimension"] = 0.0 if (V.shape[1] == expected_dim and rank(W) == expected_dim) else float("inf")
        return out

    per = [_guard(one)(rng) for rng in sample_rngs(seed, samples)]
    graph_dims = sorted({r for _, r in dims})
    rep = _finish("lagrangian", per, tol, samples, ["form", "dimension"],
                  details={"ambient_dim": ambient, "graph_dim": graph_dims[0] if len(graph_dims) == 1 else graph_dims,
                           "expected_graph_dim": expected_dim})
    return rep


def check_symplectic_orthogonality(bib: SmoothBibundle, samples: int = 20, tol: float = 1e-8, seed: int = 0,
                                   fd: FDConfig = DEFAULT_FD, right_coords=None) -> CheckReport:
    """ker DJ_L and ker DJ_R are complementary and symplectically orthogonal; rank identities at the base.

    ``right_coords`` replaces J_R in the kernel computation (for negative controls).
    """
    nfd = fd.nested()
    left, right = bib.left, bib.right
    JL, JR = MomentumMap(left, nfd), MomentumMap(right, nfd)
    jr = right_coords or JR.coords
    d = bib.dim
    Omega = symplectic_matrix(d)
    seen = []

    def one(rng):
        m = left.sample_point(rng)
        z = np.concatenate([m, rng.standard_normal(d)])
        DL, DR = jacobian(JL.coords, z, nfd), jacobian(jr, z, nfd)
        KL, KR = kernel(DL), kernel(DR)
        out = {"pairing": float(np.max(np.abs(KL.T @ Omega @ KR), initial=0.0))}
        out["complementary"] = 0.0 if KL.shape[1] + KR.shape[1] == 2 * d else float("inf")
        out["submersive"] = 0.0 if (rank(DL) == DL.shape[0] and rank(DR) == DR.shape[0]) else float("inf")
        ker_sigma = kernel(jacobian(right.base_map, m, nfd)) if right.groupoid.base_dim else np.eye(d)
        ker_tau = kernel(jacobian(left.base_map, m, nfd)) if left.groupoid.base_dim else np.eye(d)
        gl, gr = JL.generators(m), JR.generators(m)
        ok_l = rank(gl) == ker_sigma.shape[1] == rank(np.hstack([ker_sigma, gl]))
        ok_r = rank(gr) == ker_tau.shape[1] == rank(np.hstack([ker_tau, gr]))
        out["rank-identities"] = 0.0 if ok_l and ok_r else float("inf")
        seen.append((KL.shape[1], KR.shape[1], ker_sigma.shape[1], rank(gl), ker_tau.shape[1], rank(gr)))
        return out

    per = [_guard(one)(rng) for rng in sample_rngs(seed, samples)]
    rep = _finish("orthogonality", per, tol, samples, ["pairing", "complementary", "submersive", "rank-identities"],
                  notes=[ASSUMED_LEVEL_SETS])
    if seen:
        kl, kr, ks, gl, kt, gr = seen[0]
        rep.details = {
            "dim_T*M": 2 * d, "dim_ker_DJ_L": kl, "dim_ker_DJ_R": kr,
            "dim_ker_Dsigma": ks, "rank_left_generators": gl,
            "dim_ker_Dtau": kt, "rank_right_generators": gr,
            "dimensions_constant_over_samples": len(set(seen)) == 1,
        }
    return rep
