"""Command-line front end.

Exit codes: 0 pass, 2 input error, 3 axiom error, 4 check failure,
5 disagreement between the bimodule verification and the block-count oracle.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import report as rpt
from .bibundle import check_equivalence, validate_bibundle
from .bimodule import verify_pre_equivalence
from .convolution import block_count, morita_oracle
from .errors import (AxiomError, DomainError, GroupoidMismatch, InvalidParameter, ParseError,
                     PreconditionFailed, WorkbenchError)
from .groupoid import make_builtin, orbit_decomposition, validate_groupoid

EXIT_OK, EXIT_INPUT, EXIT_AXIOM, EXIT_CHECK, EXIT_ORACLE = 0, 2, 3, 4, 5
SEED_MAX = 2**64 - 1

POISSON_CHECKS = ("algebroid", "jacobi", "anti-poisson", "commuting", "compose",
                  "action-axioms", "lagrangian", "orthogonality")
# (tolerance, samples) when not overridden on the command line
CHECK_DEFAULTS = {
    "algebroid": (1e-3, 10),
    "jacobi": (1e-5, 100),
    "anti-poisson": (1e-5, 50),
    "commuting": (1e-6, 50),
    "compose": (1e-6, 20),
    "action-axioms": (1e-5, 30),
    "lagrangian": (1e-5, 10),
    "orthogonality": (1e-8, 20),
}


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    tol: float | None = None
    fd_step: float | None = None
    fd_nested_step: float | None = None
    samples: int | None = None
    seed: int = 0
    out: str | None = None
    format: str = "text"

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InvalidParameter("--tol must be positive")
        for name in ("fd_step", "fd_nested_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidParameter(f"--{name.replace('_', '-')} must be positive")
        if self.samples is not None and self.samples < 1:
            raise InvalidParameter("--samples must be at least 1")
        if not 0 <= self.seed <= SEED_MAX:
            raise InvalidParameter("--seed must be an unsigned 64-bit integer")
        if self.format not in ("text", "json"):
            raise InvalidParameter("--format must be text or json")

    def fd(self):
        from .poisson.fd import FDConfig

        base = FDConfig()
        return FDConfig(step=self.fd_step or base.step,
                        nested_step=self.fd_nested_step or base.nested_step)

    def for_report(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in ("out", "format")}


class InputError(Exception):
    pass


def _emit(doc: dict, cfg: RunConfig, table: str = "") -> None:
    if cfg.format == "json":
        text = rpt.dumps(doc)
    else:
        comments = "".join(f"# {line}\n" for line in table.splitlines())
        text = comments + rpt.render_text(doc)
    if cfg.out:
        Path(cfg.out).write_text(text)
        if table:
            sys.stdout.write(table)
    else:
        sys.stdout.write(text)


# -- finite layer ---------------------------------------------------------------

def _load_groupoid(source: str):
    """A JSON path, or a builtin such as pair:3, unit:2, cyclic:3, s3."""
    if not Path(source).exists() and (":" in source or source == "s3"):
        return make_builtin(source)
    return validate_groupoid(source)


def _describe_groupoid(G) -> dict:
    orb = orbit_decomposition(G)
    return {"objects": G.n_objects, "arrows": G.n_arrows, "orbits": len(orb.orbits),
            "isotropy_sizes": orb.isotropy_sizes, "block_count": block_count(G)}


def cmd_validate(cfg: RunConfig, left: str | None, right: str | None) -> int:
    from .poisson.manifest import load_manifest, validate_manifest

    sections, code = {}, EXIT_OK
    G = H = None
    for path in cfg.inputs:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            sections[path] = {"status": "parse-error", "message": str(exc)}
            code = max(code, EXIT_INPUT)
            continue
        try:
            if isinstance(raw, dict) and "points" in raw:
                if left is None or right is None:
                    raise ParseError("bibundle files need --left and --right groupoids")
                if G is None:
                    G, H = _load_groupoid(left), _load_groupoid(right)
                B = validate_bibundle(G, H, raw)
                eq = check_equivalence(B)
                sections[path] = {"status": "OK", "kind": "bibundle", "points": B.n_points,
                                  "equivalence": eq.to_dict()}
            elif isinstance(raw, dict) and "arrow_dim" in raw:
                loaded = load_manifest(raw)
                found = validate_manifest(loaded, seed=cfg.seed)
                sections[path] = {"status": "OK", "kind": "manifest", "residuals": found}
            else:
                sections[path] = {"status": "OK", "kind": "groupoid", **_describe_groupoid(validate_groupoid(raw))}
        except AxiomError as exc:
            sections[path] = {"status": "axiom-error", "axiom": exc.axiom, "witnesses": list(exc.witnesses),
                              "message": str(exc)}
            code = max(code, EXIT_AXIOM)
        except (ParseError, InvalidParameter, DomainError, GroupoidMismatch) as exc:
            sections[path] = {"status": "parse-error", "message": str(exc)}
            code = max(code, EXIT_INPUT)
    doc = rpt.document("validate", sections, code == EXIT_OK, code, cfg.for_report())
    table = "".join(f"{sec['status']:<12} {p}" + (f"  {sec.get('message', '')}" if sec["status"] != "OK" else "") + "\n"
                    for p, sec in sections.items())
    _emit(doc, cfg, table)
    return code


def cmd_morita(cfg: RunConfig) -> int:
    if len(cfg.inputs) != 3:
        raise InputError("morita needs three inputs: G, H and the bibundle")
    g_src, h_src, m_path = cfg.inputs
    G, H = _load_groupoid(g_src), _load_groupoid(h_src)
    B = validate_bibundle(G, H, m_path)
    oracle = bool(morita_oracle(G, H))
    eq = check_equivalence(B)
    sections = {"equivalence": eq.to_dict(), "oracle": {"morita_equivalent": oracle,
                                                       "block_count_G": block_count(G),
                                                       "block_count_H": block_count(H)}}
    if not eq.passed:
        code = EXIT_CHECK
        table = "FAIL  equivalence bibundle: " + ", ".join(c.name for c in eq.failing()) + "\n"
    else:
        try:
            rep = verify_pre_equivalence(G, H, B, tol=cfg.tol or 1e-9, trials=cfg.samples or 100, seed=cfg.seed)
        except PreconditionFailed as exc:
            raise InputError(str(exc)) from exc
        sections["bimodule"] = rep.to_dict()
        if rep.passed != oracle:
            code = EXIT_ORACLE
        else:
            code = EXIT_OK if rep.passed else EXIT_CHECK
        table = "".join(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<26} residual {r.residual:<12.4g} tol {r.tol:.1e}\n"
                        for r in rep.results)
        table += f"oracle: {'equivalent' if oracle else 'not equivalent'}\n"
        if code == EXIT_ORACLE:
            table += "bimodule verification and block-count oracle disagree\n"
    doc = rpt.document("morita", sections, code == EXIT_OK, code, cfg.for_report())
    _emit(doc, cfg, table)
    return code


# -- smooth layer ---------------------------------------------------------------

def _poisson_target(example: str | None, manifest: str | None, seed: int):
    from .poisson.examples import get_example
    from .poisson.manifest import load_manifest, validate_manifest

    if (example is None) == (manifest is None):
        raise InputError("give exactly one of --example and --manifest")
    if example is not None:
        ex = get_example(example)
        return {"name": ex.name, "groupoid": ex.groupoid, "left": ex.left, "right": ex.right,
                "bibundle": ex.bibundle, "expected": ex.expected}
    loaded = load_manifest(manifest)
    validate_manifest(loaded, seed=seed)
    loaded["expected"] = {}
    return loaded


def _applicable(name: str, target: dict) -> bool:
    if name in ("anti-poisson", "action-axioms", "lagrangian"):
        return target["left"] is not None
    if name in ("commuting", "orthogonality"):
        return target["bibundle"] is not None
    return True


def _run_check(name: str, target: dict, tol: float, samples: int, seed: int, fd) -> dict:
    from .poisson import checks
    from .poisson.algebroid import algebroid_from_groupoid
    from .poisson.momentum import MomentumMap

    G = target["groupoid"]
    if name == "algebroid":
        return {name: checks.check_algebroid(G, samples, tol, seed, fd, expected=target["expected"])}
    if name == "jacobi":
        return {name: checks.check_jacobi(algebroid_from_groupoid(G, fd), samples, tol, seed, fd)}
    if name == "anti-poisson":
        out = {name: checks.check_anti_poisson(MomentumMap(target["left"], fd), samples, tol, seed, fd)}
        if target["right"] is not None:
            out["poisson-right"] = checks.check_poisson_property(MomentumMap(target["right"], fd), samples, tol, seed, fd)
        return out
    if name == "commuting":
        return {name: checks.check_commuting_pullbacks(target["left"], target["right"], samples, tol, seed, fd)}
    if name == "compose":
        return {name: checks.check_cotangent_groupoid(G, samples, tol, seed, fd)}
    if name == "action-axioms":
        return {name: checks.check_action_axioms(G, target["left"], samples, tol, seed, fd)}
    if name == "lagrangian":
        return {name: checks.check_lagrangian_graph(G, target["left"], samples, tol, seed, fd)}
    if name == "orthogonality":
        return {name: checks.check_symplectic_orthogonality(target["bibundle"], samples, tol, seed, fd)}
    raise InputError(f"unknown check {name!r}")


def cmd_poisson(cfg: RunConfig, example: str | None, manifest: str | None, check_list: str | None) -> int:
    target = _poisson_target(example, manifest, cfg.seed)
    if check_list:
        names = [c.strip() for c in check_list.split(",") if c.strip()]
        unknown = [c for c in names if c not in POISSON_CHECKS]
        if unknown:
            raise InputError(f"unknown checks {unknown}; choose from {', '.join(POISSON_CHECKS)}")
        missing = [c for c in names if not _applicable(c, target)]
        if missing:
            raise InputError(f"{target['name']} has no data for {missing}")
    else:
        names = [c for c in POISSON_CHECKS if _applicable(c, target)]
    fd = cfg.fd()
    sections = {}
    for name in names:
        tol, samples = CHECK_DEFAULTS[name]
        found = _run_check(name, target, cfg.tol or tol, cfg.samples or samples, cfg.seed, fd)
        sections.update({k: v.to_dict() for k, v in found.items()})
    passed = all(sec["pass"] for sec in sections.values())
    code = EXIT_OK if passed else EXIT_CHECK
    config = cfg.for_report() | {"target": target["name"], "checks": names}
    doc = rpt.document("poisson", sections, passed, code, config)
    _emit(doc, cfg, rpt.summary_table(doc))
    return code


# -- reports --------------------------------------------------------------------

def _read_report(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return rpt.parse_text(text)


def cmd_report(cfg: RunConfig) -> int:
    if not cfg.inputs:
        raise InputError("report needs at least one input report")
    docs = [_read_report(p) for p in cfg.inputs]
    merged = rpt.merge(docs, [Path(p).stem for p in cfg.inputs])
    lines = "".join(f"{'PASS' if d.get('pass') else 'FAIL'}  {name}\n" for name, d in merged["sections"].items())
    _emit(merged, cfg, lines)
    return EXIT_OK


# -- entry point ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, help="tolerance override for every residual")
    p.add_argument("--fd-step", type=float, help="finite-difference step for first derivatives")
    p.add_argument("--fd-nested-step", type=float, help="finite-difference step for nested derivatives")
    p.add_argument("--samples", type=int, help="sample (or trial) count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morita-workbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate groupoid, bibundle or manifest files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--left", help="left groupoid (file or builtin) for bibundle files")
    p.add_argument("--right", help="right groupoid (file or builtin) for bibundle files")
    _common(p)

    p = sub.add_parser("morita", help="verify the equivalence bimodule of a bibundle")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("bibundle")
    _common(p)

    p = sub.add_parser("poisson", help="run smooth-layer checks on an example or manifest")
    p.add_argument("--example")
    p.add_argument("--manifest")
    p.add_argument("--check", help=f"comma-separated subset of: {', '.join(POISSON_CHECKS)}")
    _common(p)

    p = sub.add_parser("report", help="merge JSON reports into one document")
    p.add_argument("paths", nargs="*")
    _common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        inputs = {"validate": lambda: args.paths, "morita": lambda: [args.g, args.h, args.bibundle],
                  "poisson": lambda: [], "report": lambda: args.paths}[args.command]()
        cfg = RunConfig(args.command, inputs, args.tol, args.fd_step, args.fd_nested_step, args.samples,
                        args.seed, args.out, args.format)
        if args.command == "validate":
            return cmd_validate(cfg, args.left, args.right)
        if args.command == "morita":
            return cmd_morita(cfg)
        if args.command == "poisson":
            return cmd_poisson(cfg, args.example, args.manifest, args.check)
        return cmd_report(cfg)
    except AxiomError as exc:
        print(f"axiom error: {exc}", file=sys.stderr)
        return EXIT_AXIOM
    except (InputError, ParseError, InvalidParameter, DomainError, GroupoidMismatch) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
