"""Check reports, deterministic JSON serialisation and a text rendering that parses back."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from .errors import ParseError

SCHEMA_VERSION = 1


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_residual: float
    tol: float
    samples: int
    residuals: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "max_residual": _num(self.max_residual),
            "tol": _num(self.tol),
            "samples": int(self.samples),
            "residuals": {k: _num(v) for k, v in self.residuals.items()},
            "details": jsonable(self.details),
            "notes": list(self.notes),
        }


def _num(v):
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return v


def jsonable(obj):
    """Convert numpy scalars/arrays and tuples into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def document(command: str, sections: dict, passed: bool, exit_code: int, config: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": jsonable(config or {}),
        "pass": bool(passed),
        "exit_code": int(exit_code),
        "sections": jsonable(sections),
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def merge(docs: list[dict], sources: list[str] | None = None) -> dict:
    if not docs:
        raise ParseError("nothing to merge")
    sources = sources or [f"report{i}" for i in range(len(docs))]
    sections = {}
    for src, doc in zip(sources, docs):
        if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
            raise ParseError(f"{src}: not a schema_version {SCHEMA_VERSION} report")
        key = src
        i = 1
        while key in sections:
            i += 1
            key = f"{src}#{i}"
        sections[key] = doc
    passed = all(d.get("pass", False) for d in docs)
    return document("report", sections, passed, 0 if passed else 4)


# Text rendering: one "path = json-value" line per leaf, sorted, so that the
# rendering carries exactly the JSON content and can be parsed back.

def _leaves(obj, prefix=""):
    if isinstance(obj, dict) and obj:
        for k in sorted(obj):
            yield from _leaves(obj[k], f"{prefix}.{_key(k)}" if prefix else _key(k))
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _leaves(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


_BARE_KEY = re.compile(r"[A-Za-z0-9_*/:+-]+")


def _key(k: str) -> str:
    return k if _BARE_KEY.fullmatch(k) else json.dumps(k)


def render_text(doc: dict) -> str:
    lines = [f"{path} = {json.dumps(value, sort_keys=True)}" for path, value in _leaves(doc)]
    return "\n".join(lines) + "\n"


def _split_path(path: str):
    parts, i = [], 0
    while i < len(path):
        c = path[i]
        if c == ".":
            i += 1
        elif c == "[":
            j = path.index("]", i)
            parts.append(int(path[i + 1: j]))
            i = j + 1
        elif c == '"':
            dec = json.JSONDecoder()
            key, i = dec.raw_decode(path, i)
            parts.append(key)
        else:
            j = i
            while j < len(path) and path[j] not in ".[":
                j += 1
            parts.append(path[i:j])
            i = j
    return parts


def _split_line(line: str):
    """Split at the first " = " that is not inside a quoted key."""
    quoted = escaped = False
    for i, c in enumerate(line):
        if quoted:
            if escaped:
                escaped = False
            elif c == "\\":
                escaped = True
            elif c == '"':
                quoted = False
        elif c == '"':
            quoted = True
        elif line.startswith(" = ", i):
            return line[:i], line[i + 3:]
    raise ParseError(f"not a report line: {line!r}")


def parse_text(text: str) -> dict:
    """Inverse of render_text; lines starting with '#' are comments."""
    root: dict = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        path, value = _split_line(line)
        parts = _split_path(path)
        cur = root
        for a, b in zip(parts, parts[1:]):
            nxt = [] if isinstance(b, int) else {}
            if isinstance(a, int):
                while len(cur) <= a:
                    cur.append(None)
                if cur[a] is None:
                    cur[a] = nxt
                cur = cur[a]
            else:
                cur = cur.setdefault(a, nxt)
        last = parts[-1]
        val = json.loads(value)
        if isinstance(last, int):
            while len(cur) <= last:
                cur.append(None)
            cur[last] = val
        else:
            cur[last] = val
    return root


def summary_table(doc: dict) -> str:
    """Human-oriented residual table for check reports in ``doc['sections']``."""
    rows = []
    for name, sec in sorted(doc.get("sections", {}).items()):
        if isinstance(sec, dict) and "max_residual" in sec:
            mark = "PASS" if sec.get("pass") else "FAIL"
            res = sec["max_residual"]
            res = f"{res:.4g}" if isinstance(res, float) else str(res)
            rows.append(f"{mark}  {name:<28} residual {res:<12} tol {sec['tol']:.1e}")
    return "\n".join(rows) + ("\n" if rows else "")
