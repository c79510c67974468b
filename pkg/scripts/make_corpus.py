"""Write the finite example corpus (groupoids, bibundles and bad inputs) as JSON.

    python3 scripts/make_corpus.py [--out corpus/finite]
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from morita_workbench import (bibundle_to_dict, groupoid_to_dict, make_builtin, rectangle_bibundle,
                              translation_bibundle)
from morita_workbench.bibundle import Bibundle, left_translation_bibundle
from morita_workbench.groupoid import action_groupoid, cyclic_table


def swap_action_groupoid():
    """Z_2 swapping two points: free and transitive, so equivalent to the trivial group."""
    return action_groupoid(cyclic_table(2), [[0, 1], [1, 0]], name="z2-swap")


def orbit_bibundle(G, point):
    """G acting on its objects, the one-object trivial group acting trivially on the right."""
    n = G.n_objects
    L = np.full((G.n_arrows, n), -1)
    L[np.arange(G.n_arrows), G.src] = G.tgt
    R = np.full((n, point.n_arrows), -1)
    R[np.arange(n), 0] = np.arange(n)
    return Bibundle(G, point, np.arange(n), np.zeros(n, dtype=np.int64), L, R, name=f"orbit:{G.name}")


def build(out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, payload):
        path = out / name
        text = payload if isinstance(payload, str) else json.dumps(payload, indent=1, sort_keys=True) + "\n"
        path.write_text(text)
        written.append(path)

    groupoids = {
        "pair2": make_builtin("pair:2"),
        "pair3": make_builtin("pair:3"),
        "pair5": make_builtin("pair:5"),
        "unit1": make_builtin("unit:1"),
        "unit2": make_builtin("unit:2"),
        "z2": make_builtin("cyclic:2"),
        "z3": make_builtin("cyclic:3"),
        "s3": make_builtin("s3"),
        "z2swap": swap_action_groupoid(),
    }
    for name, G in groupoids.items():
        put(f"{name}.json", groupoid_to_dict(G))

    put("rect_2x3.json", bibundle_to_dict(rectangle_bibundle(groupoids["pair2"], groupoids["pair3"])))
    put("z2_self.json", bibundle_to_dict(translation_bibundle(groupoids["z2"])))
    put("z2swap_to_unit1.json", bibundle_to_dict(orbit_bibundle(groupoids["z2swap"], groupoids["unit1"])))
    # validates as a bibundle, but the right action is not transitive on tau-fibers
    put("pair2_unit2_left.json",
        bibundle_to_dict(left_translation_bibundle(groupoids["pair2"], groupoids["unit2"])))

    bad = groupoid_to_dict(groupoids["pair2"])
    bad["compose"] = [[x, y, (3 if [x, y] == [1, 2] else xy)] for x, y, xy in bad["compose"]]
    bad["name"] = "pair2-bad-compose"
    put("bad_compose.json", bad)
    hole = groupoid_to_dict(groupoids["z3"])
    hole["compose"] = hole["compose"][1:]
    hole["name"] = "z3-missing-compose"
    put("missing_compose.json", hole)
    put("malformed.json", '{"objects": 2, "arrows": [\n')
    put("missing_fields.json", {"objects": 1, "arrows": []})
    return written


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "corpus" / "finite"))
    args = ap.parse_args()
    for path in build(Path(args.out)):
        print(path)


if __name__ == "__main__":
    main()
