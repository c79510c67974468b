"""Block counts, oracle verdicts and bimodule verification over the finite corpus.

    python3 scripts/finite_oracle_table.py [--corpus corpus/finite]
"""
from __future__ import annotations

import argparse
import itertools
from pathlib import Path

from morita_workbench import (block_count, check_equivalence, morita_oracle, validate_bibundle, validate_groupoid,
                              verify_pre_equivalence)
from morita_workbench.errors import WorkbenchError

GROUPOIDS = ("pair2", "pair3", "pair5", "unit1", "unit2", "z2", "z3", "s3", "z2swap")
BIBUNDLES = (("pair2", "pair3", "rect_2x3"), ("z2", "z2", "z2_self"), ("z2swap", "unit1", "z2swap_to_unit1"),
             ("pair2", "unit2", "pair2_unit2_left"))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default=str(Path(__file__).resolve().parents[1] / "corpus" / "finite"))
    args = ap.parse_args()
    root = Path(args.corpus)
    gs = {name: validate_groupoid(root / f"{name}.json") for name in GROUPOIDS}
    print("block counts:", ", ".join(f"{n}={block_count(G)}" for n, G in gs.items()))
    print("\noracle-equivalent pairs:")
    for a, b in itertools.combinations(gs, 2):
        if morita_oracle(gs[a], gs[b]):
            print(f"  {a} ~ {b}")
    print("\nbibundles:")
    for g, h, m in BIBUNDLES:
        B = validate_bibundle(gs[g], gs[h], root / f"{m}.json")
        eq = check_equivalence(B)
        if not eq.passed:
            print(f"  {m}: not an equivalence ({', '.join(c.name for c in eq.failing())})")
            continue
        try:
            rep = verify_pre_equivalence(gs[g], gs[h], B)
        except WorkbenchError as exc:
            print(f"  {m}: {exc}")
            continue
        print(f"  {m}: bimodule {'passes' if rep.passed else 'fails'}, oracle {morita_oracle(gs[g], gs[h])}")


if __name__ == "__main__":
    main()
