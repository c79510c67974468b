"""Residual of the anti-Poisson check as a function of the finite-difference steps.

    python3 scripts/fd_step_sweep.py --example aff1-on-line --samples 10
"""
from __future__ import annotations

import argparse

from morita_workbench.poisson import FDConfig, MomentumMap, check_anti_poisson, get_example


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--example", default="aff1-on-line")
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ex = get_example(args.example)
    print(f"{'step':>8} {'nested':>8} {'residual':>12}")
    for step in (1e-3, 1e-4, 1e-5, 1e-6):
        for nested in (1e-2, 1e-3, 1e-4):
            fd = FDConfig(step=step, nested_step=nested)
            rep = check_anti_poisson(MomentumMap(ex.left, fd), args.samples, seed=args.seed, fd=fd)
            print(f"{step:8.0e} {nested:8.0e} {rep.max_residual:12.3e}")


if __name__ == "__main__":
    main()
