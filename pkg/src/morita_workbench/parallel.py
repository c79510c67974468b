"""Ordered fan-out of per-sample work, capped by MORITA_WORKBENCH_THREADS."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ENV_VAR = "MORITA_WORKBENCH_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sample_rngs(seed: int, samples: int) -> list[np.random.Generator]:
    """One independent generator per sample, so results do not depend on scheduling."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(samples)]


def ordered_map(fn, items) -> list:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
