"""Worker-count resolution and ordered chunk mapping."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "CUTAPPROX_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else ``CUTAPPROX_THREADS``, 0 meaning auto."""
    if workers is None:
        raw = os.environ.get(ENV_THREADS, "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def ordered_map(fn, items, workers: int | None = None) -> list:
    """Apply ``fn`` to ``items``; results are returned in input order."""
    items = list(items)
    n = resolve_workers(workers)
    if n == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
