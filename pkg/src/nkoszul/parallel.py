"""Deterministic helper for optionally threaded per-degree checks.

Results are assembled in input order, so reports do not depend on the
worker count.  The KOSZUL_THREADS environment variable caps parallelism at
the CLI level; library callers pass ``threads`` explicitly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("KOSZUL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
