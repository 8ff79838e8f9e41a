"""Bounded thread parallelism for independent quadrature evaluations.

The environment variable SECULAR3BP_THREADS caps the worker count; the
default (unset, empty or invalid) is serial execution.  Results are
always collected in input order, so the reduction is deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("SECULAR3BP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def indexed_map(fn, items):
    """Map fn over items, parallel up to thread_cap(), preserving order."""
    items = list(items)
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(cap, len(items))) as pool:
        return list(pool.map(fn, items))
