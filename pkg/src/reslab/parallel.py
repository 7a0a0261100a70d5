"""Thread-pool helper for the embarrassingly parallel loops.

Workers only read immutable inputs and results are merged in submission
order, so output is identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads: int = 0) -> int:
    """0 means: RESLAB_THREADS env var if set, else hardware parallelism."""
    if threads and threads > 0:
        return threads
    env = os.environ.get("RESLAB_THREADS", "")
    if env.strip().isdigit() and int(env) > 0:
        return int(env)
    return os.cpu_count() or 1


def thread_map(fn, items, threads: int = 0) -> list:
    n = resolve_threads(threads)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
