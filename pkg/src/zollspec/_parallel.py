"""Thread fan-out for independent work items.

Results land in a list indexed like the input, so output artifacts do not
depend on the thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(requested=None):
    """Resolve a thread count: explicit argument, else ZOLLSPEC_THREADS, else 1."""
    if requested is not None and requested > 0:
        return requested
    env = os.environ.get("ZOLLSPEC_THREADS", "")
    try:
        n = int(env)
        return n if n > 0 else 1
    except ValueError:
        return 1


def parallel_map(fn, items, threads=1):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
