"""Optional thread fan-out, capped by the NEUROCHAN_THREADS environment variable.

Work items must be pure; results always come back in input order, so the
outcome is identical whether or not threads are used.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "NEUROCHAN_THREADS"


def thread_cap() -> int:
    raw = os.environ.get(ENV_VAR, "")
    try:
        cap = int(raw)
    except ValueError:
        return 1
    return max(cap, 1)


def parallel_map(fn, items) -> list:
    items = list(items)
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(cap, len(items))) as pool:
        return list(pool.map(fn, items))
