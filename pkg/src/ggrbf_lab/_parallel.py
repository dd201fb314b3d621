"""Order-preserving fan-out capped by ``GGRBF_LAB_THREADS``."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    try:
        return max(1, int(os.environ.get("GGRBF_LAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """``list(map(fn, items))``, possibly threaded; output order never changes."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
