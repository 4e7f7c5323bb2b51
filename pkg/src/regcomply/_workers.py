import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "REGCOMPLY_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Number of workers: the explicit request or the CPU count, capped by ``REGCOMPLY_THREADS``."""
    if requested is not None and requested < 1:
        raise ValueError(f"worker count must be >= 1, got {requested}")
    n = int(requested) if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {cap}")
        n = min(n, cap) if requested is not None else cap
    return n


def ordered_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]`` evaluated on a thread pool; output order follows input order."""
    items = list(items)
    n = min(worker_count(workers), max(len(items), 1))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
