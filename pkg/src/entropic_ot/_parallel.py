"""Order-preserving work pool for independent replicates."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


class ReplicateError(RuntimeError):
    """A replicate failed; ``index`` identifies it and ``__cause__`` holds the original error."""

    def __init__(self, label, index, cause):
        super().__init__(f"{label} {index} failed: {cause}")
        self.index = index


def default_threads() -> int:
    raw = os.environ.get("ENTROPIC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pool_map(fn, jobs, threads=None, label="replicate", as_array=True):
    """Apply ``fn`` to every job and return results in job order.

    Results come back as a float array, or as a list when ``as_array`` is false.

    Runs serially unless ``threads`` (or ENTROPIC_THREADS) is above one.
    Results never depend on the thread count.
    """
    threads = default_threads() if threads is None else max(1, int(threads))

    def run(item):
        i, job = item
        try:
            return fn(job)
        except Exception as exc:
            raise ReplicateError(label, i, exc) from exc

    items = list(enumerate(jobs))
    if threads == 1 or len(items) <= 1:
        out = [run(it) for it in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(run, items))
    return np.asarray(out, dtype=np.float64) if as_array else out
