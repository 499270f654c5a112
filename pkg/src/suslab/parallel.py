"""Replicate fan-out over worker processes with results in task order."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_WORKERS = "SUSLAB_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        workers = int(os.environ.get(ENV_WORKERS, "1") or 1)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


def run_tasks(fn, tasks, workers: int | None = None) -> list:
    """``[fn(t) for t in tasks]``, possibly spread over processes.

    The output order is the task order whatever the worker count, so any
    reduction done by the caller is reproducible.
    """
    tasks = list(tasks)
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))
