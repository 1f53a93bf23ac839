"""Deterministic parallel batch execution.

Tasks are pure functions of their arguments, so the pool is interchangeable
with a sequential loop: results come back in task order and no output byte
may depend on scheduling.  Workers receive picklable task tuples and do
their own file I/O on disjoint paths.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional

WORKERS_ENV_VAR = "DEGRAFORGE_WORKERS"


def resolve_workers(workers: Optional[int]) -> int:
    """Explicit count > DEGRAFORGE_WORKERS env var > auto (cpu count); 0 = auto."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        workers = int(env) if env else 0
    if workers < 0:
        raise ValueError(f"worker count must be >= 0, got {workers}")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def run_tasks(worker: Callable, tasks: Iterable, workers: Optional[int] = None) -> List:
    """Run worker(task) for every task, preserving task order in the results."""
    tasks = list(tasks)
    count = resolve_workers(workers)
    if count == 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(count, len(tasks))) as pool:
        return list(pool.map(worker, tasks))
