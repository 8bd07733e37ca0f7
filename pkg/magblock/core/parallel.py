# magblock/core/parallel.py

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from magblock.core.errors import ConfigError

logger = logging.getLogger(__name__)

WORKERS_ENV = "MAGBLOCK_WORKERS"

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(configured: Optional[int] = None) -> int:
    """Worker count: MAGBLOCK_WORKERS wins over the configured value; default 1."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is not None and raw.strip():
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got '{raw}'.")
    else:
        workers = configured if configured is not None else 1
    if workers < 1:
        raise ConfigError(f"Worker count must be at least 1, got {workers}.")
    return workers


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Applies fn to every item, concurrently when workers > 1. Results come back
    in input order whatever the completion order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("Evaluating %d points on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
