"""Deterministic fan-out of independent work chunks to worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def map_chunks(func: Callable[[T], R], chunks: Sequence[T], workers: int = 1) -> list[R]:
    """Apply `func` to every chunk; results come back in chunk order.

    `func` must be a module-level callable so it can be pickled.  With
    ``workers <= 1`` everything runs in-process.
    """
    if workers <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, chunks))


class BudgetExceeded(RuntimeError):
    """An exact computation would exceed its configured enumeration budget."""
